// SPDX-License-Identifier: Apache-2.0
#include "simd_kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace nextcell::simd::detail {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sqdist_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc0 = vfmaq_f64(acc0, d0, d0);
        acc1 = vfmaq_f64(acc1, d1, d1);
    }
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double rotate_and_sum_neon(double* c, double* s, const double* dc, const double* ds, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vc = vld1q_f64(c + i);
        const float64x2_t vs = vld1q_f64(s + i);
        const float64x2_t vdc = vld1q_f64(dc + i);
        const float64x2_t vds = vld1q_f64(ds + i);
        const float64x2_t cn = vfmsq_f64(vmulq_f64(vc, vdc), vs, vds);
        const float64x2_t sn = vfmaq_f64(vmulq_f64(vs, vdc), vc, vds);
        vst1q_f64(c + i, cn);
        vst1q_f64(s + i, sn);
        acc = vaddq_f64(acc, cn);
    }
    double out = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double cn = c[i] * dc[i] - s[i] * ds[i];
        const double sn = c[i] * ds[i] + s[i] * dc[i];
        c[i] = cn;
        s[i] = sn;
        out += cn;
    }
    return out;
}

} // namespace nextcell::simd::detail

#endif // __aarch64__
