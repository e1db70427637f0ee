// SPDX-License-Identifier: Apache-2.0
#include "simd_kernels.hpp"

#if defined(__x86_64__)

#include <immintrin.h>

namespace nextcell::simd::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

} // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sqdist_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d, d, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double rotate_and_sum_avx2(double* c, double* s, const double* dc, const double* ds, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vc = _mm256_loadu_pd(c + i);
        const __m256d vs = _mm256_loadu_pd(s + i);
        const __m256d vdc = _mm256_loadu_pd(dc + i);
        const __m256d vds = _mm256_loadu_pd(ds + i);
        const __m256d cn = _mm256_fmsub_pd(vc, vdc, _mm256_mul_pd(vs, vds));
        const __m256d sn = _mm256_fmadd_pd(vc, vds, _mm256_mul_pd(vs, vdc));
        _mm256_storeu_pd(c + i, cn);
        _mm256_storeu_pd(s + i, sn);
        acc = _mm256_add_pd(acc, cn);
    }
    double out = hsum(acc);
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

#endif // __x86_64__
