// SPDX-License-Identifier: Apache-2.0
#include "simd_kernels.hpp"

namespace nextcell::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double rotate_and_sum_scalar(double* c, double* s, const double* dc, const double* ds, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cn = c[i] * dc[i] - s[i] * ds[i];
        const double sn = c[i] * ds[i] + s[i] * dc[i];
        c[i] = cn;
        s[i] = sn;
        acc += cn;
    }
    return acc;
}

} // namespace nextcell::simd::detail
