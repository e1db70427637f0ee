// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

// Per-ISA kernel entry points. Only the files compiled for the matching
// architecture define the vector variants; the dispatcher checks CPU support
// before installing them.
namespace nextcell::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double sqdist_scalar(const double* a, const double* b, std::size_t n);
double rotate_and_sum_scalar(double* c, double* s, const double* dc, const double* ds, std::size_t n);

#if defined(__x86_64__)
double dot_avx2(const double* a, const double* b, std::size_t n);
double sqdist_avx2(const double* a, const double* b, std::size_t n);
double rotate_and_sum_avx2(double* c, double* s, const double* dc, const double* ds, std::size_t n);
#endif

#if defined(__aarch64__)
double dot_neon(const double* a, const double* b, std::size_t n);
double sqdist_neon(const double* a, const double* b, std::size_t n);
double rotate_and_sum_neon(double* c, double* s, const double* dc, const double* ds, std::size_t n);
#endif

} // namespace nextcell::simd::detail
