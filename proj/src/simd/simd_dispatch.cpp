// SPDX-License-Identifier: Apache-2.0
#include "nextcell/simd.hpp"

#include <atomic>
#include <string>

#include "nextcell/error.hpp"
#include "simd_kernels.hpp"

namespace nextcell::simd {

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using SqdistFn = double (*)(const double*, const double*, std::size_t);
using RotateFn = double (*)(double*, double*, const double*, const double*, std::size_t);

struct Table {
    Isa isa;
    DotFn dot;
    SqdistFn sqdist;
    RotateFn rotate_and_sum;
};

constexpr Table kScalar{Isa::scalar, detail::dot_scalar, detail::sqdist_scalar,
                        detail::rotate_and_sum_scalar};

#if defined(__x86_64__)
constexpr Table kAvx2{Isa::avx2, detail::dot_avx2, detail::sqdist_avx2,
                      detail::rotate_and_sum_avx2};
#endif
#if defined(__aarch64__)
constexpr Table kNeon{Isa::neon, detail::dot_neon, detail::sqdist_neon,
                      detail::rotate_and_sum_neon};
#endif

const Table* detect_best() {
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#elif defined(__aarch64__)
    return &kNeon;
#endif
    return &kScalar;
}

std::atomic<const Table*> g_table{nullptr};

const Table* table() {
    const Table* t = g_table.load(std::memory_order_acquire);
    if (!t) {
        t = detect_best();
        g_table.store(t, std::memory_order_release);
    }
    return t;
}

} // namespace

Isa active_isa() { return table()->isa; }

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(__x86_64__)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

void set_isa(Isa isa) {
    if (!isa_supported(isa))
        throw ConfigError("instruction set not supported on this CPU: " + std::string(isa_name(isa)));
    switch (isa) {
        case Isa::scalar: g_table.store(&kScalar, std::memory_order_release); break;
        case Isa::avx2:
#if defined(__x86_64__)
            g_table.store(&kAvx2, std::memory_order_release);
#endif
            break;
        case Isa::neon:
#if defined(__aarch64__)
            g_table.store(&kNeon, std::memory_order_release);
#endif
            break;
    }
}

double dot(const double* a, const double* b, std::size_t n) { return table()->dot(a, b, n); }

double sqdist(const double* a, const double* b, std::size_t n) { return table()->sqdist(a, b, n); }

double rotate_and_sum(double* c, double* s, const double* dc, const double* ds, std::size_t n) {
    return table()->rotate_and_sum(c, s, dc, ds, n);
}

} // namespace nextcell::simd
