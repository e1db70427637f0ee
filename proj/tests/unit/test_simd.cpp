// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nextcell/rng.hpp"
#include "nextcell/simd.hpp"

using namespace nextcell;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * (2.0 * u01(rng) - 1.0);
    return v;
}

/// Reference implementations the vector paths are checked against.
double ref_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double ref_sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return acc;
}

} // namespace

TEST_CASE("scalar kernels match the reference formulas") {
    simd::set_isa(simd::Isa::scalar);
    Rng rng = make_rng(42);
    for (std::size_t n : {1u, 3u, 7u, 100u}) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        CHECK(simd::dot(a.data(), b.data(), n) == doctest::Approx(ref_dot(a, b)).epsilon(1e-14));
        CHECK(simd::sqdist(a.data(), b.data(), n) ==
              doctest::Approx(ref_sqdist(a, b)).epsilon(1e-14));
    }
    simd::set_isa(simd::active_isa());
}

TEST_CASE("vector backends agree with the scalar reference") {
    const simd::Isa best = [] {
        simd::set_isa(simd::Isa::scalar);
        for (simd::Isa isa : {simd::Isa::avx2, simd::Isa::neon})
            if (simd::isa_supported(isa)) return isa;
        return simd::Isa::scalar;
    }();
    if (best == simd::Isa::scalar) return;  // nothing to compare on this CPU

    Rng rng = make_rng(7);
    for (std::size_t n : {1u, 2u, 4u, 5u, 8u, 13u, 100u, 1000u}) {
        const auto a = random_vec(rng, n, 10.0);
        const auto b = random_vec(rng, n, 10.0);

        simd::set_isa(simd::Isa::scalar);
        const double dot_ref = simd::dot(a.data(), b.data(), n);
        const double sq_ref = simd::sqdist(a.data(), b.data(), n);
        auto c1 = random_vec(rng, n);
        auto s1 = random_vec(rng, n);
        auto c2 = c1;
        auto s2 = s1;
        const auto dc = random_vec(rng, n);
        const auto ds = random_vec(rng, n);
        const double rot_ref = simd::rotate_and_sum(c1.data(), s1.data(), dc.data(), ds.data(), n);

        simd::set_isa(best);
        CHECK(simd::dot(a.data(), b.data(), n) == doctest::Approx(dot_ref).epsilon(1e-12));
        CHECK(simd::sqdist(a.data(), b.data(), n) == doctest::Approx(sq_ref).epsilon(1e-12));
        const double rot = simd::rotate_and_sum(c2.data(), s2.data(), dc.data(), ds.data(), n);
        CHECK(rot == doctest::Approx(rot_ref).epsilon(1e-12));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(c2[i] == doctest::Approx(c1[i]).epsilon(1e-12));
            CHECK(s2[i] == doctest::Approx(s1[i]).epsilon(1e-12));
        }
    }
    simd::set_isa(best);
}

TEST_CASE("rotate_and_sum advances phases exactly like cos/sin recurrences") {
    simd::set_isa(simd::active_isa());
    const std::size_t n = 9;
    std::vector<double> phase(n), step(n), c(n), s(n), dc(n), ds(n);
    Rng rng = make_rng(3);
    for (std::size_t i = 0; i < n; ++i) {
        phase[i] = uniform_real(rng, -3.0, 3.0);
        step[i] = uniform_real(rng, -0.5, 0.5);
        c[i] = std::cos(phase[i]);
        s[i] = std::sin(phase[i]);
        dc[i] = std::cos(step[i]);
        ds[i] = std::sin(step[i]);
    }
    for (int k = 1; k <= 50; ++k) {
        const double sum = simd::rotate_and_sum(c.data(), s.data(), dc.data(), ds.data(), n);
        double expect = 0.0;
        for (std::size_t i = 0; i < n; ++i) expect += std::cos(phase[i] + k * step[i]);
        CHECK(sum == doctest::Approx(expect).epsilon(1e-10));
    }
}
