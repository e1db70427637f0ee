// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "nextcell/channel.hpp"
#include "nextcell/error.hpp"
#include "nextcell/scenario.hpp"

using namespace nextcell;

TEST_CASE("doppler shift from speed and carrier") {
    Rng rng = make_rng(1);
    const FadingProcess p = make_fading(20.0, 2.0e9, 0.001, rng);
    CHECK(p.doppler_hz() == doctest::Approx(20.0 * 2.0e9 / 2.998e8).epsilon(1e-12));
    CHECK(p.doppler_hz() == doctest::Approx(133.42).epsilon(1e-4));
}

TEST_CASE("zero speed freezes the fading process") {
    Rng rng = make_rng(2);
    FadingProcess p = make_fading(0.0, 2.0e9, 0.02, rng);
    const double first = p.next();
    for (int i = 0; i < 100; ++i) CHECK(p.next() == doctest::Approx(first).epsilon(1e-12));
}

TEST_CASE("fading rejects bad arguments") {
    Rng rng = make_rng(3);
    CHECK_THROWS_AS(make_fading(-1.0, 2e9, 0.02, rng), ConfigError);
    CHECK_THROWS_AS(make_fading(10.0, 0.0, 0.02, rng), ConfigError);
    CHECK_THROWS_AS(make_fading(10.0, 2e9, 0.0, rng), ConfigError);
    CHECK_THROWS_AS(make_fading(10.0, 2e9, 0.02, rng, 8), ConfigError);  // below 16 oscillators
}

TEST_CASE("squared envelope has unit mean") {
    Rng rng = make_rng(1001);
    FadingProcess p = make_fading(20.0, 2.0e9, 0.001, rng);
    double sum = 0.0;
    const std::size_t n = 1000000;
    for (std::size_t i = 0; i < n; ++i) sum += p.next();
    CHECK(sum / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("squared envelope passes the Exp(1) KS test") {
    // Samples are spaced two Doppler periods apart so the series is
    // effectively independent draws from the marginal.
    Rng rng = make_rng(77);
    const double fd = 50.0;
    const double dt = 2.0 / fd;
    FadingProcess p(fd * kSpeedOfLight / 2.0e9, 2.0e9, dt, rng);
    const std::size_t n = 100000;
    std::vector<double> samples(n);
    for (double& s : samples) s = p.next();
    std::sort(samples.begin(), samples.end());

    double d_stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-samples[i]);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d_stat = std::max({d_stat, cdf - lo, hi - cdf});
    }
    const double critical = 1.628 / std::sqrt(static_cast<double>(n));  // significance 0.01
    CHECK(d_stat < critical);
}

TEST_CASE("complex envelope autocorrelation follows J0") {
    Rng rng = make_rng(5);
    const double fd = 50.0;
    const double dt = 0.001;  // fd * dt = 0.05
    FadingProcess p(fd * kSpeedOfLight / 2.0e9, 2.0e9, dt, rng);
    const std::size_t n = 200000;
    std::vector<std::complex<double>> h(n);
    for (auto& v : h) v = p.next_envelope();

    double power = 0.0;
    for (const auto& v : h) power += std::norm(v);
    power /= static_cast<double>(n);

    double maxdev = 0.0;
    for (std::size_t lag = 0; lag * fd * dt <= 2.0; ++lag) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i + lag < n; ++i) acc += h[i] * std::conj(h[i + lag]);
        const double emp = acc.real() / (static_cast<double>(n - lag) * power);
        const double ref = std::cyl_bessel_j(0.0, 2.0 * M_PI * fd * static_cast<double>(lag) * dt);
        maxdev = std::max(maxdev, std::abs(emp - ref));
    }
    CHECK(maxdev <= 0.02);
}

TEST_CASE("path loss law") {
    AlphaMap amap;
    amap.split = {0, 0};
    amap.values = {2.0, 2.0, 2.0, 2.0};
    bool clamped = false;

    CHECK(slow_fading_pathloss({1, 0}, {0, 0}, amap, &clamped) == doctest::Approx(1.0));
    CHECK(!clamped);
    CHECK(slow_fading_pathloss({10, 0}, {0, 0}, amap, &clamped) == doctest::Approx(0.01));
    CHECK(!clamped);
    // Below 1 m the distance clamps and the clamp is reported.
    const double near = slow_fading_pathloss({0.1, 0}, {0, 0}, amap, &clamped);
    CHECK(near == doctest::Approx(1.0));
    CHECK(clamped);
}

TEST_CASE("trace equals the distance law when fading is disabled") {
    const CellTopology topo = build_manhattan(1);
    const Trajectory traj = trajectory_on_path(topo.paths[0], 15.0, 0.02);
    FadingProcess unit = FadingProcess::unit(0.02);
    const CsiTrace trace = generate_trace(traj, topo, unit);

    REQUIRE(trace.size() == traj.positions.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double slow =
            slow_fading_pathloss(traj.positions[k], topo.bs_position, topo.alpha_map);
        CHECK(trace.gains[k] == doctest::Approx(slow).epsilon(1e-12));
    }
    CHECK(trace.clamped_samples == 0);
}

TEST_CASE("same trajectory and seed give a bit-identical trace") {
    const CellTopology topo = build_manhattan(1);
    const Trajectory traj = trajectory_on_path(topo.paths[2], 22.0, 0.02);
    auto make = [&] {
        Rng rng = make_rng(99);
        FadingProcess fading = make_fading(traj.speed, 2e9, 0.02, rng);
        return generate_trace(traj, topo, fading);
    };
    const CsiTrace a = make();
    const CsiTrace b = make();
    CHECK(a.gains == b.gains);
}

TEST_CASE("smoothed traces from different fading seeds agree") {
    // Monte-Carlo check of slow-fading dominance: after a 100-sample moving
    // average the fading averages out, so two seeds give nearly the same
    // smoothed trace (bound verified for these fixed seeds).
    const CellTopology topo = build_manhattan(1);
    const Trajectory traj = trajectory_on_path(topo.paths[0], 5.0, 0.02);  // 750 samples
    auto make = [&](std::uint64_t seed) {
        Rng rng = make_rng(seed);
        FadingProcess fading = make_fading(traj.speed, 2e9, 0.02, rng);
        return generate_trace(traj, topo, fading);
    };
    const CsiTrace a = make(101);
    const CsiTrace b = make(202);

    const std::size_t w = 100;
    double rms = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k + w <= a.size(); k += w / 2) {
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = k; i < k + w; ++i) {
            ma += a.gains[i];
            mb += b.gains[i];
        }
        const double rel = (ma - mb) / (0.5 * (ma + mb));
        rms += rel * rel;
        ++count;
    }
    rms = std::sqrt(rms / static_cast<double>(count));
    CHECK(rms < 0.10);
}

TEST_CASE("radio-map traces reject out-of-map trajectories") {
    RadioMap map;
    map.origin = {0, 0};
    map.cell_size = 10.0;
    map.rows = map.cols = 2;  // covers [0,10]^2 only
    map.gains = {1, 1, 1, 1};

    const CellTopology topo = build_manhattan(1);
    const Trajectory traj = trajectory_on_path(topo.paths[0], 15.0, 0.02);
    FadingProcess unit = FadingProcess::unit(0.02);
    CHECK_THROWS_AS(generate_trace(traj, map, unit), ConfigError);
}

TEST_CASE("sample-period mismatch is rejected") {
    const CellTopology topo = build_manhattan(1);
    const Trajectory traj = trajectory_on_path(topo.paths[0], 15.0, 0.02);
    FadingProcess unit = FadingProcess::unit(0.01);
    CHECK_THROWS_AS(generate_trace(traj, topo, unit), ConfigError);
}
