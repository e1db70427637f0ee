// SPDX-License-Identifier: Apache-2.0
#include "nextcell/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "nextcell/error.hpp"
#include "nextcell/simd.hpp"

namespace nextcell {

FadingProcess::FadingProcess(double speed_mps, double carrier_hz, double sample_period, Rng& rng,
                             std::size_t oscillators) {
    if (speed_mps < 0.0) throw ConfigError("speed must be non-negative");
    if (carrier_hz <= 0.0) throw ConfigError("carrier frequency must be positive");
    if (sample_period <= 0.0) throw ConfigError("sample period must be positive");
    if (oscillators < 16) throw ConfigError("fading needs at least 16 oscillators");

    doppler_hz_ = speed_mps * carrier_hz / kSpeedOfLight;
    sample_period_ = sample_period;

    const std::size_t m = oscillators;
    cos_i_.resize(m);
    sin_i_.resize(m);
    step_cos_i_.resize(m);
    step_sin_i_.resize(m);
    cos_q_.resize(m);
    sin_q_.resize(m);
    step_cos_q_.resize(m);
    step_sin_q_.resize(m);

    // Arrival angles near-uniform over the first quadrant with a common random
    // offset; each oscillator gets an independent phase per branch.
    const double theta = uniform_real(rng, -M_PI, M_PI);
    const double wd = 2.0 * M_PI * doppler_hz_;
    for (std::size_t k = 0; k < m; ++k) {
        const double angle =
            (2.0 * M_PI * static_cast<double>(k + 1) - M_PI + theta) / (4.0 * static_cast<double>(m));
        const double wi = wd * std::cos(angle);
        const double wq = wd * std::sin(angle);
        const double phi = uniform_real(rng, -M_PI, M_PI);
        const double psi = uniform_real(rng, -M_PI, M_PI);
        // State starts one step behind t=0 so the first next() lands on t=0.
        cos_i_[k] = std::cos(phi - wi * sample_period);
        sin_i_[k] = std::sin(phi - wi * sample_period);
        step_cos_i_[k] = std::cos(wi * sample_period);
        step_sin_i_[k] = std::sin(wi * sample_period);
        cos_q_[k] = std::cos(psi - wq * sample_period);
        sin_q_[k] = std::sin(psi - wq * sample_period);
        step_cos_q_[k] = std::cos(wq * sample_period);
        step_sin_q_[k] = std::sin(wq * sample_period);
    }
}

FadingProcess FadingProcess::unit(double sample_period) {
    if (sample_period <= 0.0) throw ConfigError("sample period must be positive");
    FadingProcess p;
    p.sample_period_ = sample_period;
    p.unit_ = true;
    return p;
}

std::complex<double> FadingProcess::next_envelope() {
    if (unit_) return {1.0, 0.0};
    const std::size_t m = cos_i_.size();
    const double sum_i =
        simd::rotate_and_sum(cos_i_.data(), sin_i_.data(), step_cos_i_.data(), step_sin_i_.data(), m);
    const double sum_q =
        simd::rotate_and_sum(cos_q_.data(), sin_q_.data(), step_cos_q_.data(), step_sin_q_.data(), m);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    return {sum_i * norm, sum_q * norm};
}

double FadingProcess::next() {
    if (unit_) return 1.0;
    const std::complex<double> h = next_envelope();
    return std::norm(h);
}

FadingProcess make_fading(double speed_mps, double carrier_hz, double sample_period, Rng& rng,
                          std::size_t oscillators) {
    return FadingProcess(speed_mps, carrier_hz, sample_period, rng, oscillators);
}

double slow_fading_pathloss(Vec2 position, Vec2 bs_position, const AlphaMap& alpha_map,
                            bool* clamped) {
    double d = distance(position, bs_position);
    if (d < 1.0) {
        d = 1.0;
        if (clamped) *clamped = true;
    } else if (clamped) {
        *clamped = false;
    }
    return std::pow(d, -alpha_map.at(position));
}

namespace {

template <typename SlowFn>
CsiTrace generate_trace_impl(const Trajectory& trajectory, FadingProcess& fading, SlowFn&& slow) {
    if (std::abs(fading.sample_period() - trajectory.sample_period) > 1e-12)
        throw ConfigError("fading and trajectory sample periods differ");
    CsiTrace trace;
    trace.sample_period = trajectory.sample_period;
    trace.t_in = trajectory.t_in;
    trace.gains.reserve(trajectory.positions.size());
    for (const Vec2& p : trajectory.positions) {
        bool clamped = false;
        const double s = slow(p, clamped);
        if (clamped) ++trace.clamped_samples;
        trace.gains.push_back(fading.next() * s);
    }
    return trace;
}

} // namespace

CsiTrace generate_trace(const Trajectory& trajectory, const CellTopology& topology,
                        FadingProcess& fading) {
    return generate_trace_impl(trajectory, fading, [&](Vec2 p, bool& clamped) {
        return slow_fading_pathloss(p, topology.bs_position, topology.alpha_map, &clamped);
    });
}

CsiTrace generate_trace(const Trajectory& trajectory, const RadioMap& map, FadingProcess& fading) {
    return generate_trace_impl(trajectory, fading,
                               [&](Vec2 p, bool&) { return map.interpolate(p); });
}

void write_trace_csv(const CsiTrace& trace, const Trajectory& trajectory, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trace file: " + path);
    out << "t,gain,x,y\n";
    char buf[128];
    for (std::size_t k = 0; k < trace.gains.size(); ++k) {
        const Vec2 p = k < trajectory.positions.size() ? trajectory.positions[k] : Vec2{};
        std::snprintf(buf, sizeof buf, "%.9g,%.17g,%.9g,%.9g\n",
                      trace.t_in + static_cast<double>(k) * trace.sample_period, trace.gains[k], p.x,
                      p.y);
        out << buf;
    }
}

} // namespace nextcell
