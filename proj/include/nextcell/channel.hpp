// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "nextcell/rng.hpp"
#include "nextcell/scenario.hpp"

namespace nextcell {

/// Speed of light used for Doppler conversion (m/s).
inline constexpr double kSpeedOfLight = 2.998e8;

/// Rayleigh fast-fading generator: a bank of equal-power oscillators with
/// near-uniform arrival angles and random phases, advanced by phase
/// recurrence one sample at a time. The squared envelope has unit mean and
/// its complex autocorrelation follows J0(2*pi*f_d*tau).
class FadingProcess {
  public:
    static constexpr std::size_t kDefaultOscillators = 64;

    FadingProcess(double speed_mps, double carrier_hz, double sample_period, Rng& rng,
                  std::size_t oscillators = kDefaultOscillators);

    /// Process that always reports |h|^2 = 1 (fading disabled).
    static FadingProcess unit(double sample_period);

    double doppler_hz() const { return doppler_hz_; }
    double sample_period() const { return sample_period_; }
    std::size_t oscillators() const { return cos_i_.size(); }

    /// Complex envelope h(t_k); advances the process by one sample.
    std::complex<double> next_envelope();
    /// Squared envelope |h(t_k)|^2; advances the process by one sample.
    double next();

  private:
    FadingProcess() = default;

    double doppler_hz_ = 0.0;
    double sample_period_ = 0.0;
    bool unit_ = false;
    // Oscillator phase state (cos/sin) and per-step rotation for the in-phase
    // and quadrature banks.
    std::vector<double> cos_i_, sin_i_, step_cos_i_, step_sin_i_;
    std::vector<double> cos_q_, sin_q_, step_cos_q_, step_sin_q_;
};

/// Channel-gain sequence along one traversal.
struct CsiTrace {
    std::vector<double> gains;  // linear power gain per sample
    double sample_period = 0.0;
    double t_in = 0.0;
    std::size_t clamped_samples = 0;  // samples where the BS distance hit the clamp

    std::size_t size() const { return gains.size(); }
};

FadingProcess make_fading(double speed_mps, double carrier_hz, double sample_period, Rng& rng,
                          std::size_t oscillators = FadingProcess::kDefaultOscillators);

/// Distance power law d^{-alpha(position)}; distances below 1 m are clamped
/// to 1 m and reported through `clamped`.
double slow_fading_pathloss(Vec2 position, Vec2 bs_position, const AlphaMap& alpha_map,
                            bool* clamped = nullptr);

/// Trace from the analytic path-loss law of the topology.
CsiTrace generate_trace(const Trajectory& trajectory, const CellTopology& topology,
                        FadingProcess& fading);
/// Trace from an interpolated radio map (throws when the trajectory leaves
/// the map).
CsiTrace generate_trace(const Trajectory& trajectory, const RadioMap& map, FadingProcess& fading);

/// Debug dump: CSV with columns t,gain,x,y.
void write_trace_csv(const CsiTrace& trace, const Trajectory& trajectory, const std::string& path);

} // namespace nextcell
