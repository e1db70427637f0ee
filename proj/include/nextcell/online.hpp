// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nextcell/predictor.hpp"
#include "nextcell/scenario.hpp"

namespace nextcell {

struct OnlineConfig {
    double arrival_rate = 1.0;       // lambda, users/s
    double prediction_ratio = 0.6;   // r_p: fraction of the traversal observed at t_p
    std::size_t retrain_every = 10;  // completions per previous cell between retrains
    double horizon = 3600.0;         // simulated seconds
    std::uint64_t seed = 1;
    double v_min = 5.0;
    double v_max = 40.0;
    double carrier_hz = 2.0e9;
    double sample_period = 0.02;
    std::size_t accuracy_window = 50;  // predictions per label in the rolling window
    BankConfig bank;                   // grids, L, tolerance for the retrained classifiers
    std::size_t grid_subset_cap = 512;

    /// Disables feedback learning entirely.
    static constexpr std::size_t kNeverRetrain = std::numeric_limits<std::size_t>::max();

    void validate() const;
};

/// One prediction event. `predicted` is -1 while the previous cell's
/// classifier is still in warm-up (recorded as an abstention).
struct PredictionRecord {
    std::size_t user_id = 0;
    double t_in = 0.0;
    double t_p = 0.0;
    double t_out = 0.0;
    CellId previous_cell = -1;
    CellId predicted = -1;
    CellId truth = -1;
    std::uint64_t bank_version = 0;
    PathId path_id = -1;
};

struct RetrainEvent {
    std::uint64_t version = 0;
    double time = 0.0;
    CellId previous_cell = -1;
    std::size_t pool_size = 0;
    double chosen_C = 0.0;
    double chosen_gamma = 0.0;
};

struct OnlineLog {
    std::vector<PredictionRecord> records;  // in t_p order
    std::vector<RetrainEvent> retrains;     // in time order
    std::vector<CellId> labels;             // label alphabet (neighbor ids)
    std::vector<PathId> path_ids;           // path alphabet of the topology
    double horizon = 0.0;

    std::size_t arrivals() const { return records.size(); }
    /// First time every path of the topology had at least `per_path`
    /// completed traversals (infinity when the horizon ends first).
    double completion_time(std::size_t per_path) const;
};

/// Runs the real-time scheme: Poisson arrivals, prediction at t_p from the
/// causal trace prefix, completed traversals pooled per previous cell, and a
/// retrain (atomically replacing that cell's classifier) after every
/// `retrain_every` completions. Grid search runs on retrain numbers that are
/// powers of two; other retrains reuse the cached (C, gamma). Slow fading
/// comes from the topology's path-loss law, or from the radio map when given.
OnlineLog run_online(const CellTopology& topology, const OnlineConfig& config,
                     const RadioMap* radio_map = nullptr);

struct SeriesPoint {
    double time = 0.0;
    CellId label = -1;
    double recall = 0.0;
};

/// Sliding-window recall per label over prediction events (window = number of
/// events of that label), indexed by prediction time.
std::vector<SeriesPoint> accuracy_series(const OnlineLog& log, std::size_t window);

void write_log_csv(const OnlineLog& log, const std::string& path);
/// Wide CSV: one row per prediction event, one recall column per label
/// (carry-forward, empty until a label has seen an event).
void write_series_csv(const OnlineLog& log, std::size_t window, const std::string& path);

} // namespace nextcell
