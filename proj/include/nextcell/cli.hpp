// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nextcell/online.hpp"
#include "nextcell/predictor.hpp"
#include "nextcell/scenario.hpp"

namespace nextcell::cli {

/// Exit codes: 0 success, 1 validation error, 2 runtime/convergence error.
enum ExitCode : int { kOk = 0, kValidationError = 1, kRuntimeError = 2 };

struct ExperimentConfig {
    ScenarioConfig scenario;
    std::string scenario_path;  // informational (may be "<inline>")
    std::size_t samples_per_path = 500;
    double train_fraction = 0.9;
    std::vector<double> ratio_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    BankConfig bank;
    OnlineConfig online;
    // Handover-history baseline.
    std::size_t history_length = 8;
    std::size_t baseline_samples = 2000;

    static ExperimentConfig from_json_file(const std::string& path);
    void validate() const;
};

/// Simulates samples_per_path traversals on every path and writes the
/// labeled dataset (plus the radio map for radiomap_demo scenarios).
int cmd_generate(const ExperimentConfig& config);

/// Sweeps the ratio grid: per ratio, trains a bank on the train split and
/// evaluates per-label recall on the test split.
int cmd_offline(const ExperimentConfig& config);

/// Handover-history baseline sweep: k most recent handovers, k = 2..history
/// length (sample length ratio k/length).
int cmd_baseline(const ExperimentConfig& config);

/// Real-time feedback run; writes the prediction log and accuracy series.
int cmd_online(const ExperimentConfig& config);

/// Prints a summary of a saved classifier bank.
int cmd_inspect_model(const std::string& bank_path);

/// Full argument parsing + dispatch; returns the process exit code.
int run(int argc, char** argv);

/// Splits a dataset 90/10 (train_fraction) stratified by (path, label).
void split_dataset(const std::vector<LabeledTraversal>& data, double train_fraction,
                   std::uint64_t seed, std::vector<LabeledTraversal>& train,
                   std::vector<LabeledTraversal>& test);

/// Simulates the per-path balanced dataset for a built scenario.
std::vector<LabeledTraversal> generate_dataset(const BuiltScenario& scenario,
                                               const ScenarioConfig& config,
                                               std::size_t samples_per_path);

} // namespace nextcell::cli
