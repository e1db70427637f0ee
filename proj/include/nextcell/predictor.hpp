// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nextcell/channel.hpp"
#include "nextcell/features.hpp"
#include "nextcell/svm.hpp"

namespace nextcell {

/// One completed pass through the cell with its ground-truth labels.
struct LabeledTraversal {
    CellId previous_cell = -1;
    CellId next_cell = -1;
    CsiTrace trace;
    // Metadata carried for stratified splitting and reporting.
    PathId path_id = -1;
    double speed = 0.0;
};

struct BankConfig {
    std::size_t feature_length = 100;  // L
    std::vector<double> c_grid;        // empty -> default grid
    std::vector<double> gamma_grid;    // empty -> default grid
    std::size_t folds = 5;
    double cv_subset_fraction = 0.5;
    double tol = 1e-3;
    svm::KernelKind kernel = svm::KernelKind::gaussian;
    svm::SolverOptions solver;
    std::uint64_t seed = 1;
    /// Optional cap on the grid-search subset size (0 = uncapped).
    std::size_t cv_subset_cap = 0;
};

/// Classifier for one previous cell: scaler + one-vs-one model, or a constant
/// answer when the training partition only ever saw one next cell.
struct CellClassifier {
    Scaler scaler;
    svm::MultiClassModel model;
    bool constant = false;
    CellId constant_label = -1;
    std::size_t n_samples = 0;
    double chosen_C = 0.0;
    double chosen_gamma = 0.0;
    double cv_accuracy = 0.0;
};

struct ClassifierBank {
    std::size_t feature_length = 0;
    double trained_ratio = 1.0;
    std::map<CellId, CellClassifier> classifiers;

    bool has(CellId previous_cell) const { return classifiers.count(previous_cell) != 0; }
};

/// Trains one classifier per previous cell appearing in the data: truncate at
/// the given ratio, normalize to L, standardize, grid-search (C, gamma) on a
/// stratified random subset, then fit the final pairwise models.
ClassifierBank train_bank(const std::vector<LabeledTraversal>& data, double ratio,
                          const BankConfig& config);

/// Routes the trace through the classifier for its previous cell. Throws
/// UnknownCellError when the bank has no classifier for that cell.
CellId predict(const ClassifierBank& bank, CellId previous_cell, const CsiTrace& trace,
               double ratio);

struct AccuracyReport {
    struct Row {
        double ratio = 0.0;
        CellId label = -1;  // -1 marks the overall row
        std::size_t n_total = 0;
        std::size_t n_correct = 0;
        double recall = 0.0;
    };
    std::vector<Row> rows;

    double overall(double ratio) const;
    double recall(double ratio, CellId label) const;
};

/// Per-(ratio, label) recall plus an overall row per ratio.
AccuracyReport evaluate(const ClassifierBank& bank, const std::vector<LabeledTraversal>& test,
                        const std::vector<double>& ratios);

void write_accuracy_csv(const AccuracyReport& report, const std::string& path);

/// Bank persistence. Round-trips are exact: a loaded bank predicts
/// identically to the saved one.
void save_bank(const ClassifierBank& bank, const std::string& path);
ClassifierBank load_bank(const std::string& path);

/// Traversal dataset persistence (text, full double precision).
void save_dataset(const std::vector<LabeledTraversal>& data, const std::string& path);
std::vector<LabeledTraversal> load_dataset(const std::string& path);

} // namespace nextcell
