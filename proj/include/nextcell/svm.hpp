// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nextcell/features.hpp"
#include "nextcell/rng.hpp"

namespace nextcell::svm {

enum class KernelKind { gaussian, linear };

struct KernelParams {
    KernelKind kind = KernelKind::gaussian;
    double gamma = 1.0;  // gaussian only
};

/// K(x,y): exp(-gamma * ||x - y||^2) for the gaussian kernel, plain dot
/// product for the linear one. Lengths must match.
double kernel(const std::vector<double>& x, const std::vector<double>& y,
              const KernelParams& params);
double kernel(const double* x, const double* y, std::size_t dim, const KernelParams& params);

struct SolverOptions {
    double tol = 1e-3;
    std::uint64_t max_iterations = 10'000'000;
    std::size_t cache_bytes = 256ull << 20;
};

/// Soft-margin binary SVM in dual form. The positive class is the first of
/// the stored class pair; coefficients are alpha_i * y_i.
struct BinarySvmModel {
    int class_pos = 0;
    int class_neg = 0;
    KernelParams params;
    double C = 1.0;
    double bias = 0.0;
    FeatureMatrix support_vectors;
    std::vector<double> coeffs;
    double dual_objective = 0.0;  // sum(alpha) - alpha' Q alpha / 2 at the solution
    std::uint64_t iterations = 0;
};

struct BinaryPrediction {
    int label = 0;  // +1 or -1
    double decision = 0.0;
};

/// Trains one binary problem with SMO (maximal violating pair selection).
/// Labels must be +1/-1 and both classes present. Throws ConvergenceError
/// when the iteration cap is reached.
BinarySvmModel train_binary(const FeatureMatrix& X, const std::vector<int>& y, double C,
                            const KernelParams& params, double tol,
                            const SolverOptions& options = {});

/// Decision value and sign; a decision of exactly zero maps to +1.
BinaryPrediction predict_binary(const BinarySvmModel& model, const double* x, std::size_t dim);
BinaryPrediction predict_binary(const BinarySvmModel& model, const std::vector<double>& x);

/// One-vs-one pairwise decomposition with majority voting.
struct MultiClassModel {
    std::vector<int> classes;  // ascending
    std::vector<BinarySvmModel> pairwise;  // ordered (0,1),(0,2),...,(1,2),...

    bool valid() const { return classes.size() >= 2; }
};

MultiClassModel train_multiclass(const FeatureMatrix& X, const std::vector<int>& labels, double C,
                                 const KernelParams& params, double tol,
                                 const SolverOptions& options = {});

/// Majority vote over all pairwise models; ties resolve to the smallest
/// class id among the tied classes.
int predict_multiclass(const MultiClassModel& model, const double* x, std::size_t dim);
int predict_multiclass(const MultiClassModel& model, const std::vector<double>& x);

struct GridPoint {
    double C = 0.0;
    double gamma = 0.0;
    double cv_accuracy = 0.0;
    bool solver_failed = false;
};

struct GridSearchResult {
    double best_C = 0.0;
    double best_gamma = 0.0;
    double best_accuracy = 0.0;
    std::size_t folds_used = 0;
    bool folds_reduced = false;  // a class had fewer samples than requested folds
    std::vector<GridPoint> table;
};

/// Grids used when the caller does not supply their own.
std::vector<double> default_c_grid();      // 2^-5, 2^-3, ..., 2^15
std::vector<double> default_gamma_grid();  // 2^-15, 2^-13, ..., 2^3

/// Stratified k-fold cross validation over the (C, gamma) grid; returns the
/// argmax with ties broken by smaller C, then smaller gamma. Fold assignment
/// is drawn from rng once and shared by every grid point.
GridSearchResult grid_search(const FeatureMatrix& X, const std::vector<int>& labels,
                             const std::vector<double>& c_grid,
                             const std::vector<double>& gamma_grid, std::size_t folds, Rng& rng,
                             KernelKind kind = KernelKind::gaussian, double tol = 1e-3,
                             const SolverOptions& options = {});

/// Text serialization, exact to full double precision.
void write_multiclass(std::ostream& out, const MultiClassModel& model);
MultiClassModel read_multiclass(std::istream& in, const std::string& what);

} // namespace nextcell::svm
