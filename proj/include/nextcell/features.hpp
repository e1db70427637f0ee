// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nextcell/channel.hpp"
#include "nextcell/scenario.hpp"

namespace nextcell {

/// Row-major matrix of feature vectors with a fixed dimension.
struct FeatureMatrix {
    std::size_t dim = 0;
    std::vector<double> data;

    FeatureMatrix() = default;
    explicit FeatureMatrix(std::size_t d) : dim(d) {}

    std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
    const double* row(std::size_t i) const { return data.data() + i * dim; }
    double* row(std::size_t i) { return data.data() + i * dim; }
    void push_row(const std::vector<double>& v);
};

/// First ceil(ratio * n) samples of the trace. ratio must be in (0, 1].
CsiTrace truncate(const CsiTrace& trace, double ratio);

/// dB transform followed by resampling to exactly L points: linear
/// interpolation over normalized time, which subsamples when the trace is
/// longer than L and interpolates when it is shorter.
std::vector<double> normalize(const CsiTrace& trace, std::size_t L);

/// Per-coordinate affine map to zero mean / unit variance fitted on a
/// training set; zero-variance coordinates map to 0.
class Scaler {
  public:
    Scaler() = default;

    static Scaler fit(const FeatureMatrix& train);
    std::vector<double> apply(const std::vector<double>& v) const;
    void apply_in_place(FeatureMatrix& m) const;

    std::size_t dim() const { return mean_.size(); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stddev() const { return std_; }

    static Scaler from_params(std::vector<double> mean, std::vector<double> stddev);

  private:
    std::vector<double> mean_;
    std::vector<double> std_;  // population std; 0 marks a degenerate coordinate
};

/// Fits a scaler on the set and returns the transformed copy alongside it.
std::pair<Scaler, FeatureMatrix> standardize(const FeatureMatrix& train);

/// One-hot encoding of the most recent k_used handover history entries.
/// `neighbors` fixes the block layout (index of the id within the list).
/// When pad_blocks > k_used the vector is left-padded with all-zero blocks to
/// a fixed width of pad_blocks blocks.
std::vector<double> encode_history(const std::vector<CellId>& history, std::size_t k_used,
                                   const std::vector<CellId>& neighbors, std::size_t pad_blocks = 0);

/// Feature-set dump: CSV with L value columns and a trailing label column.
void write_feature_csv(const FeatureMatrix& features, const std::vector<CellId>& labels,
                       const std::string& path);
std::pair<FeatureMatrix, std::vector<CellId>> read_feature_csv(const std::string& path);

} // namespace nextcell
