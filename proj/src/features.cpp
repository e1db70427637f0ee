// SPDX-License-Identifier: Apache-2.0
#include "nextcell/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nextcell/error.hpp"

namespace nextcell {

void FeatureMatrix::push_row(const std::vector<double>& v) {
    if (v.size() != dim) throw ConfigError("feature vector has wrong dimension");
    data.insert(data.end(), v.begin(), v.end());
}

CsiTrace truncate(const CsiTrace& trace, double ratio) {
    if (trace.gains.empty()) throw ConfigError("cannot truncate an empty trace");
    if (!(ratio > 0.0) || ratio > 1.0) throw ConfigError("truncation ratio must be in (0, 1]");
    const auto n = static_cast<double>(trace.gains.size());
    const auto keep = static_cast<std::size_t>(std::ceil(ratio * n));
    CsiTrace out;
    out.sample_period = trace.sample_period;
    out.t_in = trace.t_in;
    out.clamped_samples = trace.clamped_samples;
    out.gains.assign(trace.gains.begin(), trace.gains.begin() + static_cast<std::ptrdiff_t>(keep));
    return out;
}

std::vector<double> normalize(const CsiTrace& trace, std::size_t L) {
    const std::size_t n = trace.gains.size();
    if (n < 2) throw ConfigError("trace needs at least 2 samples to normalize");
    if (L < 2) throw ConfigError("normalized length must be at least 2");

    std::vector<double> db(n);
    for (std::size_t i = 0; i < n; ++i) db[i] = 10.0 * std::log10(trace.gains[i]);

    if (n == L) return db;

    std::vector<double> out(L);
    const double scale = static_cast<double>(n - 1) / static_cast<double>(L - 1);
    for (std::size_t k = 0; k < L; ++k) {
        const double u = static_cast<double>(k) * scale;
        auto i0 = static_cast<std::size_t>(u);
        if (i0 >= n - 1) i0 = n - 2;
        const double frac = u - static_cast<double>(i0);
        out[k] = db[i0] + frac * (db[i0 + 1] - db[i0]);
    }
    return out;
}

Scaler Scaler::fit(const FeatureMatrix& train) {
    const std::size_t n = train.rows();
    if (n < 2) throw ConfigError("scaler needs at least 2 training vectors");
    const std::size_t d = train.dim;

    Scaler s;
    s.mean_.assign(d, 0.0);
    s.std_.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = train.row(i);
        for (std::size_t j = 0; j < d; ++j) s.mean_[j] += r[j];
    }
    for (std::size_t j = 0; j < d; ++j) s.mean_[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = train.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double dlt = r[j] - s.mean_[j];
            s.std_[j] += dlt * dlt;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        s.std_[j] = std::sqrt(s.std_[j] / static_cast<double>(n));
        if (s.std_[j] < 1e-12) s.std_[j] = 0.0;
    }
    return s;
}

std::vector<double> Scaler::apply(const std::vector<double>& v) const {
    if (v.size() != mean_.size()) throw ConfigError("vector dimension does not match scaler");
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        out[j] = std_[j] == 0.0 ? 0.0 : (v[j] - mean_[j]) / std_[j];
    return out;
}

void Scaler::apply_in_place(FeatureMatrix& m) const {
    if (m.dim != mean_.size()) throw ConfigError("matrix dimension does not match scaler");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* r = m.row(i);
        for (std::size_t j = 0; j < m.dim; ++j)
            r[j] = std_[j] == 0.0 ? 0.0 : (r[j] - mean_[j]) / std_[j];
    }
}

Scaler Scaler::from_params(std::vector<double> mean, std::vector<double> stddev) {
    if (mean.size() != stddev.size()) throw ConfigError("scaler parameter size mismatch");
    Scaler s;
    s.mean_ = std::move(mean);
    s.std_ = std::move(stddev);
    return s;
}

std::pair<Scaler, FeatureMatrix> standardize(const FeatureMatrix& train) {
    Scaler s = Scaler::fit(train);
    FeatureMatrix out = train;
    s.apply_in_place(out);
    return {std::move(s), std::move(out)};
}

std::vector<double> encode_history(const std::vector<CellId>& history, std::size_t k_used,
                                   const std::vector<CellId>& neighbors, std::size_t pad_blocks) {
    if (k_used < 2) throw ConfigError("history length below the floor of 2");
    if (k_used > history.size()) throw ConfigError("history shorter than requested length");
    const std::size_t blocks = std::max(pad_blocks, k_used);
    const std::size_t width = neighbors.size();
    std::vector<double> out(blocks * width, 0.0);
    const std::size_t pad = blocks - k_used;
    for (std::size_t i = 0; i < k_used; ++i) {
        const CellId id = history[history.size() - k_used + i];
        const auto it = std::find(neighbors.begin(), neighbors.end(), id);
        if (it == neighbors.end()) throw ConfigError("history entry is not a known neighbor");
        const auto idx = static_cast<std::size_t>(it - neighbors.begin());
        out[(pad + i) * width + idx] = 1.0;
    }
    return out;
}

void write_feature_csv(const FeatureMatrix& features, const std::vector<CellId>& labels,
                       const std::string& path) {
    if (features.rows() != labels.size()) throw ConfigError("feature/label count mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write feature file: " + path);
    for (std::size_t j = 0; j < features.dim; ++j) out << 'v' << j << ',';
    out << "label\n";
    char buf[40];
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const double* r = features.row(i);
        for (std::size_t j = 0; j < features.dim; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,", r[j]);
            out << buf;
        }
        out << labels[i] << '\n';
    }
    if (!out) throw IoError("failed writing feature file: " + path);
}

std::pair<FeatureMatrix, std::vector<CellId>> read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw CorruptFileError(path + ": empty file");
    std::size_t dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));

    FeatureMatrix features(dim);
    std::vector<CellId> labels;
    std::vector<double> row(dim);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        for (std::size_t j = 0; j < dim; ++j) {
            if (!std::getline(ss, tok, ',')) throw CorruptFileError(path + ": short row");
            try {
                row[j] = std::stod(tok);
            } catch (const std::exception&) {
                throw CorruptFileError(path + ": bad value '" + tok + "'");
            }
        }
        if (!std::getline(ss, tok, ',')) throw CorruptFileError(path + ": missing label");
        try {
            labels.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw CorruptFileError(path + ": bad label '" + tok + "'");
        }
        features.data.insert(features.data.end(), row.begin(), row.end());
    }
    return {std::move(features), std::move(labels)};
}

} // namespace nextcell
