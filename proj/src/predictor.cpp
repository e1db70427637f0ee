// SPDX-License-Identifier: Apache-2.0
#include "nextcell/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "nextcell/error.hpp"

namespace nextcell {

namespace {

/// Shared preprocessing: truncate, map to dB and resample to L.
std::vector<double> pipeline(const CsiTrace& trace, double ratio, std::size_t L) {
    return normalize(truncate(trace, ratio), L);
}

/// Grid-search subset: stratified by label, roughly `fraction` of each class,
/// optionally capped in total size.
void stratified_subset(const FeatureMatrix& X, const std::vector<int>& labels, double fraction,
                       std::size_t cap, Rng& rng, FeatureMatrix& sub_x, std::vector<int>& sub_y) {
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);

    std::map<int, std::size_t> take;
    std::size_t total = 0;
    for (auto& [label, idx] : by_label) {
        for (std::size_t k = idx.size(); k > 1; --k)
            std::swap(idx[k - 1], idx[uniform_index(rng, k)]);
        take[label] = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(idx.size()))));
        total += take[label];
    }
    // Enforce the cap by shaving the largest classes first; each class keeps
    // at least one sample.
    while (cap > 0 && total > cap) {
        auto largest = std::max_element(
            take.begin(), take.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
        if (largest->second <= 1) break;
        --largest->second;
        --total;
    }

    std::vector<std::size_t> chosen;
    chosen.reserve(total);
    for (const auto& [label, idx] : by_label)
        chosen.insert(chosen.end(), idx.begin(),
                      idx.begin() + static_cast<std::ptrdiff_t>(take[label]));
    std::sort(chosen.begin(), chosen.end());

    sub_x = FeatureMatrix(X.dim);
    sub_y.clear();
    for (std::size_t i : chosen) {
        sub_x.data.insert(sub_x.data.end(), X.row(i), X.row(i) + X.dim);
        sub_y.push_back(labels[i]);
    }
}

} // namespace

ClassifierBank train_bank(const std::vector<LabeledTraversal>& data, double ratio,
                          const BankConfig& config) {
    if (data.empty()) throw ConfigError("training data is empty");
    if (!(ratio > 0.0) || ratio > 1.0) throw ConfigError("ratio must be in (0, 1]");
    if (config.feature_length < 2) throw ConfigError("feature length must be at least 2");

    std::map<CellId, std::vector<const LabeledTraversal*>> partitions;
    for (const LabeledTraversal& t : data) partitions[t.previous_cell].push_back(&t);

    const std::vector<double> c_grid =
        config.c_grid.empty() ? svm::default_c_grid() : config.c_grid;
    const std::vector<double> gamma_grid =
        config.gamma_grid.empty() ? svm::default_gamma_grid() : config.gamma_grid;

    ClassifierBank bank;
    bank.feature_length = config.feature_length;
    bank.trained_ratio = ratio;

    for (const auto& [prev, items] : partitions) {
        CellClassifier clf;
        clf.n_samples = items.size();

        FeatureMatrix X(config.feature_length);
        std::vector<int> labels;
        labels.reserve(items.size());
        for (const LabeledTraversal* t : items) {
            X.push_row(pipeline(t->trace, ratio, config.feature_length));
            labels.push_back(t->next_cell);
        }

        const std::set<int> distinct(labels.begin(), labels.end());
        if (distinct.size() < 2) {
            clf.constant = true;
            clf.constant_label = *distinct.begin();
            bank.classifiers.emplace(prev, std::move(clf));
            continue;
        }

        auto [scaler, Xs] = standardize(X);
        clf.scaler = std::move(scaler);

        Rng rng = derive_rng(config.seed, static_cast<std::uint64_t>(prev));
        FeatureMatrix sub_x;
        std::vector<int> sub_y;
        stratified_subset(Xs, labels, config.cv_subset_fraction, config.cv_subset_cap, rng, sub_x,
                          sub_y);

        const svm::GridSearchResult gs =
            svm::grid_search(sub_x, sub_y, c_grid, gamma_grid, config.folds, rng, config.kernel,
                             config.tol, config.solver);
        clf.chosen_C = gs.best_C;
        clf.chosen_gamma = gs.best_gamma;
        clf.cv_accuracy = gs.best_accuracy;

        const svm::KernelParams params{config.kernel, gs.best_gamma};
        clf.model = svm::train_multiclass(Xs, labels, gs.best_C, params, config.tol, config.solver);
        bank.classifiers.emplace(prev, std::move(clf));
    }
    return bank;
}

CellId predict(const ClassifierBank& bank, CellId previous_cell, const CsiTrace& trace,
               double ratio) {
    const auto it = bank.classifiers.find(previous_cell);
    if (it == bank.classifiers.end())
        throw UnknownCellError("no classifier for previous cell " + std::to_string(previous_cell));
    const CellClassifier& clf = it->second;
    if (clf.constant) return clf.constant_label;
    const std::vector<double> x = clf.scaler.apply(pipeline(trace, ratio, bank.feature_length));
    return svm::predict_multiclass(clf.model, x);
}

double AccuracyReport::overall(double ratio) const {
    for (const Row& r : rows)
        if (r.label == -1 && std::abs(r.ratio - ratio) < 1e-12) return r.recall;
    throw ConfigError("no overall row for requested ratio");
}

double AccuracyReport::recall(double ratio, CellId label) const {
    for (const Row& r : rows)
        if (r.label == label && std::abs(r.ratio - ratio) < 1e-12) return r.recall;
    throw ConfigError("no row for requested ratio/label");
}

AccuracyReport evaluate(const ClassifierBank& bank, const std::vector<LabeledTraversal>& test,
                        const std::vector<double>& ratios) {
    if (test.empty()) throw ConfigError("test set is empty");
    AccuracyReport report;
    for (double ratio : ratios) {
        std::map<CellId, std::pair<std::size_t, std::size_t>> per_label;  // total, correct
        std::size_t total = 0, correct = 0;
        for (const LabeledTraversal& t : test) {
            const CellId predicted = predict(bank, t.previous_cell, t.trace, ratio);
            auto& [label_total, label_correct] = per_label[t.next_cell];
            ++label_total;
            ++total;
            if (predicted == t.next_cell) {
                ++label_correct;
                ++correct;
            }
        }
        for (const auto& [label, counts] : per_label) {
            AccuracyReport::Row row;
            row.ratio = ratio;
            row.label = label;
            row.n_total = counts.first;
            row.n_correct = counts.second;
            row.recall = static_cast<double>(counts.second) / static_cast<double>(counts.first);
            report.rows.push_back(row);
        }
        AccuracyReport::Row overall;
        overall.ratio = ratio;
        overall.label = -1;
        overall.n_total = total;
        overall.n_correct = correct;
        overall.recall = static_cast<double>(correct) / static_cast<double>(total);
        report.rows.push_back(overall);
    }
    return report;
}

void write_accuracy_csv(const AccuracyReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write accuracy report: " + path);
    out << "ratio,label,n_total,n_correct,recall\n" << std::setprecision(17);
    for (const AccuracyReport::Row& r : report.rows) {
        out << r.ratio << ',';
        if (r.label == -1)
            out << "overall";
        else
            out << r.label;
        out << ',' << r.n_total << ',' << r.n_correct << ',' << r.recall << '\n';
    }
    if (!out) throw IoError("failed writing accuracy report: " + path);
}

namespace {

constexpr const char* kBankMagic = "nextcellbank";
constexpr int kBankVersion = 1;
constexpr const char* kDataMagic = "nextcelldata";
constexpr int kDataVersion = 1;

std::string next_token(std::istream& in, const std::string& what) {
    std::string tok;
    if (!(in >> tok)) throw CorruptFileError(what + ": unexpected end of file");
    return tok;
}

void expect_token(std::istream& in, const std::string& expected, const std::string& what) {
    const std::string tok = next_token(in, what);
    if (tok != expected)
        throw CorruptFileError(what + ": expected '" + expected + "', found '" + tok + "'");
}

template <typename T>
T read_value(std::istream& in, const std::string& what) {
    T v;
    if (!(in >> v)) throw CorruptFileError(what + ": malformed value");
    return v;
}

void check_magic_version(std::istream& in, const std::string& what, const char* magic,
                         int version) {
    const std::string tok = next_token(in, what);
    if (tok != magic) throw CorruptFileError(what + ": not a " + magic + " file");
    const auto v = read_value<int>(in, what);
    if (v != version)
        throw VersionError(what + ": format version " + std::to_string(v) +
                           " not supported (expected " + std::to_string(version) + ")");
}

} // namespace

void save_bank(const ClassifierBank& bank, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write bank file: " + path);
    out << std::setprecision(17);
    out << kBankMagic << ' ' << kBankVersion << '\n';
    out << "L " << bank.feature_length << '\n';
    out << "ratio " << bank.trained_ratio << '\n';
    out << "classifiers " << bank.classifiers.size() << '\n';
    for (const auto& [prev, clf] : bank.classifiers) {
        out << "prev " << prev << '\n';
        out << "samples " << clf.n_samples << '\n';
        out << "cv " << clf.chosen_C << ' ' << clf.chosen_gamma << ' ' << clf.cv_accuracy << '\n';
        if (clf.constant) {
            out << "constant " << clf.constant_label << '\n';
        } else {
            out << "scaler " << clf.scaler.dim() << '\n';
            for (double v : clf.scaler.mean()) out << v << ' ';
            out << '\n';
            for (double v : clf.scaler.stddev()) out << v << ' ';
            out << '\n';
            svm::write_multiclass(out, clf.model);
        }
        out << "endprev\n";
    }
    out << "endbank\n";
    if (!out) throw IoError("failed writing bank file: " + path);
}

ClassifierBank load_bank(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open bank file: " + path);
    check_magic_version(in, path, kBankMagic, kBankVersion);

    ClassifierBank bank;
    expect_token(in, "L", path);
    bank.feature_length = read_value<std::size_t>(in, path);
    expect_token(in, "ratio", path);
    bank.trained_ratio = read_value<double>(in, path);
    expect_token(in, "classifiers", path);
    const auto count = read_value<std::size_t>(in, path);
    if (count > 1'000'000) throw CorruptFileError(path + ": implausible classifier count");

    for (std::size_t i = 0; i < count; ++i) {
        expect_token(in, "prev", path);
        const auto prev = read_value<CellId>(in, path);
        CellClassifier clf;
        expect_token(in, "samples", path);
        clf.n_samples = read_value<std::size_t>(in, path);
        expect_token(in, "cv", path);
        clf.chosen_C = read_value<double>(in, path);
        clf.chosen_gamma = read_value<double>(in, path);
        clf.cv_accuracy = read_value<double>(in, path);

        const std::string tok = next_token(in, path);
        if (tok == "constant") {
            clf.constant = true;
            clf.constant_label = read_value<CellId>(in, path);
        } else if (tok == "scaler") {
            const auto dim = read_value<std::size_t>(in, path);
            if (dim != bank.feature_length)
                throw CorruptFileError(path + ": scaler dimension mismatch");
            std::vector<double> mean(dim), stddev(dim);
            for (auto& v : mean) v = read_value<double>(in, path);
            for (auto& v : stddev) v = read_value<double>(in, path);
            clf.scaler = Scaler::from_params(std::move(mean), std::move(stddev));
            clf.model = svm::read_multiclass(in, path);
        } else {
            throw CorruptFileError(path + ": expected 'constant' or 'scaler', found '" + tok + "'");
        }
        expect_token(in, "endprev", path);
        bank.classifiers.emplace(prev, std::move(clf));
    }
    expect_token(in, "endbank", path);
    return bank;
}

void save_dataset(const std::vector<LabeledTraversal>& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset file: " + path);
    out << std::setprecision(17);
    out << kDataMagic << ' ' << kDataVersion << '\n';
    out << "count " << data.size() << '\n';
    for (const LabeledTraversal& t : data) {
        out << "traversal prev " << t.previous_cell << " next " << t.next_cell << " path "
            << t.path_id << " speed " << t.speed << " t_in " << t.trace.t_in << " dt "
            << t.trace.sample_period << " clamped " << t.trace.clamped_samples << " samples "
            << t.trace.gains.size() << '\n';
        for (std::size_t k = 0; k < t.trace.gains.size(); ++k)
            out << t.trace.gains[k] << (k + 1 < t.trace.gains.size() ? ' ' : '\n');
    }
    out << "end\n";
    if (!out) throw IoError("failed writing dataset file: " + path);
}

std::vector<LabeledTraversal> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);
    check_magic_version(in, path, kDataMagic, kDataVersion);

    expect_token(in, "count", path);
    const auto count = read_value<std::size_t>(in, path);
    if (count > 100'000'000) throw CorruptFileError(path + ": implausible traversal count");
    std::vector<LabeledTraversal> data;
    data.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        expect_token(in, "traversal", path);
        LabeledTraversal t;
        expect_token(in, "prev", path);
        t.previous_cell = read_value<CellId>(in, path);
        expect_token(in, "next", path);
        t.next_cell = read_value<CellId>(in, path);
        expect_token(in, "path", path);
        t.path_id = read_value<PathId>(in, path);
        expect_token(in, "speed", path);
        t.speed = read_value<double>(in, path);
        expect_token(in, "t_in", path);
        t.trace.t_in = read_value<double>(in, path);
        expect_token(in, "dt", path);
        t.trace.sample_period = read_value<double>(in, path);
        expect_token(in, "clamped", path);
        t.trace.clamped_samples = read_value<std::size_t>(in, path);
        expect_token(in, "samples", path);
        const auto n = read_value<std::size_t>(in, path);
        if (n > 100'000'000) throw CorruptFileError(path + ": implausible sample count");
        t.trace.gains.resize(n);
        for (auto& g : t.trace.gains) g = read_value<double>(in, path);
        data.push_back(std::move(t));
    }
    expect_token(in, "end", path);
    return data;
}

} // namespace nextcell
