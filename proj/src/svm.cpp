// SPDX-License-Identifier: Apache-2.0
#include "nextcell/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "nextcell/error.hpp"
#include "nextcell/simd.hpp"

namespace nextcell::svm {

namespace {

constexpr double kTau = 1e-12;

/// Supplies unsigned kernel rows K(i, .) over a working set of n samples.
class KernelSource {
  public:
    virtual ~KernelSource() = default;
    virtual std::size_t size() const = 0;
    virtual void krow(std::size_t i, double* out) const = 0;
    virtual double kdiag(std::size_t i) const = 0;
};

/// Kernel rows computed directly from feature vectors.
class VectorKernelSource final : public KernelSource {
  public:
    VectorKernelSource(const FeatureMatrix& X, KernelParams params) : x_(X), params_(params) {}

    std::size_t size() const override { return x_.rows(); }

    void krow(std::size_t i, double* out) const override {
        const double* xi = x_.row(i);
        const std::size_t n = x_.rows();
        if (params_.kind == KernelKind::gaussian) {
            for (std::size_t j = 0; j < n; ++j)
                out[j] = std::exp(-params_.gamma * simd::sqdist(xi, x_.row(j), x_.dim));
        } else {
            for (std::size_t j = 0; j < n; ++j) out[j] = simd::dot(xi, x_.row(j), x_.dim);
        }
    }

    double kdiag(std::size_t i) const override {
        if (params_.kind == KernelKind::gaussian) return 1.0;
        return simd::dot(x_.row(i), x_.row(i), x_.dim);
    }

  private:
    const FeatureMatrix& x_;
    KernelParams params_;
};

/// Kernel rows looked up in a precomputed dense matrix through an index map.
class DenseKernelSource final : public KernelSource {
  public:
    DenseKernelSource(const std::vector<double>& K, std::size_t stride,
                      std::vector<std::size_t> index)
        : k_(K), stride_(stride), index_(std::move(index)) {}

    std::size_t size() const override { return index_.size(); }

    void krow(std::size_t i, double* out) const override {
        const double* base = k_.data() + index_[i] * stride_;
        for (std::size_t j = 0; j < index_.size(); ++j) out[j] = base[index_[j]];
    }

    double kdiag(std::size_t i) const override { return k_[index_[i] * stride_ + index_[i]]; }

  private:
    const std::vector<double>& k_;
    std::size_t stride_;
    std::vector<std::size_t> index_;
};

/// Label-signed kernel rows (Q_ij = y_i y_j K_ij) behind an LRU row cache.
class CachedQ {
  public:
    CachedQ(const KernelSource& src, const std::vector<int>& y, std::size_t cache_bytes)
        : src_(src), y_(y), n_(src.size()) {
        std::size_t budget = cache_bytes / (n_ * sizeof(double));
        budget = std::clamp<std::size_t>(budget, 2, n_);
        slab_.resize(budget * n_);
        slot_of_row_.assign(n_, kNone);
        row_of_slot_.assign(budget, kNone);
        stamp_of_slot_.assign(budget, 0);
        diag_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) diag_[i] = src.kdiag(i);
        scratch_.resize(n_);
    }

    std::size_t size() const { return n_; }
    double diag(std::size_t i) const { return diag_[i]; }

    const double* row(std::size_t i) {
        if (slot_of_row_[i] != kNone) {
            touch(slot_of_row_[i]);
            return slab_.data() + slot_of_row_[i] * n_;
        }
        const std::size_t slot = evict_lru();
        if (row_of_slot_[slot] != kNone) slot_of_row_[row_of_slot_[slot]] = kNone;
        row_of_slot_[slot] = i;
        slot_of_row_[i] = slot;
        double* out = slab_.data() + slot * n_;
        src_.krow(i, scratch_.data());
        const double yi = y_[i];
        for (std::size_t j = 0; j < n_; ++j) out[j] = yi * y_[j] * scratch_[j];
        touch(slot);
        return out;
    }

  private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    void touch(std::size_t slot) { stamp_of_slot_[slot] = ++clock_; }

    std::size_t evict_lru() {
        std::size_t best = 0;
        std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t s = 0; s < row_of_slot_.size(); ++s) {
            if (row_of_slot_[s] == kNone) return s;
            if (stamp_of_slot_[s] < oldest) {
                oldest = stamp_of_slot_[s];
                best = s;
            }
        }
        return best;
    }

    const KernelSource& src_;
    const std::vector<int>& y_;
    std::size_t n_;
    std::vector<double> slab_;
    std::vector<std::size_t> slot_of_row_;
    std::vector<std::size_t> row_of_slot_;
    std::vector<std::uint64_t> stamp_of_slot_;
    std::uint64_t clock_ = 0;
    std::vector<double> diag_;
    mutable std::vector<double> scratch_;
};

struct SmoResult {
    std::vector<double> alpha;
    double bias = 0.0;
    double dual_objective = 0.0;
    std::uint64_t iterations = 0;
};

/// Sequential minimal optimization with maximal-violating-pair selection.
/// Solves min 1/2 a'Qa - e'a  s.t.  y'a = 0, 0 <= a <= C.
SmoResult solve_smo(CachedQ& Q, const std::vector<int>& y, double C, double tol,
                    std::uint64_t max_iterations, const std::vector<double>* warm_alpha = nullptr) {
    const std::size_t n = Q.size();
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);

    if (warm_alpha && warm_alpha->size() <= n) {
        std::copy(warm_alpha->begin(), warm_alpha->end(), alpha.begin());
        for (std::size_t s = 0; s < warm_alpha->size(); ++s) {
            const double as = alpha[s];
            if (as == 0.0) continue;
            const double* qs = Q.row(s);
            for (std::size_t t = 0; t < n; ++t) grad[t] += qs[t] * as;
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::uint64_t iter = 0;
    double m_final = 0.0, big_m_final = 0.0;

    while (true) {
        // Maximal violating pair.
        double m = -inf, big_m = inf;
        std::size_t i = n, j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            const bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0.0);
            const bool in_low = (y[t] < 0 && alpha[t] < C) || (y[t] > 0 && alpha[t] > 0.0);
            if (in_up && v > m) {
                m = v;
                i = t;
            }
            if (in_low && v < big_m) {
                big_m = v;
                j = t;
            }
        }
        m_final = m;
        big_m_final = big_m;
        if (i == n || j == n || m - big_m <= tol) break;
        if (++iter > max_iterations) {
            std::ostringstream msg;
            msg << "SMO did not converge within " << max_iterations
                << " iterations (KKT violation " << (m - big_m) << ", tol " << tol << ", n " << n
                << ", C " << C << ")";
            throw ConvergenceError(msg.str());
        }

        const double* qi = Q.row(i);
        const double* qj = Q.row(j);
        const double kij = static_cast<double>(y[i] * y[j]) * qi[j];
        double a = Q.diag(i) + Q.diag(j) - 2.0 * kij;
        if (a <= 0.0) a = kTau;

        double delta = (m - big_m) / a;
        const double ub_i = y[i] > 0 ? C - alpha[i] : alpha[i];
        const double ub_j = y[j] > 0 ? alpha[j] : C - alpha[j];
        delta = std::min({delta, ub_i, ub_j});

        const double dai = y[i] * delta;
        const double daj = -y[j] * delta;
        alpha[i] += dai;
        alpha[j] += daj;
        // Clip exactly onto the box when the step saturated a bound.
        alpha[i] = std::clamp(alpha[i], 0.0, C);
        alpha[j] = std::clamp(alpha[j], 0.0, C);

        for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * dai + qj[t] * daj;
    }

    SmoResult res;
    res.iterations = iter;

    double bias_sum = 0.0;
    std::size_t bias_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0 && alpha[t] < C) {
            bias_sum += -y[t] * grad[t];
            ++bias_count;
        }
    }
    if (bias_count > 0) {
        res.bias = bias_sum / static_cast<double>(bias_count);
    } else {
        // All multipliers at a bound: any b in [m, M] satisfies the KKT
        // conditions; take the midpoint (guarding one-sided degenerate sets).
        const bool m_ok = std::isfinite(m_final);
        const bool big_ok = std::isfinite(big_m_final);
        if (m_ok && big_ok)
            res.bias = 0.5 * (m_final + big_m_final);
        else
            res.bias = m_ok ? m_final : (big_ok ? big_m_final : 0.0);
    }

    double obj = 0.0;
    for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (1.0 - grad[t]);
    res.dual_objective = 0.5 * obj;
    res.alpha = std::move(alpha);
    return res;
}

/// Dense kernel matrix over all rows of X (reused across C values and folds).
std::vector<double> dense_base_matrix(const FeatureMatrix& X, KernelKind kind) {
    const std::size_t n = X.rows();
    std::vector<double> base(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = X.row(i);
        base[i * n + i] = kind == KernelKind::gaussian ? 0.0 : simd::dot(xi, xi, X.dim);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = kind == KernelKind::gaussian ? simd::sqdist(xi, X.row(j), X.dim)
                                                          : simd::dot(xi, X.row(j), X.dim);
            base[i * n + j] = v;
            base[j * n + i] = v;
        }
    }
    return base;
}

void apply_gamma(const std::vector<double>& base, double gamma, KernelKind kind,
                 std::vector<double>& out) {
    out.resize(base.size());
    if (kind == KernelKind::linear) {
        out = base;
        return;
    }
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = std::exp(-gamma * base[i]);
}

BinarySvmModel extract_model(const FeatureMatrix& X, const std::vector<int>& y,
                             const SmoResult& smo, double C, const KernelParams& params,
                             int class_pos, int class_neg) {
    BinarySvmModel model;
    model.class_pos = class_pos;
    model.class_neg = class_neg;
    model.params = params;
    model.C = C;
    model.bias = smo.bias;
    model.dual_objective = smo.dual_objective;
    model.iterations = smo.iterations;
    model.support_vectors = FeatureMatrix(X.dim);
    for (std::size_t t = 0; t < X.rows(); ++t) {
        if (smo.alpha[t] > 0.0) {
            model.support_vectors.data.insert(model.support_vectors.data.end(), X.row(t),
                                              X.row(t) + X.dim);
            model.coeffs.push_back(smo.alpha[t] * y[t]);
        }
    }
    return model;
}

} // namespace

double kernel(const double* x, const double* y, std::size_t dim, const KernelParams& params) {
    if (params.kind == KernelKind::gaussian) {
        if (!(params.gamma > 0.0) || !std::isfinite(params.gamma))
            throw ConfigError("gaussian kernel needs finite gamma > 0");
        return std::exp(-params.gamma * simd::sqdist(x, y, dim));
    }
    return simd::dot(x, y, dim);
}

double kernel(const std::vector<double>& x, const std::vector<double>& y,
              const KernelParams& params) {
    if (x.size() != y.size()) throw ConfigError("kernel arguments have different lengths");
    return kernel(x.data(), y.data(), x.size(), params);
}

BinarySvmModel train_binary(const FeatureMatrix& X, const std::vector<int>& y, double C,
                            const KernelParams& params, double tol, const SolverOptions& options) {
    const std::size_t n = X.rows();
    if (n == 0 || y.size() != n) throw ConfigError("training set empty or label count mismatch");
    if (!(C > 0.0)) throw ConfigError("C must be positive");
    if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v == 1)
            has_pos = true;
        else if (v == -1)
            has_neg = true;
        else
            throw ConfigError("binary labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw ConfigError("both classes must be present");
    if (params.kind == KernelKind::gaussian && (!(params.gamma > 0.0) || !std::isfinite(params.gamma)))
        throw ConfigError("gaussian kernel needs finite gamma > 0");

    // A dense kernel matrix beats on-demand rows whenever it fits the budget.
    if (n * n * sizeof(double) <= options.cache_bytes) {
        std::vector<double> K = dense_base_matrix(X, params.kind);
        if (params.kind == KernelKind::gaussian)
            for (double& v : K) v = std::exp(-params.gamma * v);
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        DenseKernelSource src(K, n, std::move(idx));
        // Signed rows are cheap to rebuild from the dense matrix; a small
        // cache keeps the hot working-set rows only.
        CachedQ Q(src, y, 64 * n * sizeof(double));
        const SmoResult smo = solve_smo(Q, y, C, tol, options.max_iterations);
        return extract_model(X, y, smo, C, params, +1, -1);
    }
    VectorKernelSource src(X, params);
    CachedQ Q(src, y, options.cache_bytes);
    const SmoResult smo = solve_smo(Q, y, C, tol, options.max_iterations);
    return extract_model(X, y, smo, C, params, +1, -1);
}

BinaryPrediction predict_binary(const BinarySvmModel& model, const double* x, std::size_t dim) {
    if (dim != model.support_vectors.dim) throw ConfigError("input dimension does not match model");
    double decision = model.bias;
    for (std::size_t s = 0; s < model.support_vectors.rows(); ++s)
        decision += model.coeffs[s] * kernel(model.support_vectors.row(s), x, dim, model.params);
    return {decision >= 0.0 ? +1 : -1, decision};
}

BinaryPrediction predict_binary(const BinarySvmModel& model, const std::vector<double>& x) {
    return predict_binary(model, x.data(), x.size());
}

namespace {

std::vector<int> sorted_classes(const std::vector<int>& labels) {
    std::vector<int> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

} // namespace

MultiClassModel train_multiclass(const FeatureMatrix& X, const std::vector<int>& labels, double C,
                                 const KernelParams& params, double tol,
                                 const SolverOptions& options) {
    if (X.rows() == 0 || labels.size() != X.rows())
        throw ConfigError("training set empty or label count mismatch");
    MultiClassModel model;
    model.classes = sorted_classes(labels);
    if (model.classes.size() < 2) throw ConfigError("multi-class training needs at least 2 classes");

    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            FeatureMatrix sub(X.dim);
            std::vector<int> suby;
            for (std::size_t t = 0; t < X.rows(); ++t) {
                if (labels[t] == model.classes[a] || labels[t] == model.classes[b]) {
                    sub.data.insert(sub.data.end(), X.row(t), X.row(t) + X.dim);
                    suby.push_back(labels[t] == model.classes[a] ? +1 : -1);
                }
            }
            BinarySvmModel m = train_binary(sub, suby, C, params, tol, options);
            m.class_pos = model.classes[a];
            m.class_neg = model.classes[b];
            model.pairwise.push_back(std::move(m));
        }
    }
    return model;
}

int predict_multiclass(const MultiClassModel& model, const double* x, std::size_t dim) {
    if (!model.valid()) throw ConfigError("invalid multi-class model");
    std::map<int, int> votes;
    for (int c : model.classes) votes[c] = 0;
    for (const BinarySvmModel& m : model.pairwise) {
        const BinaryPrediction p = predict_binary(m, x, dim);
        ++votes[p.label > 0 ? m.class_pos : m.class_neg];
    }
    int best = model.classes.front();
    int best_votes = -1;
    for (int c : model.classes) {  // ascending ids: first max wins ties
        if (votes[c] > best_votes) {
            best_votes = votes[c];
            best = c;
        }
    }
    return best;
}

int predict_multiclass(const MultiClassModel& model, const std::vector<double>& x) {
    return predict_multiclass(model, x.data(), x.size());
}

std::vector<double> default_c_grid() {
    std::vector<double> g;
    for (int e = -5; e <= 15; e += 2) g.push_back(std::ldexp(1.0, e));
    return g;
}

std::vector<double> default_gamma_grid() {
    std::vector<double> g;
    for (int e = -15; e <= 3; e += 2) g.push_back(std::ldexp(1.0, e));
    return g;
}

GridSearchResult grid_search(const FeatureMatrix& X, const std::vector<int>& labels,
                             const std::vector<double>& c_grid,
                             const std::vector<double>& gamma_grid, std::size_t folds, Rng& rng,
                             KernelKind kind, double tol, const SolverOptions& options) {
    const std::size_t n = X.rows();
    if (n == 0 || labels.size() != n) throw ConfigError("training set empty or label count mismatch");
    if (folds < 2) throw ConfigError("cross validation needs at least 2 folds");
    if (c_grid.empty() || gamma_grid.empty()) throw ConfigError("grids must be non-empty");

    const std::vector<int> classes = sorted_classes(labels);
    if (classes.size() < 2) throw ConfigError("grid search needs at least 2 classes");

    // Stratified fold assignment, shared across all grid points.
    std::size_t min_count = n;
    std::vector<std::vector<std::size_t>> by_class(classes.size());
    for (std::size_t t = 0; t < n; ++t) {
        const auto c = static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), labels[t]) - classes.begin());
        by_class[c].push_back(t);
    }
    for (const auto& v : by_class) min_count = std::min(min_count, v.size());

    GridSearchResult result;
    result.folds_used = std::max<std::size_t>(2, std::min(folds, min_count));
    result.folds_reduced = result.folds_used < folds;

    std::vector<std::size_t> fold_of(n);
    for (auto& idx : by_class) {
        for (std::size_t k = idx.size(); k > 1; --k)
            std::swap(idx[k - 1], idx[uniform_index(rng, k)]);
        for (std::size_t k = 0; k < idx.size(); ++k) fold_of[idx[k]] = k % result.folds_used;
    }

    // gamma is inert for the linear kernel: evaluate one column only.
    std::vector<double> gammas = gamma_grid;
    if (kind == KernelKind::linear) gammas.resize(1);

    const bool dense = n * n * sizeof(double) <= options.cache_bytes;
    std::vector<double> base;
    if (dense) base = dense_base_matrix(X, kind);

    struct Cell {
        std::size_t correct = 0;
        bool failed = false;
    };
    std::vector<Cell> cells(c_grid.size() * gammas.size());

    std::vector<double> K;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        const KernelParams params{kind, gammas[gi]};
        if (dense) apply_gamma(base, gammas[gi], kind, K);

        for (std::size_t fold = 0; fold < result.folds_used; ++fold) {
            // Per-pair training index sets for this fold.
            struct PairSet {
                std::size_t a, b;
                std::vector<std::size_t> idx;
                std::vector<int> y;
            };
            std::vector<PairSet> pairs;
            for (std::size_t a = 0; a < classes.size(); ++a)
                for (std::size_t b = a + 1; b < classes.size(); ++b) pairs.push_back({a, b, {}, {}});
            for (std::size_t t = 0; t < n; ++t) {
                if (fold_of[t] == fold) continue;
                for (PairSet& p : pairs) {
                    if (labels[t] == classes[p.a] || labels[t] == classes[p.b]) {
                        p.idx.push_back(t);
                        p.y.push_back(labels[t] == classes[p.a] ? +1 : -1);
                    }
                }
            }

            for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
                Cell& cell = cells[ci * gammas.size() + gi];
                if (cell.failed) continue;

                struct PairSolution {
                    const PairSet* set = nullptr;
                    std::vector<double> coef;  // alpha_i * y_i over set->idx
                    double bias = 0.0;
                    bool usable = false;
                };
                std::vector<PairSolution> solutions(pairs.size());
                try {
                    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
                        PairSet& p = pairs[pi];
                        solutions[pi].set = &p;
                        const bool two_sided =
                            std::count(p.y.begin(), p.y.end(), 1) > 0 &&
                            std::count(p.y.begin(), p.y.end(), -1) > 0;
                        if (!two_sided) continue;  // degenerate fold: pair casts no vote
                        SmoResult smo;
                        if (dense) {
                            DenseKernelSource src(K, n, p.idx);
                            CachedQ Q(src, p.y, 64 * p.idx.size() * sizeof(double));
                            smo = solve_smo(Q, p.y, c_grid[ci], tol, options.max_iterations);
                        } else {
                            FeatureMatrix sub(X.dim);
                            for (std::size_t t : p.idx)
                                sub.data.insert(sub.data.end(), X.row(t), X.row(t) + X.dim);
                            VectorKernelSource src(sub, params);
                            CachedQ Q(src, p.y, options.cache_bytes);
                            smo = solve_smo(Q, p.y, c_grid[ci], tol, options.max_iterations);
                        }
                        PairSolution& sol = solutions[pi];
                        sol.usable = true;
                        sol.bias = smo.bias;
                        sol.coef.resize(p.idx.size());
                        for (std::size_t s = 0; s < p.idx.size(); ++s)
                            sol.coef[s] = smo.alpha[s] * p.y[s];
                    }
                } catch (const ConvergenceError&) {
                    cell.failed = true;
                    continue;
                }

                std::vector<int> votes(classes.size());
                for (std::size_t t = 0; t < n; ++t) {
                    if (fold_of[t] != fold) continue;
                    std::fill(votes.begin(), votes.end(), 0);
                    for (const PairSolution& sol : solutions) {
                        if (!sol.usable) continue;
                        double decision = sol.bias;
                        if (dense) {
                            const double* krow = K.data() + t * n;
                            for (std::size_t s = 0; s < sol.set->idx.size(); ++s)
                                decision += sol.coef[s] * krow[sol.set->idx[s]];
                        } else {
                            for (std::size_t s = 0; s < sol.set->idx.size(); ++s)
                                decision += sol.coef[s] * kernel(X.row(t), X.row(sol.set->idx[s]),
                                                                 X.dim, params);
                        }
                        ++votes[decision >= 0.0 ? sol.set->a : sol.set->b];
                    }
                    std::size_t best = 0;
                    for (std::size_t c = 1; c < classes.size(); ++c)
                        if (votes[c] > votes[best]) best = c;
                    if (classes[best] == labels[t]) ++cell.correct;
                }
            }
        }
    }

    result.table.reserve(c_grid.size() * gammas.size());
    bool have_best = false;
    for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
            const Cell& cell = cells[ci * gammas.size() + gi];
            GridPoint p;
            p.C = c_grid[ci];
            p.gamma = gammas[gi];
            p.solver_failed = cell.failed;
            p.cv_accuracy =
                cell.failed ? -1.0 : static_cast<double>(cell.correct) / static_cast<double>(n);
            result.table.push_back(p);
            // Scan order is (C asc, gamma asc); strict > keeps the first maximum,
            // which implements the tie-break.
            if (!cell.failed && (!have_best || p.cv_accuracy > result.best_accuracy)) {
                have_best = true;
                result.best_accuracy = p.cv_accuracy;
                result.best_C = p.C;
                result.best_gamma = p.gamma;
            }
        }
    }
    if (!have_best) throw ConvergenceError("every grid point failed to converge");
    return result;
}

void write_multiclass(std::ostream& out, const MultiClassModel& model) {
    out << std::setprecision(17);
    out << "multiclass\nclasses " << model.classes.size();
    for (int c : model.classes) out << ' ' << c;
    out << "\npairs " << model.pairwise.size() << '\n';
    for (const BinarySvmModel& m : model.pairwise) {
        out << "pair " << m.class_pos << ' ' << m.class_neg << '\n';
        if (m.params.kind == KernelKind::gaussian)
            out << "kernel gaussian " << m.params.gamma << '\n';
        else
            out << "kernel linear\n";
        out << "C " << m.C << "\nbias " << m.bias << "\ndim " << m.support_vectors.dim << "\nnsv "
            << m.support_vectors.rows() << '\n';
        for (std::size_t s = 0; s < m.support_vectors.rows(); ++s) {
            out << m.coeffs[s];
            const double* row = m.support_vectors.row(s);
            for (std::size_t j = 0; j < m.support_vectors.dim; ++j) out << ' ' << row[j];
            out << '\n';
        }
        out << "endpair\n";
    }
    out << "endmulticlass\n";
}

namespace {

std::string next_token(std::istream& in, const std::string& what) {
    std::string tok;
    if (!(in >> tok)) throw CorruptFileError(what + ": unexpected end of model data");
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

} // namespace

MultiClassModel read_multiclass(std::istream& in, const std::string& what) {
    expect_token(in, "multiclass", what);
    expect_token(in, "classes", what);
    const auto k = read_value<std::size_t>(in, what);
    if (k < 2 || k > 1'000'000) throw CorruptFileError(what + ": implausible class count");
    MultiClassModel model;
    model.classes.resize(k);
    for (auto& c : model.classes) c = read_value<int>(in, what);
    if (!std::is_sorted(model.classes.begin(), model.classes.end()))
        throw CorruptFileError(what + ": classes must be sorted");
    expect_token(in, "pairs", what);
    const auto p = read_value<std::size_t>(in, what);
    if (p != k * (k - 1) / 2) throw CorruptFileError(what + ": pair count does not match classes");
    for (std::size_t i = 0; i < p; ++i) {
        expect_token(in, "pair", what);
        BinarySvmModel m;
        m.class_pos = read_value<int>(in, what);
        m.class_neg = read_value<int>(in, what);
        expect_token(in, "kernel", what);
        const std::string kind = next_token(in, what);
        if (kind == "gaussian") {
            m.params.kind = KernelKind::gaussian;
            m.params.gamma = read_value<double>(in, what);
        } else if (kind == "linear") {
            m.params.kind = KernelKind::linear;
        } else {
            throw CorruptFileError(what + ": unknown kernel '" + kind + "'");
        }
        expect_token(in, "C", what);
        m.C = read_value<double>(in, what);
        expect_token(in, "bias", what);
        m.bias = read_value<double>(in, what);
        expect_token(in, "dim", what);
        const auto dim = read_value<std::size_t>(in, what);
        expect_token(in, "nsv", what);
        const auto nsv = read_value<std::size_t>(in, what);
        if (dim == 0 || dim > 1'000'000 || nsv > 100'000'000)
            throw CorruptFileError(what + ": implausible model shape");
        m.support_vectors = FeatureMatrix(dim);
        m.support_vectors.data.reserve(nsv * dim);
        m.coeffs.reserve(nsv);
        for (std::size_t s = 0; s < nsv; ++s) {
            m.coeffs.push_back(read_value<double>(in, what));
            for (std::size_t j = 0; j < dim; ++j)
                m.support_vectors.data.push_back(read_value<double>(in, what));
        }
        expect_token(in, "endpair", what);
        model.pairwise.push_back(std::move(m));
    }
    expect_token(in, "endmulticlass", what);
    return model;
}

} // namespace nextcell::svm
