// SPDX-License-Identifier: Apache-2.0
#include "nextcell/online.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <map>
#include <queue>
#include <set>

#include "nextcell/channel.hpp"
#include "nextcell/error.hpp"

namespace nextcell {

void OnlineConfig::validate() const {
    if (!(arrival_rate > 0.0)) throw ConfigError("arrival rate must be positive");
    if (!(prediction_ratio > 0.0) || prediction_ratio > 1.0)
        throw ConfigError("prediction ratio must be in (0, 1]");
    if (retrain_every < 1) throw ConfigError("retrain batch size must be at least 1");
    if (horizon < 0.0) throw ConfigError("horizon must be non-negative");
    if (!(v_min > 0.0 && v_min <= v_max)) throw ConfigError("invalid speed range");
    if (sample_period <= 0.0) throw ConfigError("sample period must be positive");
    if (accuracy_window < 1) throw ConfigError("accuracy window must be at least 1");
}

namespace {

struct ActiveUser {
    std::size_t id = 0;
    LabeledTraversal traversal;  // full trace; only the causal prefix feeds predictions
    double t_p = 0.0;
    std::size_t prefix_samples = 0;
};

struct Event {
    double time = 0.0;
    int kind = 0;  // 0 arrival, 1 prediction, 2 completion
    std::size_t seq = 0;

    bool operator>(const Event& other) const {
        if (time != other.time) return time > other.time;
        if (kind != other.kind) return kind > other.kind;
        return seq > other.seq;
    }
};

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

} // namespace

OnlineLog run_online(const CellTopology& topology, const OnlineConfig& config,
                     const RadioMap* radio_map) {
    config.validate();
    topology.validate();
    if (radio_map && !radio_map->covers(topology.bounds))
        throw ConfigError("radio map does not cover the cell bounds");

    OnlineLog log;
    log.horizon = config.horizon;
    log.labels.assign(topology.neighbor_ids.begin(), topology.neighbor_ids.end());
    std::sort(log.labels.begin(), log.labels.end());
    for (const PathSpec& p : topology.paths) log.path_ids.push_back(p.path_id);

    Rng master = make_rng(config.seed);
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    std::map<std::size_t, ActiveUser> users;

    // Per previous cell: training pool, completion counter, live classifier.
    std::map<CellId, std::vector<LabeledTraversal>> pools;
    std::map<CellId, std::size_t> completions;
    std::map<CellId, std::size_t> retrain_count;
    std::map<CellId, std::pair<double, double>> cached_params;  // (C, gamma)
    ClassifierBank bank;
    bank.feature_length = config.bank.feature_length;
    bank.trained_ratio = config.prediction_ratio;
    std::uint64_t bank_version = 0;

    std::size_t next_user = 0;
    std::size_t next_seq = 0;

    const double first_arrival = exponential(master, config.arrival_rate);
    if (first_arrival < config.horizon) events.push({first_arrival, 0, next_seq++});

    const std::vector<double> c_grid =
        config.bank.c_grid.empty() ? svm::default_c_grid() : config.bank.c_grid;
    const std::vector<double> gamma_grid =
        config.bank.gamma_grid.empty() ? svm::default_gamma_grid() : config.bank.gamma_grid;

    while (!events.empty()) {
        const Event ev = events.top();
        events.pop();
        if (ev.time > config.horizon) break;

        if (ev.kind == 0) {
            // Arrival: draw the traversal and channel, schedule this user's
            // prediction and completion, then the next arrival.
            const std::size_t uid = next_user++;
            ActiveUser user;
            user.id = uid;

            Trajectory traj = sample_traversal(topology, master, config.v_min, config.v_max,
                                               config.sample_period, ev.time);
            Rng fading_rng = derive_rng(config.seed, 0x0f00ULL + uid);
            FadingProcess fading =
                make_fading(traj.speed, config.carrier_hz, config.sample_period, fading_rng);
            const PathSpec* path = nullptr;
            for (const PathSpec& p : topology.paths)
                if (p.path_id == traj.path_id) path = &p;

            user.traversal.previous_cell = path->entry_neighbor;
            user.traversal.next_cell = path->exit_neighbor;
            user.traversal.path_id = traj.path_id;
            user.traversal.speed = traj.speed;
            user.traversal.trace = radio_map ? generate_trace(traj, *radio_map, fading)
                                             : generate_trace(traj, topology, fading);

            // Prediction instant snapped onto the sample grid so the causal
            // prefix is exactly the samples at or before t_p.
            const std::size_t n = user.traversal.trace.size();
            std::size_t k = static_cast<std::size_t>(
                std::ceil(config.prediction_ratio * static_cast<double>(n)));
            if (config.prediction_ratio < 1.0 && n >= 3) k = std::min(k, n - 1);
            k = std::clamp<std::size_t>(k, std::min<std::size_t>(2, n), n);
            user.prefix_samples = k;
            user.t_p = traj.t_in + static_cast<double>(k - 1) * config.sample_period;

            events.push({user.t_p, 1, uid});
            events.push({traj.t_out, 2, uid});
            users.emplace(uid, std::move(user));

            const double next_arrival = ev.time + exponential(master, config.arrival_rate);
            if (next_arrival < config.horizon) events.push({next_arrival, 0, next_seq++});
        } else if (ev.kind == 1) {
            const ActiveUser& user = users.at(ev.seq);
            PredictionRecord rec;
            rec.user_id = user.id;
            rec.t_in = user.traversal.trace.t_in;
            rec.t_p = user.t_p;
            rec.t_out = rec.t_in + static_cast<double>(user.traversal.trace.size() - 1) *
                                       config.sample_period;
            rec.previous_cell = user.traversal.previous_cell;
            rec.truth = user.traversal.next_cell;
            rec.path_id = user.traversal.path_id;
            rec.bank_version = bank_version;

            if (bank.has(rec.previous_cell) && user.prefix_samples >= 2) {
                CsiTrace prefix;
                prefix.sample_period = user.traversal.trace.sample_period;
                prefix.t_in = user.traversal.trace.t_in;
                prefix.gains.assign(
                    user.traversal.trace.gains.begin(),
                    user.traversal.trace.gains.begin() +
                        static_cast<std::ptrdiff_t>(user.prefix_samples));
                rec.predicted = predict(bank, rec.previous_cell, prefix, 1.0);
            } else {
                rec.predicted = -1;  // warm-up abstention
            }
            log.records.push_back(rec);
        } else {
            auto it = users.find(ev.seq);
            const CellId prev = it->second.traversal.previous_cell;
            pools[prev].push_back(std::move(it->second.traversal));
            users.erase(it);
            const std::size_t done = ++completions[prev];

            if (config.retrain_every != OnlineConfig::kNeverRetrain &&
                done % config.retrain_every == 0) {
                const std::vector<LabeledTraversal>& pool = pools[prev];
                std::set<CellId> distinct;
                for (const LabeledTraversal& t : pool) distinct.insert(t.next_cell);
                if (distinct.size() >= 2) {
                    const std::size_t r = ++retrain_count[prev];
                    BankConfig cfg = config.bank;
                    cfg.c_grid = c_grid;
                    cfg.gamma_grid = gamma_grid;
                    cfg.cv_subset_cap = config.grid_subset_cap;
                    cfg.seed = splitmix64(config.seed ^ (0xbeef0000ULL + r));
                    if (!is_power_of_two(r) && cached_params.count(prev)) {
                        // Reuse the cached grid choice between refreshes.
                        cfg.c_grid = {cached_params[prev].first};
                        cfg.gamma_grid = {cached_params[prev].second};
                    }
                    ClassifierBank partial = train_bank(pool, config.prediction_ratio, cfg);
                    CellClassifier& clf = partial.classifiers.at(prev);
                    cached_params[prev] = {clf.chosen_C, clf.chosen_gamma};
                    bank.classifiers[prev] = std::move(clf);
                    ++bank_version;

                    RetrainEvent re;
                    re.version = bank_version;
                    re.time = ev.time;
                    re.previous_cell = prev;
                    re.pool_size = pool.size();
                    re.chosen_C = cached_params[prev].first;
                    re.chosen_gamma = cached_params[prev].second;
                    log.retrains.push_back(re);
                }
            }
        }
    }
    return log;
}

double OnlineLog::completion_time(std::size_t per_path) const {
    std::map<PathId, std::vector<double>> done;
    for (const PredictionRecord& r : records)
        if (r.t_out <= horizon) done[r.path_id].push_back(r.t_out);
    double latest = 0.0;
    for (PathId p : path_ids) {
        auto it = done.find(p);
        if (it == done.end() || it->second.size() < per_path)
            return std::numeric_limits<double>::infinity();
        std::vector<double>& times = it->second;
        std::sort(times.begin(), times.end());
        latest = std::max(latest, times[per_path - 1]);
    }
    return latest;
}

std::vector<SeriesPoint> accuracy_series(const OnlineLog& log, std::size_t window) {
    if (window < 1) throw ConfigError("window must be at least 1");
    std::map<CellId, std::deque<bool>> recent;
    std::map<CellId, std::size_t> correct_in_window;
    std::vector<SeriesPoint> series;
    for (const PredictionRecord& r : log.records) {
        auto& window_events = recent[r.truth];
        auto& correct = correct_in_window[r.truth];
        const bool hit = r.predicted == r.truth;
        window_events.push_back(hit);
        if (hit) ++correct;
        if (window_events.size() > window) {
            if (window_events.front()) --correct;
            window_events.pop_front();
        }
        series.push_back({r.t_p, r.truth,
                          static_cast<double>(correct) / static_cast<double>(window_events.size())});
    }
    return series;
}

void write_log_csv(const OnlineLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write online log: " + path);
    out << "user_id,t_in,t_p,t_out,prev,predicted,truth,bank_version,path_id\n"
        << std::setprecision(17);
    for (const PredictionRecord& r : log.records)
        out << r.user_id << ',' << r.t_in << ',' << r.t_p << ',' << r.t_out << ','
            << r.previous_cell << ',' << r.predicted << ',' << r.truth << ',' << r.bank_version
            << ',' << r.path_id << '\n';
    if (!out) throw IoError("failed writing online log: " + path);
}

void write_series_csv(const OnlineLog& log, std::size_t window, const std::string& path) {
    const std::vector<SeriesPoint> series = accuracy_series(log, window);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write accuracy series: " + path);
    out << "t";
    for (CellId l : log.labels) out << ",label_" << l;
    out << '\n' << std::setprecision(10);

    std::map<CellId, double> current;
    for (const SeriesPoint& p : series) {
        current[p.label] = p.recall;
        out << p.time;
        for (CellId l : log.labels) {
            out << ',';
            if (current.count(l)) out << current[l];
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing accuracy series: " + path);
}

} // namespace nextcell
