// SPDX-License-Identifier: Apache-2.0
#include "nextcell/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nextcell/channel.hpp"
#include "nextcell/error.hpp"
#include "nextcell/simd.hpp"

namespace nextcell::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kToolVersion = "nextcell 1.0.0";

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_manifest(const ExperimentConfig& config, const std::string& command,
                    const std::string& config_text, const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["seed"] = config.seed;
    char hash[32];
    std::snprintf(hash, sizeof hash, "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a(config_text)));
    m["config_hash"] = hash;
    m["version"] = kToolVersion;
    m["simd"] = std::string(simd::isa_name(simd::active_isa()));
    m["outputs"] = outputs;
    const fs::path path = fs::path(config.out_dir) / ("manifest_" + command + ".json");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << m.dump(2) << '\n';
}

void parse_bank_json(const json& j, BankConfig& bank) {
    bank.feature_length = j.value("feature_length", bank.feature_length);
    bank.folds = j.value("folds", bank.folds);
    bank.cv_subset_fraction = j.value("cv_subset_fraction", bank.cv_subset_fraction);
    bank.cv_subset_cap = j.value("cv_subset_cap", bank.cv_subset_cap);
    bank.tol = j.value("tol", bank.tol);
    if (j.contains("kernel")) {
        const std::string k = j.at("kernel").get<std::string>();
        if (k == "gaussian")
            bank.kernel = svm::KernelKind::gaussian;
        else if (k == "linear")
            bank.kernel = svm::KernelKind::linear;
        else
            throw ConfigError("unknown kernel kind '" + k + "'");
    }
    if (j.contains("c_grid")) bank.c_grid = j.at("c_grid").get<std::vector<double>>();
    if (j.contains("gamma_grid")) bank.gamma_grid = j.at("gamma_grid").get<std::vector<double>>();
    if (j.contains("cache_mb"))
        bank.solver.cache_bytes = j.at("cache_mb").get<std::size_t>() << 20;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw CorruptFileError(path + ": invalid JSON: " + std::string(e.what()));
    }

    ExperimentConfig cfg;
    if (!j.contains("scenario")) throw ConfigError(path + ": missing 'scenario'");
    if (j.at("scenario").is_string()) {
        fs::path sp = j.at("scenario").get<std::string>();
        if (sp.is_relative()) sp = fs::path(path).parent_path() / sp;
        cfg.scenario_path = sp.string();
        cfg.scenario = ScenarioConfig::from_json_file(cfg.scenario_path);
    } else {
        cfg.scenario_path = "<inline>";
        cfg.scenario = ScenarioConfig::from_json_text(j.at("scenario").dump(), path + "#scenario");
    }
    // A map path inside an inline or referenced scenario resolves relative to
    // the file that declared it.
    if (cfg.scenario.radio_map_file) {
        fs::path mp = *cfg.scenario.radio_map_file;
        if (mp.is_relative()) {
            const fs::path base = cfg.scenario_path == "<inline>" ? fs::path(path).parent_path()
                                                                  : fs::path(cfg.scenario_path).parent_path();
            cfg.scenario.radio_map_file = (base / mp).string();
        }
    }

    cfg.samples_per_path = j.value("samples_per_path", cfg.samples_per_path);
    cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
    if (j.contains("ratio_grid")) cfg.ratio_grid = j.at("ratio_grid").get<std::vector<double>>();
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    if (j.contains("svm")) parse_bank_json(j.at("svm"), cfg.bank);
    if (j.contains("online")) {
        const json& o = j.at("online");
        cfg.online.arrival_rate = o.value("arrival_rate", cfg.online.arrival_rate);
        cfg.online.prediction_ratio = o.value("prediction_ratio", cfg.online.prediction_ratio);
        if (o.contains("retrain_every")) {
            if (o.at("retrain_every").is_string() && o.at("retrain_every") == "never")
                cfg.online.retrain_every = OnlineConfig::kNeverRetrain;
            else
                cfg.online.retrain_every = o.at("retrain_every").get<std::size_t>();
        }
        cfg.online.horizon = o.value("horizon", cfg.online.horizon);
        cfg.online.accuracy_window = o.value("accuracy_window", cfg.online.accuracy_window);
        cfg.online.grid_subset_cap = o.value("grid_subset_cap", cfg.online.grid_subset_cap);
        if (o.contains("svm")) parse_bank_json(o.at("svm"), cfg.online.bank);
    }
    if (j.contains("baseline")) {
        const json& b = j.at("baseline");
        cfg.history_length = b.value("history_length", cfg.history_length);
        cfg.baseline_samples = b.value("samples", cfg.baseline_samples);
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (samples_per_path < 1) throw ConfigError("samples_per_path must be at least 1");
    if (!(train_fraction > 0.0) || train_fraction >= 1.0)
        throw ConfigError("train_fraction must be in (0, 1)");
    if (ratio_grid.empty()) throw ConfigError("ratio_grid must be non-empty");
    for (double r : ratio_grid)
        if (!(r > 0.0) || r > 1.0) throw ConfigError("ratios must be in (0, 1]");
    if (history_length < 2) throw ConfigError("history_length must be at least 2");
    if (baseline_samples < 10) throw ConfigError("baseline needs at least 10 samples");
}

std::vector<LabeledTraversal> generate_dataset(const BuiltScenario& scenario,
                                               const ScenarioConfig& config,
                                               std::size_t samples_per_path) {
    const CellTopology& topo = scenario.topology;
    Rng speeds = derive_rng(config.seed, 0x5eedULL);
    std::vector<LabeledTraversal> data;
    data.reserve(topo.paths.size() * samples_per_path);
    std::uint64_t index = 0;
    for (const PathSpec& path : topo.paths) {
        for (std::size_t s = 0; s < samples_per_path; ++s, ++index) {
            const double speed = uniform_real(speeds, config.v_min, config.v_max);
            const Trajectory traj = trajectory_on_path(path, speed, config.sample_period);
            Rng fading_rng = derive_rng(config.seed, 0xfade0000ULL + index);
            FadingProcess fading =
                make_fading(speed, config.carrier_hz, config.sample_period, fading_rng);
            LabeledTraversal t;
            t.previous_cell = path.entry_neighbor;
            t.next_cell = path.exit_neighbor;
            t.path_id = path.path_id;
            t.speed = speed;
            t.trace = scenario.map ? generate_trace(traj, *scenario.map, fading)
                                   : generate_trace(traj, topo, fading);
            data.push_back(std::move(t));
        }
    }
    return data;
}

void split_dataset(const std::vector<LabeledTraversal>& data, double train_fraction,
                   std::uint64_t seed, std::vector<LabeledTraversal>& train,
                   std::vector<LabeledTraversal>& test) {
    std::map<std::pair<PathId, CellId>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < data.size(); ++i)
        groups[{data[i].path_id, data[i].next_cell}].push_back(i);

    train.clear();
    test.clear();
    Rng rng = derive_rng(seed, 0x59117ULL);
    for (auto& [key, idx] : groups) {
        for (std::size_t k = idx.size(); k > 1; --k)
            std::swap(idx[k - 1], idx[uniform_index(rng, k)]);
        const auto n_train = static_cast<std::size_t>(
            std::ceil(train_fraction * static_cast<double>(idx.size())));
        for (std::size_t k = 0; k < idx.size(); ++k)
            (k < n_train ? train : test).push_back(data[idx[k]]);
    }
}

namespace {

std::string dataset_path(const ExperimentConfig& config) {
    return (fs::path(config.out_dir) / "dataset.txt").string();
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

std::string config_fingerprint(const ExperimentConfig& config) {
    // Stable digest input: the resolved scenario plus experiment knobs.
    std::ostringstream ss;
    ss << config.scenario_path << '|' << config.samples_per_path << '|' << config.train_fraction
       << '|' << config.seed << '|' << config.out_dir << '|' << config.baseline_samples << '|'
       << config.history_length;
    for (double r : config.ratio_grid) ss << ',' << r;
    return ss.str();
}

} // namespace

int cmd_generate(const ExperimentConfig& config) {
    return guarded([&] {
        fs::create_directories(config.out_dir);
        ScenarioConfig sc = config.scenario;
        sc.seed = config.seed;
        BuiltScenario scenario = build_scenario(sc);

        std::vector<std::string> outputs;
        if (scenario.map) {
            const std::string map_path = (fs::path(config.out_dir) / "radio_map.csv").string();
            save_radio_map(*scenario.map, map_path);
            outputs.push_back(map_path);
        }
        const std::vector<LabeledTraversal> data =
            generate_dataset(scenario, sc, config.samples_per_path);
        const std::string out = dataset_path(config);
        save_dataset(data, out);
        outputs.push_back(out);
        write_manifest(config, "generate", config_fingerprint(config), outputs);
        std::cout << "generated " << data.size() << " traversals over "
                  << scenario.topology.paths.size() << " paths -> " << out << '\n';
        return kOk;
    });
}

int cmd_offline(const ExperimentConfig& config) {
    return guarded([&] {
        fs::create_directories(config.out_dir);
        const std::string ds = dataset_path(config);
        if (!fs::exists(ds)) throw IoError("dataset not found (run generate first): " + ds);
        const std::vector<LabeledTraversal> data = load_dataset(ds);

        std::vector<LabeledTraversal> train, test;
        split_dataset(data, config.train_fraction, config.seed, train, test);

        AccuracyReport merged;
        std::vector<double> ratios = config.ratio_grid;
        std::sort(ratios.begin(), ratios.end());
        double best_ratio = ratios.back();
        for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
            BankConfig bc = config.bank;
            bc.seed = splitmix64(config.seed ^ (0x0ff1ceULL + ri));
            const ClassifierBank bank = train_bank(train, ratios[ri], bc);
            const AccuracyReport rep = evaluate(bank, test, {ratios[ri]});
            merged.rows.insert(merged.rows.end(), rep.rows.begin(), rep.rows.end());
            std::cout << "ratio " << std::fixed << std::setprecision(3) << ratios[ri]
                      << "  overall " << std::setprecision(4) << rep.overall(ratios[ri]) << '\n';
            if (ratios[ri] == best_ratio)
                save_bank(bank, (fs::path(config.out_dir) / "bank.model").string());
        }
        const std::string out = (fs::path(config.out_dir) / "accuracy.csv").string();
        write_accuracy_csv(merged, out);
        write_manifest(config, "offline", config_fingerprint(config),
                       {out, (fs::path(config.out_dir) / "bank.model").string()});
        std::cout << "report -> " << out << '\n';
        return kOk;
    });
}

int cmd_baseline(const ExperimentConfig& config) {
    return guarded([&] {
        fs::create_directories(config.out_dir);
        ScenarioConfig sc = config.scenario;
        BuiltScenario scenario = build_scenario(sc);
        std::vector<CellId> neighbors = scenario.topology.neighbor_ids;
        std::sort(neighbors.begin(), neighbors.end());

        // Histories from the random mobility model: every cell change picks a
        // path (hence an exit neighbor) uniformly and independently, so each
        // entry is an independent uniform draw over the neighbor alphabet.
        Rng rng = derive_rng(config.seed, 0xba5eULL);
        std::vector<std::vector<CellId>> histories(config.baseline_samples);
        std::vector<CellId> labels(config.baseline_samples);
        for (std::size_t i = 0; i < config.baseline_samples; ++i) {
            histories[i].resize(config.history_length);
            for (CellId& h : histories[i]) h = neighbors[uniform_index(rng, neighbors.size())];
            labels[i] = neighbors[uniform_index(rng, neighbors.size())];
        }

        // Shared 90/10 split across every history length.
        std::vector<std::size_t> order(config.baseline_samples);
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t k = order.size(); k > 1; --k)
            std::swap(order[k - 1], order[uniform_index(rng, k)]);
        const auto n_train = static_cast<std::size_t>(
            std::ceil(config.train_fraction * static_cast<double>(order.size())));

        AccuracyReport report;
        for (std::size_t k_used = 2; k_used <= config.history_length; ++k_used) {
            const double ratio =
                static_cast<double>(k_used) / static_cast<double>(config.history_length);
            FeatureMatrix train_x(k_used * neighbors.size());
            std::vector<int> train_y;
            FeatureMatrix test_x(k_used * neighbors.size());
            std::vector<int> test_y;
            for (std::size_t k = 0; k < order.size(); ++k) {
                const std::size_t i = order[k];
                const std::vector<double> v = encode_history(histories[i], k_used, neighbors);
                if (k < n_train) {
                    train_x.push_row(v);
                    train_y.push_back(labels[i]);
                } else {
                    test_x.push_row(v);
                    test_y.push_back(labels[i]);
                }
            }

            auto [scaler, xs] = standardize(train_x);
            Rng gs_rng = derive_rng(config.seed, 0xbb00ULL + k_used);
            FeatureMatrix sub = xs;  // grid search on a 50% subset
            std::vector<int> sub_y = train_y;
            {
                std::vector<std::size_t> idx(xs.rows());
                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                for (std::size_t k2 = idx.size(); k2 > 1; --k2)
                    std::swap(idx[k2 - 1], idx[uniform_index(gs_rng, k2)]);
                idx.resize(std::max<std::size_t>(2, idx.size() / 2));
                FeatureMatrix sx(xs.dim);
                std::vector<int> sy;
                for (std::size_t i : idx) {
                    sx.data.insert(sx.data.end(), xs.row(i), xs.row(i) + xs.dim);
                    sy.push_back(train_y[i]);
                }
                sub = std::move(sx);
                sub_y = std::move(sy);
            }
            const std::vector<double> c_grid =
                config.bank.c_grid.empty() ? svm::default_c_grid() : config.bank.c_grid;
            const std::vector<double> gamma_grid =
                config.bank.gamma_grid.empty() ? svm::default_gamma_grid() : config.bank.gamma_grid;
            const svm::GridSearchResult gs =
                svm::grid_search(sub, sub_y, c_grid, gamma_grid, config.bank.folds, gs_rng,
                                 config.bank.kernel, config.bank.tol, config.bank.solver);
            const svm::KernelParams params{config.bank.kernel, gs.best_gamma};
            const svm::MultiClassModel model =
                svm::train_multiclass(xs, train_y, gs.best_C, params, config.bank.tol,
                                      config.bank.solver);

            std::map<CellId, std::pair<std::size_t, std::size_t>> per_label;
            std::size_t correct = 0;
            for (std::size_t i = 0; i < test_x.rows(); ++i) {
                std::vector<double> v(test_x.row(i), test_x.row(i) + test_x.dim);
                const int predicted = svm::predict_multiclass(model, scaler.apply(v));
                auto& [t, c] = per_label[test_y[i]];
                ++t;
                if (predicted == test_y[i]) {
                    ++c;
                    ++correct;
                }
            }
            for (const auto& [label, counts] : per_label)
                report.rows.push_back({ratio, label, counts.first, counts.second,
                                       static_cast<double>(counts.second) /
                                           static_cast<double>(counts.first)});
            report.rows.push_back({ratio, -1, test_x.rows(), correct,
                                   static_cast<double>(correct) /
                                       static_cast<double>(test_x.rows())});
            std::cout << "history " << k_used << "/" << config.history_length << " (ratio "
                      << std::fixed << std::setprecision(3) << ratio << ")  overall "
                      << std::setprecision(4)
                      << static_cast<double>(correct) / static_cast<double>(test_x.rows()) << '\n';
        }

        const std::string out = (fs::path(config.out_dir) / "baseline.csv").string();
        write_accuracy_csv(report, out);
        write_manifest(config, "baseline", config_fingerprint(config), {out});
        std::cout << "report -> " << out << '\n';
        return kOk;
    });
}

int cmd_online(const ExperimentConfig& config) {
    return guarded([&] {
        fs::create_directories(config.out_dir);
        ScenarioConfig sc = config.scenario;
        BuiltScenario scenario = build_scenario(sc);

        OnlineConfig oc = config.online;
        oc.seed = config.seed;
        oc.v_min = sc.v_min;
        oc.v_max = sc.v_max;
        oc.carrier_hz = sc.carrier_hz;
        oc.sample_period = sc.sample_period;
        if (oc.bank.c_grid.empty()) oc.bank.c_grid = config.bank.c_grid;
        if (oc.bank.gamma_grid.empty()) oc.bank.gamma_grid = config.bank.gamma_grid;
        oc.bank.feature_length = config.bank.feature_length;

        const OnlineLog log = run_online(scenario.topology, oc,
                                         scenario.map ? &*scenario.map : nullptr);

        const std::string log_path = (fs::path(config.out_dir) / "online_log.csv").string();
        const std::string series_path = (fs::path(config.out_dir) / "online_series.csv").string();
        write_log_csv(log, log_path);
        write_series_csv(log, oc.accuracy_window, series_path);
        write_manifest(config, "online", config_fingerprint(config), {log_path, series_path});
        std::cout << "online run: " << log.records.size() << " predictions, "
                  << log.retrains.size() << " retrains -> " << log_path << '\n';
        return kOk;
    });
}

int cmd_inspect_model(const std::string& bank_path) {
    return guarded([&] {
        const ClassifierBank bank = load_bank(bank_path);
        std::cout << "bank: " << bank_path << "\nfeature length: " << bank.feature_length
                  << "\ntrained ratio: " << bank.trained_ratio
                  << "\nclassifiers: " << bank.classifiers.size() << '\n';
        for (const auto& [prev, clf] : bank.classifiers) {
            std::cout << "  prev " << prev << ": " << clf.n_samples << " samples";
            if (clf.constant) {
                std::cout << ", constant -> " << clf.constant_label << '\n';
                continue;
            }
            std::size_t svs = 0;
            for (const auto& m : clf.model.pairwise) svs += m.support_vectors.rows();
            std::cout << ", classes " << clf.model.classes.size() << ", C " << clf.chosen_C
                      << ", gamma " << clf.chosen_gamma << ", cv " << clf.cv_accuracy << ", SVs "
                      << svs << '\n';
        }
        return kOk;
    });
}

int run(int argc, char** argv) {
    CLI::App app{"Cellular next-cell prediction toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string ratio_grid_arg;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t samples_per_path = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option_function<std::uint64_t>(
               "--seed", [&](std::uint64_t v) { seed = v, seed_set = true; },
               "RNG seed (overrides config)");
        cmd->add_option("--ratio-grid", ratio_grid_arg, "comma-separated ratios in (0,1]");
        cmd->add_option("--samples-per-path", samples_per_path, "traversals per path");
    };

    CLI::App* generate = app.add_subcommand("generate", "simulate a labeled traversal dataset");
    CLI::App* offline = app.add_subcommand("offline", "accuracy-vs-ratio sweep on a dataset");
    CLI::App* baseline = app.add_subcommand("baseline", "handover-history baseline sweep");
    CLI::App* online = app.add_subcommand("online", "real-time feedback-learning run");
    add_common(generate);
    add_common(offline);
    add_common(baseline);
    add_common(online);

    std::string model_path;
    CLI::App* inspect = app.add_subcommand("inspect-model", "summarize a saved bank");
    inspect->add_option("model", model_path, "bank file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidationError;
    }

    if (inspect->parsed()) return cmd_inspect_model(model_path);

    return guarded([&] {
        ExperimentConfig config = ExperimentConfig::from_json_file(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (seed_set) config.seed = seed;
        if (samples_per_path > 0) config.samples_per_path = samples_per_path;
        if (!ratio_grid_arg.empty()) {
            config.ratio_grid.clear();
            std::stringstream ss(ratio_grid_arg);
            std::string tok;
            while (std::getline(ss, tok, ','))
                config.ratio_grid.push_back(std::stod(tok));
            config.validate();
        }

        if (generate->parsed()) return cmd_generate(config);
        if (offline->parsed()) return cmd_offline(config);
        if (baseline->parsed()) return cmd_baseline(config);
        if (online->parsed()) return cmd_online(config);
        return static_cast<int>(kValidationError);
    });
}

} // namespace nextcell::cli
