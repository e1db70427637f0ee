// SPDX-License-Identifier: Apache-2.0
#include "nextcell/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nextcell/error.hpp"

namespace nextcell {

using json = nlohmann::json;

namespace {

constexpr double kBoundaryEps = 1e-9;

void check(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

double parse_double(const std::string& tok, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw CorruptFileError(what + ": bad numeric value '" + tok + "'");
    }
}

long parse_long(const std::string& tok, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw CorruptFileError(what + ": bad integer value '" + tok + "'");
    }
}

} // namespace

const char* side_name(Side s) {
    switch (s) {
        case Side::north: return "north";
        case Side::east: return "east";
        case Side::south: return "south";
        case Side::west: return "west";
    }
    return "?";
}

std::optional<Side> side_from_name(const std::string& name) {
    for (Side s : {Side::north, Side::east, Side::south, Side::west})
        if (name == side_name(s)) return s;
    return std::nullopt;
}

Side CellTopology::boundary_side(Vec2 p) const {
    if (std::abs(p.y - bounds.y1) <= kBoundaryEps) return Side::north;
    if (std::abs(p.x - bounds.x1) <= kBoundaryEps) return Side::east;
    if (std::abs(p.y - bounds.y0) <= kBoundaryEps) return Side::south;
    if (std::abs(p.x - bounds.x0) <= kBoundaryEps) return Side::west;
    throw ConfigError("point is not on the cell boundary");
}

void CellTopology::validate() const {
    check(bounds.width() > 0 && bounds.height() > 0, "cell bounds must be non-degenerate");
    check(bounds.contains(bs_position), "BS position must lie inside the cell");
    check(!neighbor_ids.empty(), "cell must have at least one neighbor");
    for (double a : alpha_map.values)
        check(a >= 1.5 && a <= 6.0, "path-loss exponent out of range [1.5, 6.0]");
    check(bounds.contains(alpha_map.split), "alpha map split point must lie within bounds");

    std::set<PathId> ids;
    for (const PathSpec& p : paths) {
        check(p.waypoints.size() >= 2, "path needs at least two waypoints");
        check(ids.insert(p.path_id).second, "duplicate path id");
        for (std::size_t i = 1; i < p.waypoints.size(); ++i)
            check(distance(p.waypoints[i - 1], p.waypoints[i]) > 0.0,
                  "consecutive waypoints must be distinct");
        check(p.length() > 0.0, "path must have positive length");
        check(bounds.on_boundary(p.waypoints.front(), kBoundaryEps),
              "path entry point must be on the cell boundary");
        check(bounds.on_boundary(p.waypoints.back(), kBoundaryEps),
              "path exit point must be on the cell boundary");
        const Side entry_side = boundary_side(p.waypoints.front());
        const Side exit_side = boundary_side(p.waypoints.back());
        check(neighbor(entry_side) == p.entry_neighbor,
              "path entry label does not match its boundary side");
        check(neighbor(exit_side) == p.exit_neighbor,
              "path exit label does not match its boundary side");
        const auto known = [&](CellId id) {
            return std::find(neighbor_ids.begin(), neighbor_ids.end(), id) != neighbor_ids.end();
        };
        check(known(p.entry_neighbor) && known(p.exit_neighbor),
              "path labels must reference known neighbors");
        for (const Vec2& w : p.waypoints)
            check(bounds.contains(w, kBoundaryEps), "waypoints must stay within the cell");
    }
}

bool RadioMap::covers(const Rect& r, double eps) const {
    const Rect e = extent();
    return e.x0 <= r.x0 + eps && e.y0 <= r.y0 + eps && e.x1 >= r.x1 - eps && e.y1 >= r.y1 - eps;
}

double RadioMap::interpolate(Vec2 p) const {
    const double fx = (p.x - origin.x) / cell_size;
    const double fy = (p.y - origin.y) / cell_size;
    const double max_x = static_cast<double>(cols - 1);
    const double max_y = static_cast<double>(rows - 1);
    if (fx < -kBoundaryEps || fx > max_x + kBoundaryEps || fy < -kBoundaryEps ||
        fy > max_y + kBoundaryEps)
        throw ConfigError("position outside radio-map bounds");
    const double cx = std::clamp(fx, 0.0, max_x);
    const double cy = std::clamp(fy, 0.0, max_y);
    auto c0 = static_cast<std::size_t>(cx);
    auto r0 = static_cast<std::size_t>(cy);
    if (c0 >= cols - 1) c0 = cols - 2;
    if (r0 >= rows - 1) r0 = rows - 2;
    const double tx = cx - static_cast<double>(c0);
    const double ty = cy - static_cast<double>(r0);
    const double g00 = gains[r0 * cols + c0];
    const double g01 = gains[r0 * cols + c0 + 1];
    const double g10 = gains[(r0 + 1) * cols + c0];
    const double g11 = gains[(r0 + 1) * cols + c0 + 1];
    return (1 - ty) * ((1 - tx) * g00 + tx * g01) + ty * ((1 - tx) * g10 + tx * g11);
}

CellTopology build_manhattan(std::uint64_t seed) {
    return build_manhattan(seed, 0, {1, 2, 3, 4}, {2.0, 2.5, 3.0, 3.5});
}

CellTopology build_manhattan(std::uint64_t /*seed*/, CellId cell_id,
                             const std::array<CellId, 4>& side_neighbors,
                             const std::array<double, 4>& alpha_quadrants) {
    CellTopology topo;
    topo.cell_id = cell_id;
    topo.bounds = {0.0, 0.0, 75.0, 75.0};
    topo.bs_position = {37.5, 37.5};
    topo.side_neighbors = side_neighbors;
    topo.neighbor_ids.assign(side_neighbors.begin(), side_neighbors.end());
    topo.alpha_map.split = topo.bs_position;
    topo.alpha_map.values = alpha_quadrants;

    // Streets at x,y = 25 and 50. Straight-through paths on each street in
    // both directions, plus one left and one right turn at each of the four
    // intersections.
    const double lo = 25.0, hi = 50.0, max = 75.0;
    PathId next_id = 1;
    auto add = [&](std::vector<Vec2> wps) {
        PathSpec p;
        p.path_id = next_id++;
        p.waypoints = std::move(wps);
        p.entry_neighbor = side_neighbors[static_cast<std::size_t>(topo.boundary_side(p.waypoints.front()))];
        p.exit_neighbor = side_neighbors[static_cast<std::size_t>(topo.boundary_side(p.waypoints.back()))];
        topo.paths.push_back(std::move(p));
    };

    add({{0, lo}, {max, lo}});
    add({{max, lo}, {0, lo}});
    add({{0, hi}, {max, hi}});
    add({{max, hi}, {0, hi}});
    add({{lo, 0}, {lo, max}});
    add({{lo, max}, {lo, 0}});
    add({{hi, 0}, {hi, max}});
    add({{hi, max}, {hi, 0}});

    add({{0, lo}, {lo, lo}, {lo, 0}});
    add({{lo, 0}, {lo, lo}, {0, lo}});
    add({{max, lo}, {hi, lo}, {hi, 0}});
    add({{hi, 0}, {hi, lo}, {max, lo}});
    add({{0, hi}, {lo, hi}, {lo, max}});
    add({{lo, max}, {lo, hi}, {0, hi}});
    add({{max, hi}, {hi, hi}, {hi, max}});
    add({{hi, max}, {hi, hi}, {max, hi}});

    topo.validate();
    return topo;
}

RadioMapScenario build_radiomap_demo(std::uint64_t seed) {
    CellTopology topo;
    topo.cell_id = 0;
    topo.bounds = {0.0, 0.0, 100.0, 100.0};
    topo.bs_position = {50.0, 50.0};
    topo.side_neighbors = {1, 2, 3, 4};
    topo.neighbor_ids = {1, 2, 3, 4};
    topo.alpha_map.split = topo.bs_position;

    PathId next_id = 1;
    auto add = [&](std::vector<Vec2> wps) {
        PathSpec p;
        p.path_id = next_id++;
        p.waypoints = std::move(wps);
        p.entry_neighbor = topo.side_neighbors[static_cast<std::size_t>(topo.boundary_side(p.waypoints.front()))];
        p.exit_neighbor = topo.side_neighbors[static_cast<std::size_t>(topo.boundary_side(p.waypoints.back()))];
        topo.paths.push_back(std::move(p));
    };

    // Streets at x,y = 20, 50, 80: 12 straight-through paths.
    for (double y : {20.0, 50.0, 80.0}) {
        add({{0, y}, {100, y}});
        add({{100, y}, {0, y}});
    }
    for (double x : {20.0, 50.0, 80.0}) {
        add({{x, 0}, {x, 100}});
        add({{x, 100}, {x, 0}});
    }
    // 16 turning paths, four per entry side. One pair (the last west entry
    // against the straight on the same street) only separates at 80% of the
    // traversal, mirroring measured scenarios where some routes stay merged
    // until late in the cell.
    add({{0, 20}, {20, 20}, {20, 0}});
    add({{0, 20}, {50, 20}, {50, 100}});
    add({{0, 50}, {50, 50}, {50, 0}});
    add({{0, 80}, {80, 80}, {80, 100}});

    add({{100, 20}, {80, 20}, {80, 0}});
    add({{100, 20}, {50, 20}, {50, 100}});
    add({{100, 50}, {50, 50}, {50, 0}});
    add({{100, 80}, {20, 80}, {20, 100}});

    add({{20, 0}, {20, 20}, {0, 20}});
    add({{50, 0}, {50, 50}, {100, 50}});
    add({{80, 0}, {80, 20}, {100, 20}});
    add({{50, 0}, {50, 80}, {0, 80}});

    add({{20, 100}, {20, 80}, {0, 80}});
    add({{50, 100}, {50, 50}, {100, 50}});
    add({{80, 100}, {80, 80}, {100, 80}});
    add({{50, 100}, {50, 20}, {0, 20}});

    topo.validate();

    // Synthetic gain map: distance law from the BS times a smooth seeded
    // shadowing field, sampled on a 2 m grid covering the cell.
    RadioMap map;
    map.cell_id = topo.cell_id;
    map.origin = {0.0, 0.0};
    map.cell_size = 2.0;
    map.rows = 51;
    map.cols = 51;
    map.gains.resize(map.rows * map.cols);

    Rng rng = make_rng(splitmix64(seed ^ 0x5ad10f1e1dULL));
    struct Wave {
        double kx, ky, phase;
    };
    std::vector<Wave> waves;
    for (int k = 0; k < 6; ++k) {
        const double wavelength = uniform_real(rng, 15.0, 60.0);
        const double angle = uniform_real(rng, 0.0, 2.0 * M_PI);
        const double w = 2.0 * M_PI / wavelength;
        waves.push_back({w * std::cos(angle), w * std::sin(angle), uniform_real(rng, 0.0, 2.0 * M_PI)});
    }
    for (std::size_t r = 0; r < map.rows; ++r) {
        for (std::size_t c = 0; c < map.cols; ++c) {
            const Vec2 p{map.origin.x + map.cell_size * static_cast<double>(c),
                         map.origin.y + map.cell_size * static_cast<double>(r)};
            const double d = std::max(distance(p, topo.bs_position), 1.0);
            double shadow = 0.0;
            for (const Wave& w : waves) shadow += std::cos(w.kx * p.x + w.ky * p.y + w.phase);
            map.gains[r * map.cols + c] = std::pow(d, -2.8) * std::exp(0.5 * shadow);
        }
    }
    return {std::move(topo), std::move(map)};
}

Trajectory trajectory_on_path(const PathSpec& path, double speed, double sample_period,
                              double t_in) {
    check(speed > 0.0, "speed must be positive");
    check(sample_period > 0.0, "sample period must be positive");
    Trajectory traj;
    traj.path_id = path.path_id;
    traj.speed = speed;
    traj.sample_period = sample_period;
    traj.positions = polyline_sample(path.waypoints, speed * sample_period);
    traj.t_in = t_in;
    traj.t_out = t_in + sample_period * static_cast<double>(traj.positions.size() - 1);
    return traj;
}

Trajectory sample_traversal(const CellTopology& topology, Rng& rng, double v_min, double v_max,
                            double sample_period, double t_in) {
    check(!topology.paths.empty(), "topology has no paths to sample from");
    check(v_min > 0.0 && v_min <= v_max, "speed range must satisfy 0 < v_min <= v_max");
    check(sample_period > 0.0, "sample period must be positive");

    const std::size_t idx = uniform_index(rng, topology.paths.size());
    const double speed = uniform_real(rng, v_min, v_max);
    return trajectory_on_path(topology.paths[idx], speed, sample_period, t_in);
}

RadioMap read_radio_map(std::istream& in, const std::string& what) {
    std::string line;
    if (!std::getline(in, line)) throw CorruptFileError(what + ": empty file");
    if (split_csv_line(line) != std::vector<std::string>{"cell_id", "origin_x", "origin_y",
                                                         "cell_size", "rows", "cols"})
        throw CorruptFileError(what + ": unexpected header line");
    if (!std::getline(in, line)) throw CorruptFileError(what + ": missing header values");
    const auto head = split_csv_line(line);
    if (head.size() != 6) throw CorruptFileError(what + ": header needs 6 values");

    RadioMap map;
    map.cell_id = static_cast<CellId>(parse_long(head[0], what));
    map.origin = {parse_double(head[1], what), parse_double(head[2], what)};
    map.cell_size = parse_double(head[3], what);
    const long rows = parse_long(head[4], what);
    const long cols = parse_long(head[5], what);
    if (map.cell_size <= 0.0) throw CorruptFileError(what + ": cell_size must be positive");
    if (rows < 2 || cols < 2)
        throw ConfigError(what + ": grid needs at least 2 rows and 2 columns to interpolate");
    map.rows = static_cast<std::size_t>(rows);
    map.cols = static_cast<std::size_t>(cols);

    map.gains.reserve(map.rows * map.cols);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (const std::string& tok : split_csv_line(line)) {
            const double g = parse_double(tok, what);
            if (!(g > 0.0)) throw ConfigError(what + ": gains must be positive");
            map.gains.push_back(g);
        }
    }
    if (map.gains.size() != map.rows * map.cols)
        throw CorruptFileError(what + ": expected " + std::to_string(map.rows * map.cols) +
                               " gain values, found " + std::to_string(map.gains.size()));
    return map;
}

RadioMap load_radio_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open radio map file: " + path);
    return read_radio_map(in, path);
}

void save_radio_map(const RadioMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write radio map file: " + path);
    out << "cell_id,origin_x,origin_y,cell_size,rows,cols\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%zu,%zu\n", map.cell_id, map.origin.x,
                  map.origin.y, map.cell_size, map.rows, map.cols);
    out << buf;
    for (std::size_t r = 0; r < map.rows; ++r) {
        for (std::size_t c = 0; c < map.cols; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", map.gains[r * map.cols + c]);
            out << buf << (c + 1 < map.cols ? "," : "\n");
        }
    }
    if (!out) throw IoError("failed writing radio map file: " + path);
}

namespace {

ScenarioConfig parse_scenario_json(const json& j, const std::string& what) {
    ScenarioConfig cfg;
    const std::string kind = j.value("kind", "manhattan");
    if (kind == "manhattan")
        cfg.kind = ScenarioConfig::Kind::manhattan;
    else if (kind == "custom")
        cfg.kind = ScenarioConfig::Kind::custom;
    else if (kind == "radiomap_demo")
        cfg.kind = ScenarioConfig::Kind::radiomap_demo;
    else
        throw ConfigError(what + ": unknown scenario kind '" + kind + "'");

    cfg.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("speed_range")) {
        const auto& sr = j.at("speed_range");
        if (!sr.is_array() || sr.size() != 2) throw ConfigError(what + ": speed_range must be [v_min, v_max]");
        cfg.v_min = sr[0].get<double>();
        cfg.v_max = sr[1].get<double>();
    }
    cfg.sample_period = j.value("sample_period", 0.02);
    cfg.carrier_hz = j.value("carrier_hz", 2.0e9);
    if (!(cfg.v_min > 0.0 && cfg.v_min <= cfg.v_max))
        throw ConfigError(what + ": speed range must satisfy 0 < v_min <= v_max");
    if (cfg.sample_period <= 0.0) throw ConfigError(what + ": sample_period must be positive");
    if (cfg.carrier_hz <= 0.0) throw ConfigError(what + ": carrier_hz must be positive");

    if (j.contains("cell")) {
        const auto& c = j.at("cell");
        cfg.cell_id = c.value("id", 0);
        if (c.contains("bounds")) {
            const auto& b = c.at("bounds");
            if (!b.is_array() || b.size() != 4) throw ConfigError(what + ": cell.bounds must be [x0,y0,x1,y1]");
            cfg.bounds = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        }
        if (c.contains("bs")) {
            const auto& b = c.at("bs");
            if (!b.is_array() || b.size() != 2) throw ConfigError(what + ": cell.bs must be [x,y]");
            cfg.bs_position = {b[0].get<double>(), b[1].get<double>()};
        }
    }
    if (j.contains("neighbors")) {
        const auto& n = j.at("neighbors");
        for (Side s : {Side::north, Side::east, Side::south, Side::west}) {
            if (!n.contains(side_name(s)))
                throw ConfigError(what + ": neighbors must name all four sides");
            cfg.side_neighbors[static_cast<std::size_t>(s)] = n.at(side_name(s)).get<CellId>();
        }
    }
    if (j.contains("alpha_quadrants")) {
        const auto& a = j.at("alpha_quadrants");
        if (!a.is_array() || a.size() != 4)
            throw ConfigError(what + ": alpha_quadrants must hold 4 values (SW,SE,NW,NE)");
        for (std::size_t i = 0; i < 4; ++i) cfg.alpha_quadrants[i] = a[i].get<double>();
    }
    if (j.contains("radio_map")) cfg.radio_map_file = j.at("radio_map").get<std::string>();
    if (j.contains("paths")) {
        for (const auto& pj : j.at("paths")) {
            PathSpec p;
            p.path_id = pj.at("id").get<PathId>();
            p.entry_neighbor = pj.at("entry").get<CellId>();
            p.exit_neighbor = pj.at("exit").get<CellId>();
            for (const auto& wj : pj.at("waypoints")) {
                if (!wj.is_array() || wj.size() != 2)
                    throw ConfigError(what + ": waypoints must be [x,y] pairs");
                p.waypoints.push_back({wj[0].get<double>(), wj[1].get<double>()});
            }
            cfg.custom_paths.push_back(std::move(p));
        }
    }
    if (cfg.kind == ScenarioConfig::Kind::custom && cfg.custom_paths.empty())
        throw ConfigError(what + ": custom scenario needs a non-empty paths list");
    return cfg;
}

} // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text, const std::string& what) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw CorruptFileError(what + ": invalid JSON: " + e.what());
    }
    return parse_scenario_json(j, what);
}

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), path);
}

BuiltScenario build_scenario(const ScenarioConfig& config) {
    switch (config.kind) {
        case ScenarioConfig::Kind::manhattan:
            return {build_manhattan(config.seed, config.cell_id, config.side_neighbors,
                                    config.alpha_quadrants),
                    std::nullopt};
        case ScenarioConfig::Kind::radiomap_demo: {
            RadioMapScenario demo = build_radiomap_demo(config.seed);
            return {std::move(demo.topology), std::move(demo.map)};
        }
        case ScenarioConfig::Kind::custom: {
            CellTopology topo;
            topo.cell_id = config.cell_id;
            topo.bounds = config.bounds;
            topo.bs_position = config.bs_position;
            topo.side_neighbors = config.side_neighbors;
            topo.neighbor_ids.assign(config.side_neighbors.begin(), config.side_neighbors.end());
            topo.alpha_map.split = config.bs_position;
            topo.alpha_map.values = config.alpha_quadrants;
            topo.paths = config.custom_paths;
            topo.validate();
            std::optional<RadioMap> map;
            if (config.radio_map_file) {
                map = load_radio_map(*config.radio_map_file);
                if (!map->covers(topo.bounds))
                    throw ConfigError("radio map does not cover the cell bounds");
            }
            return {std::move(topo), std::move(map)};
        }
    }
    throw ConfigError("unreachable scenario kind");
}

} // namespace nextcell
