// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nextcell/geometry.hpp"
#include "nextcell/rng.hpp"

namespace nextcell {

using CellId = int;
using PathId = int;

/// Cardinal side of a rectangular cell; used to label entry/exit boundaries.
enum class Side : int { north = 0, east = 1, south = 2, west = 3 };

const char* side_name(Side s);
std::optional<Side> side_from_name(const std::string& name);

/// A route through a cell: a polyline from one boundary point to another,
/// labeled with the neighbor cells it connects.
struct PathSpec {
    PathId path_id = 0;
    std::vector<Vec2> waypoints;
    CellId entry_neighbor = -1;
    CellId exit_neighbor = -1;

    double length() const { return polyline_length(waypoints); }
};

/// Piecewise-constant path-loss exponent over the four quadrants around a
/// split point. Order: SW, SE, NW, NE.
struct AlphaMap {
    Vec2 split{0.0, 0.0};
    std::array<double, 4> values{2.0, 2.5, 3.0, 3.5};

    double at(Vec2 p) const {
        const int qx = p.x < split.x ? 0 : 1;
        const int qy = p.y < split.y ? 0 : 1;
        return values[static_cast<std::size_t>(qy * 2 + qx)];
    }
};

struct CellTopology {
    CellId cell_id = 0;
    Rect bounds;
    Vec2 bs_position;
    std::array<CellId, 4> side_neighbors{};  // indexed by Side
    std::vector<CellId> neighbor_ids;
    std::vector<PathSpec> paths;
    AlphaMap alpha_map;

    CellId neighbor(Side s) const { return side_neighbors[static_cast<std::size_t>(s)]; }
    /// Side of the boundary a point lies on; throws ConfigError when the point
    /// is not on the boundary.
    Side boundary_side(Vec2 p) const;
    /// Enforces all structural invariants; throws ConfigError on violation.
    void validate() const;
};

/// One user's pass through the cell, sampled at a fixed period.
struct Trajectory {
    PathId path_id = 0;
    double speed = 0.0;          // m/s
    double sample_period = 0.0;  // s
    std::vector<Vec2> positions;
    double t_in = 0.0;
    double t_out = 0.0;
};

/// Gridded average channel gain over a cell area (linear power units).
/// Node (r, c) sits at origin + (c, r) * cell_size; values are row-major.
struct RadioMap {
    CellId cell_id = 0;
    Vec2 origin;
    double cell_size = 0.0;  // meters between grid nodes
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> gains;

    Rect extent() const {
        return {origin.x, origin.y, origin.x + cell_size * static_cast<double>(cols - 1),
                origin.y + cell_size * static_cast<double>(rows - 1)};
    }
    bool covers(const Rect& r, double eps = 1e-9) const;
    /// Bilinear interpolation; throws ConfigError when p is outside the grid.
    double interpolate(Vec2 p) const;
};

/// The fixed 75 m x 75 m four-neighbor grid cell with two horizontal and two
/// vertical streets, 8 straight-through and 8 turning paths. The seed is kept
/// for interface stability; the geometry is fully deterministic.
CellTopology build_manhattan(std::uint64_t seed);

/// As build_manhattan but with configurable neighbor ids and quadrant
/// exponents (order SW, SE, NW, NE).
CellTopology build_manhattan(std::uint64_t seed, CellId cell_id,
                             const std::array<CellId, 4>& side_neighbors,
                             const std::array<double, 4>& alpha_quadrants);

/// Synthetic radio-map scenario: a 100 m x 100 m cell with a 3x3 street grid,
/// 28 paths over 4 labels, and a seeded smooth gain field standing in for a
/// measured map.
struct RadioMapScenario {
    CellTopology topology;
    RadioMap map;
};
RadioMapScenario build_radiomap_demo(std::uint64_t seed);

/// Constant-speed traversal of one specific path, sampled at sample_period.
Trajectory trajectory_on_path(const PathSpec& path, double speed, double sample_period,
                              double t_in = 0.0);

/// Draws a path uniformly from the topology and a speed uniformly from
/// [v_min, v_max], then samples positions by arc-length stepping.
/// Throws ConfigError on an empty path set or invalid speed range / period.
Trajectory sample_traversal(const CellTopology& topology, Rng& rng, double v_min, double v_max,
                            double sample_period, double t_in = 0.0);

/// Radio-map CSV: a named header line, one line with the header values, then
/// rows lines of cols comma-separated gains (row-major, linear units).
RadioMap load_radio_map(const std::string& path);
RadioMap read_radio_map(std::istream& in, const std::string& what);
void save_radio_map(const RadioMap& map, const std::string& path);

/// Scenario description loaded from a JSON config file.
struct ScenarioConfig {
    enum class Kind { manhattan, custom, radiomap_demo };
    Kind kind = Kind::manhattan;
    std::uint64_t seed = 1;
    double v_min = 5.0;
    double v_max = 40.0;
    double sample_period = 0.02;
    double carrier_hz = 2.0e9;
    CellId cell_id = 0;
    std::array<CellId, 4> side_neighbors{1, 2, 3, 4};  // N, E, S, W
    std::array<double, 4> alpha_quadrants{2.0, 2.5, 3.0, 3.5};
    std::optional<std::string> radio_map_file;  // custom scenarios may use a map
    Rect bounds{0.0, 0.0, 75.0, 75.0};
    Vec2 bs_position{37.5, 37.5};
    std::vector<PathSpec> custom_paths;

    static ScenarioConfig from_json_file(const std::string& path);
    static ScenarioConfig from_json_text(const std::string& text, const std::string& what);
};

/// Materializes the configured topology (and map, when the scenario uses one).
struct BuiltScenario {
    CellTopology topology;
    std::optional<RadioMap> map;
};
BuiltScenario build_scenario(const ScenarioConfig& config);

} // namespace nextcell
