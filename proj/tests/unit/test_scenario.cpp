// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nextcell/error.hpp"
#include "nextcell/scenario.hpp"

using namespace nextcell;

TEST_CASE("manhattan cell has 16 paths over 4 labels") {
    const CellTopology topo = build_manhattan(1);
    CHECK(topo.paths.size() == 16);
    CHECK(topo.bounds.width() == doctest::Approx(75.0));
    CHECK(topo.bounds.height() == doctest::Approx(75.0));
    CHECK(topo.bs_position == Vec2{37.5, 37.5});
    CHECK(topo.neighbor_ids.size() == 4);

    std::set<CellId> exits, entries;
    std::map<CellId, int> exit_count;
    for (const PathSpec& p : topo.paths) {
        exits.insert(p.exit_neighbor);
        entries.insert(p.entry_neighbor);
        ++exit_count[p.exit_neighbor];
        CHECK(topo.bounds.on_boundary(p.waypoints.front()));
        CHECK(topo.bounds.on_boundary(p.waypoints.back()));
    }
    CHECK(exits.size() == 4);
    CHECK(entries.size() == 4);
    for (const auto& [label, count] : exit_count) CHECK(count == 4);  // balanced labels

    int straight = 0;
    for (const PathSpec& p : topo.paths)
        if (p.waypoints.size() == 2) ++straight;
    CHECK(straight == 8);
}

TEST_CASE("manhattan topology is deterministic") {
    const CellTopology a = build_manhattan(1);
    const CellTopology b = build_manhattan(1);
    REQUIRE(a.paths.size() == b.paths.size());
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        CHECK(a.paths[i].waypoints == b.paths[i].waypoints);
        CHECK(a.paths[i].entry_neighbor == b.paths[i].entry_neighbor);
        CHECK(a.paths[i].exit_neighbor == b.paths[i].exit_neighbor);
    }
}

TEST_CASE("alpha map partitions the cell into four quadrants") {
    const CellTopology topo = build_manhattan(1);
    CHECK(topo.alpha_map.at({10, 10}) == doctest::Approx(2.0));  // SW
    CHECK(topo.alpha_map.at({60, 10}) == doctest::Approx(2.5));  // SE
    CHECK(topo.alpha_map.at({10, 60}) == doctest::Approx(3.0));  // NW
    CHECK(topo.alpha_map.at({60, 60}) == doctest::Approx(3.5));  // NE
}

TEST_CASE("fixed-speed straight path has arc-length duration") {
    const CellTopology topo = build_manhattan(1);
    Rng rng = make_rng(9);
    const Trajectory traj = trajectory_on_path(topo.paths[0], 10.0, 0.02);  // 75 m at 10 m/s
    CHECK(traj.t_out - traj.t_in == doctest::Approx(7.5).epsilon(1e-12));

    // Every sampled traversal's duration matches its own path length / speed.
    for (int it = 0; it < 200; ++it) {
        const Trajectory t = sample_traversal(topo, rng, 5.0, 40.0, 0.02);
        const PathSpec* path = nullptr;
        for (const PathSpec& p : topo.paths)
            if (p.path_id == t.path_id) path = &p;
        REQUIRE(path != nullptr);
        const double expected = path->length() / t.speed;
        CHECK(t.t_out - t.t_in >= expected - 1e-9);
        CHECK(t.t_out - t.t_in <= expected + 0.02 + 1e-9);
    }
}

TEST_CASE("trajectory positions stay in bounds and end on the boundary") {
    const CellTopology topo = build_manhattan(1);
    Rng rng = make_rng(5);
    for (int it = 0; it < 50; ++it) {
        const Trajectory t = sample_traversal(topo, rng, 5.0, 40.0, 0.02);
        for (const Vec2& p : t.positions) CHECK(topo.bounds.contains(p, 1e-9));
        CHECK(topo.bounds.on_boundary(t.positions.back(), 1e-9));

        // Arc-length parametrization: spacing v*dt except the last partial step.
        double total = 0.0;
        for (std::size_t k = 1; k < t.positions.size(); ++k) {
            const double step = distance(t.positions[k - 1], t.positions[k]);
            total += step;
            if (k + 1 < t.positions.size())
                CHECK(step == doctest::Approx(t.speed * 0.02).epsilon(1e-6));
        }
        const PathSpec* path = nullptr;
        for (const PathSpec& p : topo.paths)
            if (p.path_id == t.path_id) path = &p;
        CHECK(std::abs(total - path->length()) <= t.speed * 0.02 + 1e-9);
    }
}

TEST_CASE("path and speed choices are uniform and independent") {
    const CellTopology topo = build_manhattan(1);
    Rng rng = make_rng(12345);
    const std::size_t draws = 100000;
    std::map<PathId, std::size_t> path_count;
    std::map<PathId, std::array<std::size_t, 4>> joint;  // (path, speed quartile)
    for (std::size_t i = 0; i < draws; ++i) {
        const Trajectory t = sample_traversal(topo, rng, 5.0, 40.0, 10.0);
        ++path_count[t.path_id];
        const auto q = std::min<std::size_t>(3, static_cast<std::size_t>((t.speed - 5.0) / 8.75));
        ++joint[t.path_id][q];
    }

    // Frequency within 1/16 +- 0.005 and a goodness-of-fit check
    // (df 15, significance 0.001 -> 37.697).
    const double expected = static_cast<double>(draws) / 16.0;
    double chi2 = 0.0;
    REQUIRE(path_count.size() == 16);
    for (const auto& [id, count] : path_count) {
        const double freq = static_cast<double>(count) / static_cast<double>(draws);
        CHECK(std::abs(freq - 1.0 / 16.0) < 0.005);
        const double d = static_cast<double>(count) - expected;
        chi2 += d * d / expected;
    }
    CHECK(chi2 < 37.697);

    // Independence: chi-square on the 16x4 contingency table
    // (df 45, significance 0.001 -> 80.077).
    std::array<std::size_t, 4> quartile_total{};
    for (const auto& [id, row] : joint)
        for (std::size_t q = 0; q < 4; ++q) quartile_total[q] += row[q];
    double chi2_ind = 0.0;
    for (const auto& [id, row] : joint) {
        const double row_total = static_cast<double>(path_count[id]);
        for (std::size_t q = 0; q < 4; ++q) {
            const double e =
                row_total * static_cast<double>(quartile_total[q]) / static_cast<double>(draws);
            const double d = static_cast<double>(row[q]) - e;
            chi2_ind += d * d / e;
        }
    }
    CHECK(chi2_ind < 80.077);
}

TEST_CASE("sampling from an empty path set fails") {
    CellTopology topo = build_manhattan(1);
    topo.paths.clear();
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(sample_traversal(topo, rng, 5, 40, 0.02), ConfigError);
}

TEST_CASE("radio map: constant 2x2 grid interpolates to the constant") {
    RadioMap map;
    map.cell_id = 0;
    map.origin = {0, 0};
    map.cell_size = 10.0;
    map.rows = map.cols = 2;
    map.gains = {1.0, 1.0, 1.0, 1.0};
    for (double x : {0.0, 2.5, 9.99})
        for (double y : {0.0, 5.0, 10.0}) CHECK(map.interpolate({x, y}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(map.interpolate({11.0, 0.0}), ConfigError);
}

TEST_CASE("radio map: hand-computed bilinear values on a 3x3 ramp") {
    RadioMap map;
    map.origin = {0, 0};
    map.cell_size = 1.0;
    map.rows = map.cols = 3;
    map.gains = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(map.interpolate({0.5, 0.5}) == doctest::Approx(3.0));
    CHECK(map.interpolate({1.25, 0.75}) == doctest::Approx(4.5));
    CHECK(map.interpolate({2.0, 2.0}) == doctest::Approx(9.0));
}

TEST_CASE("radio map file round trip and error cases") {
    RadioMap map;
    map.cell_id = 7;
    map.origin = {1.5, -2.0};
    map.cell_size = 2.5;
    map.rows = 3;
    map.cols = 4;
    for (std::size_t i = 0; i < 12; ++i) map.gains.push_back(0.25 * static_cast<double>(i + 1));

    const std::string path = "test_radio_map.csv";
    save_radio_map(map, path);
    const RadioMap loaded = load_radio_map(path);
    CHECK(loaded.cell_id == 7);
    CHECK(loaded.rows == 3);
    CHECK(loaded.cols == 4);
    CHECK(loaded.gains == map.gains);
    CHECK(loaded.interpolate({2.0, 0.0}) == doctest::Approx(map.interpolate({2.0, 0.0})));

    SUBCASE("single row cannot interpolate") {
        std::istringstream in("cell_id,origin_x,origin_y,cell_size,rows,cols\n0,0,0,1,1,3\n1,1,1\n");
        CHECK_THROWS_AS(read_radio_map(in, "t"), ConfigError);
    }
    SUBCASE("non-positive gain rejected") {
        std::istringstream in("cell_id,origin_x,origin_y,cell_size,rows,cols\n0,0,0,1,2,2\n1,1\n0,1\n");
        CHECK_THROWS_AS(read_radio_map(in, "t"), ConfigError);
    }
    SUBCASE("wrong value count rejected") {
        std::istringstream in("cell_id,origin_x,origin_y,cell_size,rows,cols\n0,0,0,1,2,2\n1,1\n1\n");
        CHECK_THROWS_AS(read_radio_map(in, "t"), CorruptFileError);
    }
    SUBCASE("bad header rejected") {
        std::istringstream in("foo,bar\n0,0,0,1,2,2\n1,1\n1,1\n");
        CHECK_THROWS_AS(read_radio_map(in, "t"), CorruptFileError);
    }
    SUBCASE("non-numeric gain rejected") {
        std::istringstream in("cell_id,origin_x,origin_y,cell_size,rows,cols\n0,0,0,1,2,2\n1,x\n1,1\n");
        CHECK_THROWS_AS(read_radio_map(in, "t"), CorruptFileError);
    }
}

TEST_CASE("radio-map demo scenario shape") {
    const RadioMapScenario demo = build_radiomap_demo(3);
    CHECK(demo.topology.paths.size() >= 26);
    std::set<CellId> labels;
    for (const PathSpec& p : demo.topology.paths) labels.insert(p.exit_neighbor);
    CHECK(labels.size() >= 3);
    CHECK(demo.map.covers(demo.topology.bounds));
    for (double g : demo.map.gains) CHECK(g > 0.0);

    const RadioMapScenario again = build_radiomap_demo(3);
    CHECK(again.map.gains == demo.map.gains);
}

TEST_CASE("scenario config parsing") {
    const std::string text = R"({
        "kind": "manhattan",
        "seed": 11,
        "speed_range": [5, 40],
        "sample_period": 0.02,
        "neighbors": {"north": 10, "east": 20, "south": 30, "west": 40}
    })";
    const ScenarioConfig cfg = ScenarioConfig::from_json_text(text, "inline");
    CHECK(cfg.seed == 11);
    const BuiltScenario built = build_scenario(cfg);
    CHECK(built.topology.neighbor(Side::north) == 10);
    CHECK(built.topology.paths.size() == 16);
    CHECK(!built.map.has_value());

    CHECK_THROWS_AS(ScenarioConfig::from_json_text("{nope", "inline"), CorruptFileError);
    CHECK_THROWS_AS(ScenarioConfig::from_json_text(R"({"kind": "bogus"})", "inline"), ConfigError);
    CHECK_THROWS_AS(ScenarioConfig::from_json_text(R"({"speed_range": [0, 5]})", "inline"),
                    ConfigError);
}
