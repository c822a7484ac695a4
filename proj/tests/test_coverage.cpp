#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <random>

#include "rsuplan/coverage.hpp"
#include "rsuplan/map_ingest.hpp"
#include "support/oracles.hpp"

using namespace rsuplan;

namespace {

Scene all_road_scene(double w, double h) {
  Scene scene;
  scene.bounds = {0, 0, w, h};
  scene.road_region = {{SimplePolygon{{{0, 0}, {w, 0}, {w, h}, {0, h}}}, {}}};
  return scene;
}

Scene plus_with_blocks() {
  const std::vector<RawBuilding> blocks = {
      {{{{0, 0}, {45, 0}, {45, 45}, {0, 45}}}},
      {{{{55, 0}, {100, 0}, {100, 45}, {55, 45}}}},
      {{{{0, 55}, {45, 55}, {45, 100}, {0, 100}}}},
      {{{{55, 55}, {100, 55}, {100, 100}, {55, 100}}}}};
  const std::vector<RawRoad> roads = {{{{0, 50}, {100, 50}}, 10.0, "test"},
                                      {{{50, 0}, {50, 100}}, 10.0, "test"}};
  return build_scene(blocks, roads, {0, 0, 100, 100});
}

// Hand-built table: one candidate row per entry of rss_by_candidate, tile ids
// dense 0..n_tiles-1.
VisibilityTable toy_table(int n_tiles,
                          const std::vector<std::vector<std::pair<int, double>>>& rows) {
  VisibilityTable t;
  t.candidate_count = static_cast<int>(rows.size());
  t.reference_count = n_tiles;
  t.by_candidate.resize(rows.size());
  t.by_tile.resize(static_cast<std::size_t>(n_tiles));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [tile, rss] : rows[i]) {
      t.by_candidate[i].push_back({tile, rss});
      t.by_tile[static_cast<std::size_t>(tile)].push_back({static_cast<int>(i), rss});
    }
  }
  return t;
}

}  // namespace

TEST_CASE("grid dimensions match the area of interest") {
  const Scene scene = all_road_scene(1000, 1000);
  const TileGrid grid = build_grid(scene, 4.0, 50.0);
  CHECK(grid.nx == 225);
  CHECK(grid.ny == 225);
  CHECK(grid.centers.size() == 225u * 225u);
  CHECK(grid.reference_count() == 225 * 225);  // everything is road here
  CHECK(grid.centers.front().x == Catch::Approx(52.0));
  CHECK(grid.centers.front().y == Catch::Approx(52.0));
}

TEST_CASE("reference tiles are exactly the road tiles") {
  const Scene scene = plus_with_blocks();
  const TileGrid grid = build_grid(scene, 4.0, 0.0);
  int expected = 0;
  for (const auto& c : grid.centers) {
    if (contains_point(scene.road_region, c)) ++expected;
  }
  CHECK(grid.reference_count() == expected);
  CHECK(grid.reference_count() < static_cast<int>(grid.centers.size()));
  for (int t = 0; t < grid.reference_count(); ++t) {
    CHECK(contains_point(scene.road_region, grid.reference_center(t)));
  }
}

TEST_CASE("an oversized margin is an error") {
  const Scene scene = all_road_scene(100, 100);
  CHECK_THROWS_AS(build_grid(scene, 4.0, 50.0), ValidationError);
  CHECK_THROWS_AS(build_grid(scene, 0.0, 1.0), ValidationError);
}

TEST_CASE("visibility in an empty-building scene reaches every tile") {
  const Scene scene = all_road_scene(80, 80);
  const TileGrid grid = build_grid(scene, 4.0, 0.0);
  const std::vector<CandidateSite> sites = {{0, {40, 40}, SiteKind::corner, {}}};
  const RadioParams radio{};
  const VisibilityTable table = build_visibility(scene, grid, sites, radio);
  REQUIRE(table.by_candidate[0].size() == grid.reference.size());
  for (const auto& sig : table.by_candidate[0]) {
    const double d = distance({40, 40}, grid.reference_center(sig.tile));
    CHECK(sig.rss == Catch::Approx(rss_dbm(radio, d)).margin(1e-12));
  }
}

TEST_CASE("a candidate walled in by a building has zero LOS tiles") {
  const std::vector<RawBuilding> block = {{{{{40, 40}, {60, 40}, {60, 60}, {40, 60}}}}};
  const std::vector<RawRoad> roads = {{{{0, 50}, {100, 50}}, 100.0, "test"}};
  const Scene scene = build_scene(block, roads, {0, 0, 100, 100});
  const TileGrid grid = build_grid(scene, 4.0, 0.0);
  const std::vector<CandidateSite> sites = {{0, {50, 50}, SiteKind::corner, {}}};
  const VisibilityTable table = build_visibility(scene, grid, sites, RadioParams{});
  CHECK(table.by_candidate[0].empty());
}

TEST_CASE("plus-junction visibility: the center sees all arms, a tip does not") {
  const Scene scene = plus_with_blocks();
  const TileGrid grid = build_grid(scene, 4.0, 0.0);
  const std::vector<CandidateSite> sites = {{0, {50, 50}, SiteKind::corner, {}},
                                            {1, {2, 48}, SiteKind::corner, {}}};
  const VisibilityTable table = build_visibility(scene, grid, sites, RadioParams{});
  // the junction is star-shaped from its center: nothing is blocked
  CHECK(table.by_candidate[0].size() == grid.reference.size());
  // the west-tip candidate cannot see around the blocks into the north arm
  CHECK(table.by_candidate[1].size() < grid.reference.size());
  for (const auto& sig : table.by_candidate[1]) {
    const Vec2 c = grid.reference_center(sig.tile);
    CHECK_FALSE(segment_blocked(scene, {2, 48}, c));  // list matches the predicate
  }
  int absent_checked = 0;
  for (int t = 0; t < grid.reference_count(); ++t) {
    const Vec2 c = grid.reference_center(t);
    if (c.y > 60.0 && std::abs(c.x - 50.0) < 5.0) {  // deep in the north arm
      CHECK(segment_blocked(scene, {2, 48}, c));
      ++absent_checked;
    }
  }
  REQUIRE(absent_checked > 0);
}

TEST_CASE("deployment evaluation on a tiny hand-checked instance") {
  // one candidate serving three tiles at -70/-80/-90 dBm
  const VisibilityTable table = toy_table(3, {{{0, -70}, {1, -80}, {2, -90}}});
  const CoverageReport r = evaluate_deployment(table, {0}, 2.0 / 3.0, -79.0);
  CHECK(r.required_count == 2);
  CHECK(r.covered_count == 3);
  CHECK(r.coverage_met);
  REQUIRE(r.mean_top_rss.has_value());
  CHECK(*r.mean_top_rss == Catch::Approx(-75.0));  // mean of the best two
  CHECK(r.rss_met);
  // a harder threshold flips only the RSS verdict
  const CoverageReport r2 = evaluate_deployment(table, {0}, 2.0 / 3.0, -74.0);
  CHECK(r2.coverage_met);
  CHECK_FALSE(r2.rss_met);
}

TEST_CASE("empty deployment covers nothing") {
  const VisibilityTable table = toy_table(4, {{{0, -70}}, {{1, -70}}});
  const CoverageReport r = evaluate_deployment(table, {}, 0.5, std::nullopt);
  CHECK(r.covered_count == 0);
  CHECK_FALSE(r.coverage_met);
  CHECK(r.rss_met);  // threshold disabled
  CHECK_FALSE(r.mean_top_rss.has_value());
}

TEST_CASE("disabled threshold makes the RSS constraint vacuous") {
  const VisibilityTable table = toy_table(2, {{{0, -120}, {1, -130}}});
  const CoverageReport r = evaluate_deployment(table, {0}, 1.0, std::nullopt);
  CHECK(r.coverage_met);
  CHECK(r.rss_met);
}

TEST_CASE("unknown candidate ids are rejected") {
  const VisibilityTable table = toy_table(2, {{{0, -70}}});
  CHECK_THROWS_AS(evaluate_deployment(table, {3}, 0.5, std::nullopt), ValidationError);
  CHECK_THROWS_AS(evaluate_deployment(table, {-1}, 0.5, std::nullopt), ValidationError);
}

TEST_CASE("tau outside [0,1] is rejected") {
  const VisibilityTable table = toy_table(2, {{{0, -70}}});
  CHECK_THROWS_AS(evaluate_deployment(table, {0}, 1.5, std::nullopt), ValidationError);
}

TEST_CASE("adding a candidate never degrades coverage metrics") {
  std::mt19937_64 rng(2026);
  int trials_with_defined_mean = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n_tiles = 30 + static_cast<int>(oracles::uniform01(rng) * 40);
    const int n_cand = 6 + static_cast<int>(oracles::uniform01(rng) * 8);
    std::vector<std::vector<std::pair<int, double>>> rows(n_cand);
    for (auto& row : rows) {
      for (int t = 0; t < n_tiles; ++t) {
        if (oracles::uniform01(rng) < 0.4) {
          row.push_back({t, oracles::uniform(rng, -110.0, -50.0)});
        }
      }
    }
    const VisibilityTable table = toy_table(n_tiles, rows);
    const double tau = oracles::uniform(rng, 0.1, 0.9);

    std::vector<int> deployed;
    CoverageReport prev = evaluate_deployment(table, deployed, tau, std::nullopt);
    std::vector<int> order(static_cast<std::size_t>(n_cand));
    for (int i = 0; i < n_cand; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (const int next : order) {
      deployed.push_back(next);
      const CoverageReport cur = evaluate_deployment(table, deployed, tau, std::nullopt);
      REQUIRE(cur.covered_count >= prev.covered_count);
      for (int t = 0; t < n_tiles; ++t) {
        REQUIRE(cur.best_rss[static_cast<std::size_t>(t)] >=
                prev.best_rss[static_cast<std::size_t>(t)]);
      }
      if (prev.mean_top_rss.has_value()) {
        REQUIRE(cur.mean_top_rss.has_value());
        REQUIRE(*cur.mean_top_rss >= *prev.mean_top_rss - 1e-12);
        ++trials_with_defined_mean;
      }
      prev = cur;
    }
  }
  REQUIRE(trials_with_defined_mean > 100);
}

TEST_CASE("covered count matches a from-scratch geometric recount") {
  const Scene scene = plus_with_blocks();
  const TileGrid grid = build_grid(scene, 4.0, 0.0);
  const std::vector<CandidateSite> sites = {{0, {2, 48}, SiteKind::corner, {}},
                                            {1, {98, 52}, SiteKind::corner, {}},
                                            {2, {50, 2}, SiteKind::corner, {}}};
  const VisibilityTable table = build_visibility(scene, grid, sites, RadioParams{});
  const CoverageReport r = evaluate_deployment(table, {0, 2}, 0.5, std::nullopt);
  int brute = 0;
  for (int t = 0; t < grid.reference_count(); ++t) {
    const Vec2 c = grid.reference_center(t);
    const bool covered =
        !segment_blocked(scene, {2, 48}, c) || !segment_blocked(scene, {50, 2}, c);
    if (covered) ++brute;
    const bool reported =
        r.best_rss[static_cast<std::size_t>(t)] != -std::numeric_limits<double>::infinity();
    CHECK(covered == reported);
  }
  CHECK(r.covered_count == brute);
}

TEST_CASE("the best server for a covered tile is the nearest LOS deployment") {
  const Scene scene = plus_with_blocks();
  const TileGrid grid = build_grid(scene, 4.0, 0.0);
  const std::vector<CandidateSite> sites = {{0, {2, 48}, SiteKind::corner, {}},
                                            {1, {98, 52}, SiteKind::corner, {}},
                                            {2, {50, 50}, SiteKind::corner, {}}};
  const RadioParams radio{};
  const VisibilityTable table = build_visibility(scene, grid, sites, radio);
  const CoverageReport r = evaluate_deployment(table, {0, 1, 2}, 0.5, std::nullopt);
  for (int t = 0; t < grid.reference_count(); ++t) {
    const double best = r.best_rss[static_cast<std::size_t>(t)];
    if (best == -std::numeric_limits<double>::infinity()) continue;
    const Vec2 c = grid.reference_center(t);
    double nearest = std::numeric_limits<double>::max();
    for (const auto& s : sites) {
      if (!segment_blocked(scene, s.position, c)) nearest = std::min(nearest, distance(s.position, c));
    }
    CHECK(best == Catch::Approx(rss_dbm(radio, nearest)).margin(1e-9));
  }
}

TEST_CASE("signal strength is reciprocal: swapping endpoints changes nothing") {
  const Scene scene = plus_with_blocks();
  const RadioParams radio{};
  std::mt19937_64 rng(88);
  for (int k = 0; k < 300; ++k) {
    const Vec2 a{oracles::uniform(rng, 0, 100), oracles::uniform(rng, 0, 100)};
    const Vec2 b{oracles::uniform(rng, 0, 100), oracles::uniform(rng, 0, 100)};
    CHECK(segment_blocked(scene, a, b) == segment_blocked(scene, b, a));
    CHECK(rss_dbm(radio, distance(a, b)) == rss_dbm(radio, distance(b, a)));
  }
}

TEST_CASE("the top-tile mean is invariant under tile relabeling") {
  std::mt19937_64 rng(31);
  std::vector<std::vector<std::pair<int, double>>> rows(5);
  const int n_tiles = 40;
  for (auto& row : rows) {
    for (int t = 0; t < n_tiles; ++t) {
      if (oracles::uniform01(rng) < 0.5) row.push_back({t, oracles::uniform(rng, -110, -50)});
    }
  }
  std::vector<int> perm(n_tiles);
  for (int i = 0; i < n_tiles; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::pair<int, double>>> permuted(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [t, rss] : rows[i]) {
      permuted[i].push_back({perm[static_cast<std::size_t>(t)], rss});
    }
  }
  const VisibilityTable a = toy_table(n_tiles, rows);
  const VisibilityTable b = toy_table(n_tiles, permuted);
  const CoverageReport ra = evaluate_deployment(a, {0, 2, 4}, 0.6, -80.0);
  const CoverageReport rb = evaluate_deployment(b, {0, 2, 4}, 0.6, -80.0);
  CHECK(ra.covered_count == rb.covered_count);
  REQUIRE(ra.mean_top_rss.has_value() == rb.mean_top_rss.has_value());
  if (ra.mean_top_rss.has_value()) {
    CHECK(*ra.mean_top_rss == Catch::Approx(*rb.mean_top_rss).margin(1e-9));
  }
}
