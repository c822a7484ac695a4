#pragma once

// Tile grid over the area of interest, per-candidate visibility (LOS + RSS),
// and the deployment evaluator that checks the two planning constraints:
// enough reference tiles covered, and the mean of the best per-tile RSS
// values above the threshold.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

#include "rsuplan/candidates.hpp"
#include "rsuplan/errors.hpp"
#include "rsuplan/geometry.hpp"
#include "rsuplan/radio.hpp"

namespace rsuplan {

struct TileGrid {
  double tile_size = 4.0;
  Rect area_of_interest;
  int nx = 0;
  int ny = 0;
  std::vector<Vec2> centers;   // every tile, row-major
  std::vector<int> reference;  // indices into centers whose center lies on the road
  std::vector<int> ref_id_of;  // centers index -> dense reference id, or -1

  int reference_count() const { return static_cast<int>(reference.size()); }
  Vec2 reference_center(int ref_id) const { return centers[reference[ref_id]]; }
};

inline TileGrid build_grid(const Scene& scene, double tile_size, double border_margin) {
  if (!(tile_size > 0.0)) throw ValidationError("grid: tile_size must be > 0");
  if (border_margin < 0.0) throw ValidationError("grid: border_margin must be >= 0");
  TileGrid grid;
  grid.tile_size = tile_size;
  grid.area_of_interest = {scene.bounds.min_x + border_margin, scene.bounds.min_y + border_margin,
                           scene.bounds.max_x - border_margin, scene.bounds.max_y - border_margin};
  const double w = grid.area_of_interest.width();
  const double h = grid.area_of_interest.height();
  grid.nx = w > 0.0 ? static_cast<int>(std::floor(w / tile_size + 1e-9)) : 0;
  grid.ny = h > 0.0 ? static_cast<int>(std::floor(h / tile_size + 1e-9)) : 0;
  if (grid.nx <= 0 || grid.ny <= 0) {
    throw ValidationError("grid: empty (margin too large for the map?)");
  }
  grid.centers.reserve(static_cast<std::size_t>(grid.nx) * grid.ny);
  grid.ref_id_of.assign(static_cast<std::size_t>(grid.nx) * grid.ny, -1);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      grid.centers.push_back({grid.area_of_interest.min_x + (i + 0.5) * tile_size,
                              grid.area_of_interest.min_y + (j + 0.5) * tile_size});
    }
  }
  for (std::size_t z = 0; z < grid.centers.size(); ++z) {
    if (contains_point(scene.road_region, grid.centers[z])) {
      grid.ref_id_of[z] = static_cast<int>(grid.reference.size());
      grid.reference.push_back(static_cast<int>(z));
    }
  }
  return grid;
}

struct TileSignal {
  int tile = -1;  // dense reference id
  double rss = 0.0;
};

struct ServerSignal {
  int candidate = -1;
  double rss = 0.0;
};

struct VisibilityTable {
  int candidate_count = 0;
  int reference_count = 0;
  std::vector<std::vector<TileSignal>> by_candidate;  // tiles in LOS, ascending tile id
  std::vector<std::vector<ServerSignal>> by_tile;     // serving candidates, ascending id
};

// Complete LOS + RSS table. Deterministic: rows are independent, so the
// parallel fill cannot reorder anything.
inline VisibilityTable build_visibility(const Scene& scene, const TileGrid& grid,
                                        const std::vector<CandidateSite>& candidates,
                                        const RadioParams& params, int threads = 0) {
  if (candidates.empty()) throw ValidationError("visibility: no candidates");
  validate(params);
  VisibilityTable table;
  table.candidate_count = static_cast<int>(candidates.size());
  table.reference_count = grid.reference_count();
  table.by_candidate.resize(candidates.size());
  table.by_tile.resize(grid.reference.size());

  const BlockageIndex index(scene);
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  threads = std::clamp(threads, 1, 16);

  std::atomic<int> next{0};
  const auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= table.candidate_count) return;
      const Vec2 pos = candidates[i].position;
      auto& row = table.by_candidate[static_cast<std::size_t>(i)];
      for (int t = 0; t < table.reference_count; ++t) {
        const Vec2 center = grid.reference_center(t);
        if (index.blocked(pos, center)) continue;
        row.push_back({t, rss_dbm(params, distance(pos, center))});
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i < table.candidate_count; ++i) {
    for (const auto& sig : table.by_candidate[static_cast<std::size_t>(i)]) {
      table.by_tile[static_cast<std::size_t>(sig.tile)].push_back({i, sig.rss});
    }
  }
  return table;
}

struct CoverageReport {
  int reference_count = 0;
  int required_count = 0;  // ceil(tau * |N|)
  int covered_count = 0;
  double coverage_rate = 0.0;
  std::vector<double> best_rss;  // per reference tile; -inf when unserved
  std::optional<double> mean_top_rss;
  bool coverage_met = false;
  bool rss_met = false;

  bool feasible() const { return coverage_met && rss_met; }
};

inline int required_tiles(double tau, int reference_count) {
  if (tau < 0.0 || tau > 1.0) throw ValidationError("tau must be in [0,1]");
  return static_cast<int>(std::ceil(tau * reference_count - 1e-9));
}

// Mean of the k largest values; caller guarantees at least k finite entries.
inline double mean_of_top(std::vector<double> values, int k) {
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end(), std::greater<>());
  return std::accumulate(values.begin(), values.begin() + k, 0.0) / k;
}

inline CoverageReport evaluate_deployment(const VisibilityTable& table,
                                          const std::vector<int>& deployed, double tau,
                                          std::optional<double> rss_threshold_dbm) {
  CoverageReport report;
  report.reference_count = table.reference_count;
  report.required_count = required_tiles(tau, table.reference_count);
  report.best_rss.assign(static_cast<std::size_t>(table.reference_count),
                         -std::numeric_limits<double>::infinity());

  std::vector<int> ids = deployed;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (const int id : ids) {
    if (id < 0 || id >= table.candidate_count) {
      throw ValidationError("evaluate: unknown candidate id " + std::to_string(id));
    }
    for (const auto& sig : table.by_candidate[static_cast<std::size_t>(id)]) {
      auto& best = report.best_rss[static_cast<std::size_t>(sig.tile)];
      if (sig.rss > best) best = sig.rss;
    }
  }
  for (const double v : report.best_rss) {
    if (v != -std::numeric_limits<double>::infinity()) ++report.covered_count;
  }
  report.coverage_rate = table.reference_count > 0
                             ? static_cast<double>(report.covered_count) / table.reference_count
                             : 0.0;
  report.coverage_met = report.covered_count >= report.required_count;
  if (report.coverage_met && report.required_count > 0) {
    report.mean_top_rss = mean_of_top(report.best_rss, report.required_count);
  }
  if (!rss_threshold_dbm.has_value()) {
    report.rss_met = true;
  } else if (report.required_count == 0) {
    report.rss_met = true;  // no tiles required, nothing to average
  } else {
    report.rss_met = report.mean_top_rss.has_value() && *report.mean_top_rss >= *rss_threshold_dbm;
  }
  return report;
}

}  // namespace rsuplan
