#pragma once

// Test-only oracles. These re-derive geometry predicates from scratch so the
// kernel is always checked against a second, independent route: a classic
// crossing-number point test, a dense-sampling sight-line test, and a
// Monte-Carlo area estimate. Also hosts the seeded random-scene generator
// shared by the property and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rsuplan/geometry.hpp"
#include "rsuplan/map_ingest.hpp"

namespace oracles {

inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + uniform01(rng) * (hi - lo);
}

// Crossing-number containment, written independently of the kernel.
inline bool point_in_ring(const std::vector<rsuplan::Vec2>& ring, rsuplan::Vec2 p) {
  int crossings = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const rsuplan::Vec2 a = ring[i];
    const rsuplan::Vec2 b = ring[(i + 1) % n];
    if ((a.y <= p.y && b.y > p.y) || (b.y <= p.y && a.y > p.y)) {
      const double t = (p.y - a.y) / (b.y - a.y);
      if (p.x < a.x + t * (b.x - a.x)) ++crossings;
    }
  }
  return (crossings % 2) == 1;
}

inline double distance_to_ring(const std::vector<rsuplan::Vec2>& ring, rsuplan::Vec2 p) {
  double best = std::numeric_limits<double>::max();
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, rsuplan::distance_point_segment(p, ring[i], ring[(i + 1) % n]));
  }
  return best;
}

inline bool in_region_oracle(const rsuplan::PolygonWithHoles& pwh, rsuplan::Vec2 p) {
  if (!point_in_ring(pwh.outer.vertices, p)) return false;
  for (const auto& h : pwh.holes) {
    if (point_in_ring(h.vertices, p)) return false;
  }
  return true;
}

inline double distance_to_region_boundary(const rsuplan::PolygonWithHoles& pwh, rsuplan::Vec2 p) {
  double best = distance_to_ring(pwh.outer.vertices, p);
  for (const auto& h : pwh.holes) best = std::min(best, distance_to_ring(h.vertices, p));
  return best;
}

// Dense-sampling sight-line oracle: a sample strictly inside any building
// means blocked. Pair with segment_pair_is_tangential to skip grazing cases
// the sampler cannot resolve.
inline bool segment_blocked_sampling(const rsuplan::Scene& scene, rsuplan::Vec2 a, rsuplan::Vec2 b,
                                     int samples = 1000) {
  for (int k = 1; k <= samples; ++k) {
    const double t = static_cast<double>(k) / (samples + 1);
    const rsuplan::Vec2 p = a + t * (b - a);
    for (const auto& bld : scene.buildings) {
      if (point_in_ring(bld.vertices, p) && distance_to_ring(bld.vertices, p) > 1e-9) return true;
    }
  }
  return false;
}

// Grazing filter: the sampler is blind to crossings thinner than its step, and
// those only happen close to a building vertex or when an endpoint starts
// right at a wall.
inline bool segment_pair_is_tangential(const rsuplan::Scene& scene, rsuplan::Vec2 a,
                                       rsuplan::Vec2 b, double clearance = 0.5) {
  for (const auto& bld : scene.buildings) {
    for (const auto& v : bld.vertices) {
      if (rsuplan::distance_point_segment(v, a, b) < clearance) return true;
    }
    if (distance_to_ring(bld.vertices, a) < clearance) return true;
    if (distance_to_ring(bld.vertices, b) < clearance) return true;
  }
  return false;
}

struct McEstimate {
  double area = 0.0;
  double three_sigma = 0.0;
};

// Monte-Carlo area of the union of axis-aligned rectangles, fully independent
// of the kernel (containment here is plain interval arithmetic).
inline McEstimate mc_union_area_rects(const std::vector<rsuplan::Rect>& rects,
                                      const rsuplan::Rect& box, int samples,
                                      std::mt19937_64& rng) {
  int hits = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = uniform(rng, box.min_x, box.max_x);
    const double y = uniform(rng, box.min_y, box.max_y);
    for (const auto& r : rects) {
      if (x >= r.min_x && x <= r.max_x && y >= r.min_y && y <= r.max_y) {
        ++hits;
        break;
      }
    }
  }
  const double p = static_cast<double>(hits) / samples;
  const double box_area = box.width() * box.height();
  McEstimate est;
  est.area = p * box_area;
  est.three_sigma = 3.0 * std::sqrt(std::max(p * (1.0 - p), 1e-12) / samples) * box_area;
  return est;
}

// Scene with randomly placed rectangular buildings (axis-aligned and
// rotated) on a fully drivable map, built through the regular ingest path.
inline rsuplan::Scene random_rect_scene(std::uint64_t seed, int n_rects = 8, double world = 200.0) {
  std::mt19937_64 rng(seed);
  std::vector<rsuplan::RawBuilding> buildings;
  for (int i = 0; i < n_rects; ++i) {
    const double w = uniform(rng, 8.0, 30.0);
    const double h = uniform(rng, 8.0, 30.0);
    const double cx = uniform(rng, 25.0, world - 25.0);
    const double cy = uniform(rng, 25.0, world - 25.0);
    const double angle = uniform01(rng) < 0.5 ? 0.0 : uniform(rng, 0.0, 3.14159265 / 2.0);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    rsuplan::SimplePolygon poly;
    for (const auto& [dx, dy] : {std::pair{-w / 2, -h / 2}, std::pair{w / 2, -h / 2},
                                 std::pair{w / 2, h / 2}, std::pair{-w / 2, h / 2}}) {
      poly.vertices.push_back({rsuplan::snap_value(cx + dx * c - dy * s, 0.01),
                               rsuplan::snap_value(cy + dx * s + dy * c, 0.01)});
    }
    buildings.push_back({std::move(poly)});
  }
  // one road buffered to the full map height makes the whole map drivable,
  // then the buildings get carved out of it
  std::vector<rsuplan::RawRoad> roads = {
      {{{0.0, world / 2.0}, {world, world / 2.0}}, world, "test"}};
  return rsuplan::build_scene(buildings, roads, {0.0, 0.0, world, world});
}

}  // namespace oracles
