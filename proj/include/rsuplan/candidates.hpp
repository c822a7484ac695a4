#pragma once

// Candidate RSU sites, extracted from the road-region boundary: one site per
// sharp corner (street furniture clusters at intersections), plus equally
// spaced sites along boundary sections longer than the spacing threshold.
// Sites are nudged slightly into the road so sight lines do not graze the
// coincident building corner.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rsuplan/errors.hpp"
#include "rsuplan/geometry.hpp"

namespace rsuplan {

enum class SiteKind : std::uint8_t { corner, long_road };

inline const char* to_string(SiteKind k) {
  return k == SiteKind::corner ? "corner" : "long_road";
}

struct SiteSource {
  int component = -1;  // road_region index
  int ring = -1;       // 0 = outer, 1+k = hole k
  int index = -1;      // vertex (corner) or edge (long_road) index in the ring
};

struct CandidateSite {
  int id = -1;
  Vec2 position;
  SiteKind kind = SiteKind::corner;
  SiteSource source;
};

struct CandidateConfig {
  double angle_threshold_deg = 30.0;  // corner = turn sharper than this
  double rsu_threshold_m = 100.0;     // section length that triggers interior sites
  double dedup_radius_m = 5.0;
  double nudge_m = 0.5;
};

namespace detail {

inline const SimplePolygon& road_ring(const PolygonWithHoles& pwh, int ring) {
  return ring == 0 ? pwh.outer : pwh.holes[static_cast<std::size_t>(ring) - 1];
}

// Unsigned turn angle at v on the path u -> v -> w, in degrees. A straight
// continuation is 0; the interior angle deviates from 180 by exactly this.
inline double turn_angle_deg(Vec2 u, Vec2 v, Vec2 w) {
  const Vec2 e1 = v - u;
  const Vec2 e2 = w - v;
  return std::abs(std::atan2(cross(e1, e2), dot(e1, e2))) * 180.0 / 3.14159265358979323846;
}

inline std::vector<bool> sharp_flags(const SimplePolygon& ring, double angle_threshold_deg) {
  const auto& v = ring.vertices;
  const std::size_t n = v.size();
  std::vector<bool> sharp(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& u = v[(i + n - 1) % n];
    const Vec2& w = v[(i + 1) % n];
    sharp[i] = turn_angle_deg(u, v[i], w) > angle_threshold_deg;
  }
  return sharp;
}

// First of the offsets along dir (then -dir, then halved) that lands on the
// road; the anchor itself is a boundary point and boundary counts as inside,
// so the fallback always succeeds.
inline Vec2 nudged_into_road(const std::vector<PolygonWithHoles>& region, Vec2 anchor, Vec2 dir,
                             double nudge) {
  const double len = norm(dir);
  if (len > 1e-12) {
    const Vec2 unit = (1.0 / len) * dir;
    for (const double step : {nudge, -nudge, 0.5 * nudge, -0.5 * nudge}) {
      const Vec2 p = anchor + step * unit;
      if (contains_point(region, p)) return p;
    }
  }
  return anchor;
}

}  // namespace detail

inline std::vector<CandidateSite> find_corner_sites(const Scene& scene,
                                                    double angle_threshold_deg,
                                                    double nudge_m = 0.5) {
  std::vector<CandidateSite> sites;
  for (std::size_t comp = 0; comp < scene.road_region.size(); ++comp) {
    const auto& pwh = scene.road_region[comp];
    const int ring_count = 1 + static_cast<int>(pwh.holes.size());
    for (int ring = 0; ring < ring_count; ++ring) {
      const SimplePolygon& r = detail::road_ring(pwh, ring);
      const auto sharp = detail::sharp_flags(r, angle_threshold_deg);
      const std::size_t n = r.vertices.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (!sharp[i]) continue;
        const Vec2& u = r.vertices[(i + n - 1) % n];
        const Vec2& v = r.vertices[i];
        const Vec2& w = r.vertices[(i + 1) % n];
        Vec2 bisector = {0.0, 0.0};
        const double lu = distance(u, v);
        const double lw = distance(w, v);
        if (lu > 1e-12 && lw > 1e-12) {
          bisector = (1.0 / lu) * (u - v) + (1.0 / lw) * (w - v);
        }
        if (norm(bisector) < 1e-9) {
          // 180-degree reversal: fall back to the edge normal
          const Vec2 e = w - v;
          bisector = {-e.y, e.x};
        }
        CandidateSite site;
        site.position = detail::nudged_into_road(scene.road_region, v, bisector, nudge_m);
        site.kind = SiteKind::corner;
        site.source = {static_cast<int>(comp), ring, static_cast<int>(i)};
        sites.push_back(site);
      }
    }
  }
  return sites;
}

inline std::vector<CandidateSite> find_long_road_sites(const Scene& scene, double rsu_threshold_m,
                                                       double angle_threshold_deg = 30.0,
                                                       double nudge_m = 0.5) {
  if (!(rsu_threshold_m > 0.0)) {
    throw ValidationError("candidates: rsu_threshold_m must be > 0");
  }
  std::vector<CandidateSite> sites;

  // Walk one boundary section (a polyline between consecutive sharp corners)
  // and drop interior sites at the equal-spacing fractions.
  const auto emit_section = [&](const SimplePolygon& ring, int comp, int ring_idx,
                                const std::vector<std::size_t>& edge_starts, bool closed_loop) {
    const auto& v = ring.vertices;
    const std::size_t n = v.size();
    double length = 0.0;
    for (const std::size_t e : edge_starts) length += distance(v[e], v[(e + 1) % n]);
    if (length <= rsu_threshold_m * (1.0 + 1e-12)) return;
    const int count = static_cast<int>(std::ceil(length / rsu_threshold_m - 1e-12));
    for (int k = 1; k <= count; ++k) {
      // sections between corners host sites strictly between them; a loop
      // without corners has no endpoints, so spread sites evenly around it
      const double frac = closed_loop ? (k - 0.5) / count : static_cast<double>(k) / (count + 1);
      double target = frac * length;
      for (const std::size_t e : edge_starts) {
        const Vec2& a = v[e];
        const Vec2& b = v[(e + 1) % n];
        const double el = distance(a, b);
        if (target > el) {
          target -= el;
          continue;
        }
        const Vec2 dir = el > 1e-12 ? (1.0 / el) * (b - a) : Vec2{1.0, 0.0};
        const Vec2 anchor = a + target * dir;
        const Vec2 normal{-dir.y, dir.x};
        CandidateSite site;
        site.position = detail::nudged_into_road(scene.road_region, anchor, normal, nudge_m);
        site.kind = SiteKind::long_road;
        site.source = {comp, ring_idx, static_cast<int>(e)};
        sites.push_back(site);
        break;
      }
    }
  };

  for (std::size_t comp = 0; comp < scene.road_region.size(); ++comp) {
    const auto& pwh = scene.road_region[comp];
    const int ring_count = 1 + static_cast<int>(pwh.holes.size());
    for (int ring_idx = 0; ring_idx < ring_count; ++ring_idx) {
      const SimplePolygon& r = detail::road_ring(pwh, ring_idx);
      const auto sharp = detail::sharp_flags(r, angle_threshold_deg);
      const std::size_t n = r.vertices.size();
      std::vector<std::size_t> corners;
      for (std::size_t i = 0; i < n; ++i) {
        if (sharp[i]) corners.push_back(i);
      }
      if (corners.empty()) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        emit_section(r, static_cast<int>(comp), ring_idx, all, /*closed_loop=*/true);
        continue;
      }
      for (std::size_t c = 0; c < corners.size(); ++c) {
        const std::size_t from = corners[c];
        const std::size_t to = corners[(c + 1) % corners.size()];
        std::vector<std::size_t> edges;
        for (std::size_t e = from; e != to; e = (e + 1) % n) edges.push_back(e);
        if (!edges.empty()) {
          emit_section(r, static_cast<int>(comp), ring_idx, edges, /*closed_loop=*/false);
        }
      }
    }
  }
  return sites;
}

// Corner and long-road sites combined, deduplicated (corner kind wins within
// the merge radius) and densely re-indexed.
inline std::vector<CandidateSite> assemble_candidates(const Scene& scene,
                                                      const CandidateConfig& cfg = {}) {
  std::vector<CandidateSite> all =
      find_corner_sites(scene, cfg.angle_threshold_deg, cfg.nudge_m);
  const std::vector<CandidateSite> long_sites =
      find_long_road_sites(scene, cfg.rsu_threshold_m, cfg.angle_threshold_deg, cfg.nudge_m);
  all.insert(all.end(), long_sites.begin(), long_sites.end());

  std::vector<CandidateSite> kept;
  for (const auto& site : all) {
    bool merged = false;
    for (const auto& k : kept) {
      if (distance(site.position, k.position) < cfg.dedup_radius_m) {
        merged = true;
        break;
      }
    }
    if (!merged && contains_point(scene.road_region, site.position)) kept.push_back(site);
  }
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].id = static_cast<int>(i);
  if (kept.empty()) {
    throw ValidationError("no candidate sites; check scene/threshold");
  }
  return kept;
}

}  // namespace rsuplan
