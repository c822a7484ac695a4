#pragma once

// Planar polygon kernel for the RSU planner.
//
// Buildings are simple polygons (solid city blocks after union, courtyards
// filled); the drivable surface is a set of polygons with holes. Boolean
// operations (union, intersection, difference) are delegated to
// Boost.Geometry. The predicates that decide coverage semantics are
// implemented directly so boundary behaviour stays explicit: points on a
// boundary count as inside, and a sight line that only grazes a boundary
// does not count as blocked.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "rsuplan/errors.hpp"

namespace rsuplan {

// Vertices closer than this merge during boolean operations; it is also the
// precision geometry is written with.
inline constexpr double kSnapGrid = 1e-6;
// Output fragments below this area [m^2] are dropped as numerical slivers.
inline constexpr double kSliverArea = 1e-4;
// Width of the band around edges treated as "on the boundary".
inline constexpr double kBoundaryEps = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  bool contains(Vec2 p, double eps = 0.0) const {
    return p.x >= min_x - eps && p.x <= max_x + eps && p.y >= min_y - eps && p.y <= max_y + eps;
  }
  bool overlaps(const Rect& o, double eps = 0.0) const {
    return min_x <= o.max_x + eps && o.min_x <= max_x + eps && min_y <= o.max_y + eps &&
           o.min_y <= max_y + eps;
  }
  Rect expanded(double d) const { return {min_x - d, min_y - d, max_x + d, max_y + d}; }
};

inline Rect bbox_of(const std::vector<Vec2>& pts) {
  Rect r{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
         std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& p : pts) {
    r.min_x = std::min(r.min_x, p.x);
    r.min_y = std::min(r.min_y, p.y);
    r.max_x = std::max(r.max_x, p.x);
    r.max_y = std::max(r.max_y, p.y);
  }
  return r;
}

// Closed ring stored without the repeated closing vertex.
struct SimplePolygon {
  std::vector<Vec2> vertices;

  double signed_area() const {
    double a = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) a += cross(vertices[j], vertices[i]);
    return 0.5 * a;
  }
  double area() const { return std::abs(signed_area()); }
  Rect bbox() const { return bbox_of(vertices); }
};

struct PolygonWithHoles {
  SimplePolygon outer;
  std::vector<SimplePolygon> holes;

  double area() const {
    double a = outer.area();
    for (const auto& h : holes) a -= h.area();
    return a;
  }
  Rect bbox() const { return outer.bbox(); }
};

struct Scene {
  Rect bounds;                                // [0, M_x] x [0, M_y]
  std::vector<SimplePolygon> buildings;       // solid blocks, pairwise disjoint interiors
  std::vector<PolygonWithHoles> road_region;  // drivable surface; holes are city blocks
};

// ---------------------------------------------------------------------------
// low-level predicates

inline double distance_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

// Sign of the turn a->b->c with a scale-relative zero band.
inline int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  const double scale = norm(b - a) * norm(c - a);
  if (std::abs(v) <= 1e-12 * std::max(scale, 1.0)) return 0;
  return v > 0.0 ? 1 : -1;
}

inline bool within_segment_box(Vec2 a, Vec2 b, Vec2 p, double eps) {
  return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps &&
         p.y >= std::min(a.y, b.y) - eps && p.y <= std::max(a.y, b.y) + eps;
}

// Closed segments sharing any point (including touches and overlaps).
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  const double eps = kBoundaryEps;
  if (o1 == 0 && within_segment_box(a, b, c, eps)) return true;
  if (o2 == 0 && within_segment_box(a, b, d, eps)) return true;
  if (o3 == 0 && within_segment_box(c, d, a, eps)) return true;
  if (o4 == 0 && within_segment_box(c, d, b, eps)) return true;
  return false;
}

inline bool point_on_boundary(const SimplePolygon& poly, Vec2 p, double eps = kBoundaryEps) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (distance_point_segment(p, v[j], v[i]) <= eps) return true;
  }
  return false;
}

// Half-open ray-crossing parity; meaningful only away from the boundary.
inline bool point_in_ring_parity(const SimplePolygon& poly, Vec2 p) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  bool in = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = v[j];
    const Vec2& b = v[i];
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_int = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_int) in = !in;
    }
  }
  return in;
}

// Closure containment: boundary points are inside.
inline bool contains_point(const SimplePolygon& poly, Vec2 p, double eps = kBoundaryEps) {
  if (!poly.bbox().contains(p, eps)) return false;
  return point_on_boundary(poly, p, eps) || point_in_ring_parity(poly, p);
}

inline bool strictly_inside(const SimplePolygon& poly, Vec2 p, double eps = kBoundaryEps) {
  if (!poly.bbox().contains(p, eps)) return false;
  return !point_on_boundary(poly, p, eps) && point_in_ring_parity(poly, p);
}

// Closure of the outer ring minus the open holes; hole boundaries are inside.
inline bool contains_point(const PolygonWithHoles& pwh, Vec2 p, double eps = kBoundaryEps) {
  if (!contains_point(pwh.outer, p, eps)) return false;
  for (const auto& h : pwh.holes) {
    if (strictly_inside(h, p, eps)) return false;
  }
  return true;
}

inline bool contains_point(const std::vector<PolygonWithHoles>& region, Vec2 p,
                           double eps = kBoundaryEps) {
  for (const auto& pwh : region) {
    if (contains_point(pwh, p, eps)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// validation / canonical form

inline std::optional<std::string> simple_polygon_defect(const SimplePolygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return "fewer than 3 vertices";
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (distance(v[j], v[i]) < 1e-12) return "zero-length edge at vertex " + std::to_string(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& prev = v[(i + n - 1) % n];
    const Vec2& cur = v[i];
    const Vec2& next = v[(i + 1) % n];
    if (orientation(prev, cur, next) == 0 && dot(prev - cur, next - cur) > 0.0) {
      return "spike at vertex " + std::to_string(i);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
        return "self-intersecting (edges " + std::to_string(i) + " and " + std::to_string(j) + ")";
      }
    }
  }
  // a self-intersecting ring has no meaningful shoelace area, so this comes last
  if (poly.area() <= 1e-12) return "zero area";
  return std::nullopt;
}

inline double snap_value(double v, double grid = kSnapGrid) { return std::round(v / grid) * grid; }

// Snap to the grid, then drop the exact duplicates snapping created.
inline SimplePolygon snapped(SimplePolygon poly, double grid = kSnapGrid) {
  for (auto& p : poly.vertices) {
    p.x = snap_value(p.x, grid);
    p.y = snap_value(p.y, grid);
  }
  std::vector<Vec2> out;
  out.reserve(poly.vertices.size());
  for (const auto& p : poly.vertices) {
    if (out.empty() || p.x != out.back().x || p.y != out.back().y) out.push_back(p);
  }
  while (out.size() > 1 && out.front().x == out.back().x && out.front().y == out.back().y) {
    out.pop_back();
  }
  poly.vertices = std::move(out);
  return poly;
}

// CCW orientation, ring rotated to start at the lexicographically smallest vertex.
inline SimplePolygon canonical_polygon(SimplePolygon poly) {
  auto& v = poly.vertices;
  if (v.size() >= 3) {
    if (poly.signed_area() < 0.0) std::reverse(v.begin(), v.end());
    const auto lex_less = [](const Vec2& a, const Vec2& b) {
      return a.x < b.x || (a.x == b.x && a.y < b.y);
    };
    std::rotate(v.begin(), std::min_element(v.begin(), v.end(), lex_less), v.end());
  }
  return poly;
}

// ---------------------------------------------------------------------------
// Boost.Geometry glue (internal)

namespace detail {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint>;
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;
using BgLinestring = bg::model::linestring<BgPoint>;

inline BgPolygon to_bg(const SimplePolygon& poly) {
  BgPolygon out;
  for (const auto& p : poly.vertices) bg::append(out.outer(), BgPoint(p.x, p.y));
  if (!poly.vertices.empty()) {
    bg::append(out.outer(), BgPoint(poly.vertices.front().x, poly.vertices.front().y));
  }
  bg::correct(out);
  return out;
}

inline BgPolygon to_bg(const PolygonWithHoles& pwh) {
  BgPolygon out = to_bg(pwh.outer);
  out.inners().resize(pwh.holes.size());
  for (std::size_t h = 0; h < pwh.holes.size(); ++h) {
    for (const auto& p : pwh.holes[h].vertices) bg::append(out.inners()[h], BgPoint(p.x, p.y));
    if (!pwh.holes[h].vertices.empty()) {
      bg::append(out.inners()[h],
                 BgPoint(pwh.holes[h].vertices.front().x, pwh.holes[h].vertices.front().y));
    }
  }
  bg::correct(out);
  return out;
}

inline BgMultiPolygon to_bg_multi(const std::vector<PolygonWithHoles>& region) {
  BgMultiPolygon out;
  out.reserve(region.size());
  for (const auto& pwh : region) out.push_back(to_bg(pwh));
  return out;
}

template <typename BgRing>
SimplePolygon from_bg_ring(const BgRing& ring) {
  SimplePolygon out;
  out.vertices.reserve(ring.size());
  for (const auto& p : ring) out.vertices.push_back({bg::get<0>(p), bg::get<1>(p)});
  if (out.vertices.size() > 1) {
    const Vec2 a = out.vertices.front();
    const Vec2 b = out.vertices.back();
    if (distance(a, b) < 1e-12) out.vertices.pop_back();
  }
  return canonical_polygon(snapped(std::move(out)));
}

// Pairwise union fan-in; quadratic blowup on a linear fold is avoided.
inline BgMultiPolygon fold_union(std::vector<BgMultiPolygon> parts) {
  if (parts.empty()) return {};
  while (parts.size() > 1) {
    std::vector<BgMultiPolygon> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      BgMultiPolygon merged;
      bg::union_(parts[i], parts[i + 1], merged);
      next.push_back(std::move(merged));
    }
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

inline BgMultiPolygon clip_to_rect(const BgMultiPolygon& mp, const Rect& r) {
  BgPolygon box;
  bg::append(box.outer(), BgPoint(r.min_x, r.min_y));
  bg::append(box.outer(), BgPoint(r.min_x, r.max_y));
  bg::append(box.outer(), BgPoint(r.max_x, r.max_y));
  bg::append(box.outer(), BgPoint(r.max_x, r.min_y));
  bg::append(box.outer(), BgPoint(r.min_x, r.min_y));
  bg::correct(box);
  BgMultiPolygon out;
  bg::intersection(mp, box, out);
  return out;
}

inline BgMultiPolygon subtract(const BgMultiPolygon& a, const BgMultiPolygon& b) {
  BgMultiPolygon out;
  bg::difference(a, b, out);
  return out;
}

}  // namespace detail

struct UnionStats {
  int dropped_slivers = 0;
};

namespace detail {

// Convert a boolean-op result back to canonical components, sorted by bbox.
inline std::vector<PolygonWithHoles> from_bg(const BgMultiPolygon& mp, bool fill_holes,
                                             double min_area, UnionStats* stats) {
  std::vector<PolygonWithHoles> out;
  out.reserve(mp.size());
  for (const auto& poly : mp) {
    SimplePolygon outer = from_bg_ring(poly.outer());
    if (outer.vertices.size() < 3 || outer.area() < min_area) {
      if (stats) ++stats->dropped_slivers;
      continue;
    }
    PolygonWithHoles pwh{std::move(outer), {}};
    if (!fill_holes) {
      for (const auto& inner : poly.inners()) {
        SimplePolygon hole = from_bg_ring(inner);
        if (hole.vertices.size() < 3 || hole.area() < min_area) {
          if (stats) ++stats->dropped_slivers;
          continue;
        }
        pwh.holes.push_back(std::move(hole));
      }
    }
    out.push_back(std::move(pwh));
  }
  const auto rect_less = [](const Rect& a, const Rect& b) {
    if (a.min_x != b.min_x) return a.min_x < b.min_x;
    if (a.min_y != b.min_y) return a.min_y < b.min_y;
    if (a.max_x != b.max_x) return a.max_x < b.max_x;
    return a.max_y < b.max_y;
  };
  for (auto& pwh : out) {
    std::sort(pwh.holes.begin(), pwh.holes.end(),
              [&](const SimplePolygon& a, const SimplePolygon& b) {
                return rect_less(a.bbox(), b.bbox());
              });
  }
  std::sort(out.begin(), out.end(), [&](const PolygonWithHoles& a, const PolygonWithHoles& b) {
    return rect_less(a.bbox(), b.bbox());
  });
  return out;
}

inline std::vector<BgMultiPolygon> validated_parts(const std::vector<SimplePolygon>& polys) {
  std::vector<BgMultiPolygon> parts;
  parts.reserve(polys.size());
  for (std::size_t i = 0; i < polys.size(); ++i) {
    SimplePolygon s = snapped(polys[i]);
    if (auto defect = simple_polygon_defect(s)) {
      throw ValidationError("polygon " + std::to_string(i) + ": " + *defect);
    }
    BgMultiPolygon mp;
    mp.push_back(to_bg(s));
    parts.push_back(std::move(mp));
  }
  return parts;
}

}  // namespace detail

// Union of building footprints into maximal solid blocks. Any hole the union
// produces (a courtyard) is filled; the signal cannot cross the block anyway.
inline std::vector<SimplePolygon> union_polygons(const std::vector<SimplePolygon>& polys,
                                                 UnionStats* stats = nullptr) {
  auto merged = detail::fold_union(detail::validated_parts(polys));
  auto regions = detail::from_bg(merged, /*fill_holes=*/true, kSliverArea, stats);
  std::vector<SimplePolygon> out;
  out.reserve(regions.size());
  for (auto& r : regions) out.push_back(std::move(r.outer));
  return out;
}

// Union preserving holes; used for the road surface where holes are blocks.
inline std::vector<PolygonWithHoles> union_region(const std::vector<SimplePolygon>& polys,
                                                  UnionStats* stats = nullptr) {
  auto merged = detail::fold_union(detail::validated_parts(polys));
  return detail::from_bg(merged, /*fill_holes=*/false, kSliverArea, stats);
}

// ---------------------------------------------------------------------------
// sight-line blockage

// When permissive (default), a segment running along a wall or grazing a
// corner is not blocked; only crossing a building interior blocks. The strict
// rule counts any boundary contact as a blockage.
enum class BoundaryRule : std::uint8_t { permissive, strict };

namespace detail {

inline void collect_edge_params(Vec2 a, Vec2 b, Vec2 c, Vec2 d, std::vector<double>& ts) {
  const Vec2 ab = b - a;
  const Vec2 cd = d - c;
  const double denom = cross(ab, cd);
  const double scale = norm(ab) * norm(cd);
  if (std::abs(denom) <= 1e-12 * std::max(scale, 1e-12)) {
    // parallel: only a collinear overlap contributes its end parameters
    if (std::abs(cross(c - a, ab)) > kBoundaryEps * std::max(norm(ab), 1.0)) return;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return;
    double t0 = dot(c - a, ab) / len2;
    double t1 = dot(d - a, ab) / len2;
    if (t0 > t1) std::swap(t0, t1);
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, 1.0);
    if (t1 >= t0) {
      ts.push_back(t0);
      ts.push_back(t1);
    }
    return;
  }
  const double t = cross(c - a, cd) / denom;
  const double s = cross(c - a, ab) / denom;
  const double eps = 1e-12;
  if (t < -eps || t > 1.0 + eps || s < -eps || s > 1.0 + eps) return;
  ts.push_back(std::clamp(t, 0.0, 1.0));
}

}  // namespace detail

// True iff the open segment (a,b) intersects the polygon interior. The
// segment is cut at every boundary contact; a span whose midpoint lies
// strictly inside decides. Grazing contacts produce empty spans.
inline bool segment_crosses_interior(const SimplePolygon& poly, Vec2 a, Vec2 b) {
  if (distance(a, b) < 1e-12) return false;
  std::vector<double> ts;
  ts.reserve(8);
  ts.push_back(0.0);
  ts.push_back(1.0);
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    detail::collect_edge_params(a, b, v[j], v[i], ts);
  }
  std::sort(ts.begin(), ts.end());
  const Vec2 ab = b - a;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] - ts[i - 1] > 1e-12) {
      const Vec2 mid = a + (0.5 * (ts[i - 1] + ts[i])) * ab;
      if (strictly_inside(poly, mid)) return true;
    }
  }
  return false;
}

// Strict-rule companion: any contact with the closed polygon.
inline bool segment_touches_polygon(const SimplePolygon& poly, Vec2 a, Vec2 b,
                                    double eps = kBoundaryEps) {
  if (contains_point(poly, a, eps) || contains_point(poly, b, eps)) return true;
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (segments_intersect(a, b, v[j], v[i])) return true;
  }
  return false;
}

inline bool segment_blocked(const Scene& scene, Vec2 a, Vec2 b,
                            BoundaryRule rule = BoundaryRule::permissive) {
  const Rect seg_box{std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x),
                     std::max(a.y, b.y)};
  for (const auto& bld : scene.buildings) {
    if (!bld.bbox().overlaps(seg_box, kBoundaryEps)) continue;
    const bool hit = (rule == BoundaryRule::permissive) ? segment_crosses_interior(bld, a, b)
                                                        : segment_touches_polygon(bld, a, b);
    if (hit) return true;
  }
  return false;
}

// Uniform-grid acceleration for the visibility hot path. Queries are pure and
// safe to run concurrently once built.
class BlockageIndex {
 public:
  BlockageIndex() = default;

  explicit BlockageIndex(const Scene& scene, double cell_size = 25.0)
      : scene_(&scene), cell_(cell_size), origin_{scene.bounds.min_x, scene.bounds.min_y} {
    nx_ = std::max(1, static_cast<int>(std::ceil(scene.bounds.width() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(scene.bounds.height() / cell_)));
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    boxes_.reserve(scene.buildings.size());
    for (std::size_t b = 0; b < scene.buildings.size(); ++b) {
      const Rect bb = scene.buildings[b].bbox();
      boxes_.push_back(bb);
      const int i0 = cell_x(bb.min_x - kBoundaryEps);
      const int i1 = cell_x(bb.max_x + kBoundaryEps);
      const int j0 = cell_y(bb.min_y - kBoundaryEps);
      const int j1 = cell_y(bb.max_y + kBoundaryEps);
      for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
          cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(b));
        }
      }
    }
  }

  bool blocked(Vec2 a, Vec2 b, BoundaryRule rule = BoundaryRule::permissive) const {
    if (scene_ == nullptr || scene_->buildings.empty()) return false;
    const Rect seg_box{std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x),
                       std::max(a.y, b.y)};
    std::vector<int> cand;
    gather(a, b, cand);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (const int idx : cand) {
      if (!boxes_[idx].overlaps(seg_box, kBoundaryEps)) continue;
      const auto& bld = scene_->buildings[idx];
      const bool hit = (rule == BoundaryRule::permissive) ? segment_crosses_interior(bld, a, b)
                                                          : segment_touches_polygon(bld, a, b);
      if (hit) return true;
    }
    return false;
  }

 private:
  int cell_x(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - origin_.x) / cell_)), 0, nx_ - 1);
  }
  int cell_y(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - origin_.y) / cell_)), 0, ny_ - 1);
  }

  // Amanatides-Woo walk over the cells the segment passes through.
  void gather(Vec2 a, Vec2 b, std::vector<int>& out) const {
    int i = cell_x(a.x);
    int j = cell_y(a.y);
    const int i_end = cell_x(b.x);
    const int j_end = cell_y(b.y);
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const int step_i = dx > 0 ? 1 : -1;
    const int step_j = dy > 0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    const double t_delta_x = dx != 0.0 ? cell_ / std::abs(dx) : inf;
    const double t_delta_y = dy != 0.0 ? cell_ / std::abs(dy) : inf;
    double t_max_x = inf;
    double t_max_y = inf;
    if (dx != 0.0) {
      const double edge = origin_.x + (i + (dx > 0 ? 1 : 0)) * cell_;
      t_max_x = (edge - a.x) / dx;
    }
    if (dy != 0.0) {
      const double edge = origin_.y + (j + (dy > 0 ? 1 : 0)) * cell_;
      t_max_y = (edge - a.y) / dy;
    }
    int guard = nx_ + ny_ + 4;
    while (true) {
      const auto& cell = cells_[static_cast<std::size_t>(j) * nx_ + i];
      out.insert(out.end(), cell.begin(), cell.end());
      if ((i == i_end && j == j_end) || --guard <= 0) break;
      if (t_max_x < t_max_y) {
        i += step_i;
        t_max_x += t_delta_x;
        if (i < 0 || i >= nx_) break;
      } else {
        j += step_j;
        t_max_y += t_delta_y;
        if (j < 0 || j >= ny_) break;
      }
    }
  }

  const Scene* scene_ = nullptr;
  double cell_ = 25.0;
  Vec2 origin_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::vector<int>> cells_;
  std::vector<Rect> boxes_;
};

}  // namespace rsuplan
