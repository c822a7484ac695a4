#pragma once

// Map ingestion: OpenStreetMap extracts (XML) or synthetic generators, turned
// into a validated Scene. Building footprints are unioned into solid blocks;
// road centerlines are buffered to their width (flat caps, mitered joins),
// unioned into the drivable surface, clipped to the map bounds, and the
// building footprints are carved out of it so reference tiles can only sit
// on reachable road surface.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "rsuplan/errors.hpp"
#include "rsuplan/geometry.hpp"

namespace rsuplan {

struct RawBuilding {
  SimplePolygon footprint;  // map-local meters
};

struct RawRoad {
  std::vector<Vec2> centerline;  // map-local meters
  double width_m = 0.0;
  std::string road_class;
};

struct GeoWindow {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;
};

// Drivable highway classes and the width assumed when the extract carries no
// width tag (roughly lane count x 3.5 m). A class absent from this table is
// not ingested.
inline std::map<std::string, double> default_road_widths() {
  return {
      {"motorway", 21.0},      {"motorway_link", 10.0}, {"trunk", 16.0},
      {"trunk_link", 8.0},     {"primary", 12.0},       {"primary_link", 6.0},
      {"secondary", 10.0},     {"secondary_link", 6.0}, {"tertiary", 8.0},
      {"tertiary_link", 6.0},  {"unclassified", 6.0},   {"residential", 6.0},
      {"living_street", 4.0},  {"service", 4.0},
  };
}

struct OsmOptions {
  std::map<std::string, double> road_widths = default_road_widths();
};

struct IngestResult {
  std::vector<RawBuilding> buildings;
  std::vector<RawRoad> roads;
  Rect bounds;  // [0, M_x] x [0, M_y]
  std::vector<std::string> warnings;
};

namespace detail {

// Equirectangular projection about the window center; fine at the ~1 km map
// scale this planner works with.
struct Projection {
  explicit Projection(const GeoWindow& w) : window(w) {
    cos_lat0 = std::cos(0.5 * (w.min_lat + w.max_lat) * kDegToRad);
  }

  Vec2 to_local(double lon, double lat) const {
    return {(lon - window.min_lon) * kMeterPerDeg * cos_lat0,
            (lat - window.min_lat) * kMeterPerDeg};
  }
  Rect bounds() const {
    return {0.0, 0.0, (window.max_lon - window.min_lon) * kMeterPerDeg * cos_lat0,
            (window.max_lat - window.min_lat) * kMeterPerDeg};
  }

  static constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  static constexpr double kEarthRadiusM = 6371000.0;
  static constexpr double kMeterPerDeg = kEarthRadiusM * kDegToRad;
  GeoWindow window;
  double cos_lat0 = 1.0;
};

inline std::optional<double> parse_width_tag(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (v > 0.0 && v < 200.0) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

inline long long byte_offset_of_line(const std::string& path, unsigned long line) {
  std::ifstream in(path, std::ios::binary);
  if (!in || line <= 1) return 0;
  std::string buf;
  long long offset = 0;
  unsigned long current = 1;
  while (current < line && std::getline(in, buf)) {
    offset += static_cast<long long>(buf.size()) + 1;
    ++current;
  }
  return offset;
}

struct OsmWay {
  std::vector<long long> node_refs;
  std::map<std::string, std::string> tags;
};

struct OsmRelation {
  std::vector<long long> outer_way_refs;
  std::map<std::string, std::string> tags;
};

// Chain member ways end-to-end into closed node-id rings.
inline std::vector<std::vector<long long>> stitch_rings(
    const std::vector<std::vector<long long>>& pieces, std::vector<std::string>& warnings) {
  std::vector<std::vector<long long>> rings;
  std::vector<bool> used(pieces.size(), false);
  for (std::size_t start = 0; start < pieces.size(); ++start) {
    if (used[start] || pieces[start].empty()) continue;
    used[start] = true;
    std::vector<long long> chain = pieces[start];
    bool extended = true;
    while (chain.front() != chain.back() && extended) {
      extended = false;
      for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (used[k] || pieces[k].size() < 2) continue;
        const auto& piece = pieces[k];
        if (piece.front() == chain.back()) {
          chain.insert(chain.end(), piece.begin() + 1, piece.end());
        } else if (piece.back() == chain.back()) {
          chain.insert(chain.end(), piece.rbegin() + 1, piece.rend());
        } else {
          continue;
        }
        used[k] = true;
        extended = true;
        break;
      }
    }
    if (chain.size() >= 4 && chain.front() == chain.back()) {
      chain.pop_back();
      rings.push_back(std::move(chain));
    } else {
      warnings.push_back("skipped unclosed multipolygon outer ring");
    }
  }
  return rings;
}

}  // namespace detail

inline IngestResult ingest_osm_stream(std::istream& in, const GeoWindow& window,
                                      const OsmOptions& opts = {},
                                      const std::string& path_for_errors = "<stream>") {
  namespace bpt = boost::property_tree;
  if (!(window.max_lon > window.min_lon) || !(window.max_lat > window.min_lat)) {
    throw ValidationError("osm ingest: degenerate window");
  }

  bpt::ptree doc;
  try {
    bpt::read_xml(in, doc);
  } catch (const bpt::xml_parser_error& e) {
    const long long offset =
        path_for_errors == "<stream>" ? -1 : detail::byte_offset_of_line(path_for_errors, e.line());
    std::ostringstream msg;
    msg << "osm ingest: parse error in " << path_for_errors << " near line " << e.line();
    if (offset >= 0) msg << " (byte offset " << offset << ")";
    msg << ": " << e.message();
    throw ParseError(msg.str(), offset);
  }

  const auto osm = doc.get_child_optional("osm");
  if (!osm) throw ParseError("osm ingest: missing <osm> root element in " + path_for_errors);

  const detail::Projection proj(window);
  IngestResult result;
  result.bounds = proj.bounds();

  std::unordered_map<long long, Vec2> nodes;       // projected (may be outside bounds)
  std::unordered_map<long long, bool> node_in_window;
  std::unordered_map<long long, detail::OsmWay> ways;
  std::vector<detail::OsmRelation> relations;

  for (const auto& [name, child] : *osm) {
    if (name == "node") {
      const long long id = child.get<long long>("<xmlattr>.id");
      const double lat = child.get<double>("<xmlattr>.lat");
      const double lon = child.get<double>("<xmlattr>.lon");
      nodes[id] = proj.to_local(lon, lat);
      node_in_window[id] = lon >= window.min_lon && lon <= window.max_lon &&
                           lat >= window.min_lat && lat <= window.max_lat;
    } else if (name == "way") {
      detail::OsmWay way;
      long long id = child.get<long long>("<xmlattr>.id", -1);
      for (const auto& [sub, node] : child) {
        if (sub == "nd") {
          way.node_refs.push_back(node.get<long long>("<xmlattr>.ref"));
        } else if (sub == "tag") {
          way.tags[node.get<std::string>("<xmlattr>.k")] = node.get<std::string>("<xmlattr>.v");
        }
      }
      if (id >= 0) ways[id] = std::move(way);
    } else if (name == "relation") {
      detail::OsmRelation rel;
      for (const auto& [sub, node] : child) {
        if (sub == "member") {
          if (node.get<std::string>("<xmlattr>.type", "") == "way") {
            const std::string role = node.get<std::string>("<xmlattr>.role", "");
            if (role.empty() || role == "outer") {
              rel.outer_way_refs.push_back(node.get<long long>("<xmlattr>.ref"));
            }
          }
        } else if (sub == "tag") {
          rel.tags[node.get<std::string>("<xmlattr>.k")] = node.get<std::string>("<xmlattr>.v");
        }
      }
      relations.push_back(std::move(rel));
    }
  }

  bool any_in_window = false;
  for (const auto& [id, in_w] : node_in_window) {
    if (in_w) {
      any_in_window = true;
      break;
    }
  }
  if (!any_in_window) throw ValidationError("osm ingest: no features in window");

  const auto way_touches_window = [&](const std::vector<long long>& refs) {
    for (const long long r : refs) {
      const auto it = node_in_window.find(r);
      if (it != node_in_window.end() && it->second) return true;
    }
    return false;
  };
  const auto ring_to_footprint = [&](const std::vector<long long>& refs) {
    SimplePolygon poly;
    poly.vertices.reserve(refs.size());
    for (const long long r : refs) {
      const auto it = nodes.find(r);
      if (it == nodes.end()) return SimplePolygon{};  // missing node, caller warns
      if (poly.vertices.empty() || distance(poly.vertices.back(), it->second) > 1e-9) {
        poly.vertices.push_back(it->second);
      }
    }
    return poly;
  };
  const auto is_building_tagged = [](const std::map<std::string, std::string>& tags) {
    const auto it = tags.find("building");
    return it != tags.end() && it->second != "no";
  };

  // Multipolygon building relations first; their outers are approximated by
  // the stitched outer rings (inner courtyards get filled by the union anyway)
  // and the member ways are not ingested a second time.
  std::set<long long> consumed_ways;
  for (const auto& rel : relations) {
    const auto type_it = rel.tags.find("type");
    if (type_it == rel.tags.end() || type_it->second != "multipolygon") continue;
    if (!is_building_tagged(rel.tags)) continue;
    std::vector<std::vector<long long>> pieces;
    for (const long long ref : rel.outer_way_refs) {
      const auto it = ways.find(ref);
      if (it == ways.end()) {
        result.warnings.push_back("relation references missing way " + std::to_string(ref));
        continue;
      }
      consumed_ways.insert(ref);
      pieces.push_back(it->second.node_refs);
    }
    for (const auto& ring : detail::stitch_rings(pieces, result.warnings)) {
      if (!way_touches_window(ring)) continue;
      SimplePolygon fp = ring_to_footprint(ring);
      if (fp.vertices.size() >= 3) {
        result.buildings.push_back({std::move(fp)});
      } else {
        result.warnings.push_back("skipped degenerate multipolygon building");
      }
    }
  }

  for (const auto& [id, way] : std::map<long long, detail::OsmWay>(ways.begin(), ways.end())) {
    if (consumed_ways.count(id) != 0) continue;
    if (way.node_refs.size() < 2 || !way_touches_window(way.node_refs)) continue;
    const bool closed = way.node_refs.front() == way.node_refs.back();
    if (closed && is_building_tagged(way.tags)) {
      std::vector<long long> ring(way.node_refs.begin(), way.node_refs.end() - 1);
      SimplePolygon fp = ring_to_footprint(ring);
      if (fp.vertices.size() >= 3) {
        result.buildings.push_back({std::move(fp)});
      } else {
        result.warnings.push_back("skipped degenerate building way " + std::to_string(id));
      }
      continue;
    }
    const auto hw = way.tags.find("highway");
    if (hw == way.tags.end()) continue;
    const auto width_it = opts.road_widths.find(hw->second);
    if (width_it == opts.road_widths.end()) continue;  // not a drivable class we ingest
    double width = width_it->second;
    const auto tag_it = way.tags.find("width");
    if (tag_it != way.tags.end()) {
      if (const auto parsed = detail::parse_width_tag(tag_it->second)) {
        width = *parsed;
      } else {
        result.warnings.push_back("way " + std::to_string(id) + ": unparseable width '" +
                                  tag_it->second + "', using class default");
      }
    }
    RawRoad road;
    road.width_m = width;
    road.road_class = hw->second;
    for (const long long r : way.node_refs) {
      const auto it = nodes.find(r);
      if (it == nodes.end()) continue;
      if (road.centerline.empty() || distance(road.centerline.back(), it->second) > 1e-9) {
        road.centerline.push_back(it->second);
      }
    }
    if (road.centerline.size() >= 2) result.roads.push_back(std::move(road));
  }

  if (result.buildings.empty() && result.roads.empty()) {
    result.warnings.push_back("no buildings or drivable roads matched in window");
  }
  return result;
}

inline IngestResult ingest_osm(const std::string& path, const GeoWindow& window,
                               const OsmOptions& opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("osm ingest: cannot open " + path);
  return ingest_osm_stream(in, window, opts, path);
}

// ---------------------------------------------------------------------------
// scene assembly

inline Scene build_scene(const std::vector<RawBuilding>& buildings,
                         const std::vector<RawRoad>& roads, const Rect& bounds,
                         UnionStats* stats = nullptr) {
  namespace bg = boost::geometry;
  if (roads.empty()) throw ValidationError("build_scene: no roads");
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw ValidationError("build_scene: degenerate bounds");
  }

  // Buildings: snap, validate, union with courtyard filling, clip.
  std::vector<SimplePolygon> footprints;
  footprints.reserve(buildings.size());
  for (const auto& b : buildings) footprints.push_back(b.footprint);
  detail::BgMultiPolygon buildings_bg;
  if (!footprints.empty()) {
    auto merged = detail::fold_union(detail::validated_parts(footprints));
    merged = detail::clip_to_rect(merged, bounds);
    const auto comps = detail::from_bg(merged, /*fill_holes=*/true, kSliverArea, stats);
    for (const auto& c : comps) buildings_bg.push_back(detail::to_bg(c.outer));
  }

  // Roads: buffer each centerline to its width, union, clip, carve buildings.
  std::vector<detail::BgMultiPolygon> road_parts;
  road_parts.reserve(roads.size());
  for (std::size_t i = 0; i < roads.size(); ++i) {
    const auto& road = roads[i];
    if (road.centerline.size() < 2) {
      throw ValidationError("road " + std::to_string(i) + ": centerline needs at least 2 points");
    }
    if (!(road.width_m > 0.0)) {
      throw ValidationError("road " + std::to_string(i) + ": non-positive width");
    }
    detail::BgLinestring line;
    for (const auto& p : road.centerline) {
      bg::append(line, detail::BgPoint(snap_value(p.x), snap_value(p.y)));
    }
    const bg::strategy::buffer::distance_symmetric<double> dist(road.width_m / 2.0);
    const bg::strategy::buffer::side_straight side;
    const bg::strategy::buffer::join_miter join;
    const bg::strategy::buffer::end_flat end;
    const bg::strategy::buffer::point_square point;
    detail::BgMultiPolygon buffered;
    bg::buffer(line, buffered, dist, side, join, end, point);
    if (!buffered.empty()) road_parts.push_back(std::move(buffered));
  }
  auto road_bg = detail::fold_union(std::move(road_parts));
  road_bg = detail::clip_to_rect(road_bg, bounds);
  if (!buildings_bg.empty()) road_bg = detail::subtract(road_bg, buildings_bg);

  Scene scene;
  scene.bounds = bounds;
  const auto building_comps = detail::from_bg(buildings_bg, /*fill_holes=*/true, kSliverArea, stats);
  scene.buildings.reserve(building_comps.size());
  for (const auto& c : building_comps) scene.buildings.push_back(c.outer);
  scene.road_region = detail::from_bg(road_bg, /*fill_holes=*/false, kSliverArea, stats);
  if (scene.road_region.empty()) throw ValidationError("build_scene: no road surface in bounds");
  return scene;
}

// Manhattan-style test scene: rows x cols square blocks separated by roads of
// uniform width, bounded by a road ring. Deterministic.
inline Scene generate_synthetic_grid(int rows, int cols, double block_m, double road_m,
                                     UnionStats* stats = nullptr) {
  if (rows < 1 || cols < 1) throw ValidationError("synthetic grid: rows/cols must be >= 1");
  if (!(block_m > 0.0) || !(road_m > 0.0)) {
    throw ValidationError("synthetic grid: non-positive dimensions");
  }
  const double width = cols * block_m + (cols + 1) * road_m;
  const double height = rows * block_m + (rows + 1) * road_m;

  std::vector<RawBuilding> buildings;
  buildings.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x0 = road_m + c * (block_m + road_m);
      const double y0 = road_m + r * (block_m + road_m);
      buildings.push_back(
          {SimplePolygon{{{x0, y0}, {x0 + block_m, y0}, {x0 + block_m, y0 + block_m}, {x0, y0 + block_m}}}});
    }
  }
  std::vector<RawRoad> roads;
  for (int j = 0; j <= rows; ++j) {
    const double y = j * (block_m + road_m) + road_m / 2.0;
    roads.push_back({{{0.0, y}, {width, y}}, road_m, "grid"});
  }
  for (int i = 0; i <= cols; ++i) {
    const double x = i * (block_m + road_m) + road_m / 2.0;
    roads.push_back({{{x, 0.0}, {x, height}}, road_m, "grid"});
  }
  return build_scene(buildings, roads, Rect{0.0, 0.0, width, height}, stats);
}

// Irregular variant: the same road grid but block footprints replaced by
// jittered octagons, producing slanted facades and non-uniform road edges.
inline Scene generate_synthetic_irregular(int rows, int cols, double block_m, double road_m,
                                          double jitter_frac, std::uint64_t seed,
                                          UnionStats* stats = nullptr) {
  if (rows < 1 || cols < 1) throw ValidationError("synthetic grid: rows/cols must be >= 1");
  if (!(block_m > 0.0) || !(road_m > 0.0) || jitter_frac < 0.0 || jitter_frac > 0.45) {
    throw ValidationError("synthetic grid: bad dimensions or jitter");
  }
  const double width = cols * block_m + (cols + 1) * road_m;
  const double height = rows * block_m + (rows + 1) * road_m;

  std::mt19937_64 rng(seed);
  const auto uniform01 = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  const double amp = jitter_frac * block_m;

  std::vector<RawBuilding> buildings;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x0 = road_m + c * (block_m + road_m);
      const double y0 = road_m + r * (block_m + road_m);
      const double x1 = x0 + block_m;
      const double y1 = y0 + block_m;
      const double xm = 0.5 * (x0 + x1);
      const double ym = 0.5 * (y0 + y1);
      std::vector<Vec2> pts = {{x0, y0}, {xm, y0}, {x1, y0}, {x1, ym},
                               {x1, y1}, {xm, y1}, {x0, y1}, {x0, ym}};
      for (auto& p : pts) {
        p.x += (uniform01() * 2.0 - 1.0) * amp;
        p.y += (uniform01() * 2.0 - 1.0) * amp;
      }
      const Vec2 center{xm, ym};
      std::sort(pts.begin(), pts.end(), [&](const Vec2& a, const Vec2& b) {
        return std::atan2(a.y - center.y, a.x - center.x) <
               std::atan2(b.y - center.y, b.x - center.x);
      });
      // same-angle duplicates would fold the ring; keep the farther point
      std::vector<Vec2> ring;
      for (const auto& p : pts) {
        if (!ring.empty()) {
          const double a0 = std::atan2(ring.back().y - center.y, ring.back().x - center.x);
          const double a1 = std::atan2(p.y - center.y, p.x - center.x);
          if (std::abs(a1 - a0) < 1e-9) {
            if (distance(p, center) > distance(ring.back(), center)) ring.back() = p;
            continue;
          }
        }
        ring.push_back(p);
      }
      SimplePolygon poly{std::move(ring)};
      if (simple_polygon_defect(snapped(poly))) {
        poly = SimplePolygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};  // rare fallback
      }
      buildings.push_back({std::move(poly)});
    }
  }
  std::vector<RawRoad> roads;
  for (int j = 0; j <= rows; ++j) {
    const double y = j * (block_m + road_m) + road_m / 2.0;
    roads.push_back({{{0.0, y}, {width, y}}, road_m, "grid"});
  }
  for (int i = 0; i <= cols; ++i) {
    const double x = i * (block_m + road_m) + road_m / 2.0;
    roads.push_back({{{x, 0.0}, {x, height}}, road_m, "grid"});
  }
  return build_scene(buildings, roads, Rect{0.0, 0.0, width, height}, stats);
}

}  // namespace rsuplan
