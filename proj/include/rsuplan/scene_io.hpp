#pragma once

// Scene file: the interchange format between ingestion and planning.
//
//   rsuplan-scene 1
//   bounds <min_x> <min_y> <max_x> <max_y>
//   buildings <count>
//   ring <n>
//   <x> <y>            (n lines)
//   ...
//   road-components <count>
//   outer <n>
//   <x> <y>            (n lines)
//   holes <count>
//   ring <n>
//   ...
//
// Plain whitespace-separated text; coordinates are map-local meters written
// with 1e-6 precision (the kernel snap grid), so write -> read -> write is
// byte-stable.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rsuplan/errors.hpp"
#include "rsuplan/geometry.hpp"

namespace rsuplan {

namespace detail {

inline void write_coord(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  out += buf;
}

inline void write_ring(std::string& out, const SimplePolygon& ring) {
  out += std::to_string(ring.vertices.size());
  out += '\n';
  for (const auto& p : ring.vertices) {
    write_coord(out, p.x);
    out += ' ';
    write_coord(out, p.y);
    out += '\n';
  }
}

class SceneTokens {
 public:
  explicit SceneTokens(std::istream& in) : in_(in) {}

  std::string word(const char* what) {
    std::string tok;
    if (!(in_ >> tok)) throw ParseError(std::string("scene file: expected ") + what + ", got end of file");
    return tok;
  }
  double number(const char* what) {
    const std::string tok = word(what);
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("scene file: expected ") + what + ", got '" + tok + "'");
    }
  }
  long long count(const char* what) {
    const double v = number(what);
    if (v < 0 || v != std::floor(v) || v > 1e9) {
      throw ParseError(std::string("scene file: bad count for ") + what);
    }
    return static_cast<long long>(v);
  }
  void keyword(const char* kw) {
    const std::string tok = word(kw);
    if (tok != kw) {
      throw ParseError(std::string("scene file: expected '") + kw + "', got '" + tok + "'");
    }
  }

 private:
  std::istream& in_;
};

inline SimplePolygon read_ring(SceneTokens& t, long long n) {
  if (n < 3) throw ParseError("scene file: ring with fewer than 3 vertices");
  SimplePolygon out;
  out.vertices.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const double x = t.number("x coordinate");
    const double y = t.number("y coordinate");
    out.vertices.push_back({x, y});
  }
  return out;
}

}  // namespace detail

inline std::string scene_to_string(const Scene& scene) {
  std::string out;
  out += "rsuplan-scene 1\n";
  out += "bounds ";
  detail::write_coord(out, scene.bounds.min_x);
  out += ' ';
  detail::write_coord(out, scene.bounds.min_y);
  out += ' ';
  detail::write_coord(out, scene.bounds.max_x);
  out += ' ';
  detail::write_coord(out, scene.bounds.max_y);
  out += '\n';
  out += "buildings " + std::to_string(scene.buildings.size()) + '\n';
  for (const auto& b : scene.buildings) {
    out += "ring ";
    detail::write_ring(out, b);
  }
  out += "road-components " + std::to_string(scene.road_region.size()) + '\n';
  for (const auto& pwh : scene.road_region) {
    out += "outer ";
    detail::write_ring(out, pwh.outer);
    out += "holes " + std::to_string(pwh.holes.size()) + '\n';
    for (const auto& h : pwh.holes) {
      out += "ring ";
      detail::write_ring(out, h);
    }
  }
  return out;
}

inline Scene read_scene(std::istream& in) {
  detail::SceneTokens t(in);
  t.keyword("rsuplan-scene");
  const long long version = t.count("format version");
  if (version != 1) throw ParseError("scene file: unsupported version " + std::to_string(version));
  Scene scene;
  t.keyword("bounds");
  scene.bounds.min_x = t.number("bounds min_x");
  scene.bounds.min_y = t.number("bounds min_y");
  scene.bounds.max_x = t.number("bounds max_x");
  scene.bounds.max_y = t.number("bounds max_y");
  if (!(scene.bounds.width() > 0.0) || !(scene.bounds.height() > 0.0)) {
    throw ParseError("scene file: degenerate bounds");
  }
  t.keyword("buildings");
  const long long n_buildings = t.count("building count");
  for (long long i = 0; i < n_buildings; ++i) {
    t.keyword("ring");
    scene.buildings.push_back(detail::read_ring(t, t.count("vertex count")));
  }
  t.keyword("road-components");
  const long long n_components = t.count("road component count");
  for (long long c = 0; c < n_components; ++c) {
    PolygonWithHoles pwh;
    t.keyword("outer");
    pwh.outer = detail::read_ring(t, t.count("vertex count"));
    t.keyword("holes");
    const long long n_holes = t.count("hole count");
    for (long long h = 0; h < n_holes; ++h) {
      t.keyword("ring");
      pwh.holes.push_back(detail::read_ring(t, t.count("vertex count")));
    }
    scene.road_region.push_back(std::move(pwh));
  }
  return scene;
}

inline Scene read_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file: " + path);
  return read_scene(in);
}

inline void write_scene_file(const std::string& path, const Scene& scene) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write scene file: " + path);
  out << scene_to_string(scene);
}

}  // namespace rsuplan
