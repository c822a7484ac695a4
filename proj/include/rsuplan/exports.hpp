#pragma once

// File exports: candidate/deployment GeoJSON (planar map-local coordinates),
// per-tile RSS CSV, the RSS CDF behind coverage plots, and JSON summaries.
// All writers format deterministically so identical runs produce identical
// bytes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsuplan/candidates.hpp"
#include "rsuplan/config.hpp"
#include "rsuplan/coverage.hpp"
#include "rsuplan/placement.hpp"

namespace rsuplan {

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace detail

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path.string());
  out << content;
}

inline std::string candidates_to_csv(const std::vector<CandidateSite>& candidates) {
  std::string out = "id,x,y,kind\n";
  for (const auto& c : candidates) {
    out += std::to_string(c.id) + ',' + detail::fmt("%.6f", c.position.x) + ',' +
           detail::fmt("%.6f", c.position.y) + ',' + to_string(c.kind) + '\n';
  }
  return out;
}

inline nlohmann::json point_feature(Vec2 p, nlohmann::json properties) {
  return {{"type", "Feature"},
          {"geometry", {{"type", "Point"}, {"coordinates", {p.x, p.y}}}},
          {"properties", std::move(properties)}};
}

inline nlohmann::json candidates_to_geojson(const std::vector<CandidateSite>& candidates) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& c : candidates) {
    features.push_back(point_feature(
        c.position, {{"id", c.id},
                     {"kind", to_string(c.kind)},
                     {"component", c.source.component},
                     {"ring", c.source.ring},
                     {"index", c.source.index}}));
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

inline nlohmann::json config_to_json(const PlanningConfig& cfg) {
  nlohmann::json j{{"tx_power_dbm", cfg.radio.tx_power_dbm},
                   {"tx_gain_dbi", cfg.radio.tx_gain_dbi},
                   {"path_loss_exponent", cfg.radio.path_loss_exponent},
                   {"channel_att_factor_db", cfg.radio.channel_att_factor_db},
                   {"att_per_km_db", cfg.radio.att_per_km_db},
                   {"tau", cfg.tau},
                   {"rsu_threshold_m", cfg.rsu_threshold_m},
                   {"tile_size_m", cfg.tile_size_m},
                   {"border_margin_m", cfg.border_margin_m},
                   {"angle_threshold_deg", cfg.angle_threshold_deg},
                   {"dedup_radius_m", cfg.dedup_radius_m},
                   {"corner_nudge_m", cfg.corner_nudge_m},
                   {"algorithm", to_string(cfg.algorithm)},
                   {"seed", cfg.seed},
                   {"ga_population", cfg.ga.population_size},
                   {"ga_generations", cfg.ga.generations},
                   {"ga_tournament", cfg.ga.tournament_size},
                   {"ga_crossover_prob", cfg.ga.crossover_prob},
                   {"ga_mutation_prob", cfg.ga.mutation_prob_per_bit},
                   {"ga_penalty_weight", cfg.ga.penalty_weight}};
  if (cfg.rss_threshold_dbm.has_value()) {
    j["rss_threshold_dbm"] = *cfg.rss_threshold_dbm;
  } else {
    j["rss_threshold_dbm"] = nullptr;
  }
  return j;
}

inline nlohmann::json deployment_to_geojson(const std::vector<CandidateSite>& candidates,
                                            const Deployment& dep, const PlanningConfig& cfg) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t k = 0; k < dep.chosen.size(); ++k) {
    const auto& site = candidates[static_cast<std::size_t>(dep.chosen[k])];
    features.push_back(point_feature(site.position, {{"id", site.id},
                                                     {"kind", to_string(site.kind)},
                                                     {"phase", dep.phase_added[k]}}));
  }
  nlohmann::json summary{{"algorithm", to_string(cfg.algorithm)},
                         {"tau", cfg.tau},
                         {"seed", cfg.seed},
                         {"candidate_count", static_cast<int>(dep.selected.size())},
                         {"deployed_count", dep.size()},
                         {"reference_tiles", dep.report.reference_count},
                         {"required_tiles", dep.report.required_count},
                         {"covered_tiles", dep.report.covered_count},
                         {"coverage_rate", dep.report.coverage_rate},
                         {"coverage_met", dep.report.coverage_met},
                         {"rss_met", dep.report.rss_met}};
  summary["rss_threshold_dbm"] =
      cfg.rss_threshold_dbm.has_value() ? nlohmann::json(*cfg.rss_threshold_dbm)
                                        : nlohmann::json(nullptr);
  summary["mean_top_rss_dbm"] = dep.report.mean_top_rss.has_value()
                                    ? nlohmann::json(*dep.report.mean_top_rss)
                                    : nlohmann::json(nullptr);
  return {{"type", "FeatureCollection"},
          {"features", std::move(features)},
          {"summary", std::move(summary)}};
}

inline std::vector<Vec2> deployment_positions_from_geojson(const nlohmann::json& doc) {
  if (!doc.contains("features") || !doc["features"].is_array()) {
    throw ParseError("deployment geojson: missing features array");
  }
  std::vector<Vec2> out;
  for (const auto& f : doc["features"]) {
    if (!f.contains("geometry")) continue;
    const auto& g = f["geometry"];
    if (g.value("type", "") != "Point") continue;
    const auto& coords = g["coordinates"];
    if (!coords.is_array() || coords.size() < 2) {
      throw ParseError("deployment geojson: bad point coordinates");
    }
    out.push_back({coords[0].get<double>(), coords[1].get<double>()});
  }
  return out;
}

inline std::vector<Vec2> read_deployment_positions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open deployment file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("deployment geojson: " + std::string(e.what()));
  }
  return deployment_positions_from_geojson(doc);
}

// Per-tile map behind RSS heatmaps; uncovered tiles keep an empty RSS field.
inline std::string tiles_to_csv(const TileGrid& grid, const CoverageReport& report) {
  std::string out = "x,y,best_rss_dbm,covered\n";
  for (int t = 0; t < report.reference_count; ++t) {
    const Vec2 c = grid.reference_center(t);
    const double rss = report.best_rss[static_cast<std::size_t>(t)];
    const bool covered = rss != -std::numeric_limits<double>::infinity();
    out += detail::fmt("%.6f", c.x) + ',' + detail::fmt("%.6f", c.y) + ',';
    if (covered) out += detail::fmt("%.4f", rss);
    out += covered ? ",1\n" : ",0\n";
  }
  return out;
}

// Empirical CDF of the best per-tile RSS over covered reference tiles,
// ascending; the last cumulative value is exactly 1.
inline std::string cdf_to_csv(const CoverageReport& report) {
  std::vector<double> values;
  for (const double v : report.best_rss) {
    if (v != -std::numeric_limits<double>::infinity()) values.push_back(v);
  }
  std::sort(values.begin(), values.end());
  std::string out = "rss_dbm,cum_fraction\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += detail::fmt("%.4f", values[i]) + ',' +
           detail::fmt("%.8f", static_cast<double>(i + 1) / values.size()) + '\n';
  }
  return out;
}

inline std::string ga_trace_to_csv(const std::vector<GaTraceRow>& trace) {
  std::string out = "generation,best_fitness,best_feasible\n";
  for (const auto& row : trace) {
    out += std::to_string(row.generation) + ',' + detail::fmt("%.6f", row.best_fitness) + ',' +
           (row.best_feasible ? "1\n" : "0\n");
  }
  return out;
}

}  // namespace rsuplan
