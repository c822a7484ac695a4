#pragma once

// Experiment runner: scene -> candidates -> grid -> visibility -> solver ->
// exports, with per-stage timings, an independent feasibility re-check of
// the emitted deployment file, and tau / RSS-threshold sweeps.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rsuplan/baselines.hpp"
#include "rsuplan/config.hpp"
#include "rsuplan/coverage.hpp"
#include "rsuplan/exports.hpp"
#include "rsuplan/map_ingest.hpp"
#include "rsuplan/placement.hpp"
#include "rsuplan/scene_io.hpp"

namespace rsuplan {

enum class RunStatus : std::uint8_t { ok, infeasible, error };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::error: return "error";
  }
  return "error";
}

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunResult {
  RunStatus status = RunStatus::error;
  std::string message;
  std::string scene_path;
  PlanningConfig config;
  int candidate_count = 0;
  int deployed_count = 0;
  int reference_tiles = 0;
  int covered_tiles = 0;
  double coverage_rate = 0.0;
  std::optional<double> mean_top_rss;
  bool coverage_met = false;
  bool rss_met = false;
  std::vector<StageTiming> timings;
  std::vector<std::string> notes;
  std::filesystem::path out_dir;
  double total_seconds = 0.0;

  bool feasible() const { return coverage_met && rss_met; }
};

namespace detail {

class StageClock {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }
  double total() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::chrono::steady_clock::time_point last_ = start_;
};

inline nlohmann::json run_result_to_json(const RunResult& r) {
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& t : r.timings) timings[t.stage] = t.seconds;
  nlohmann::json j{{"status", to_string(r.status)},
                   {"message", r.message},
                   {"scene", r.scene_path},
                   {"config", config_to_json(r.config)},
                   {"candidate_count", r.candidate_count},
                   {"deployed_count", r.deployed_count},
                   {"reference_tiles", r.reference_tiles},
                   {"covered_tiles", r.covered_tiles},
                   {"coverage_rate", r.coverage_rate},
                   {"coverage_met", r.coverage_met},
                   {"rss_met", r.rss_met},
                   {"notes", r.notes},
                   {"timings_s", std::move(timings)},
                   {"total_s", r.total_seconds}};
  j["mean_top_rss_dbm"] =
      r.mean_top_rss.has_value() ? nlohmann::json(*r.mean_top_rss) : nlohmann::json(nullptr);
  return j;
}

inline void write_summary(const RunResult& r) {
  std::filesystem::create_directories(r.out_dir);
  write_text_file(r.out_dir / "summary.json", run_result_to_json(r).dump(2) + "\n");
}

}  // namespace detail

// Score a set of RSU positions directly against a scene: the positions need
// not come from the candidate generator, which makes this the independent
// path used to re-check every emitted deployment.
inline CoverageReport evaluate_positions(const Scene& scene, const std::vector<Vec2>& positions,
                                         const PlanningConfig& cfg, TileGrid* grid_out = nullptr) {
  const TileGrid grid = build_grid(scene, cfg.tile_size_m, cfg.border_margin_m);
  CoverageReport report;
  if (positions.empty()) {
    VisibilityTable empty;
    empty.candidate_count = 0;
    empty.reference_count = grid.reference_count();
    empty.by_tile.resize(grid.reference.size());
    report = evaluate_deployment(empty, {}, cfg.tau, cfg.rss_threshold_dbm);
  } else {
    std::vector<CandidateSite> sites;
    sites.reserve(positions.size());
    std::vector<int> ids;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (!scene.bounds.contains(positions[i], kBoundaryEps)) {
        throw ValidationError("evaluate: position outside scene bounds");
      }
      sites.push_back({static_cast<int>(i), positions[i], SiteKind::corner, {}});
      ids.push_back(static_cast<int>(i));
    }
    const VisibilityTable table = build_visibility(scene, grid, sites, cfg.radio);
    report = evaluate_deployment(table, ids, cfg.tau, cfg.rss_threshold_dbm);
  }
  if (grid_out != nullptr) *grid_out = grid;
  return report;
}

inline RunResult run_plan(const std::filesystem::path& scene_path, const PlanningConfig& cfg,
                          const std::filesystem::path& out_dir) {
  validate(cfg);
  RunResult result;
  result.scene_path = scene_path.string();
  result.config = cfg;
  result.out_dir = out_dir;
  std::filesystem::create_directories(out_dir);
  detail::StageClock clock;

  const Scene scene = read_scene_file(scene_path.string());
  result.timings.push_back({"load_scene", clock.lap()});

  const std::vector<CandidateSite> candidates =
      assemble_candidates(scene, cfg.candidate_config());
  result.candidate_count = static_cast<int>(candidates.size());
  result.timings.push_back({"candidates", clock.lap()});

  const TileGrid grid = build_grid(scene, cfg.tile_size_m, cfg.border_margin_m);
  result.reference_tiles = grid.reference_count();
  result.timings.push_back({"grid", clock.lap()});

  const VisibilityTable table = build_visibility(scene, grid, candidates, cfg.radio);
  result.timings.push_back({"visibility", clock.lap()});

  Deployment dep;
  std::vector<GaTraceRow> ga_trace;
  try {
    switch (cfg.algorithm) {
      case Algorithm::agile:
        dep = solve_agile(table, cfg.tau, cfg.rss_threshold_dbm);
        break;
      case Algorithm::gc:
        dep = solve_gc(table, cfg.tau);
        break;
      case Algorithm::ga:
        dep = solve_ga(table, cfg.tau, cfg.rss_threshold_dbm, cfg.ga_with_seed(), &ga_trace);
        break;
      case Algorithm::exhaustive:
        dep = solve_exhaustive(table, cfg.tau, cfg.rss_threshold_dbm);
        break;
    }
  } catch (const InfeasibleError& e) {
    result.status = RunStatus::infeasible;
    result.message = e.what();
    result.coverage_rate = e.achieved_coverage_rate;
    result.mean_top_rss = e.achieved_mean_top_rss;
    result.timings.push_back({"solve", clock.lap()});
    result.total_seconds = clock.total();
    detail::write_summary(result);
    return result;
  }
  result.timings.push_back({"solve", clock.lap()});

  // the solver's own report is not trusted for the result record
  const CoverageReport report =
      evaluate_deployment(table, dep.chosen, cfg.tau, cfg.rss_threshold_dbm);
  result.deployed_count = dep.size();
  result.covered_tiles = report.covered_count;
  result.coverage_rate = report.coverage_rate;
  result.mean_top_rss = report.mean_top_rss;
  result.coverage_met = report.coverage_met;
  result.rss_met = report.rss_met;
  result.notes = dep.notes;

  write_text_file(out_dir / "deployment.geojson",
                  deployment_to_geojson(candidates, dep, cfg).dump(2) + "\n");
  write_text_file(out_dir / "tiles.csv", tiles_to_csv(grid, report));
  write_text_file(out_dir / "rss_cdf.csv", cdf_to_csv(report));
  if (cfg.algorithm == Algorithm::ga) {
    write_text_file(out_dir / "ga_trace.csv", ga_trace_to_csv(ga_trace));
  }
  result.timings.push_back({"export", clock.lap()});

  // round-trip re-check: score the emitted file from scratch
  const std::vector<Vec2> positions = read_deployment_positions(out_dir / "deployment.geojson");
  const CoverageReport recheck = evaluate_positions(scene, positions, cfg);
  const double mean_a = report.mean_top_rss.value_or(-1e30);
  const double mean_b = recheck.mean_top_rss.value_or(-1e30);
  if (recheck.covered_count != report.covered_count || std::abs(mean_a - mean_b) > 1e-6 ||
      recheck.coverage_met != report.coverage_met || recheck.rss_met != report.rss_met) {
    throw std::runtime_error("run_plan: emitted deployment failed the independent re-check");
  }
  result.timings.push_back({"recheck", clock.lap()});

  // a solver may legally return a deployment that misses a constraint it
  // does not optimize for (gc ignores the RSS threshold); artifacts are
  // still written but the run reports infeasible
  if (report.coverage_met && report.rss_met) {
    result.status = RunStatus::ok;
  } else {
    result.status = RunStatus::infeasible;
    result.message = "deployment written but the configured constraints are not met";
  }
  result.total_seconds = clock.total();
  detail::write_summary(result);
  return result;
}

// Score an externally supplied deployment file against a scene.
inline RunResult run_eval(const std::filesystem::path& scene_path,
                          const std::filesystem::path& deployment_path,
                          const PlanningConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  RunResult result;
  result.scene_path = scene_path.string();
  result.config = cfg;
  result.out_dir = out_dir;
  std::filesystem::create_directories(out_dir);
  detail::StageClock clock;

  const Scene scene = read_scene_file(scene_path.string());
  const std::vector<Vec2> positions = read_deployment_positions(deployment_path);
  TileGrid grid;
  const CoverageReport report = evaluate_positions(scene, positions, cfg, &grid);
  result.deployed_count = static_cast<int>(positions.size());
  result.reference_tiles = report.reference_count;
  result.covered_tiles = report.covered_count;
  result.coverage_rate = report.coverage_rate;
  result.mean_top_rss = report.mean_top_rss;
  result.coverage_met = report.coverage_met;
  result.rss_met = report.rss_met;
  result.status = report.coverage_met && report.rss_met ? RunStatus::ok : RunStatus::infeasible;
  if (result.status == RunStatus::infeasible) {
    result.message = "supplied deployment does not meet the configured constraints";
  }
  result.timings.push_back({"eval", clock.lap()});
  result.total_seconds = clock.total();

  write_text_file(out_dir / "tiles.csv", tiles_to_csv(grid, report));
  write_text_file(out_dir / "rss_cdf.csv", cdf_to_csv(report));
  detail::write_summary(result);
  return result;
}

struct SweepSpec {
  std::vector<double> taus;
  std::vector<std::optional<double>> rss_thresholds;
  std::vector<Algorithm> algorithms;
  std::vector<std::uint64_t> seeds = {1};
};

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string cell_tag(Algorithm alg, double tau, std::optional<double> rss,
                            std::uint64_t seed) {
  std::ostringstream tag;
  tag << to_string(alg) << "_tau" << tau << "_rss" << rss_threshold_to_string(rss) << "_seed"
      << seed;
  std::string s = tag.str();
  for (auto& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return s;
}

}  // namespace detail

// Cross product of tau x rss threshold x algorithm x seed; failures land in
// their row and the sweep keeps going. Writes <out>/sweep.csv.
inline std::vector<RunResult> run_sweep(const std::filesystem::path& scene_path,
                                        const SweepSpec& spec, const PlanningConfig& base,
                                        const std::filesystem::path& out_dir) {
  if (spec.taus.empty()) throw ValidationError("sweep: empty tau list");
  if (spec.rss_thresholds.empty()) throw ValidationError("sweep: empty rss threshold list");
  if (spec.algorithms.empty()) throw ValidationError("sweep: empty algorithm list");
  if (spec.seeds.empty()) throw ValidationError("sweep: empty seed list");
  std::filesystem::create_directories(out_dir);

  std::vector<RunResult> results;
  std::string csv =
      "scene,algorithm,tau,rss_threshold_dbm,seed,candidates,deployed,coverage_rate,"
      "mean_top_rss_dbm,runtime_s,status,message\n";
  for (const Algorithm alg : spec.algorithms) {
    for (const double tau : spec.taus) {
      for (const auto& rss : spec.rss_thresholds) {
        for (const std::uint64_t seed : spec.seeds) {
          PlanningConfig cfg = base;
          cfg.algorithm = alg;
          cfg.tau = tau;
          cfg.rss_threshold_dbm = rss;
          cfg.seed = seed;
          const auto cell_dir = out_dir / "cells" / detail::cell_tag(alg, tau, rss, seed);
          RunResult r;
          try {
            r = run_plan(scene_path, cfg, cell_dir);
          } catch (const std::exception& e) {
            r.status = RunStatus::error;
            r.message = e.what();
            r.scene_path = scene_path.string();
            r.config = cfg;
            r.out_dir = cell_dir;
          }
          std::ostringstream row;
          row << scene_path.filename().string() << ',' << to_string(alg) << ',' << tau << ','
              << rss_threshold_to_string(rss) << ',' << seed << ',' << r.candidate_count << ','
              << r.deployed_count << ',' << r.coverage_rate << ',';
          if (r.mean_top_rss.has_value()) row << *r.mean_top_rss;
          row << ',' << r.total_seconds << ',' << to_string(r.status) << ','
              << detail::csv_escape(r.message) << '\n';
          csv += row.str();
          results.push_back(std::move(r));
        }
      }
    }
  }
  write_text_file(out_dir / "sweep.csv", csv);
  return results;
}

}  // namespace rsuplan
