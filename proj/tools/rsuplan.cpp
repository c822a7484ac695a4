// rsuplan command line: scene generation/ingest, candidate extraction,
// planning runs, parameter sweeps, and scoring of external deployments.
//
// Exit codes: 0 success (feasible), 2 infeasible, 1 crash/bad input, so
// sweep scripts can tell outcomes apart.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "rsuplan/candidates.hpp"
#include "rsuplan/config.hpp"
#include "rsuplan/exports.hpp"
#include "rsuplan/harness.hpp"
#include "rsuplan/map_ingest.hpp"
#include "rsuplan/scene_io.hpp"

namespace {

struct ConfigCli {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "planning config file (key = value lines)");
    const auto bind = [this, cmd](const char* flag, const char* key, const char* help) {
      cmd->add_option_function<std::string>(
          flag, [this, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
    };
    bind("--tau", "tau", "coverage tolerance in [0,1]");
    bind("--rss-threshold", "rss_threshold_dbm", "mean-RSS threshold in dBm, or 'inf' to disable");
    bind("--algorithm", "algorithm", "agile|gc|ga|exhaustive");
    bind("--seed", "seed", "seed for every random draw in the run");
    bind("--tile-size", "tile_size_m", "grid tile side in meters");
    bind("--border-margin", "border_margin_m", "border cut from each side for the area of interest");
    bind("--rsu-threshold", "rsu_threshold_m", "road length that triggers interior sites");
    bind("--angle-threshold", "angle_threshold_deg", "corner sharpness threshold in degrees");
    bind("--dedup-radius", "dedup_radius_m", "candidate merge radius in meters");
    bind("--corner-nudge", "corner_nudge_m", "distance sites are pushed into the road");
    bind("--tx-power", "tx_power_dbm", "transmit power in dBm");
    bind("--tx-gain", "tx_gain_dbi", "transmit antenna gain in dBi");
    bind("--path-loss-exponent", "path_loss_exponent", "path loss exponent");
    bind("--channel-att-factor", "channel_att_factor_db", "channel attenuation factor in dB");
    bind("--att-per-km", "att_per_km_db", "rain/atmospheric slope in dB per km");
    bind("--ga-population", "ga_population", "GA population size");
    bind("--ga-generations", "ga_generations", "GA generations");
    bind("--ga-tournament", "ga_tournament", "GA tournament size");
    bind("--ga-crossover", "ga_crossover_prob", "GA crossover probability");
    bind("--ga-mutation", "ga_mutation_prob", "GA per-bit mutation probability or 'auto'");
    bind("--ga-penalty", "ga_penalty_weight", "GA penalty weight or 'auto'");
  }

  rsuplan::PlanningConfig resolve() const {
    rsuplan::PlanningConfig cfg =
        config_path.empty() ? rsuplan::PlanningConfig{} : rsuplan::read_config_file(config_path);
    for (const auto& [key, value] : overrides) rsuplan::apply_config_entry(cfg, key, value);
    rsuplan::validate(cfg);
    return cfg;
  }
};

void print_result(const rsuplan::RunResult& r) {
  std::cout << "status: " << rsuplan::to_string(r.status) << "\n"
            << "candidates: " << r.candidate_count << "\n"
            << "deployed: " << r.deployed_count << "\n"
            << "coverage_rate: " << r.coverage_rate << "\n"
            << "mean_top_rss_dbm: "
            << (r.mean_top_rss ? std::to_string(*r.mean_top_rss) : std::string("n/a")) << "\n"
            << "outputs: " << r.out_dir.string() << "\n";
  if (!r.message.empty()) std::cout << "message: " << r.message << "\n";
  for (const auto& note : r.notes) std::cout << "note: " << note << "\n";
}

int status_code(rsuplan::RunStatus s) {
  switch (s) {
    case rsuplan::RunStatus::ok: return 0;
    case rsuplan::RunStatus::infeasible: return 2;
    case rsuplan::RunStatus::error: return 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave road-side-unit deployment planner"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic grid scene file");
  int rows = 5;
  int cols = 5;
  double block = 90.0;
  double road = 10.0;
  bool irregular = false;
  double jitter = 0.06;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  synth->add_option("--rows", rows, "block rows")->capture_default_str();
  synth->add_option("--cols", cols, "block columns")->capture_default_str();
  synth->add_option("--block-size", block, "block side in meters")->capture_default_str();
  synth->add_option("--road-width", road, "road width in meters")->capture_default_str();
  synth->add_flag("--irregular", irregular, "jitter block footprints");
  synth->add_option("--jitter", jitter, "jitter amplitude as a fraction of the block side")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed, "jitter seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output scene file")->required();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "convert an OSM XML extract to a scene file");
  std::string osm_path;
  std::vector<double> window;
  std::string ingest_out;
  ingest->add_option("--osm", osm_path, "OSM XML extract")->required();
  ingest->add_option("--window", window, "geodetic window: min_lon min_lat max_lon max_lat")
      ->expected(4)
      ->required();
  ingest->add_option("--out", ingest_out, "output scene file")->required();

  // candidates
  auto* cand = app.add_subcommand("candidates", "extract candidate RSU sites from a scene");
  std::string cand_scene;
  std::string cand_csv;
  std::string cand_geojson;
  ConfigCli cand_cfg;
  cand->add_option("--scene", cand_scene, "scene file")->required();
  cand->add_option("--out-csv", cand_csv, "candidate CSV output");
  cand->add_option("--out-geojson", cand_geojson, "candidate GeoJSON output");
  cand_cfg.attach(cand);

  // plan
  auto* plan = app.add_subcommand("plan", "run the full planning pipeline on a scene");
  std::string plan_scene;
  std::string plan_out = "plan_out";
  ConfigCli plan_cfg;
  plan->add_option("--scene", plan_scene, "scene file")->required();
  plan->add_option("--out", plan_out, "output directory")->capture_default_str();
  plan_cfg.attach(plan);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a tau x RSS-threshold x algorithm sweep");
  std::string sweep_scene;
  std::string sweep_out = "sweep_out";
  std::vector<double> sweep_taus;
  std::vector<std::string> sweep_rss;
  std::vector<std::string> sweep_algorithms;
  std::vector<std::uint64_t> sweep_seeds;
  ConfigCli sweep_cfg;
  sweep->add_option("--scene", sweep_scene, "scene file")->required();
  sweep->add_option("--out", sweep_out, "output directory")->capture_default_str();
  sweep->add_option("--taus", sweep_taus, "tolerance values")->required();
  sweep->add_option("--rss-thresholds", sweep_rss, "threshold values in dBm, 'inf' disables")
      ->required();
  sweep->add_option("--algorithms", sweep_algorithms, "solvers to run")->required();
  sweep->add_option("--seeds", sweep_seeds, "seeds (default: 1)");
  sweep_cfg.attach(sweep);

  // eval
  auto* eval = app.add_subcommand("eval", "score an externally supplied deployment GeoJSON");
  std::string eval_scene;
  std::string eval_deployment;
  std::string eval_out = "eval_out";
  ConfigCli eval_cfg;
  eval->add_option("--scene", eval_scene, "scene file")->required();
  eval->add_option("--deployment", eval_deployment, "deployment GeoJSON (point features)")
      ->required();
  eval->add_option("--out", eval_out, "output directory")->capture_default_str();
  eval_cfg.attach(eval);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      rsuplan::UnionStats stats;
      const rsuplan::Scene scene =
          irregular
              ? rsuplan::generate_synthetic_irregular(rows, cols, block, road, jitter, synth_seed,
                                                      &stats)
              : rsuplan::generate_synthetic_grid(rows, cols, block, road, &stats);
      rsuplan::write_scene_file(synth_out, scene);
      std::cout << "scene: " << synth_out << "\n"
                << "bounds: " << scene.bounds.width() << " x " << scene.bounds.height() << " m\n"
                << "buildings: " << scene.buildings.size() << "\n"
                << "road components: " << scene.road_region.size() << "\n";
      if (stats.dropped_slivers > 0) {
        std::cout << "note: dropped " << stats.dropped_slivers << " sliver fragment(s)\n";
      }
      return 0;
    }
    if (ingest->parsed()) {
      const rsuplan::GeoWindow w{window[0], window[1], window[2], window[3]};
      const rsuplan::IngestResult raw = rsuplan::ingest_osm(osm_path, w);
      for (const auto& warning : raw.warnings) std::cout << "warning: " << warning << "\n";
      rsuplan::UnionStats stats;
      const rsuplan::Scene scene =
          rsuplan::build_scene(raw.buildings, raw.roads, raw.bounds, &stats);
      rsuplan::write_scene_file(ingest_out, scene);
      std::cout << "scene: " << ingest_out << "\n"
                << "bounds: " << scene.bounds.width() << " x " << scene.bounds.height() << " m\n"
                << "buildings: " << scene.buildings.size() << " (from " << raw.buildings.size()
                << " footprints)\n"
                << "roads: " << raw.roads.size() << " ways, " << scene.road_region.size()
                << " surface component(s)\n";
      if (stats.dropped_slivers > 0) {
        std::cout << "note: dropped " << stats.dropped_slivers << " sliver fragment(s)\n";
      }
      return 0;
    }
    if (cand->parsed()) {
      const rsuplan::PlanningConfig cfg = cand_cfg.resolve();
      const rsuplan::Scene scene = rsuplan::read_scene_file(cand_scene);
      const auto sites = rsuplan::assemble_candidates(scene, cfg.candidate_config());
      if (!cand_csv.empty()) {
        rsuplan::write_text_file(cand_csv, rsuplan::candidates_to_csv(sites));
      }
      if (!cand_geojson.empty()) {
        rsuplan::write_text_file(cand_geojson, rsuplan::candidates_to_geojson(sites).dump(2) + "\n");
      }
      int corners = 0;
      for (const auto& s : sites) {
        if (s.kind == rsuplan::SiteKind::corner) ++corners;
      }
      std::cout << "candidates: " << sites.size() << " (" << corners << " corner, "
                << sites.size() - corners << " long-road)\n";
      return 0;
    }
    if (plan->parsed()) {
      const rsuplan::RunResult r = rsuplan::run_plan(plan_scene, plan_cfg.resolve(), plan_out);
      print_result(r);
      return status_code(r.status);
    }
    if (sweep->parsed()) {
      rsuplan::SweepSpec spec;
      spec.taus = sweep_taus;
      for (const auto& s : sweep_rss) spec.rss_thresholds.push_back(rsuplan::parse_rss_threshold(s));
      for (const auto& s : sweep_algorithms) {
        spec.algorithms.push_back(rsuplan::algorithm_from_string(s));
      }
      if (!sweep_seeds.empty()) spec.seeds = sweep_seeds;
      const auto results = rsuplan::run_sweep(sweep_scene, spec, sweep_cfg.resolve(), sweep_out);
      int ok = 0;
      int infeasible = 0;
      int failed = 0;
      for (const auto& r : results) {
        if (r.status == rsuplan::RunStatus::ok) ++ok;
        else if (r.status == rsuplan::RunStatus::infeasible) ++infeasible;
        else ++failed;
      }
      std::cout << "sweep cells: " << results.size() << " (ok " << ok << ", infeasible "
                << infeasible << ", error " << failed << ")\n"
                << "table: " << (std::filesystem::path(sweep_out) / "sweep.csv").string() << "\n";
      return failed > 0 ? 1 : 0;
    }
    if (eval->parsed()) {
      const rsuplan::RunResult r =
          rsuplan::run_eval(eval_scene, eval_deployment, eval_cfg.resolve(), eval_out);
      print_result(r);
      return status_code(r.status);
    }
  } catch (const rsuplan::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
