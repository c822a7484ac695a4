#pragma once

// Planning configuration: radio constants, constraint thresholds, grid and
// candidate parameters, solver choice. File format is `key = value` lines
// with `#` comments; every key has a default so an empty file is valid.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "rsuplan/baselines.hpp"
#include "rsuplan/candidates.hpp"
#include "rsuplan/errors.hpp"
#include "rsuplan/radio.hpp"

namespace rsuplan {

enum class Algorithm : std::uint8_t { agile, gc, ga, exhaustive };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::agile: return "agile";
    case Algorithm::gc: return "gc";
    case Algorithm::ga: return "ga";
    case Algorithm::exhaustive: return "exhaustive";
  }
  return "agile";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "agile") return Algorithm::agile;
  if (s == "gc") return Algorithm::gc;
  if (s == "ga") return Algorithm::ga;
  if (s == "exhaustive") return Algorithm::exhaustive;
  throw ParseError("config: unknown algorithm '" + s + "' (agile|gc|ga|exhaustive)");
}

// "inf" / "none" / "disabled" switch the mean-RSS constraint off.
inline std::optional<double> parse_rss_threshold(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "inf" || s == "none" || s == "disabled" || s == "off") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("config: bad rss threshold '" + s + "' (dBm value or 'inf')");
}

inline std::string rss_threshold_to_string(std::optional<double> v) {
  if (!v.has_value()) return "inf";
  std::ostringstream out;
  out << *v;
  return out.str();
}

struct PlanningConfig {
  RadioParams radio{};
  double tau = 0.90;
  std::optional<double> rss_threshold_dbm = std::nullopt;
  double rsu_threshold_m = 100.0;
  double tile_size_m = 4.0;
  double border_margin_m = 50.0;
  double angle_threshold_deg = 30.0;
  double dedup_radius_m = 5.0;
  double corner_nudge_m = 0.5;
  Algorithm algorithm = Algorithm::agile;
  std::uint64_t seed = 1;
  GaConfig ga{};

  CandidateConfig candidate_config() const {
    return {angle_threshold_deg, rsu_threshold_m, dedup_radius_m, corner_nudge_m};
  }
  // every random draw flows from the single top-level seed
  GaConfig ga_with_seed() const {
    GaConfig g = ga;
    g.seed = seed;
    return g;
  }
};

inline void validate(const PlanningConfig& cfg) {
  validate(cfg.radio);
  if (cfg.tau < 0.0 || cfg.tau > 1.0) throw ValidationError("config: tau must be in [0,1]");
  if (!(cfg.tile_size_m > 0.0)) throw ValidationError("config: tile_size_m must be > 0");
  if (cfg.border_margin_m < 0.0) throw ValidationError("config: border_margin_m must be >= 0");
  if (!(cfg.rsu_threshold_m > 0.0)) throw ValidationError("config: rsu_threshold_m must be > 0");
  if (cfg.algorithm == Algorithm::ga) validate(cfg.ga);
}

namespace detail {

inline std::string trimmed(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("config: bad numeric value for " + key + ": '" + value + "'");
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("config: bad integer value for " + key + ": '" + value + "'");
}

}  // namespace detail

inline void apply_config_entry(PlanningConfig& cfg, const std::string& key,
                               const std::string& value) {
  using detail::parse_double;
  using detail::parse_u64;
  if (key == "tx_power_dbm") cfg.radio.tx_power_dbm = parse_double(key, value);
  else if (key == "tx_gain_dbi") cfg.radio.tx_gain_dbi = parse_double(key, value);
  else if (key == "path_loss_exponent") cfg.radio.path_loss_exponent = parse_double(key, value);
  else if (key == "channel_att_factor_db") cfg.radio.channel_att_factor_db = parse_double(key, value);
  else if (key == "att_per_km_db") cfg.radio.att_per_km_db = parse_double(key, value);
  else if (key == "tau") cfg.tau = parse_double(key, value);
  else if (key == "rss_threshold_dbm") cfg.rss_threshold_dbm = parse_rss_threshold(value);
  else if (key == "rsu_threshold_m") cfg.rsu_threshold_m = parse_double(key, value);
  else if (key == "tile_size_m") cfg.tile_size_m = parse_double(key, value);
  else if (key == "border_margin_m") cfg.border_margin_m = parse_double(key, value);
  else if (key == "angle_threshold_deg") cfg.angle_threshold_deg = parse_double(key, value);
  else if (key == "dedup_radius_m") cfg.dedup_radius_m = parse_double(key, value);
  else if (key == "corner_nudge_m") cfg.corner_nudge_m = parse_double(key, value);
  else if (key == "algorithm") cfg.algorithm = algorithm_from_string(value);
  else if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "ga_population") cfg.ga.population_size = static_cast<int>(parse_u64(key, value));
  else if (key == "ga_generations") cfg.ga.generations = static_cast<int>(parse_u64(key, value));
  else if (key == "ga_tournament") cfg.ga.tournament_size = static_cast<int>(parse_u64(key, value));
  else if (key == "ga_crossover_prob") cfg.ga.crossover_prob = parse_double(key, value);
  else if (key == "ga_mutation_prob") {
    cfg.ga.mutation_prob_per_bit = value == "auto" ? 0.0 : parse_double(key, value);
  } else if (key == "ga_penalty_weight") {
    cfg.ga.penalty_weight = value == "auto" ? 0.0 : parse_double(key, value);
  } else {
    throw ParseError("config: unknown key '" + key + "'");
  }
}

inline PlanningConfig parse_config_text(std::istream& in) {
  PlanningConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trimmed(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string key = detail::trimmed(line.substr(0, eq));
    const std::string value = detail::trimmed(line.substr(eq + 1));
    try {
      apply_config_entry(cfg, key, value);
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  return cfg;
}

inline PlanningConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  return parse_config_text(in);
}

inline std::string config_to_text(const PlanningConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "tx_power_dbm = " << cfg.radio.tx_power_dbm << '\n'
      << "tx_gain_dbi = " << cfg.radio.tx_gain_dbi << '\n'
      << "path_loss_exponent = " << cfg.radio.path_loss_exponent << '\n'
      << "channel_att_factor_db = " << cfg.radio.channel_att_factor_db << '\n'
      << "att_per_km_db = " << cfg.radio.att_per_km_db << '\n'
      << "tau = " << cfg.tau << '\n'
      << "rss_threshold_dbm = " << rss_threshold_to_string(cfg.rss_threshold_dbm) << '\n'
      << "rsu_threshold_m = " << cfg.rsu_threshold_m << '\n'
      << "tile_size_m = " << cfg.tile_size_m << '\n'
      << "border_margin_m = " << cfg.border_margin_m << '\n'
      << "angle_threshold_deg = " << cfg.angle_threshold_deg << '\n'
      << "dedup_radius_m = " << cfg.dedup_radius_m << '\n'
      << "corner_nudge_m = " << cfg.corner_nudge_m << '\n'
      << "algorithm = " << to_string(cfg.algorithm) << '\n'
      << "seed = " << cfg.seed << '\n'
      << "ga_population = " << cfg.ga.population_size << '\n'
      << "ga_generations = " << cfg.ga.generations << '\n'
      << "ga_tournament = " << cfg.ga.tournament_size << '\n'
      << "ga_crossover_prob = " << cfg.ga.crossover_prob << '\n'
      << "ga_mutation_prob = "
      << (cfg.ga.mutation_prob_per_bit > 0.0 ? std::to_string(cfg.ga.mutation_prob_per_bit)
                                             : std::string("auto"))
      << '\n'
      << "ga_penalty_weight = "
      << (cfg.ga.penalty_weight > 0.0 ? std::to_string(cfg.ga.penalty_weight)
                                      : std::string("auto"))
      << '\n';
  return out.str();
}

}  // namespace rsuplan
