#pragma once

// Comparison solvers: greedy construction on raw LOS counts (ignores the
// RSS threshold), a seeded genetic algorithm over binary selection
// chromosomes with penalized fitness, and an exhaustive minimum-cardinality
// search for small instances.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rsuplan/coverage.hpp"
#include "rsuplan/errors.hpp"
#include "rsuplan/placement.hpp"

namespace rsuplan {

struct GaConfig {
  int population_size = 100;
  int generations = 500;
  int tournament_size = 3;
  double crossover_prob = 0.9;
  double mutation_prob_per_bit = 0.0;  // <= 0: 1/|C|
  double penalty_weight = 0.0;         // <= 0: 10 * |C|
  std::uint64_t seed = 1;
};

inline void validate(const GaConfig& cfg) {
  if (cfg.population_size < 2) throw ValidationError("ga: population_size must be >= 2");
  if (cfg.generations < 1) throw ValidationError("ga: generations must be >= 1");
  if (cfg.tournament_size < 1) throw ValidationError("ga: tournament_size must be >= 1");
  if (cfg.crossover_prob < 0.0 || cfg.crossover_prob > 1.0) {
    throw ValidationError("ga: crossover_prob must be in [0,1]");
  }
  if (cfg.mutation_prob_per_bit > 1.0) throw ValidationError("ga: mutation_prob_per_bit > 1");
}

struct GaTraceRow {
  int generation = 0;
  double best_fitness = 0.0;
  bool best_feasible = false;
};

namespace detail {

// Marginal-gain greedy on raw LOS tile counts. Returns the deployment order;
// reached reports whether the target count was hit.
inline std::vector<int> greedy_los_order(const VisibilityTable& table, int need, bool* reached) {
  CoveredSet covered(table.reference_count);
  std::vector<std::uint8_t> selected(static_cast<std::size_t>(table.candidate_count), 0);
  std::vector<int> order;
  while (covered.count < need) {
    int best = -1;
    int best_gain = 0;
    for (int i = 0; i < table.candidate_count; ++i) {
      if (selected[static_cast<std::size_t>(i)] != 0) continue;
      int gain = 0;
      for (const auto& sig : table.by_candidate[static_cast<std::size_t>(i)]) {
        if (covered.flags[static_cast<std::size_t>(sig.tile)] == 0) ++gain;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best < 0) {
      if (reached != nullptr) *reached = false;
      return order;
    }
    selected[static_cast<std::size_t>(best)] = 1;
    order.push_back(best);
    covered.add_row(table.by_candidate[static_cast<std::size_t>(best)]);
  }
  if (reached != nullptr) *reached = true;
  return order;
}

}  // namespace detail

inline Deployment solve_gc(const VisibilityTable& table, double tau) {
  const int need = required_tiles(tau, table.reference_count);
  bool reached = false;
  std::vector<int> order = detail::greedy_los_order(table, need, &reached);
  if (!reached) {
    throw InfeasibleError("gc: coverage target unreachable (best achievable coverage " +
                              std::to_string(detail::best_achievable_coverage_rate(table)) + ")",
                          detail::best_achievable_coverage_rate(table));
  }
  // the RSS threshold is deliberately ignored here
  return make_deployment(table, std::move(order), {}, tau, std::nullopt);
}

struct GaEvaluation {
  double fitness = 0.0;
  bool feasible = false;
};

// Fitness: deployed count plus penalty * (coverage shortfall fraction + mean
// RSS shortfall in dB); both terms are zero when the matching constraint
// holds, so any feasible chromosome outranks clearly infeasible ones once the
// penalty weight dominates |C|.
inline GaEvaluation ga_evaluate(const VisibilityTable& table,
                                const std::vector<std::uint8_t>& chromosome, double tau,
                                std::optional<double> rss_threshold_dbm, double penalty_weight) {
  std::vector<int> ids;
  for (std::size_t i = 0; i < chromosome.size(); ++i) {
    if (chromosome[i] != 0) ids.push_back(static_cast<int>(i));
  }
  const CoverageReport report = evaluate_deployment(table, ids, tau, rss_threshold_dbm);
  double coverage_shortfall = 0.0;
  if (report.required_count > 0 && report.covered_count < report.required_count) {
    coverage_shortfall = static_cast<double>(report.required_count - report.covered_count) /
                         static_cast<double>(report.required_count);
  }
  double rss_shortfall = 0.0;
  if (rss_threshold_dbm.has_value() && report.required_count > 0 && !report.rss_met &&
      report.covered_count > 0) {
    const int k = std::min(report.required_count, report.covered_count);
    const double mean = mean_of_top(report.best_rss, k);
    rss_shortfall = std::max(0.0, *rss_threshold_dbm - mean);
  }
  return {static_cast<double>(ids.size()) + penalty_weight * (coverage_shortfall + rss_shortfall),
          report.coverage_met && report.rss_met};
}

inline double ga_fitness(const VisibilityTable& table, const std::vector<std::uint8_t>& chromosome,
                         double tau, std::optional<double> rss_threshold_dbm,
                         double penalty_weight) {
  return ga_evaluate(table, chromosome, tau, rss_threshold_dbm, penalty_weight).fitness;
}

inline Deployment solve_ga(const VisibilityTable& table, double tau,
                           std::optional<double> rss_threshold_dbm, const GaConfig& cfg,
                           std::vector<GaTraceRow>* trace = nullptr) {
  validate(cfg);
  const int c = table.candidate_count;
  const int pop_size = cfg.population_size;
  const double penalty = cfg.penalty_weight > 0.0 ? cfg.penalty_weight : 10.0 * c;
  const double mutation =
      cfg.mutation_prob_per_bit > 0.0 ? cfg.mutation_prob_per_bit : 1.0 / std::max(1, c);

  std::mt19937_64 rng(cfg.seed);
  const auto uniform01 = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  const auto pick_index = [&](int n) {
    return std::min(n - 1, static_cast<int>(uniform01() * n));
  };

  using Chromosome = std::vector<std::uint8_t>;
  std::vector<Chromosome> pop(static_cast<std::size_t>(pop_size),
                              Chromosome(static_cast<std::size_t>(c), 0));
  // one greedy-seeded individual pulls the early population toward coverage
  for (const int id : detail::greedy_los_order(table, required_tiles(tau, table.reference_count),
                                               nullptr)) {
    pop[0][static_cast<std::size_t>(id)] = 1;
  }
  for (int p = 1; p < pop_size; ++p) {
    for (int g = 0; g < c; ++g) pop[static_cast<std::size_t>(p)][static_cast<std::size_t>(g)] =
        uniform01() < 0.5 ? 1 : 0;
  }

  std::vector<double> fitness(static_cast<std::size_t>(pop_size), 0.0);
  std::vector<std::uint8_t> feasible(static_cast<std::size_t>(pop_size), 0);
  std::optional<Chromosome> best_feasible;
  double best_feasible_fitness = std::numeric_limits<double>::infinity();
  double best_fitness_ever = std::numeric_limits<double>::infinity();
  Chromosome best_chromosome_ever;

  for (int gen = 0; gen < cfg.generations; ++gen) {
    int elite = 0;
    for (int p = 0; p < pop_size; ++p) {
      const GaEvaluation eval =
          ga_evaluate(table, pop[static_cast<std::size_t>(p)], tau, rss_threshold_dbm, penalty);
      fitness[static_cast<std::size_t>(p)] = eval.fitness;
      feasible[static_cast<std::size_t>(p)] = eval.feasible ? 1 : 0;
      if (fitness[static_cast<std::size_t>(p)] < fitness[static_cast<std::size_t>(elite)]) {
        elite = p;
      }
      if (eval.feasible && eval.fitness < best_feasible_fitness) {
        best_feasible_fitness = eval.fitness;
        best_feasible = pop[static_cast<std::size_t>(p)];
      }
    }
    if (fitness[static_cast<std::size_t>(elite)] < best_fitness_ever) {
      best_fitness_ever = fitness[static_cast<std::size_t>(elite)];
      best_chromosome_ever = pop[static_cast<std::size_t>(elite)];
    }
    if (trace != nullptr) {
      trace->push_back({gen, fitness[static_cast<std::size_t>(elite)],
                        feasible[static_cast<std::size_t>(elite)] != 0});
    }
    if (gen == cfg.generations - 1) break;

    std::vector<Chromosome> next;
    next.reserve(static_cast<std::size_t>(pop_size));
    next.push_back(pop[static_cast<std::size_t>(elite)]);
    const auto tournament = [&]() -> const Chromosome& {
      int winner = pick_index(pop_size);
      for (int k = 1; k < cfg.tournament_size; ++k) {
        const int challenger = pick_index(pop_size);
        if (fitness[static_cast<std::size_t>(challenger)] <
            fitness[static_cast<std::size_t>(winner)]) {
          winner = challenger;
        }
      }
      return pop[static_cast<std::size_t>(winner)];
    };
    while (static_cast<int>(next.size()) < pop_size) {
      const Chromosome& p1 = tournament();
      const Chromosome& p2 = tournament();
      Chromosome child = p1;
      if (uniform01() < cfg.crossover_prob) {
        for (int g = 0; g < c; ++g) {
          if (uniform01() < 0.5) child[static_cast<std::size_t>(g)] = p2[static_cast<std::size_t>(g)];
        }
      }
      for (int g = 0; g < c; ++g) {
        if (uniform01() < mutation) {
          child[static_cast<std::size_t>(g)] ^= 1;
        }
      }
      next.push_back(std::move(child));
    }
    pop = std::move(next);
  }

  if (!best_feasible.has_value()) {
    std::vector<int> best_ids;
    for (std::size_t i = 0; i < best_chromosome_ever.size(); ++i) {
      if (best_chromosome_ever[i] != 0) best_ids.push_back(static_cast<int>(i));
    }
    const CoverageReport best_report =
        evaluate_deployment(table, best_ids, tau, rss_threshold_dbm);
    throw InfeasibleError("ga: no feasible individual in any generation (best fitness " +
                              std::to_string(best_fitness_ever) + ")",
                          best_report.coverage_rate, best_report.mean_top_rss);
  }
  std::vector<int> ids;
  for (std::size_t i = 0; i < best_feasible->size(); ++i) {
    if ((*best_feasible)[i] != 0) ids.push_back(static_cast<int>(i));
  }
  return make_deployment(table, std::move(ids), {}, tau, rss_threshold_dbm);
}

// Minimum-cardinality feasible subset by enumeration in lexicographic order
// per size, so ties resolve to the smallest id set. Guarded to small |C|.
inline Deployment solve_exhaustive(const VisibilityTable& table, double tau,
                                   std::optional<double> rss_threshold_dbm) {
  const int c = table.candidate_count;
  if (c > 20) {
    throw ValidationError("exhaustive: refusing " + std::to_string(c) +
                          " candidates (limit 20)");
  }
  std::vector<int> all(static_cast<std::size_t>(c));
  for (int i = 0; i < c; ++i) all[static_cast<std::size_t>(i)] = i;
  const CoverageReport full = evaluate_deployment(table, all, tau, rss_threshold_dbm);
  if (!(full.coverage_met && full.rss_met)) {
    throw InfeasibleError("exhaustive: no feasible subset (even the full candidate set fails)",
                          full.coverage_rate, full.mean_top_rss);
  }
  for (int k = 0; k <= c; ++k) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
      const CoverageReport r = evaluate_deployment(table, idx, tau, rss_threshold_dbm);
      if (r.coverage_met && r.rss_met) {
        return make_deployment(table, idx, {}, tau, rss_threshold_dbm);
      }
      int i = k - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == c - k + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  throw InfeasibleError("exhaustive: unreachable", full.coverage_rate, full.mean_top_rss);
}

}  // namespace rsuplan
