#pragma once

// Three-phase placement. Phase 1 greedily adds the candidate with the most
// still-unserved tiles from its service list until the coverage count is
// met. Phase 2 keeps adding (uncovered areas first, then best mean-RSS gain)
// until the mean-RSS constraint holds. Phase 3 swaps chosen/rejected pairs
// while a swap strictly improves (covered count, mean RSS) lexicographically
// without breaking feasibility.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rsuplan/coverage.hpp"
#include "rsuplan/errors.hpp"

namespace rsuplan {

struct Deployment {
  std::vector<std::uint8_t> selected;  // one flag per candidate id
  std::vector<int> chosen;             // deployment order
  std::vector<int> phase_added;        // parallel to chosen; 0 = not phase-tracked
  std::vector<int> rejected;           // ascending
  CoverageReport report;
  std::vector<std::string> notes;

  int size() const { return static_cast<int>(chosen.size()); }
};

inline void refresh_partition(Deployment& dep) {
  dep.rejected.clear();
  for (std::size_t i = 0; i < dep.selected.size(); ++i) {
    if (dep.selected[i] == 0) dep.rejected.push_back(static_cast<int>(i));
  }
}

inline Deployment make_deployment(const VisibilityTable& table, std::vector<int> chosen_in_order,
                                  std::vector<int> phases, double tau,
                                  std::optional<double> rss_threshold_dbm) {
  Deployment dep;
  dep.selected.assign(static_cast<std::size_t>(table.candidate_count), 0);
  dep.chosen = std::move(chosen_in_order);
  dep.phase_added = std::move(phases);
  if (dep.phase_added.empty()) dep.phase_added.assign(dep.chosen.size(), 0);
  for (const int id : dep.chosen) dep.selected[static_cast<std::size_t>(id)] = 1;
  refresh_partition(dep);
  dep.report = evaluate_deployment(table, dep.chosen, tau, rss_threshold_dbm);
  return dep;
}

// Tiles a candidate can serve while holding the mean-RSS target: its LOS
// tiles sorted strongest-first, cut at the longest prefix whose running mean
// stays at or above the threshold (the running mean only decreases, so the
// first failure ends the prefix). All LOS tiles when the threshold is off.
using ServiceLists = std::vector<std::vector<int>>;

inline ServiceLists compute_service_lists(const VisibilityTable& table,
                                          std::optional<double> rss_threshold_dbm) {
  ServiceLists lists(static_cast<std::size_t>(table.candidate_count));
  for (int i = 0; i < table.candidate_count; ++i) {
    std::vector<TileSignal> row = table.by_candidate[static_cast<std::size_t>(i)];
    std::sort(row.begin(), row.end(), [](const TileSignal& a, const TileSignal& b) {
      if (a.rss != b.rss) return a.rss > b.rss;
      return a.tile < b.tile;
    });
    auto& out = lists[static_cast<std::size_t>(i)];
    out.reserve(row.size());
    double running_sum = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      running_sum += row[k].rss;
      if (rss_threshold_dbm.has_value() &&
          running_sum / static_cast<double>(k + 1) < *rss_threshold_dbm) {
        break;
      }
      out.push_back(row[k].tile);
    }
  }
  return lists;
}

namespace detail {

struct CoveredSet {
  std::vector<std::uint8_t> flags;
  int count = 0;

  explicit CoveredSet(int n) : flags(static_cast<std::size_t>(n), 0) {}
  void add_row(const std::vector<TileSignal>& row) {
    for (const auto& sig : row) {
      auto& f = flags[static_cast<std::size_t>(sig.tile)];
      if (f == 0) {
        f = 1;
        ++count;
      }
    }
  }
};

inline double best_achievable_coverage_rate(const VisibilityTable& table) {
  CoveredSet covered(table.reference_count);
  for (const auto& row : table.by_candidate) covered.add_row(row);
  return table.reference_count > 0 ? static_cast<double>(covered.count) / table.reference_count
                                   : 0.0;
}

inline double mean_top_after_add(const VisibilityTable& table, const CoverageReport& base,
                                 int candidate) {
  std::vector<double> best = base.best_rss;
  for (const auto& sig : table.by_candidate[static_cast<std::size_t>(candidate)]) {
    auto& b = best[static_cast<std::size_t>(sig.tile)];
    if (sig.rss > b) b = sig.rss;
  }
  return mean_of_top(std::move(best), base.required_count);
}

inline double mean_or_lowest(const CoverageReport& r) {
  return r.mean_top_rss.value_or(-std::numeric_limits<double>::infinity());
}

// Strict lexicographic improvement on (covered count, mean top RSS).
inline bool lex_improves(const CoverageReport& trial, const CoverageReport& base) {
  if (trial.covered_count != base.covered_count) {
    return trial.covered_count > base.covered_count;
  }
  return mean_or_lowest(trial) > mean_or_lowest(base);
}

}  // namespace detail

inline Deployment phase1(const VisibilityTable& table, const ServiceLists& lists, double tau,
                         std::optional<double> rss_threshold_dbm) {
  const int need = required_tiles(tau, table.reference_count);
  detail::CoveredSet covered(table.reference_count);
  std::vector<std::uint8_t> selected(static_cast<std::size_t>(table.candidate_count), 0);
  std::vector<int> chosen;

  while (covered.count < need) {
    int best = -1;
    int best_gain = 0;
    for (int i = 0; i < table.candidate_count; ++i) {
      if (selected[static_cast<std::size_t>(i)] != 0) continue;
      int gain = 0;
      for (const int t : lists[static_cast<std::size_t>(i)]) {
        if (covered.flags[static_cast<std::size_t>(t)] == 0) ++gain;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best < 0) {
      throw InfeasibleError(
          "phase 1: coverage target unreachable, every remaining service list is already served "
          "(best achievable coverage " +
              std::to_string(detail::best_achievable_coverage_rate(table)) + ")",
          table.reference_count > 0 ? static_cast<double>(covered.count) / table.reference_count
                                    : 0.0);
    }
    selected[static_cast<std::size_t>(best)] = 1;
    chosen.push_back(best);
    covered.add_row(table.by_candidate[static_cast<std::size_t>(best)]);
  }
  std::vector<int> phases(chosen.size(), 1);
  return make_deployment(table, std::move(chosen), std::move(phases), tau, rss_threshold_dbm);
}

inline Deployment phase2(const VisibilityTable& table, Deployment dep, double tau,
                         std::optional<double> rss_threshold_dbm) {
  CoverageReport report = evaluate_deployment(table, dep.chosen, tau, rss_threshold_dbm);
  while (!(report.coverage_met && report.rss_met)) {
    if (dep.size() >= table.candidate_count) {
      throw InfeasibleError(
          "phase 2: constraints unreachable with every candidate deployed (mean top RSS " +
              (report.mean_top_rss ? std::to_string(*report.mean_top_rss) : std::string("n/a")) +
              " dBm)",
          report.coverage_rate, report.mean_top_rss);
    }
    int best = -1;
    int best_gain = 0;
    if (report.covered_count < table.reference_count) {
      for (int i = 0; i < table.candidate_count; ++i) {
        if (dep.selected[static_cast<std::size_t>(i)] != 0) continue;
        int gain = 0;
        for (const auto& sig : table.by_candidate[static_cast<std::size_t>(i)]) {
          if (report.best_rss[static_cast<std::size_t>(sig.tile)] ==
              -std::numeric_limits<double>::infinity()) {
            ++gain;
          }
        }
        if (gain > best_gain) {
          best_gain = gain;
          best = i;
        }
      }
    }
    if (best_gain <= 0) {
      // every reachable tile is covered: add the candidate that lifts the
      // mean of the best required tiles the most
      best = -1;
      double best_mean = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < table.candidate_count; ++i) {
        if (dep.selected[static_cast<std::size_t>(i)] != 0) continue;
        const double mean = detail::mean_top_after_add(table, report, i);
        if (mean > best_mean) {
          best_mean = mean;
          best = i;
        }
      }
    }
    dep.selected[static_cast<std::size_t>(best)] = 1;
    dep.chosen.push_back(best);
    dep.phase_added.push_back(2);
    report = evaluate_deployment(table, dep.chosen, tau, rss_threshold_dbm);
  }
  dep.report = std::move(report);
  refresh_partition(dep);
  return dep;
}

inline Deployment phase3(const VisibilityTable& table, Deployment dep, double tau,
                         std::optional<double> rss_threshold_dbm) {
  CoverageReport report = evaluate_deployment(table, dep.chosen, tau, rss_threshold_dbm);
  if (!(report.coverage_met && report.rss_met)) {
    dep.report = std::move(report);  // only feasible deployments are polished
    refresh_partition(dep);
    return dep;
  }
  constexpr int kMaxPasses = 50;
  int pass = 0;
  for (; pass < kMaxPasses; ++pass) {
    bool improved = false;
    std::vector<int> snapshot = dep.chosen;
    std::sort(snapshot.begin(), snapshot.end());
    for (const int i : snapshot) {
      if (dep.selected[static_cast<std::size_t>(i)] == 0) continue;  // already swapped out
      const auto pos = static_cast<std::size_t>(
          std::find(dep.chosen.begin(), dep.chosen.end(), i) - dep.chosen.begin());
      for (int k = 0; k < table.candidate_count; ++k) {
        if (dep.selected[static_cast<std::size_t>(k)] != 0) continue;
        std::vector<int> trial = dep.chosen;
        trial[pos] = k;
        const CoverageReport trial_report =
            evaluate_deployment(table, trial, tau, rss_threshold_dbm);
        if (!(trial_report.coverage_met && trial_report.rss_met)) continue;
        if (!detail::lex_improves(trial_report, report)) continue;
        dep.selected[static_cast<std::size_t>(i)] = 0;
        dep.selected[static_cast<std::size_t>(k)] = 1;
        dep.chosen[pos] = k;
        dep.phase_added[pos] = 3;
        report = trial_report;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (pass == kMaxPasses) {
    dep.notes.push_back("phase 3: swap pass cap (50) reached before convergence");
  }
  dep.report = std::move(report);
  refresh_partition(dep);
  return dep;
}

// Full pipeline; the returned deployment satisfies both constraints or an
// InfeasibleError with the best achieved metrics is thrown.
inline Deployment solve_agile(const VisibilityTable& table, double tau,
                              std::optional<double> rss_threshold_dbm) {
  const ServiceLists lists = compute_service_lists(table, rss_threshold_dbm);
  Deployment dep = phase1(table, lists, tau, rss_threshold_dbm);
  if (!(dep.report.coverage_met && dep.report.rss_met)) {
    dep = phase2(table, std::move(dep), tau, rss_threshold_dbm);
  }
  return phase3(table, std::move(dep), tau, rss_threshold_dbm);
}

}  // namespace rsuplan
