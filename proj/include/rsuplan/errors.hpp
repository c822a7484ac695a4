#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace rsuplan {

// An input or argument failed a contract check.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A file (OSM extract, scene, config, deployment) could not be parsed.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, long long byte_offset = -1)
      : std::runtime_error(what), byte_offset(byte_offset) {}

  long long byte_offset;  // -1 when unknown
};

// The requested constraints cannot be met; carries the best metrics reached.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double achieved_coverage_rate,
                  std::optional<double> achieved_mean_top_rss = std::nullopt)
      : std::runtime_error(what),
        achieved_coverage_rate(achieved_coverage_rate),
        achieved_mean_top_rss(achieved_mean_top_rss) {}

  double achieved_coverage_rate;
  std::optional<double> achieved_mean_top_rss;
};

}  // namespace rsuplan
