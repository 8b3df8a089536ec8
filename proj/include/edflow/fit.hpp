#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "edflow/error.hpp"
#include "edflow/scenario.hpp"

namespace edflow {

struct ObservedCensus {
  std::vector<double> time_h;
  std::vector<double> census;

  std::size_t size() const { return time_h.size(); }
};

struct FitReport {
  double rmse = 0;
  double mae = 0;
  std::size_t samples = 0;
  double horizon_start_h = 0;
  double horizon_end_h = 0;

  bool operator==(const FitReport&) const = default;
};

namespace detail {

inline std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

inline double parse_number(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(where, "not a number: '" + text + "'");
  }
}

}  // namespace detail

// Format: header `time_h,census`, then one row per observation.
inline ObservedCensus parse_observed_csv(std::istream& in, const std::string& source = "observed") {
  ObservedCensus obs;
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "time_h,census")
    throw ValidationError(source, "expected header 'time_h,census'");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = detail::trim(line);
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ValidationError(source + ":" + std::to_string(row), "expected two columns");
    std::string where = source + ":" + std::to_string(row);
    double t = detail::parse_number(detail::trim(line.substr(0, comma)), where);
    double c = detail::parse_number(detail::trim(line.substr(comma + 1)), where);
    if (!std::isfinite(t) || !std::isfinite(c) || c < 0.0)
      throw ValidationError(where, "census must be a finite non-negative number");
    obs.time_h.push_back(t);
    obs.census.push_back(c);
  }
  return obs;
}

inline ObservedCensus read_observed_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  return parse_observed_csv(in, path);
}

// Linear interpolation of `values` sampled at ascending `times`.
inline double interpolate(const std::vector<double>& times, const std::vector<double>& values,
                          double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return values.front();
  if (it == times.end()) return values.back();
  std::size_t hi = static_cast<std::size_t>(it - times.begin());
  std::size_t lo = hi - 1;
  double w = (t - times[lo]) / (times[hi] - times[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

inline FitReport compare_history(const Trajectory& tr, const ObservedCensus& obs) {
  if (obs.size() < 2) throw ValidationError("observed", "at least 2 samples are required");
  if (tr.size() < 2) throw ValidationError("trajectory", "at least 2 samples are required");
  for (std::size_t i = 1; i < obs.size(); ++i)
    if (!(obs.time_h[i] > obs.time_h[i - 1]))
      throw ValidationError("observed", "timestamps must be strictly increasing");
  const double lo = tr.times.front();
  const double hi = tr.times.back();
  if (obs.time_h.front() < lo - 1e-9 || obs.time_h.back() > hi + 1e-9)
    throw ValidationError("observed", "timestamps outside the simulated horizon [" +
                                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
  double sq = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double err = interpolate(tr.times, tr.census, obs.time_h[i]) - obs.census[i];
    sq += err * err;
    abs_sum += std::abs(err);
  }
  const auto n = static_cast<double>(obs.size());
  return {std::sqrt(sq / n), abs_sum / n, obs.size(), obs.time_h.front(), obs.time_h.back()};
}

}  // namespace edflow
