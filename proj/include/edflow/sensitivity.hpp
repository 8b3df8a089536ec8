#pragma once

// One-at-a-time sweeps with divergence-time extraction, and Monte Carlo
// sampling over uniform parameter ranges.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "edflow/scenario.hpp"

namespace edflow {

enum class Output { occupancy, census, boarders, admitted_patients };

inline constexpr std::array<Output, 4> kOutputs = {Output::occupancy, Output::census,
                                                   Output::boarders, Output::admitted_patients};

inline const char* to_string(Output o) {
  switch (o) {
    case Output::occupancy: return "occupancy";
    case Output::census: return "census";
    case Output::boarders: return "boarders";
    case Output::admitted_patients: return "admitted_patients";
  }
  return "";
}

inline const std::vector<double>& output_series(const Trajectory& tr, Output o) {
  switch (o) {
    case Output::occupancy: return tr.occupancy;
    case Output::census: return tr.census;
    case Output::boarders: return tr.boarders;
    case Output::admitted_patients: return tr.admitted_patients;
  }
  return tr.census;
}

inline constexpr std::array<std::string_view, 6> kSweepableParameters = {
    "boarder_trigger", "census_trigger",  "total_beds",
    "bed_assign_time_h", "transfer_time_h", "mean_elective_per_day"};

inline bool is_sweepable(std::string_view name) {
  return std::find(kSweepableParameters.begin(), kSweepableParameters.end(), name) !=
         kSweepableParameters.end();
}

// Percent deviation of `value` from `base`; 0 when base is 0.
inline double percent_deviation(double value, double base) {
  return base == 0.0 ? 0.0 : (value - base) / base * 100.0;
}

struct OutputDeviation {
  std::string output;
  double min_value = 0;
  double base_value = 0;
  double max_value = 0;
  double min_pct = 0;
  double max_pct = 0;
  double divergence_time_h = 0;

  bool operator==(const OutputDeviation&) const = default;
};

struct SensitivityReport {
  std::string parameter;
  std::string scenario;
  double min_input = 0;
  double base_input = 0;
  double max_input = 0;
  std::vector<OutputDeviation> outputs;

  const OutputDeviation& output(Output o) const {
    for (const auto& d : outputs)
      if (d.output == to_string(o)) return d;
    throw ValidationError("output", "not in report");
  }

  bool operator==(const SensitivityReport&) const = default;
};

struct SweepResult {
  SensitivityReport report;
  std::array<Trajectory, 3> runs;  // min, base, max
};

// Index of the widest min/max spread across the three series; earliest on ties.
inline std::size_t divergence_index(const std::vector<double>& a, const std::vector<double>& b,
                                    const std::vector<double>& c) {
  std::size_t best = 0;
  double widest = -1.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    double spread = std::max({a[k], b[k], c[k]}) - std::min({a[k], b[k], c[k]});
    if (spread > widest) {
      widest = spread;
      best = k;
    }
  }
  return best;
}

inline SensitivityReport make_report(std::string parameter, std::string scenario,
                                     std::array<double, 3> inputs,
                                     const std::array<Trajectory, 3>& runs) {
  SensitivityReport r{std::move(parameter), std::move(scenario), inputs[0], inputs[1], inputs[2], {}};
  for (Output o : kOutputs) {
    const auto& lo = output_series(runs[0], o);
    const auto& mid = output_series(runs[1], o);
    const auto& hi = output_series(runs[2], o);
    std::size_t k = divergence_index(lo, mid, hi);
    OutputDeviation d;
    d.output = to_string(o);
    d.min_value = lo[k];
    d.base_value = mid[k];
    d.max_value = hi[k];
    d.min_pct = percent_deviation(lo[k], mid[k]);
    d.max_pct = percent_deviation(hi[k], mid[k]);
    d.divergence_time_h = runs[1].times[k];
    r.outputs.push_back(d);
  }
  return r;
}

inline SweepResult sweep(const ScenarioSpec& base, std::string_view parameter, double min_value,
                         double max_value) {
  if (!is_sweepable(parameter))
    throw ValidationError("parameter", "'" + std::string(parameter) + "' is not sweepable");
  if (!(min_value <= max_value)) throw ValidationError("min", "must be <= max");
  const double base_value = get_parameter(base.params, parameter);
  std::array<double, 3> inputs = {min_value, base_value, max_value};
  std::array<ScenarioSpec, 3> specs;
  for (std::size_t i = 0; i < 3; ++i) {
    specs[i] = base;
    set_parameter(specs[i].params, parameter, inputs[i]);
    specs[i].validate();
  }
  std::array<std::future<RunResult>, 3> pending;
  for (std::size_t i = 0; i < 3; ++i)
    pending[i] = std::async(std::launch::async, [&specs, i] { return run_scenario(specs[i]); });
  SweepResult out;
  for (std::size_t i = 0; i < 3; ++i) out.runs[i] = pending[i].get().trajectory;
  out.report = make_report(std::string(parameter), base.label, inputs, out.runs);
  return out;
}

// The census trigger cannot matter while census >= every tested threshold
// whenever the boarder criterion holds.
inline bool census_trigger_inert(const std::array<Trajectory, 3>& runs, double boarder_trigger,
                                 double max_census_threshold) {
  for (const auto& tr : runs)
    for (std::size_t k = 0; k < tr.size(); ++k)
      if (tr.boarders[k] >= boarder_trigger && tr.census[k] < max_census_threshold) return false;
  return true;
}

// -- Monte Carlo ------------------------------------------------------------------

struct ParameterRange {
  std::string name;
  double min = 0;
  double max = 0;

  bool operator==(const ParameterRange&) const = default;
};

// Ranges of the four capacity levers, taken from the one-at-a-time sweeps.
inline std::vector<ParameterRange> default_mc_ranges() {
  return {{"total_beds", 400, 900},
          {"bed_assign_time_h", 1.8, 4.0},
          {"transfer_time_h", 0.5, 2.5},
          {"mean_elective_per_day", 100, 200}};
}

inline constexpr std::array<std::string_view, 6> kRunSummaryNames = {
    "mean_occupancy", "mean_census", "mean_boarders", "mean_admitted_patients",
    "peak_census",    "peak_boarders"};

using RunSummary = std::array<double, kRunSummaryNames.size()>;

inline RunSummary summarize(const Trajectory& tr) {
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  auto peak = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };
  return {mean(tr.occupancy), mean(tr.census), mean(tr.boarders), mean(tr.admitted_patients),
          peak(tr.census), peak(tr.boarders)};
}

struct McRun {
  std::size_t index = 0;
  std::vector<double> inputs;  // same order as MonteCarloResult::ranges
  RunSummary outputs{};
  bool protocol_activated = false;

  bool operator==(const McRun&) const = default;
};

struct Percentiles {
  std::string name;
  double p5 = 0, p50 = 0, p95 = 0;

  bool operator==(const Percentiles&) const = default;
};

struct PercentileBand {
  std::string output;
  std::vector<double> p5, p50, p95;

  bool operator==(const PercentileBand&) const = default;
};

struct MonteCarloResult {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<ParameterRange> ranges;
  std::vector<McRun> runs;
  RunSummary base_outputs{};
  std::vector<Percentiles> summary;  // one per run-summary quantity
  std::vector<double> times;
  std::vector<PercentileBand> bands;  // per output, per time step

  bool operator==(const MonteCarloResult&) const = default;
};

// Linear interpolation between closest ranks.
inline double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("values", "percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("q", "must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  double h = (static_cast<double>(values.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

inline void validate_ranges(const std::vector<ParameterRange>& ranges) {
  if (ranges.empty()) throw ValidationError("ranges", "at least one range is required");
  for (const auto& r : ranges) {
    scalar_parameter(r.name);
    if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max)
      throw ValidationError("ranges." + r.name, "bounds must be finite with min <= max");
  }
}

// Every run reuses the base scenario's elective seed, so draws differ only in
// the sampled parameters. Parameters are drawn up front from `seed`; runs are
// spread over worker threads and stored by index.
inline MonteCarloResult monte_carlo(const ScenarioSpec& base,
                                    const std::vector<ParameterRange>& ranges, std::size_t n,
                                    std::uint64_t seed, unsigned threads = 0,
                                    const ProgressFn& progress = {}) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  validate_ranges(ranges);
  base.validate();

  MonteCarloResult res;
  res.scenario = base.label;
  res.seed = seed;
  res.ranges = ranges;
  res.runs.resize(n);

  std::mt19937_64 rng(seed);
  std::vector<ScenarioSpec> specs(n, base);
  for (std::size_t i = 0; i < n; ++i) {
    res.runs[i].index = i;
    for (const auto& r : ranges) {
      double v = r.min;
      if (r.max > r.min) v = std::uniform_real_distribution<double>(r.min, r.max)(rng);
      res.runs[i].inputs.push_back(v);
      set_parameter(specs[i].params, r.name, v);
    }
    specs[i].validate();
  }

  const std::size_t steps = base.grid.step_count();
  std::vector<std::array<std::vector<double>, 4>> series(n);

  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex progress_mutex;
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        Trajectory tr = run_scenario(specs[i]).trajectory;
        res.runs[i].outputs = summarize(tr);
        res.runs[i].protocol_activated = any_activation(tr);
        for (std::size_t o = 0; o < kOutputs.size(); ++o)
          series[i][o] = output_series(tr, kOutputs[o]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
      std::lock_guard lock(progress_mutex);
      std::size_t d = ++done;
      if (progress) progress(d, n);
    }
  };
  unsigned count = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  count = static_cast<unsigned>(std::min<std::size_t>(count, n));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t + 1 < count; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  Trajectory base_tr = run_scenario(base).trajectory;
  res.base_outputs = summarize(base_tr);
  res.times = base_tr.times;

  for (std::size_t q = 0; q < kRunSummaryNames.size(); ++q) {
    std::vector<double> col;
    col.reserve(n);
    for (const auto& r : res.runs) col.push_back(r.outputs[q]);
    res.summary.push_back({std::string(kRunSummaryNames[q]), percentile(col, 0.05),
                           percentile(col, 0.50), percentile(col, 0.95)});
  }
  for (std::size_t o = 0; o < kOutputs.size(); ++o) {
    PercentileBand band{to_string(kOutputs[o]), {}, {}, {}};
    std::vector<double> col(n);
    for (std::size_t k = 0; k < steps; ++k) {
      for (std::size_t i = 0; i < n; ++i) col[i] = series[i][o][k];
      band.p5.push_back(percentile(col, 0.05));
      band.p50.push_back(percentile(col, 0.50));
      band.p95.push_back(percentile(col, 0.95));
    }
    res.bands.push_back(std::move(band));
  }
  return res;
}

}  // namespace edflow
