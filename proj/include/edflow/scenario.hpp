#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edflow/engine.hpp"
#include "edflow/model.hpp"
#include "edflow/parameters.hpp"

namespace edflow {

struct ScenarioSpec {
  std::string label = "baseline";
  std::uint64_t seed = 20131001;
  EdParameters params;
  TimeGrid grid;
  InputSignal exogenous;
  // Admit fraction while the (delayed) exogenous surge is above its baseline.
  double surge_admit_fraction = 0.35;
  double surge_admit_delay_h = 1.0;
  // Days simulated before grid.start to reach a periodic operating point.
  int warmup_days = 21;
  // Stocks at the start of the warm-up (or of the run, with no warm-up).
  std::optional<InitialStocks> initial;

  void validate() const {
    grid.validate();
    params.validate();
    exogenous.validate();
    if (!(surge_admit_fraction >= params.admit_fraction && surge_admit_fraction < 1.0))
      throw PhysicalRangeError("surge_admit_fraction", "must lie in [admit_fraction, 1)");
    if (!(surge_admit_delay_h >= 0.0) || !std::isfinite(surge_admit_delay_h))
      throw PhysicalRangeError("surge_admit_delay_h", "must be >= 0");
    if (warmup_days < 0) throw PhysicalRangeError("warmup_days", "must be >= 0");
    if (!detail::near_integer(24.0 * warmup_days / grid.dt_h))
      throw ValidationError("warmup_days", "warm-up span is not a whole number of steps");
    if (!(params.return_delay_h >= 0.5 * grid.dt_h))
      throw ValidationError("return_delay_h", "shorter than half a time step");
  }

  bool operator==(const ScenarioSpec&) const = default;
};

inline double admit_fraction_at(const ScenarioSpec& spec, double t) {
  if (spec.exogenous.kind == SignalKind::none) return spec.params.admit_fraction;
  double surplus = eval_input_signal(spec.exogenous, t - spec.surge_admit_delay_h) -
                   spec.exogenous.baseline;
  return surplus > 0.0 ? spec.surge_admit_fraction : spec.params.admit_fraction;
}

struct ActivationInterval {
  double start_h = 0;
  double end_h = 0;  // first inactive sample time, or grid end

  double length_h() const { return end_h - start_h; }
  bool operator==(const ActivationInterval&) const = default;
};

struct FlowSeries {
  std::vector<double> arrivals, return_arrivals, treatment_complete, to_bed_request,
      direct_discharge, bed_assignment, transfer, elective_admission, ward_discharge, returns;

  void push(const FlowRates& f) {
    arrivals.push_back(f.arrivals);
    return_arrivals.push_back(f.return_arrivals);
    treatment_complete.push_back(f.treatment_complete);
    to_bed_request.push_back(f.to_bed_request);
    direct_discharge.push_back(f.direct_discharge);
    bed_assignment.push_back(f.bed_assignment);
    transfer.push_back(f.transfer);
    elective_admission.push_back(f.elective_admission);
    ward_discharge.push_back(f.ward_discharge);
    returns.push_back(f.returns);
  }

  void reserve(std::size_t n) {
    for (auto* v : members()) v->reserve(n);
  }

  std::vector<std::vector<double>*> members() {
    return {&arrivals, &return_arrivals, &treatment_complete, &to_bed_request, &direct_discharge,
            &bed_assignment, &transfer, &elective_admission, &ward_discharge, &returns};
  }

  std::vector<const std::vector<double>*> members() const {
    return {&arrivals, &return_arrivals, &treatment_complete, &to_bed_request, &direct_discharge,
            &bed_assignment, &transfer, &elective_admission, &ward_discharge, &returns};
  }

  bool operator==(const FlowSeries&) const = default;
};

// Row k holds the state at times[k] and the flows acting over [t_k, t_k + dt).
struct Trajectory {
  std::string label;
  double dt_h = 0;
  std::vector<double> times;
  std::vector<double> census;
  std::vector<double> boarders;
  std::vector<double> occupancy;
  std::vector<double> admitted_patients;  // ward inpatients
  std::vector<double> cum_admitted_elective;
  std::vector<double> awaiting_bed;
  std::vector<double> ed_in_treatment;
  std::vector<double> effective_release_time;
  std::vector<double> cum_returns;
  std::vector<bool> protocol_active;
  FlowSeries flows;
  std::vector<ActivationInterval> activations;

  std::size_t size() const { return times.size(); }
  bool operator==(const Trajectory&) const = default;
};

struct RunResult {
  Trajectory trajectory;
  EdState initial_state;  // after warm-up, accumulators zeroed
  EdState final_state;    // at grid.end
};

namespace detail {

inline std::uint64_t warmup_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ull; }

inline void reset_accumulators(EdState& s) {
  s.cum_admitted_elective = 0;
  s.cum_returns = 0;
  s.cum_arrivals = 0;
  s.cum_external_inflow = 0;
  s.cum_external_outflow = 0;
}

inline std::vector<ActivationInterval> activation_intervals(const std::vector<double>& times,
                                                            const std::vector<bool>& active,
                                                            double end_h) {
  std::vector<ActivationInterval> out;
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (!active[k]) continue;
    if (k == 0 || !active[k - 1]) out.push_back({times[k], end_h});
    if (k + 1 < active.size() && !active[k + 1]) out.back().end_h = times[k + 1];
  }
  return out;
}

}  // namespace detail

// Simulates the warm-up (no exogenous input, base admit fraction) and returns
// the state at grid.start with accumulators zeroed.
inline EdState warm_start(const ScenarioSpec& spec) {
  const auto& p = spec.params;
  const double dt = spec.grid.dt_h;
  EdState s = make_state(p, dt, spec.initial.value_or(steady_state_guess(p)));
  const double t0 = spec.grid.start_h - 24.0 * spec.warmup_days;
  const auto n = static_cast<std::size_t>(std::llround(24.0 * spec.warmup_days / dt));
  ElectiveDemand electives(detail::warmup_seed(spec.seed), t0);
  for (std::size_t k = 0; k < n; ++k) {
    double t = t0 + static_cast<double>(k) * dt;
    StepInputs in{0.0, p.admit_fraction, electives.rate(p, t)};
    advance_ed_model(s, p, t, dt, in);
  }
  detail::reset_accumulators(s);
  return s;
}

inline RunResult run_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const auto& p = spec.params;
  const auto& g = spec.grid;
  const std::size_t n = g.step_count();

  RunResult result;
  EdState s = warm_start(spec);
  result.initial_state = s;

  Trajectory& tr = result.trajectory;
  tr.label = spec.label;
  tr.dt_h = g.dt_h;
  for (auto* v : {&tr.times, &tr.census, &tr.boarders, &tr.occupancy, &tr.admitted_patients,
                  &tr.cum_admitted_elective, &tr.awaiting_bed, &tr.ed_in_treatment,
                  &tr.effective_release_time, &tr.cum_returns})
    v->reserve(n);
  tr.protocol_active.reserve(n);
  tr.flows.reserve(n);

  ElectiveDemand electives(spec.seed, g.start_h);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = g.time_at(k);
    tr.times.push_back(t);
    tr.census.push_back(s.census());
    tr.boarders.push_back(s.boarders);
    tr.occupancy.push_back(occupancy(s, p));
    tr.admitted_patients.push_back(s.inpatients);
    tr.cum_admitted_elective.push_back(s.cum_admitted_elective);
    tr.awaiting_bed.push_back(s.awaiting_bed);
    tr.ed_in_treatment.push_back(s.ed_in_treatment);
    tr.cum_returns.push_back(s.cum_returns);

    StepInputs in{eval_input_signal(spec.exogenous, t), admit_fraction_at(spec, t),
                  electives.rate(p, t)};
    FlowRates f;
    try {
      f = advance_ed_model(s, p, t, g.dt_h, in);
    } catch (const NumericError& e) {
      throw NumericError("step " + std::to_string(k) + " (t=" + std::to_string(t) +
                         " h): " + e.what() + " [" + describe(s) + "]");
    }
    tr.protocol_active.push_back(s.protocol_in_force);
    tr.effective_release_time.push_back(s.release_time_smooth.current);
    tr.flows.push(f);
  }
  tr.activations = detail::activation_intervals(tr.times, tr.protocol_active, g.end_h);
  result.final_state = std::move(s);
  return result;
}

// -- Presets --------------------------------------------------------------------

inline ScenarioSpec baseline_scenario() {
  ScenarioSpec s;
  s.label = "baseline";
  return s;
}

struct StressOptions {
  double width_h = 3.0;
  double admit_fraction = 0.5;
  double admit_delay_h = 1.0;
};

inline constexpr double kDefaultSurgeHeight = 40.0;
inline constexpr double kDefaultSurgeStart = 24.0;

// Adds a surge pulse and the delayed rise in admit fraction that follows it.
inline ScenarioSpec make_stressed_scenario(const ScenarioSpec& base, double pulse_height,
                                           double start_h, const StressOptions& opt = {}) {
  if (!(pulse_height > 0.0) || !std::isfinite(pulse_height))
    throw PhysicalRangeError("pulse_height", "must be > 0");
  if (start_h < base.grid.start_h || start_h + opt.width_h > base.grid.end_h)
    throw ValidationError("start_h", "surge pulse lies outside the time grid");
  ScenarioSpec s = base;
  s.label = "stressed";
  s.exogenous = InputSignal{SignalKind::pulse, pulse_height, start_h, opt.width_h, 24.0, 0.0};
  s.surge_admit_fraction = opt.admit_fraction;
  s.surge_admit_delay_h = opt.admit_delay_h;
  s.validate();
  return s;
}

inline ScenarioSpec stressed_scenario() {
  return make_stressed_scenario(baseline_scenario(), kDefaultSurgeHeight, kDefaultSurgeStart);
}

inline bool any_activation(const Trajectory& tr) { return !tr.activations.empty(); }

// Smallest pulse height (to `tolerance`) that activates the protocol, by bisection.
// Returns nullopt when even `upper` does not activate.
inline std::optional<double> minimum_activating_pulse(const ScenarioSpec& base, double start_h,
                                                      double upper = 400.0,
                                                      double tolerance = 0.01,
                                                      const StressOptions& opt = {}) {
  auto activates = [&](double h) {
    return any_activation(run_scenario(make_stressed_scenario(base, h, start_h, opt)).trajectory);
  };
  if (!activates(upper)) return std::nullopt;
  double lo = 0.0, hi = upper;
  while (hi - lo > tolerance) {
    double mid = 0.5 * (lo + hi);
    (activates(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace edflow
