#pragma once

// Emergency-department crowding model: treatment -> bed request -> boarding ->
// ward, with an occupancy balancing loop, a premature-discharge return loop,
// competing elective admissions and the Code Help protocol.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "edflow/engine.hpp"
#include "edflow/parameters.hpp"

namespace edflow {

struct EdState {
  double ed_in_treatment = 0;
  double awaiting_bed = 0;
  double boarders = 0;
  double inpatients = 0;
  PipelineDelay return_pipeline;
  SustainedConditionDetector protocol_detector;
  FirstOrderSmooth release_time_smooth;
  FirstOrderSmooth protocol_effect;  // 0 = no protocol effect, 1 = full effect
  bool protocol_in_force = false;     // detector verdict from the samples before this step

  double cum_admitted_elective = 0;
  double cum_returns = 0;   // entered the return pipeline
  double cum_arrivals = 0;  // all ED arrivals, returns included
  double cum_external_inflow = 0;
  double cum_external_outflow = 0;

  double census() const { return ed_in_treatment + awaiting_bed + boarders; }

  // Every patient the model holds, including those in the return pipeline.
  double total_patients() const {
    return ed_in_treatment + awaiting_bed + boarders + inpatients + return_pipeline.content();
  }
};

struct FlowRates {
  double arrivals = 0;  // diurnal + exogenous + return_arrivals
  double return_arrivals = 0;
  double treatment_complete = 0;
  double to_bed_request = 0;
  double direct_discharge = 0;
  double bed_assignment = 0;
  double transfer = 0;
  double elective_admission = 0;
  double ward_discharge = 0;
  double returns = 0;  // into the return pipeline

  double external_inflow() const { return arrivals - return_arrivals + elective_admission; }
  double external_outflow() const { return direct_discharge + ward_discharge - returns; }
};

// Per-step inputs that come from outside the ED model proper.
struct StepInputs {
  double exogenous = 0;
  double admit_fraction = 0.35;
  double elective_demand = 0;  // patients/hour before occupancy restriction
};

struct InitialStocks {
  double ed_in_treatment = 0;
  double awaiting_bed = 0;
  double boarders = 0;
  double inpatients = 0;
  double return_rate = 0;  // patients/hour already in the return pipeline, uniformly

  bool operator==(const InitialStocks&) const = default;
};

// -- Auxiliaries -------------------------------------------------------------

inline int hour_of_day(double t) {
  auto h = static_cast<long long>(std::floor(t + 1e-9));
  return static_cast<int>(((h % 24) + 24) % 24);
}

inline int weekday_at(const EdParameters& p, double t) {
  auto day = static_cast<long long>(std::floor((t + 1e-9) / 24.0));
  return static_cast<int>((((p.start_weekday + day) % 7) + 7) % 7);
}

inline double diurnal_arrival_rate(const EdParameters& p, double t, int weekday) {
  return p.daily_mean_arrivals[static_cast<std::size_t>(weekday)] / 24.0 *
         p.diurnal_multipliers[static_cast<std::size_t>(hour_of_day(t))];
}

inline double diurnal_arrival_rate(const EdParameters& p, double t) {
  return diurnal_arrival_rate(p, t, weekday_at(p, t));
}

inline constexpr double kRestrictionKnee = 0.85;

// 1 up to the knee, linear to 0 at full, 0 beyond.
inline double occupancy_restriction(double effective_occupancy) {
  if (effective_occupancy <= kRestrictionKnee) return 1.0;
  if (effective_occupancy >= 1.0) return 0.0;
  return (1.0 - effective_occupancy) / (1.0 - kRestrictionKnee);
}

inline double ed_admission_restriction(double effective_occupancy, double priority_exponent) {
  return std::pow(occupancy_restriction(effective_occupancy), priority_exponent);
}

inline double effective_occupancy(const EdState& s, const EdParameters& p) {
  return (s.inpatients + s.boarders) / p.total_beds;
}

inline double occupancy(const EdState& s, const EdParameters& p) {
  return s.inpatients / p.total_beds;
}

inline bool protocol_criteria(const EdState& s, const EdParameters& p) {
  return s.boarders >= p.boarder_trigger && s.census() >= p.census_trigger;
}

// Advances the release-time smooth toward the protocol-dependent target and
// returns the new value. protocol_in_force must already be set for this step.
inline double effective_release_time(EdState& s, const EdParameters& p, double dt_h) {
  double target =
      p.normal_release_time_h * (s.protocol_in_force ? p.policy_release_factor : 1.0);
  s.release_time_smooth.tau_h = p.protocol_effect_delay_h;
  return s.release_time_smooth.step(target, dt_h);
}

// The protocol is in force for the step starting at t_k iff the criteria held
// at the samples t_{k-n}..t_{k-1}, n = window/dt. This samples the criteria at
// t_k for later steps, then moves both protocol smooths.
inline void advance_protocol(EdState& s, const EdParameters& p, double dt_h) {
  s.protocol_in_force = s.protocol_detector.active;
  s.protocol_detector.window_h = p.trigger_window_h;
  s.protocol_detector.update(p.protocol_enabled && protocol_criteria(s, p), dt_h);
  effective_release_time(s, p, dt_h);
  s.protocol_effect.tau_h = p.protocol_effect_delay_h;
  s.protocol_effect.step(s.protocol_in_force ? 1.0 : 0.0, dt_h);
}

// -- Elective demand ----------------------------------------------------------

// Hourly elective demand, one truncated-normal draw per simulated hour.
// Draws are generated in hour order, so any query pattern sees the same values.
class ElectiveDemand {
 public:
  ElectiveDemand(std::uint64_t seed, double origin_h) : rng_(seed), origin_h_(origin_h) {}

  double rate(const EdParameters& p, double t) {
    double mean = p.mean_elective_per_day / 24.0;
    double sd = p.elective_sd_per_day / 24.0;
    if (sd <= 0.0) return mean;
    auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(t - origin_h_ + 1e-9)));
    while (z_.size() <= idx) z_.push_back(normal_(rng_));
    return std::max(0.0, mean + sd * z_[idx]);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<double> z_;
  double origin_h_;
};

inline double elective_demand_rate(const EdParameters& p, ElectiveDemand& stream, double t) {
  return stream.rate(p, t);
}

// -- State construction -------------------------------------------------------

inline EdState make_state(const EdParameters& p, double dt_h, const InitialStocks& init) {
  EdState s;
  s.ed_in_treatment = init.ed_in_treatment;
  s.awaiting_bed = init.awaiting_bed;
  s.boarders = init.boarders;
  s.inpatients = init.inpatients;
  for (double v : {init.ed_in_treatment, init.awaiting_bed, init.boarders, init.inpatients,
                   init.return_rate})
    if (!(v >= 0.0) || !std::isfinite(v)) throw PhysicalRangeError("initial", "stocks must be >= 0");
  if (init.inpatients + init.boarders > p.total_beds * (1.0 + 1e-9))
    throw PhysicalRangeError("initial.inpatients", "inpatients + boarders exceed total_beds");
  s.return_pipeline = PipelineDelay(p.return_delay_h, dt_h, init.return_rate);
  s.protocol_detector.window_h = p.trigger_window_h;
  s.release_time_smooth = {p.normal_release_time_h, p.protocol_effect_delay_h};
  s.protocol_effect = {0.0, p.protocol_effect_delay_h};
  return s;
}

// Rough operating point used to seed a warm-up run.
inline InitialStocks steady_state_guess(const EdParameters& p) {
  double a = p.mean_daily_arrivals() / 24.0;
  InitialStocks g;
  g.ed_in_treatment = a * p.ed_treatment_time_h;
  g.awaiting_bed = a * p.admit_fraction * p.bed_assign_time_h;
  g.boarders = std::min(a * p.admit_fraction * p.transfer_time_h, p.total_beds);
  g.inpatients = std::max(0.0, std::min(kRestrictionKnee * p.total_beds, p.total_beds - g.boarders));
  g.return_rate = p.return_fraction_normal * g.inpatients / p.normal_release_time_h;
  return g;
}

// -- Flows and stepping -------------------------------------------------------

namespace detail {

inline void check_stock(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0)
    throw NumericError(std::string("stock ") + name + " is invalid (" + std::to_string(v) + ")");
}

}  // namespace detail

// Flow rates implied by the current state. Every outflow is capped so one
// Euler step cannot drain a stock below zero, and bed claims (ED assignment
// first, then electives) never exceed the beds free this step.
inline FlowRates compute_flows(const EdState& s, const EdParameters& p, double t,
                               const StepInputs& in, double dt_h) {
  detail::check_stock(s.ed_in_treatment, "ed_in_treatment");
  detail::check_stock(s.awaiting_bed, "awaiting_bed");
  detail::check_stock(s.boarders, "boarders");
  detail::check_stock(s.inpatients, "inpatients");
  if (!(in.exogenous >= 0.0)) throw NumericError("exogenous inflow must be >= 0");

  FlowRates f;
  f.return_arrivals = s.return_pipeline.peek_outflow_rate();
  f.arrivals = diurnal_arrival_rate(p, t) + in.exogenous + f.return_arrivals;

  f.treatment_complete = std::min(s.ed_in_treatment / p.ed_treatment_time_h, s.ed_in_treatment / dt_h);
  f.to_bed_request = in.admit_fraction * f.treatment_complete;
  f.direct_discharge = f.treatment_complete - f.to_bed_request;

  double x = effective_occupancy(s, p);
  f.bed_assignment = std::min(s.awaiting_bed / p.bed_assign_time_h *
                                  ed_admission_restriction(x, p.ed_priority_exponent),
                              s.awaiting_bed / dt_h);
  f.transfer = std::min(s.boarders / p.transfer_time_h, s.boarders / dt_h);
  double release = s.release_time_smooth.current;
  f.ward_discharge = std::min(s.inpatients / release, s.inpatients / dt_h);
  f.elective_admission = std::max(0.0, in.elective_demand) * occupancy_restriction(x);

  double free_beds = std::max(0.0, p.total_beds - s.inpatients - s.boarders);
  double capacity = free_beds / dt_h + f.ward_discharge;
  f.bed_assignment = std::min(f.bed_assignment, capacity);
  f.elective_admission = std::min(f.elective_admission, std::max(0.0, capacity - f.bed_assignment));

  double effect = std::clamp(s.protocol_effect.current, 0.0, 1.0);
  double fraction = p.return_fraction_normal +
                    (p.return_fraction_policy - p.return_fraction_normal) * effect;
  f.returns = f.ward_discharge * fraction;
  return f;
}

struct StepOutcome {
  EdState state;
  FlowRates flows;
};

// In-place step; returns the flows that moved the state from t to t + dt.
inline FlowRates advance_ed_model(EdState& s, const EdParameters& p, double t, double dt_h,
                                  const StepInputs& in) {
  advance_protocol(s, p, dt_h);
  FlowRates f = compute_flows(s, p, t, in, dt_h);

  const std::array<double, 4> stocks = {s.ed_in_treatment, s.awaiting_bed, s.boarders, s.inpatients};
  const std::array<double, 4> net = {f.arrivals - f.treatment_complete,
                                     f.to_bed_request - f.bed_assignment,
                                     f.bed_assignment - f.transfer,
                                     f.transfer + f.elective_admission - f.ward_discharge};
  EulerResult next = euler_step(stocks, net, dt_h);
  s.ed_in_treatment = next.stocks[0];
  s.awaiting_bed = next.stocks[1];
  s.boarders = next.stocks[2];
  s.inpatients = next.stocks[3];
  s.return_pipeline.step(f.returns, dt_h);

  s.cum_admitted_elective += f.elective_admission * dt_h;
  s.cum_returns += f.returns * dt_h;
  s.cum_arrivals += f.arrivals * dt_h;
  s.cum_external_inflow += f.external_inflow() * dt_h;
  s.cum_external_outflow += f.external_outflow() * dt_h;
  return f;
}

inline StepOutcome step_ed_model(const EdState& s, const EdParameters& p, double t, double dt_h,
                                 const StepInputs& in) {
  StepOutcome out{s, {}};
  out.flows = advance_ed_model(out.state, p, t, dt_h, in);
  return out;
}

inline std::string describe(const EdState& s) {
  std::ostringstream os;
  os << "ed_in_treatment=" << s.ed_in_treatment << " awaiting_bed=" << s.awaiting_bed
     << " boarders=" << s.boarders << " inpatients=" << s.inpatients
     << " return_pipeline=" << s.return_pipeline.content()
     << " release_time=" << s.release_time_smooth.current
     << " protocol_in_force=" << (s.protocol_in_force ? "true" : "false");
  return os.str();
}

}  // namespace edflow
