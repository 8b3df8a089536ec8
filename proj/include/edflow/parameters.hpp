#pragma once

#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>

#include "edflow/error.hpp"

namespace edflow {

// Hour-of-day arrival multipliers (00:00 first), mean 1. Overnight trough,
// late-morning peak, slow afternoon decline.
inline constexpr std::array<double, 24> kDefaultDiurnal = {
    0.597510, 0.497925, 0.418257, 0.378423, 0.358506, 0.398340, 0.547718, 0.796680,
    1.095436, 1.344398, 1.493776, 1.543568, 1.513693, 1.473859, 1.443983, 1.394191,
    1.344398, 1.294606, 1.244813, 1.175104, 1.095436, 0.995851, 0.856432, 0.697097};

// Monday first.
inline constexpr std::array<double, 7> kDefaultDailyArrivals = {204, 196, 192, 192, 196, 184, 188};

struct EdParameters {
  // Capacity and the four exogenous levers.
  double total_beds = 500;
  double bed_assign_time_h = 2.9;
  double transfer_time_h = 1.56;
  double mean_elective_per_day = 150;
  double elective_sd_per_day = 15;

  // ED flow.
  double admit_fraction = 0.35;
  double ed_treatment_time_h = 5.0;
  std::array<double, 24> diurnal_multipliers = kDefaultDiurnal;
  std::array<double, 7> daily_mean_arrivals = kDefaultDailyArrivals;
  int start_weekday = 0;  // weekday of t = 0, Monday = 0

  // Ward release and the return loop.
  double normal_release_time_h = 72;
  double policy_release_factor = 0.8;
  double return_fraction_normal = 0.05;
  double return_fraction_policy = 0.10;
  double return_delay_h = 36;

  // Code Help protocol.
  bool protocol_enabled = true;
  double protocol_effect_delay_h = 0.5;
  double boarder_trigger = 10;
  double census_trigger = 54;
  double trigger_window_h = 2;

  // ED bed requests are throttled by restriction^exponent; 1.0 gives ED and
  // elective admissions the same curve, smaller values give ED priority.
  double ed_priority_exponent = 0.1;

  double mean_daily_arrivals() const {
    return std::accumulate(daily_mean_arrivals.begin(), daily_mean_arrivals.end(), 0.0) / 7.0;
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!std::isfinite(v) || v <= 0.0) throw PhysicalRangeError(name, "must be > 0");
    };
    auto non_negative = [](double v, const char* name) {
      if (!std::isfinite(v) || v < 0.0) throw PhysicalRangeError(name, "must be >= 0");
    };
    positive(total_beds, "total_beds");
    positive(bed_assign_time_h, "bed_assign_time_h");
    positive(transfer_time_h, "transfer_time_h");
    non_negative(mean_elective_per_day, "mean_elective_per_day");
    non_negative(elective_sd_per_day, "elective_sd_per_day");
    if (!(admit_fraction > 0.0 && admit_fraction < 1.0))
      throw PhysicalRangeError("admit_fraction", "must lie in (0, 1)");
    positive(ed_treatment_time_h, "ed_treatment_time_h");
    positive(normal_release_time_h, "normal_release_time_h");
    if (!(policy_release_factor > 0.0 && policy_release_factor <= 1.0))
      throw PhysicalRangeError("policy_release_factor", "must lie in (0, 1]");
    if (!(return_fraction_normal >= 0.0 && return_fraction_normal < 1.0))
      throw PhysicalRangeError("return_fraction_normal", "must lie in [0, 1)");
    if (!(return_fraction_policy >= 0.0 && return_fraction_policy < 1.0))
      throw PhysicalRangeError("return_fraction_policy", "must lie in [0, 1)");
    if (return_fraction_policy < return_fraction_normal)
      throw PhysicalRangeError("return_fraction_policy", "must be >= return_fraction_normal");
    positive(return_delay_h, "return_delay_h");
    positive(protocol_effect_delay_h, "protocol_effect_delay_h");
    positive(boarder_trigger, "boarder_trigger");
    positive(census_trigger, "census_trigger");
    positive(trigger_window_h, "trigger_window_h");
    positive(ed_priority_exponent, "ed_priority_exponent");
    if (start_weekday < 0 || start_weekday > 6)
      throw PhysicalRangeError("start_weekday", "must lie in 0..6");
    double sum = 0.0;
    for (double m : diurnal_multipliers) {
      non_negative(m, "diurnal_multipliers");
      sum += m;
    }
    if (std::abs(sum / 24.0 - 1.0) > 1e-6)
      throw PhysicalRangeError("diurnal_multipliers", "must average to 1 (got " +
                                                          std::to_string(sum / 24.0) + ")");
    for (double d : daily_mean_arrivals) non_negative(d, "daily_mean_arrivals");
  }

  bool operator==(const EdParameters&) const = default;
};

// Scalar parameters addressable by name (CLI --param, sweeps, Monte Carlo).
inline constexpr std::pair<std::string_view, double EdParameters::*> kScalarParameters[] = {
    {"total_beds", &EdParameters::total_beds},
    {"bed_assign_time_h", &EdParameters::bed_assign_time_h},
    {"transfer_time_h", &EdParameters::transfer_time_h},
    {"mean_elective_per_day", &EdParameters::mean_elective_per_day},
    {"elective_sd_per_day", &EdParameters::elective_sd_per_day},
    {"admit_fraction", &EdParameters::admit_fraction},
    {"ed_treatment_time_h", &EdParameters::ed_treatment_time_h},
    {"normal_release_time_h", &EdParameters::normal_release_time_h},
    {"policy_release_factor", &EdParameters::policy_release_factor},
    {"return_fraction_normal", &EdParameters::return_fraction_normal},
    {"return_fraction_policy", &EdParameters::return_fraction_policy},
    {"return_delay_h", &EdParameters::return_delay_h},
    {"protocol_effect_delay_h", &EdParameters::protocol_effect_delay_h},
    {"boarder_trigger", &EdParameters::boarder_trigger},
    {"census_trigger", &EdParameters::census_trigger},
    {"trigger_window_h", &EdParameters::trigger_window_h},
    {"ed_priority_exponent", &EdParameters::ed_priority_exponent},
};

inline double EdParameters::* scalar_parameter(std::string_view name) {
  for (const auto& [n, m] : kScalarParameters)
    if (n == name) return m;
  throw ValidationError(std::string(name), "unknown parameter");
}

inline double get_parameter(const EdParameters& p, std::string_view name) {
  return p.*scalar_parameter(name);
}

inline void set_parameter(EdParameters& p, std::string_view name, double value) {
  p.*scalar_parameter(name) = value;
}

}  // namespace edflow
