#pragma once

// Fixed-step stock-and-flow machinery: time grid, Euler stepping, conveyor
// delays, first-order smoothing, exogenous test signals and a detector for
// conditions that must hold for a sustained period.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "edflow/error.hpp"

namespace edflow {

namespace detail {

inline bool near_integer(double q, double rel_tol = 1e-9) {
  return std::abs(q - std::round(q)) <= rel_tol * std::max(1.0, std::abs(q));
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string(what) + " is not finite");
}

}  // namespace detail

struct TimeGrid {
  double start_h = 0.0;
  double end_h = 168.0;
  double dt_h = 1.0 / 6.0;

  std::size_t step_count() const {
    return static_cast<std::size_t>(std::llround((end_h - start_h) / dt_h));
  }
  double time_at(std::size_t k) const { return start_h + static_cast<double>(k) * dt_h; }
  double span_h() const { return end_h - start_h; }

  void validate() const {
    if (!std::isfinite(dt_h) || dt_h <= 0.0) throw PhysicalRangeError("dt_h", "must be > 0");
    if (!std::isfinite(start_h) || start_h < 0.0)
      throw PhysicalRangeError("start_h", "must be finite and >= 0");
    if (!std::isfinite(end_h) || end_h <= start_h)
      throw ValidationError("end_h", "must be greater than start_h");
    if (!detail::near_integer(span_h() / dt_h))
      throw ValidationError("dt_h", "span " + std::to_string(span_h()) +
                                        " h is not a whole number of steps of " +
                                        std::to_string(dt_h) + " h");
  }

  bool operator==(const TimeGrid&) const = default;
};

inline TimeGrid make_time_grid(double start_h, double end_h, double dt_h) {
  TimeGrid g{start_h, end_h, dt_h};
  g.validate();
  return g;
}

// -- Euler ------------------------------------------------------------------

struct EulerResult {
  std::vector<double> stocks;
  std::vector<std::size_t> clipped;  // indices clamped at zero

  bool any_clipped() const { return !clipped.empty(); }
};

// stock' = max(0, stock + net_flow * dt). Clipping is reported so callers can
// rate-limit the offending outflows.
inline EulerResult euler_step(std::span<const double> stocks, std::span<const double> net_flows,
                              double dt_h) {
  if (stocks.size() != net_flows.size())
    throw ValidationError("net_flows", "length differs from stocks");
  if (!(dt_h > 0.0)) throw PhysicalRangeError("dt_h", "must be > 0");
  EulerResult r;
  r.stocks.resize(stocks.size());
  for (std::size_t i = 0; i < stocks.size(); ++i) {
    detail::require_finite(stocks[i], "stock");
    detail::require_finite(net_flows[i], "net flow");
    double next = stocks[i] + net_flows[i] * dt_h;
    if (next < 0.0) {
      next = 0.0;
      r.clipped.push_back(i);
    }
    r.stocks[i] = next;
  }
  return r;
}

// -- Exogenous signals ------------------------------------------------------

enum class SignalKind { none, pulse, step, ramp, sine };

inline const char* to_string(SignalKind k) {
  switch (k) {
    case SignalKind::none: return "none";
    case SignalKind::pulse: return "pulse";
    case SignalKind::step: return "step";
    case SignalKind::ramp: return "ramp";
    case SignalKind::sine: return "sine";
  }
  return "none";
}

inline SignalKind parse_signal_kind(const std::string& s) {
  if (s == "none") return SignalKind::none;
  if (s == "pulse") return SignalKind::pulse;
  if (s == "step") return SignalKind::step;
  if (s == "ramp") return SignalKind::ramp;
  if (s == "sine") return SignalKind::sine;
  throw ValidationError("exogenous.kind", "unknown signal kind '" + s + "'");
}

struct InputSignal {
  SignalKind kind = SignalKind::none;
  double height = 0.0;    // patients/hour (per hour, for ramp)
  double start_h = 0.0;
  double width_h = 3.0;   // pulse only
  double period_h = 24.0; // sine only
  double baseline = 0.0;  // patients/hour

  void validate() const {
    if (!std::isfinite(height)) throw ValidationError("exogenous.height", "must be finite");
    if (!std::isfinite(baseline)) throw ValidationError("exogenous.baseline", "must be finite");
    if (!std::isfinite(start_h)) throw ValidationError("exogenous.start_h", "must be finite");
    if (kind == SignalKind::pulse && !(width_h > 0.0))
      throw PhysicalRangeError("exogenous.width_h", "must be > 0 for a pulse");
    if (kind == SignalKind::sine && !(period_h > 0.0))
      throw PhysicalRangeError("exogenous.period_h", "must be > 0 for a sine");
  }

  bool operator==(const InputSignal&) const = default;
};

inline double eval_input_signal(const InputSignal& sig, double t) {
  switch (sig.kind) {
    case SignalKind::none:
      return sig.baseline;
    case SignalKind::pulse:
      return (t >= sig.start_h && t < sig.start_h + sig.width_h) ? sig.baseline + sig.height
                                                                   : sig.baseline;
    case SignalKind::step:
      return t >= sig.start_h ? sig.baseline + sig.height : sig.baseline;
    case SignalKind::ramp:
      return sig.baseline + sig.height * std::max(0.0, t - sig.start_h);
    case SignalKind::sine:
      return sig.baseline +
             sig.height * std::sin(2.0 * std::numbers::pi * (t - sig.start_h) / sig.period_h);
  }
  return sig.baseline;
}

// -- Conveyor delay ---------------------------------------------------------

// Fixed transit delay. Material entering during one step leaves exactly
// round(delay/dt) steps later; nothing is created or lost in between.
class PipelineDelay {
 public:
  PipelineDelay() = default;

  PipelineDelay(double delay_h, double dt_h, double initial_rate = 0.0)
      : delay_h_(delay_h), dt_h_(dt_h) {
    if (!(dt_h > 0.0)) throw PhysicalRangeError("dt_h", "must be > 0");
    if (!(delay_h > 0.0)) throw PhysicalRangeError("delay_h", "must be > 0");
    if (!(initial_rate >= 0.0)) throw PhysicalRangeError("initial_rate", "must be >= 0");
    auto n = static_cast<std::size_t>(std::llround(delay_h / dt_h));
    if (n < 1) throw ValidationError("delay_h", "shorter than half a time step");
    bins_.assign(n, initial_rate * dt_h);
  }

  std::size_t bin_count() const { return bins_.size(); }
  double delay_h() const { return delay_h_; }
  double dt_h() const { return dt_h_; }

  // Rate that the next step() will release.
  double peek_outflow_rate() const { return bins_.empty() ? 0.0 : bins_[head_] / dt_h_; }

  double content() const {
    double s = 0.0;
    for (double b : bins_) s += b;
    return s;
  }

  // Bins in transit order, oldest first.
  std::vector<double> bins() const {
    std::vector<double> out;
    out.reserve(bins_.size());
    for (std::size_t i = 0; i < bins_.size(); ++i) out.push_back(bins_[(head_ + i) % bins_.size()]);
    return out;
  }

  void set_bins(std::span<const double> oldest_first) {
    if (oldest_first.size() != bins_.size())
      throw ValidationError("return_pipeline", "expected " + std::to_string(bins_.size()) + " bins");
    for (double b : oldest_first)
      if (!(b >= 0.0)) throw PhysicalRangeError("return_pipeline", "bin contents must be >= 0");
    bins_.assign(oldest_first.begin(), oldest_first.end());
    head_ = 0;
  }

  // Returns the outflow rate for this step.
  double step(double inflow_rate, double dt_h) {
    if (!(inflow_rate >= 0.0)) throw PhysicalRangeError("inflow", "must be >= 0");
    if (std::abs(dt_h - dt_h_) > 1e-12 * std::max(1.0, dt_h_))
      throw ValidationError("dt_h", "differs from the pipeline's construction step");
    if (bins_.empty()) return inflow_rate;
    double out = bins_[head_];
    bins_[head_] = inflow_rate * dt_h_;
    head_ = (head_ + 1) % bins_.size();
    return out / dt_h_;
  }

 private:
  std::vector<double> bins_;
  std::size_t head_ = 0;
  double delay_h_ = 0.0;
  double dt_h_ = 0.0;
};

inline double pipeline_step(PipelineDelay& d, double inflow_rate, double dt_h) {
  return d.step(inflow_rate, dt_h);
}

// -- First-order smooth -----------------------------------------------------

struct FirstOrderSmooth {
  double current = 0.0;
  double tau_h = 1.0;

  double step(double target, double dt_h) {
    current += (target - current) * dt_h / tau_h;
    return current;
  }
};

inline double smooth_step(FirstOrderSmooth& s, double target, double dt_h) {
  return s.step(target, dt_h);
}

// -- Sustained-condition detector -------------------------------------------

// Active once the condition has been sampled true for window_h consecutive
// hours; any false sample resets it. The comparison allows for accumulated
// rounding (twelve additions of 1/6 fall just short of 2).
struct SustainedConditionDetector {
  double window_h = 2.0;
  double consecutive_true_h = 0.0;
  bool active = false;

  void update(bool condition, double dt_h) {
    if (condition) {
      consecutive_true_h += dt_h;
    } else {
      consecutive_true_h = 0.0;
    }
    active = consecutive_true_h >= window_h - 1e-9 * std::max(1.0, window_h);
  }
};

inline SustainedConditionDetector detector_update(SustainedConditionDetector d, bool condition,
                                                  double dt_h) {
  d.update(condition, dt_h);
  return d;
}

}  // namespace edflow
