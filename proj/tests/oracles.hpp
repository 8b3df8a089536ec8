#pragma once

// Reference computations written independently of the library, used to check it.

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

#include "edflow/scenario.hpp"

namespace oracle {

// active[k] after the k-th sample: the last n samples were all true.
inline std::vector<bool> sustained(const std::vector<bool>& samples, std::size_t n) {
  std::vector<bool> out(samples.size(), false);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k + 1 < n) continue;
    bool all = true;
    for (std::size_t j = k + 1 - n; j <= k; ++j) all = all && samples[j];
    out[k] = all;
  }
  return out;
}

// Exact conveyor: what enters at step k leaves at step k + n.
inline std::vector<double> conveyor(const std::vector<double>& inflow, std::size_t n,
                                    double initial_rate) {
  std::deque<double> belt(n, initial_rate);
  std::vector<double> out;
  for (double in : inflow) {
    out.push_back(belt.front());
    belt.pop_front();
    belt.push_back(in);
  }
  return out;
}

inline double exponential_decay(double s0, double tau, double t) { return s0 * std::exp(-t / tau); }

// Euler on dS/dt = -S/tau, written out longhand.
inline double euler_decay(double s0, double tau, double t, double dt) {
  double s = s0;
  auto n = static_cast<long>(std::llround(t / dt));
  for (long i = 0; i < n; ++i) s -= dt * s / tau;
  return s;
}

// Composite Simpson rule with m (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  double h = (b - a) / m;
  double sum = f(a) + f(b);
  for (int i = 1; i < m; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

inline double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

// Hyndman-Fan type 7 on a sorted copy.
inline double quantile7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double h = (static_cast<double>(v.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = static_cast<std::size_t>(std::ceil(h));
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Protocol status implied by a recorded trajectory: in force at row k iff both
// criteria held at every one of the n rows before it.
inline std::vector<bool> protocol_from_rows(const edflow::Trajectory& tr,
                                            const edflow::EdParameters& p, std::size_t n) {
  std::vector<bool> crit(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k)
    crit[k] = p.protocol_enabled && tr.boarders[k] >= p.boarder_trigger &&
              tr.census[k] >= p.census_trigger;
  auto after = sustained(crit, n);
  std::vector<bool> in_force(tr.size(), false);
  for (std::size_t k = 1; k < tr.size(); ++k) in_force[k] = after[k - 1];
  return in_force;
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace oracle
