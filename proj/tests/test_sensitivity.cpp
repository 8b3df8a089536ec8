#include <gtest/gtest.h>

#include <cmath>

#include "edflow/sensitivity.hpp"
#include "oracles.hpp"

using namespace edflow;

TEST(Sensitivity, PercentDeviation) {
  EXPECT_DOUBLE_EQ(percent_deviation(110, 100), 10.0);
  EXPECT_DOUBLE_EQ(percent_deviation(90, 100), -10.0);
  EXPECT_EQ(percent_deviation(5, 0), 0.0);
}

TEST(Sensitivity, DivergenceIndexPrefersEarliestOnTies) {
  std::vector<double> a = {0, 2, 0, 2}, b = {0, 0, 0, 0}, c = {0, 1, 0, 2};
  EXPECT_EQ(divergence_index(a, b, c), 1u);
  std::vector<double> flat = {3, 3, 3};
  EXPECT_EQ(divergence_index(flat, flat, flat), 0u);
}

TEST(Sensitivity, ReportUsesValuesAtDivergenceTime) {
  Trajectory lo, mid, hi;
  for (auto* t : {&lo, &mid, &hi}) {
    t->times = {0, 1, 2};
    t->occupancy = t->boarders = t->admitted_patients = {1, 1, 1};
  }
  lo.census = {10, 9, 10};
  mid.census = {10, 10, 10};
  hi.census = {10, 12, 11};
  auto r = make_report("total_beds", "x", {1, 2, 3}, {lo, mid, hi});
  const auto& c = r.output(Output::census);
  EXPECT_EQ(c.divergence_time_h, 1.0);
  EXPECT_EQ(c.min_value, 9.0);
  EXPECT_DOUBLE_EQ(c.min_pct, -10.0);
  EXPECT_DOUBLE_EQ(c.max_pct, 20.0);
  EXPECT_EQ(r.output(Output::occupancy).min_pct, 0.0);
}

TEST(Sensitivity, SweepRejectsUnknownParameterAndBadBounds) {
  EXPECT_THROW(sweep(stressed_scenario(), "admit_fraction", 0.3, 0.4), ValidationError);
  EXPECT_THROW(sweep(stressed_scenario(), "total_beds", 900, 400), ValidationError);
  EXPECT_THROW(sweep(stressed_scenario(), "total_beds", -5, 900), PhysicalRangeError);
}

TEST(Sensitivity, SweepRunsMatchIndependentRuns) {
  auto res = sweep(stressed_scenario(), "bed_assign_time_h", 1.8, 4.0);
  ScenarioSpec s = stressed_scenario();
  s.params.bed_assign_time_h = 4.0;
  EXPECT_EQ(res.runs[2], run_scenario(s).trajectory);
  EXPECT_EQ(res.report.base_input, 2.9);
  EXPECT_EQ(res.report.scenario, "stressed");
  EXPECT_EQ(res.report.outputs.size(), 4u);
}

TEST(Sensitivity, CensusTriggerIsInertInStressedScenario) {
  auto res = sweep(stressed_scenario(), "census_trigger", 48, 60);
  EXPECT_TRUE(census_trigger_inert(res.runs, 10.0, 60.0));
  for (const auto& d : res.report.outputs) {
    EXPECT_EQ(d.min_pct, 0.0) << d.output;
    EXPECT_EQ(d.max_pct, 0.0) << d.output;
  }
}

TEST(MonteCarlo, PercentileIsType7) {
  std::vector<double> v = {4, 1, 3, 2};
  for (double q : {0.0, 0.05, 0.25, 0.5, 0.95, 1.0})
    EXPECT_DOUBLE_EQ(percentile(v, q), oracle::quantile7(v, q)) << q;
  EXPECT_DOUBLE_EQ(percentile(v, 0.05), 1.15);
  EXPECT_THROW(percentile({}, 0.5), ValidationError);
}

TEST(MonteCarlo, RejectsEmptyBatchAndBadRanges) {
  EXPECT_THROW(monte_carlo(baseline_scenario(), default_mc_ranges(), 0, 1), ValidationError);
  EXPECT_THROW(monte_carlo(baseline_scenario(), {{"beds", 1, 2}}, 2, 1), ValidationError);
  EXPECT_THROW(monte_carlo(baseline_scenario(), {{"total_beds", 900, 400}}, 2, 1), ValidationError);
  EXPECT_THROW(monte_carlo(baseline_scenario(), {}, 2, 1), ValidationError);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  auto a = monte_carlo(baseline_scenario(), default_mc_ranges(), 12, 77, 1);
  auto b = monte_carlo(baseline_scenario(), default_mc_ranges(), 12, 77, 4);
  EXPECT_EQ(a, b);
  auto c = monte_carlo(baseline_scenario(), default_mc_ranges(), 12, 78, 4);
  EXPECT_NE(a.runs[0].inputs, c.runs[0].inputs);
}

TEST(MonteCarlo, SamplesWithinRangesAndOrderedPercentiles) {
  std::size_t done_calls = 0;
  auto m = monte_carlo(baseline_scenario(), default_mc_ranges(), 20, 3, 0,
                       [&](std::size_t, std::size_t total) {
                         ++done_calls;
                         EXPECT_EQ(total, 20u);
                       });
  EXPECT_EQ(done_calls, 20u);
  for (const auto& r : m.runs)
    for (std::size_t i = 0; i < m.ranges.size(); ++i) {
      EXPECT_GE(r.inputs[i], m.ranges[i].min);
      EXPECT_LE(r.inputs[i], m.ranges[i].max);
    }
  for (const auto& s : m.summary) {
    EXPECT_LE(s.p5, s.p50);
    EXPECT_LE(s.p50, s.p95);
  }
  ASSERT_EQ(m.bands.size(), 4u);
  for (const auto& b : m.bands) {
    ASSERT_EQ(b.p5.size(), m.times.size());
    for (std::size_t k = 0; k < b.p5.size(); ++k) {
      ASSERT_LE(b.p5[k], b.p50[k]);
      ASSERT_LE(b.p50[k], b.p95[k]);
    }
  }
}

// A degenerate range leaves the parameter fixed, so every run equals the base.
TEST(MonteCarlo, DegenerateRangeReproducesBase) {
  auto m = monte_carlo(baseline_scenario(), {{"total_beds", 500, 500}}, 3, 1);
  for (const auto& r : m.runs) EXPECT_EQ(r.outputs, m.base_outputs);
  for (const auto& s : m.summary) EXPECT_EQ(s.p5, s.p95);
}
