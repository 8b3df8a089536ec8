#include <gtest/gtest.h>

#include <charconv>
#include <filesystem>
#include <sstream>

#include "edflow/io.hpp"
#include "edflow/presets.hpp"
#include "edflow/service.hpp"

using namespace edflow;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("edflow_test_" + name);
}

}  // namespace

TEST(Json, ScenarioRoundTrip) {
  ScenarioSpec s = stressed_scenario();
  s.initial = InitialStocks{1, 2, 3, 4, 5};
  s.params.diurnal_multipliers[3] = 0.123456789012345;
  EXPECT_EQ(scenario_from_json(to_json(s)), s);
  EXPECT_EQ(scenario_from_json(json::parse(to_json(s).dump())), s);
}

TEST(Json, ParametersFieldsAreSnakeCaseMembers) {
  json j = to_json(EdParameters{});
  EXPECT_EQ(j["total_beds"], 500.0);
  EXPECT_EQ(j["daily_mean_arrivals"].size(), 7u);
  EXPECT_EQ(j["diurnal_multipliers"].size(), 24u);
  EXPECT_EQ(parameters_from_json(j), EdParameters{});
}

TEST(Json, MissingFieldsKeepDefaults) {
  auto s = scenario_from_json(json::parse(R"({"params": {"total_beds": 600}})"));
  EXPECT_EQ(s.params.total_beds, 600.0);
  EXPECT_EQ(s.params.transfer_time_h, 1.56);
  EXPECT_EQ(s.label, "baseline");
  EXPECT_EQ(scenario_from_json(json::object()), baseline_scenario());
}

TEST(Json, UnknownAndMistypedFieldsAreAllReported) {
  try {
    scenario_from_json(json::parse(
        R"({"foo": 1, "grid": {"dt": 0.1}, "params": {"total_beds": "many"}, "exogenous": {"kind": "square"}})"));
    FAIL();
  } catch (const SchemaError& e) {
    std::set<std::string> fields;
    for (const auto& i : e.issues()) fields.insert(i.field);
    EXPECT_EQ(fields, (std::set<std::string>{"foo", "grid.dt", "params.total_beds", "exogenous.kind"}));
  }
  EXPECT_THROW(scenario_from_json(json::array()), SchemaError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"seed": -4})")), SchemaError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"params": {"diurnal_multipliers": [1, 2]}})")),
               SchemaError);
}

TEST(Json, TrajectoryRoundTrip) {
  auto tr = run_scenario(stressed_scenario()).trajectory;
  EXPECT_EQ(trajectory_from_json(json::parse(to_json(tr).dump())), tr);
  EXPECT_THROW(trajectory_from_json(json::parse(R"({"census": [1, "x"]})")), SchemaError);
}

TEST(Json, ReportsRoundTrip) {
  SensitivityReport r{"transfer_time_h", "stressed", 0.5, 1.56, 2.5,
                      {{"boarders", 1, 2, 3, -50, 50, 30.5}}};
  EXPECT_EQ(sensitivity_report_from_json(to_json(r)), r);
  FitReport f{1.5, 1.25, 19, 0, 167.5};
  EXPECT_EQ(fit_report_from_json(to_json(f)), f);
}

TEST(Json, RangesAcceptBothForms) {
  auto r = ranges_from_json(json::parse(R"({"total_beds": [400, 900], "transfer_time_h": {"min": 0.5, "max": 2.5}})"));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0], (ParameterRange{"total_beds", 400, 900}));
  EXPECT_EQ(r[1], (ParameterRange{"transfer_time_h", 0.5, 2.5}));
  EXPECT_THROW(ranges_from_json(json::parse(R"({"beds": [1, 2]})")), SchemaError);
  EXPECT_THROW(ranges_from_json(json::parse(R"({"total_beds": [9, 2]})")), SchemaError);
  EXPECT_THROW(ranges_from_json(json::parse(R"({"total_beds": 3})")), SchemaError);
}

TEST(Json, MonteCarloLayout) {
  auto m = monte_carlo(baseline_scenario(), default_mc_ranges(), 3, 1);
  json j = to_json(m);
  EXPECT_EQ(j["n"], 3u);
  EXPECT_EQ(j["runs"].size(), 3u);
  EXPECT_TRUE(j["runs"][0]["inputs"].contains("total_beds"));
  EXPECT_TRUE(j["summary"].contains("peak_boarders"));
  EXPECT_EQ(j["bands"]["census"]["p50"].size(), 1008u);
  EXPECT_FALSE(to_json(m, false).contains("bands"));
}

TEST(Csv, ShortestNumbersParseBackExactly) {
  for (double v : {0.1, 1.0 / 3.0, 57.6, 1e-300, 12345.678901234567}) {
    std::string s = format_number(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_percent(-0.001), "0.00");
  EXPECT_EQ(format_percent(-53.284), "-53.28");
}

TEST(Csv, TrajectoryHasHeaderAndOneRowPerStep) {
  auto tr = run_scenario(baseline_scenario()).trajectory;
  auto l = lines(serialize(tr, Format::csv));
  ASSERT_EQ(l.size(), 1009u);
  EXPECT_EQ(l[0].rfind("time_h,census,boarders,occupancy,admitted_patients,", 0), 0u);
  const auto cols = std::count(l[0].begin(), l[0].end(), ',');
  for (std::size_t i = 1; i < l.size(); ++i)
    ASSERT_EQ(std::count(l[i].begin(), l[i].end(), ','), cols);
  EXPECT_EQ(l[1].rfind("0,", 0), 0u);
}

TEST(Csv, ReportOneRowPerOutput) {
  SensitivityReport r{"total_beds", "stressed", 400, 500, 900,
                      {{"occupancy", 1, 0.9, 0.5, 11.111, -44.444, 72}}};
  auto l = lines(serialize(r, Format::csv));
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[1], "total_beds,stressed,400,500,900,occupancy,1,11.11,0.9,0.5,-44.44,72");
}

TEST(Csv, MonteCarloRows) {
  auto m = monte_carlo(baseline_scenario(), default_mc_ranges(), 4, 2);
  auto l = lines(serialize(m, Format::csv));
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[0],
            "run,total_beds,bed_assign_time_h,transfer_time_h,mean_elective_per_day,mean_occupancy,"
            "mean_census,mean_boarders,mean_admitted_patients,peak_census,peak_boarders,"
            "protocol_activated");
  EXPECT_EQ(l[4].rfind("3,", 0), 0u);
}

TEST(Files, ExportAndReadBack) {
  auto path = temp_path("fit.json").string();
  FitReport f{1, 2, 3, 4, 5};
  export_result(f, Format::json, path);
  EXPECT_EQ(fit_report_from_json(read_json_file(path)), f);
  std::filesystem::remove(path);
}

TEST(Files, UnwritablePathRaisesIoErrorWithPath) {
  const std::string path = "/nonexistent-dir/out.csv";
  try {
    export_result(FitReport{}, Format::csv, path);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), path);
  }
  EXPECT_THROW(read_json_file("/nonexistent-dir/x.json"), IoError);
}

TEST(Files, InvalidJsonIsIoError) {
  auto path = temp_path("bad.json").string();
  write_text_file(path, "{not json");
  EXPECT_THROW(read_json_file(path), IoError);
  std::filesystem::remove(path);
}

TEST(Files, FormatSelection) {
  EXPECT_EQ(format_from_path("a/b.json"), Format::json);
  EXPECT_EQ(format_from_path("a/b.csv"), Format::csv);
  EXPECT_EQ(format_from_path("a/b"), Format::csv);
  EXPECT_THROW(parse_format("xml"), ValidationError);
}

TEST(Presets, ShippedFilesEqualBuiltIns) {
  for (const auto& p : builtin_presets()) {
    auto path = std::string(EDFLOW_SOURCE_DIR) + "/presets/" + p.name + ".json";
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(scenario_from_json(read_json_file(path)), p.spec) << p.name;
    EXPECT_EQ(load_preset(p.name, EDFLOW_SOURCE_DIR "/presets"), p.spec);
  }
  EXPECT_EQ(load_preset("stressed"), stressed_scenario());
  EXPECT_THROW(load_preset("nope"), ValidationError);
}

TEST(Presets, PartialFileOverridesDefaults) {
  auto dir = temp_path("presets");
  std::filesystem::create_directories(dir);
  write_text_file((dir / "stressed.json").string(), R"({"params": {"total_beds": 450}})");
  auto s = load_preset("stressed", dir.string());
  EXPECT_EQ(s.params.total_beds, 450.0);
  EXPECT_EQ(s.exogenous, stressed_scenario().exogenous);
  std::filesystem::remove_all(dir);
}

TEST(Docs, OpenApiDocumentIsCurrent) {
  EXPECT_EQ(read_text_file(EDFLOW_SOURCE_DIR "/docs/api.yaml"), service::openapi_yaml());
}
