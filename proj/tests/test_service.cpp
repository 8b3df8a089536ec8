#include <gtest/gtest.h>

#include <future>
#include <sstream>
#include <thread>

#include "edflow/service.hpp"

using namespace edflow;
using namespace edflow::service;

namespace {

const Context& ctx() {
  static const Context c = make_context(EDFLOW_SOURCE_DIR "/presets");
  return c;
}

Response call(const std::string& method, const std::string& path, const std::string& body = "") {
  return handle(ctx(), {method, path, {}, body});
}

json body_of(const Response& r) { return json::parse(r.body); }

class LiveServer : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    server_ = new httplib::Server;
    mount(*server_, std::make_shared<const Context>(ctx()));
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = new std::thread([] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }
  static void TearDownTestSuite() {
    server_->stop();
    thread_->join();
    delete thread_;
    delete server_;
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(120, 0);
    return c;
  }

  static inline httplib::Server* server_ = nullptr;
  static inline std::thread* thread_ = nullptr;
  static inline int port_ = 0;
};

}  // namespace

TEST(Handle, HealthAndPresets) {
  auto h = call("GET", "/api/health");
  EXPECT_EQ(h.status, 200);
  EXPECT_EQ(body_of(h)["status"], "ok");
  EXPECT_EQ(body_of(h)["version"], kVersion);
  auto p = body_of(call("GET", "/api/presets"));
  std::set<std::string> names;
  for (const auto& x : p["presets"]) {
    names.insert(x["name"]);
    EXPECT_FALSE(x["description"].get<std::string>().empty());
  }
  EXPECT_TRUE(names.count("baseline"));
  EXPECT_TRUE(names.count("stressed"));
}

TEST(Handle, UnknownRouteIs404) {
  EXPECT_EQ(call("GET", "/api/nothing").status, 404);
  EXPECT_EQ(call("GET", "/api/simulate").status, 404);
  EXPECT_EQ(call("DELETE", "/api/health").status, 404);
}

TEST(Handle, EmptyBodyRunsBaselineAndEchoesDefaults) {
  auto r = call("POST", "/api/simulate", "");
  ASSERT_EQ(r.status, 200) << r.body;
  auto j = body_of(r);
  EXPECT_EQ(scenario_from_json(j["scenario"]), baseline_scenario());
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["points"], 1008u);
  for (const auto& b : j["trajectory"]["protocol_active"]) EXPECT_FALSE(b.get<bool>());
  EXPECT_TRUE(j["trajectory"]["activations"].empty());
  EXPECT_EQ(call("POST", "/api/simulate", "{}").body, r.body);
}

TEST(Handle, ResponsesEchoResolvedParameters) {
  auto j = body_of(call("POST", "/api/simulate",
                        R"({"preset": "stressed", "params": {"total_beds": 520}})"));
  ScenarioSpec expect = stressed_scenario();
  expect.params.total_beds = 520;
  EXPECT_EQ(scenario_from_json(j["scenario"]), expect);
  EXPECT_FALSE(j["trajectory"]["activations"].empty());
}

TEST(Handle, SchemaErrorsAre400WithFields) {
  auto r = call("POST", "/api/simulate", R"({"grid": {"dt_h": 5}})");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["fields"][0]["field"], "dt_h");
  r = call("POST", "/api/simulate", R"({"bogus": 1, "params": {"nope": 2}})");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["fields"].size(), 2u);
  EXPECT_EQ(call("POST", "/api/simulate", "{oops").status, 400);
  EXPECT_EQ(call("POST", "/api/simulate", R"({"preset": "nope"})").status, 400);
  EXPECT_EQ(call("POST", "/api/simulate", R"({"max_points": 3})").status, 400);
}

TEST(Handle, PhysicallyInvalidValuesAre422) {
  auto r = call("POST", "/api/simulate", R"({"params": {"total_beds": -5}})");
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(body_of(r)["fields"][0]["field"], "total_beds");
  EXPECT_EQ(call("POST", "/api/simulate", R"({"grid": {"start_h": -2}})").status, 422);
}

TEST(Handle, IdenticalRequestsGiveIdenticalPayloads) {
  const std::string body = R"({"preset": "stressed", "seed": 9})";
  EXPECT_EQ(call("POST", "/api/simulate", body).body, call("POST", "/api/simulate", body).body);
}

TEST(Handle, SweepTransferTimeBoarderSigns) {
  auto r = call("POST", "/api/sweep", R"({"parameter": "transfer_time_h", "min": 0.5, "max": 2.5})");
  ASSERT_EQ(r.status, 200) << r.body;
  auto j = body_of(r);
  EXPECT_EQ(j["scenario"]["label"], "stressed");
  auto rep = sensitivity_report_from_json(j["report"]);
  const auto& b = rep.output(Output::boarders);
  EXPECT_LT(b.min_pct, 0.0);
  EXPECT_GT(b.max_pct, 0.0);
  EXPECT_EQ(j["runs"].size(), 3u);
  EXPECT_EQ(j["runs"][0]["input"], 0.5);
}

TEST(Handle, SweepValidation) {
  EXPECT_EQ(call("POST", "/api/sweep", R"({"parameter": "admit_fraction", "min": 0.1, "max": 0.2})").status, 400);
  EXPECT_EQ(call("POST", "/api/sweep", R"({"parameter": "total_beds", "min": 900, "max": 400})").status, 400);
  EXPECT_EQ(call("POST", "/api/sweep", R"({"parameter": "total_beds"})").status, 400);
  EXPECT_EQ(call("POST", "/api/sweep", R"({"parameter": "total_beds", "min": -1, "max": 400})").status, 422);
}

TEST(Handle, MonteCarloValidationAndDeterminism) {
  EXPECT_EQ(call("POST", "/api/montecarlo", R"({"n": 0})").status, 400);
  EXPECT_EQ(call("POST", "/api/montecarlo", R"({"n": 2, "ranges": {"beds": [1, 2]}})").status, 400);
  const std::string body = R"({"n": 5, "seed": 1})";
  auto a = call("POST", "/api/montecarlo", body);
  ASSERT_EQ(a.status, 200) << a.body;
  EXPECT_EQ(a.body, call("POST", "/api/montecarlo", body).body);
  EXPECT_EQ(body_of(a)["result"]["runs"].size(), 5u);
}

TEST(Handle, FitRoute) {
  auto r = call("POST", "/api/fit",
                R"({"observed": {"time_h": [0, 24, 48], "census": [50, 50, 50]}})");
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(body_of(r)["report"]["samples"], 3u);
  EXPECT_EQ(call("POST", "/api/fit", R"({})").status, 400);
  EXPECT_EQ(call("POST", "/api/fit", R"({"observed": {"time_h": [0, 1], "census": [1]}})").status, 400);
}

TEST(Decimation, KeepsEndpointsExtremaAndSwitches) {
  auto tr = run_scenario(stressed_scenario()).trajectory;
  for (std::size_t max_points : {std::size_t{10}, std::size_t{40}, std::size_t{200}, std::size_t{1007}}) {
    auto idx = decimation_indices(tr, max_points);
    ASSERT_LE(idx.size(), max_points);
    ASSERT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    EXPECT_EQ(idx.front(), 0u);
    EXPECT_EQ(idx.back(), tr.size() - 1);
    auto d = decimate(tr, max_points);
    for (Output o : kOutputs) {
      const auto& full = output_series(tr, o);
      const auto& part = output_series(d, o);
      EXPECT_EQ(*std::max_element(full.begin(), full.end()), *std::max_element(part.begin(), part.end()));
      EXPECT_EQ(*std::min_element(full.begin(), full.end()), *std::min_element(part.begin(), part.end()));
    }
    EXPECT_EQ(d.activations, tr.activations);
    if (max_points >= 40) {
      for (std::size_t k = 1; k < tr.size(); ++k)
        if (tr.protocol_active[k] != tr.protocol_active[k - 1]) {
          EXPECT_TRUE(std::binary_search(idx.begin(), idx.end(), k));
          EXPECT_TRUE(std::binary_search(idx.begin(), idx.end(), k - 1));
        }
    }
  }
  EXPECT_EQ(decimate(tr, 2000), tr);
}

TEST(Decimation, LongRunIsCappedAt2000Points) {
  auto r = call("POST", "/api/simulate", R"({"grid": {"end_h": 672}})");
  ASSERT_EQ(r.status, 200);
  auto j = body_of(r);
  EXPECT_EQ(j["points"], 4032u);
  EXPECT_LE(j["trajectory"]["census"].size(), 2000u);
  EXPECT_TRUE(j["trajectory"]["decimated"].get<bool>());
}

TEST(Config, EnvironmentOverrides) {
  ::setenv("EDFLOW_PORT", "9123", 1);
  ::setenv("EDFLOW_BIND", "0.0.0.0", 1);
  auto c = config_from_env();
  EXPECT_EQ(c.port, 9123);
  EXPECT_EQ(c.bind, "0.0.0.0");
  ::setenv("EDFLOW_PORT", "http", 1);
  EXPECT_THROW(config_from_env(), ValidationError);
  ::unsetenv("EDFLOW_PORT");
  ::unsetenv("EDFLOW_BIND");
  c = config_from_env();
  EXPECT_EQ(c.port, 8080);
  EXPECT_EQ(c.bind, "127.0.0.1");
}

TEST_F(LiveServer, HealthOverHttpWithCors) {
  auto res = client().Get("/api/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(json::parse(res->body)["status"], "ok");
  auto pre = client().Options("/api/simulate");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  auto missing = client().Get("/elsewhere");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
}

TEST_F(LiveServer, ConcurrentIdenticalRequestsMatch) {
  const std::string body = R"({"preset": "stressed"})";
  std::vector<std::future<std::string>> pending;
  for (int i = 0; i < 6; ++i)
    pending.push_back(std::async(std::launch::async, [&] {
      auto res = client().Post("/api/simulate", body, "application/json");
      return res ? res->body : std::string("no response");
    }));
  std::string first = pending[0].get();
  EXPECT_EQ(json::parse(first)["scenario"]["label"], "stressed");
  for (std::size_t i = 1; i < pending.size(); ++i) EXPECT_EQ(pending[i].get(), first);
}

TEST_F(LiveServer, ErrorsOverHttp) {
  auto res = client().Post("/api/simulate", R"({"grid": {"dt_h": 5}})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = client().Post("/api/simulate", R"({"params": {"total_beds": 0}})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
}

TEST_F(LiveServer, MonteCarloStreamsProgressThenResult) {
  const std::string body = R"({"n": 6, "seed": 4, "include_bands": false})";
  auto res = client().Post("/api/montecarlo?stream=1", body, "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  std::istringstream in(res->body);
  std::vector<json> rows;
  for (std::string l; std::getline(in, l);) rows.push_back(json::parse(l));
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(rows[i]["progress"], i + 1);
  auto plain = client().Post("/api/montecarlo", body, "application/json");
  ASSERT_TRUE(plain);
  EXPECT_EQ(rows.back(), json::parse(plain->body));
  auto bad = client().Post("/api/montecarlo?stream=1", R"({"n": 0})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
}
