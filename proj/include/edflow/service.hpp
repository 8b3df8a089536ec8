#pragma once

// HTTP facade. `handle` is a pure function of the request and the immutable
// service context; `mount` wires it into an httplib server.

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "edflow/fit.hpp"
#include "edflow/io.hpp"
#include "edflow/presets.hpp"
#include "edflow/sensitivity.hpp"
#include "edflow/version.hpp"

namespace edflow::service {

inline constexpr std::size_t kMaxPoints = 2000;
inline constexpr std::size_t kMinPoints = 10;
inline constexpr std::size_t kMaxMonteCarloRuns = 5000;

struct Context {
  std::vector<Preset> presets = builtin_presets();

  const Preset* find(const std::string& name) const {
    for (const auto& p : presets)
      if (p.name == name) return &p;
    return nullptr;
  }
};

// Reads presets/<name>.json from `dir` for every built-in name.
inline Context make_context(const std::string& preset_dir = "") {
  Context ctx;
  for (auto& p : ctx.presets) p.spec = load_preset(p.name, preset_dir);
  return ctx;
}

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// -- Decimation -------------------------------------------------------------------

// Sample indices to keep so that no series exceeds `max_points`. Keeps both
// endpoints, the samples on either side of every protocol switch, and the
// per-window minimum and maximum of each reported output.
inline std::vector<std::size_t> decimation_indices(const Trajectory& tr, std::size_t max_points) {
  const std::size_t n = tr.size();
  std::vector<std::size_t> all(n);
  for (std::size_t k = 0; k < n; ++k) all[k] = k;
  if (n <= max_points) return all;
  if (max_points < kMinPoints)
    throw ValidationError("max_points", "must be >= " + std::to_string(kMinPoints));

  std::set<std::size_t> keep = {0, n - 1};
  std::vector<std::size_t> edges;
  for (std::size_t k = 1; k < n; ++k)
    if (tr.protocol_active[k] != tr.protocol_active[k - 1]) {
      edges.push_back(k - 1);
      edges.push_back(k);
    }
  constexpr std::size_t per_window = 2 * kOutputs.size();
  std::size_t budget = max_points - 2;
  if (edges.size() + per_window <= budget) {
    keep.insert(edges.begin(), edges.end());
    budget -= edges.size();
  }
  const std::size_t windows = std::max<std::size_t>(1, budget / per_window);
  const std::size_t interior = n - 2;
  const std::size_t width = (interior + windows - 1) / windows;
  for (std::size_t lo = 1; lo < n - 1; lo += width) {
    const std::size_t hi = std::min(lo + width, n - 1);
    for (Output o : kOutputs) {
      const auto& v = output_series(tr, o);
      auto [mn, mx] = std::minmax_element(v.begin() + static_cast<std::ptrdiff_t>(lo),
                                          v.begin() + static_cast<std::ptrdiff_t>(hi));
      keep.insert(static_cast<std::size_t>(mn - v.begin()));
      keep.insert(static_cast<std::size_t>(mx - v.begin()));
    }
  }
  return {keep.begin(), keep.end()};
}

inline Trajectory decimate(const Trajectory& tr, std::size_t max_points) {
  auto idx = decimation_indices(tr, max_points);
  if (idx.size() == tr.size()) return tr;
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto k : idx) out.push_back(v[k]);
    return out;
  };
  Trajectory d;
  d.label = tr.label;
  d.dt_h = tr.dt_h;
  d.times = pick(tr.times);
  d.census = pick(tr.census);
  d.boarders = pick(tr.boarders);
  d.occupancy = pick(tr.occupancy);
  d.admitted_patients = pick(tr.admitted_patients);
  d.cum_admitted_elective = pick(tr.cum_admitted_elective);
  d.awaiting_bed = pick(tr.awaiting_bed);
  d.ed_in_treatment = pick(tr.ed_in_treatment);
  d.effective_release_time = pick(tr.effective_release_time);
  d.cum_returns = pick(tr.cum_returns);
  for (auto k : idx) d.protocol_active.push_back(tr.protocol_active[k]);
  auto src = tr.flows.members();
  auto dst = d.flows.members();
  for (std::size_t m = 0; m < src.size(); ++m) *dst[m] = pick(*src[m]);
  d.activations = tr.activations;
  return d;
}

// -- Request bodies ---------------------------------------------------------------

namespace detail {

inline json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw SchemaError({{"(body)", std::string("invalid JSON: ") + e.what()}});
  }
}

struct Common {
  ScenarioSpec scenario;
  std::size_t max_points = kMaxPoints;
};

// Pulls "preset" and "max_points" from `j` and returns the remaining object.
inline json take_common(const Context& ctx, json j, Common& c, std::vector<FieldIssue>& issues,
                        const std::string& default_preset) {
  std::string preset = default_preset;
  if (j.is_object()) {
    if (auto it = j.find("preset"); it != j.end()) {
      if (it->is_string()) preset = it->get<std::string>();
      else issues.push_back({"preset", "must be a string"});
      j.erase(it);
    }
    if (auto it = j.find("max_points"); it != j.end()) {
      if (it->is_number_unsigned() && it->get<std::size_t>() >= kMinPoints)
        c.max_points = std::min(kMaxPoints, it->get<std::size_t>());
      else issues.push_back({"max_points", "must be an integer >= " + std::to_string(kMinPoints)});
      j.erase(it);
    }
  }
  if (const Preset* p = ctx.find(preset)) c.scenario = p->spec;
  else issues.push_back({"preset", "unknown preset '" + preset + "'"});
  return j;
}

inline json envelope(const ScenarioSpec& resolved) {
  return {{"version", kVersion}, {"scenario", to_json(resolved)}};
}

inline json series_json(const Trajectory& tr) {
  json acts = json::array();
  for (const auto& a : tr.activations) acts.push_back({{"start_h", a.start_h}, {"end_h", a.end_h}});
  return {{"times", tr.times},         {"census", tr.census},
          {"boarders", tr.boarders},   {"occupancy", tr.occupancy},
          {"admitted_patients", tr.admitted_patients},
          {"protocol_active", tr.protocol_active},
          {"activations", acts}};
}

inline json error_body(const std::string& message, const std::vector<FieldIssue>& issues) {
  json fields = json::array();
  for (const auto& i : issues) fields.push_back({{"field", i.field}, {"message", i.message}});
  return {{"error", message}, {"fields", fields}, {"version", kVersion}};
}

}  // namespace detail

// -- Routes -------------------------------------------------------------------------

inline json simulate(const Context& ctx, const json& body) {
  std::vector<FieldIssue> issues;
  detail::Common c;
  json rest = detail::take_common(ctx, body, c, issues, "baseline");
  read_scenario(rest, "", c.scenario, issues);
  edflow::detail::throw_if(issues);
  RunResult run = run_scenario(c.scenario);
  json out = detail::envelope(c.scenario);
  out["points"] = run.trajectory.size();
  out["trajectory"] = to_json(decimate(run.trajectory, c.max_points));
  out["trajectory"]["decimated"] = out["trajectory"]["times"].size() < run.trajectory.size();
  json summary = json::object();
  auto s = summarize(run.trajectory);
  for (std::size_t q = 0; q < kRunSummaryNames.size(); ++q)
    summary[std::string(kRunSummaryNames[q])] = s[q];
  out["summary"] = summary;
  return out;
}

struct SweepRequest {
  ScenarioSpec scenario;
  std::size_t max_points = kMaxPoints;
  std::string parameter;
  double min = 0, max = 0;
};

inline SweepRequest parse_sweep(const Context& ctx, const json& body) {
  std::vector<FieldIssue> issues;
  detail::Common c;
  json rest = detail::take_common(ctx, body, c, issues, "stressed");
  SweepRequest r;
  r.scenario = c.scenario;
  r.max_points = c.max_points;
  {
    edflow::detail::ObjectReader rd(rest, "", issues);
    if (const json* s = rd.find("scenario")) read_scenario(*s, "scenario", r.scenario, issues);
    rd.string("parameter", r.parameter);
    bool has_min = rest.is_object() && rest.contains("min");
    bool has_max = rest.is_object() && rest.contains("max");
    rd.number("min", r.min);
    rd.number("max", r.max);
    rd.finish();
    if (r.parameter.empty()) issues.push_back({"parameter", "is required"});
    else if (!is_sweepable(r.parameter))
      issues.push_back({"parameter", "'" + r.parameter + "' is not sweepable"});
    if (!has_min) issues.push_back({"min", "is required"});
    if (!has_max) issues.push_back({"max", "is required"});
    if (has_min && has_max && !(r.min <= r.max)) issues.push_back({"min", "must be <= max"});
  }
  edflow::detail::throw_if(issues);
  return r;
}

inline json run_sweep(const Context& ctx, const json& body) {
  SweepRequest r = parse_sweep(ctx, body);
  SweepResult res = sweep(r.scenario, r.parameter, r.min, r.max);
  json out = detail::envelope(r.scenario);
  out["report"] = to_json(res.report);
  json runs = json::array();
  std::array<double, 3> inputs = {res.report.min_input, res.report.base_input, res.report.max_input};
  for (std::size_t i = 0; i < 3; ++i) {
    json s = detail::series_json(decimate(res.runs[i], r.max_points));
    s["input"] = inputs[i];
    runs.push_back(std::move(s));
  }
  out["runs"] = runs;
  return out;
}

struct MonteCarloRequest {
  ScenarioSpec scenario;
  std::size_t n = 200;
  std::uint64_t seed = 1;
  std::vector<ParameterRange> ranges = default_mc_ranges();
  bool include_bands = true;
};

inline MonteCarloRequest parse_montecarlo(const Context& ctx, const json& body) {
  std::vector<FieldIssue> issues;
  detail::Common c;
  json rest = detail::take_common(ctx, body, c, issues, "baseline");
  MonteCarloRequest r;
  r.scenario = c.scenario;
  {
    edflow::detail::ObjectReader rd(rest, "", issues);
    if (const json* s = rd.find("scenario")) read_scenario(*s, "scenario", r.scenario, issues);
    if (const json* v = rd.find("n")) {
      if (v->is_number_integer() && v->get<long long>() >= 1 &&
          v->get<long long>() <= static_cast<long long>(kMaxMonteCarloRuns))
        r.n = v->get<std::size_t>();
      else issues.push_back({"n", "must be an integer in 1.." + std::to_string(kMaxMonteCarloRuns)});
    }
    rd.uint64("seed", r.seed);
    if (const json* v = rd.find("ranges")) {
      try {
        r.ranges = ranges_from_json(*v);
      } catch (const SchemaError& e) {
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
      }
      if (r.ranges.empty()) issues.push_back({"ranges", "at least one range is required"});
    }
    rd.boolean("include_bands", r.include_bands);
    rd.finish();
  }
  edflow::detail::throw_if(issues);
  return r;
}

inline json montecarlo_json(const MonteCarloRequest& r, const MonteCarloResult& m) {
  json out = detail::envelope(r.scenario);
  out["result"] = to_json(m, r.include_bands);
  return out;
}

struct FitRequest {
  ScenarioSpec scenario;
  ObservedCensus observed;
};

inline json run_fit(const Context& ctx, const json& body) {
  std::vector<FieldIssue> issues;
  detail::Common c;
  json rest = detail::take_common(ctx, body, c, issues, "baseline");
  FitRequest r;
  r.scenario = c.scenario;
  {
    edflow::detail::ObjectReader rd(rest, "", issues);
    if (const json* s = rd.find("scenario")) read_scenario(*s, "scenario", r.scenario, issues);
    if (const json* o = rd.find("observed")) {
      edflow::detail::ObjectReader ord(*o, "observed", issues);
      ord.numbers("time_h", r.observed.time_h);
      ord.numbers("census", r.observed.census);
      ord.finish();
      if (r.observed.time_h.size() != r.observed.census.size())
        issues.push_back({"observed", "time_h and census must have the same length"});
      for (double v : r.observed.census)
        if (!(v >= 0.0)) {
          issues.push_back({"observed.census", "must be non-negative"});
          break;
        }
    } else {
      issues.push_back({"observed", "is required"});
    }
    rd.finish();
  }
  edflow::detail::throw_if(issues);
  FitReport f = compare_history(run_scenario(r.scenario).trajectory, r.observed);
  json out = detail::envelope(r.scenario);
  out["report"] = to_json(f);
  return out;
}

inline json presets_json(const Context& ctx) {
  json list = json::array();
  for (const auto& p : ctx.presets)
    list.push_back({{"name", p.name}, {"description", p.description}, {"scenario", to_json(p.spec)}});
  return {{"version", kVersion}, {"presets", list}};
}

inline json health_json() { return {{"status", "ok"}, {"version", kVersion}}; }

// Maps library exceptions to HTTP statuses.
template <class F>
Response guarded(F&& f) {
  try {
    return {200, f().dump(), "application/json"};
  } catch (const SchemaError& e) {
    return {400, detail::error_body(e.what(), e.issues()).dump(), "application/json"};
  } catch (const PhysicalRangeError& e) {
    return {422, detail::error_body(e.what(), {{e.field(), e.what()}}).dump(), "application/json"};
  } catch (const ValidationError& e) {
    return {400, detail::error_body(e.what(), {{e.field(), e.what()}}).dump(), "application/json"};
  } catch (const NumericError& e) {
    return {500, detail::error_body(e.what(), {}).dump(), "application/json"};
  }
}

inline Response handle(const Context& ctx, const Request& req) {
  auto route = [&](const char* method, const char* path) {
    return req.method == method && req.path == path;
  };
  if (route("GET", "/api/health")) return guarded([] { return health_json(); });
  if (route("GET", "/api/presets")) return guarded([&] { return presets_json(ctx); });
  if (route("POST", "/api/simulate"))
    return guarded([&] { return simulate(ctx, detail::parse_body(req.body)); });
  if (route("POST", "/api/sweep"))
    return guarded([&] { return run_sweep(ctx, detail::parse_body(req.body)); });
  if (route("POST", "/api/montecarlo"))
    return guarded([&] {
      auto r = parse_montecarlo(ctx, detail::parse_body(req.body));
      return montecarlo_json(r, monte_carlo(r.scenario, r.ranges, r.n, r.seed));
    });
  if (route("POST", "/api/fit"))
    return guarded([&] { return run_fit(ctx, detail::parse_body(req.body)); });
  return {404, detail::error_body("no route for " + req.method + " " + req.path, {}).dump(),
          "application/json"};
}

// -- httplib wiring ------------------------------------------------------------------

namespace detail {

// Runs a Monte Carlo batch, emitting one NDJSON line per finished run and a
// final line holding the full response.
inline bool stream_montecarlo(const MonteCarloRequest& r, httplib::DataSink& sink) {
  std::mutex m;
  std::condition_variable cv;
  std::deque<std::size_t> ticks;
  bool finished = false;
  auto fut = std::async(std::launch::async, [&] {
    struct Done {
      std::mutex& m;
      std::condition_variable& cv;
      bool& finished;
      ~Done() {
        std::lock_guard lock(m);
        finished = true;
        cv.notify_all();
      }
    } done{m, cv, finished};
    return monte_carlo(r.scenario, r.ranges, r.n, r.seed, 0, [&](std::size_t d, std::size_t) {
      std::lock_guard lock(m);
      ticks.push_back(d);
      cv.notify_all();
    });
  });
  bool open = true;
  for (;;) {
    std::unique_lock lock(m);
    cv.wait(lock, [&] { return finished || !ticks.empty(); });
    while (!ticks.empty()) {
      std::string line = json{{"progress", ticks.front()}, {"total", r.n}}.dump() + "\n";
      ticks.pop_front();
      if (open) open = sink.write(line.data(), line.size());
    }
    if (finished) break;
  }
  std::string last;
  try {
    last = montecarlo_json(r, fut.get()).dump() + "\n";
  } catch (const std::exception& e) {
    last = error_body(e.what(), {}).dump() + "\n";
  }
  if (open) open = sink.write(last.data(), last.size());
  sink.done();
  return open;
}

inline std::map<std::string, std::string> query_of(const httplib::Request& req) {
  std::map<std::string, std::string> q;
  for (const auto& [k, v] : req.params) q[k] = v;
  return q;
}

}  // namespace detail

inline void mount(httplib::Server& svr, std::shared_ptr<const Context> ctx) {
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  auto forward = [ctx](const httplib::Request& req, httplib::Response& res) {
    Response out = handle(*ctx, {req.method, req.path, detail::query_of(req), req.body});
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  svr.Get(R"(/api/.*)", forward);
  svr.Post(R"(/api/montecarlo)", [ctx, forward](const httplib::Request& req,
                                                 httplib::Response& res) {
    if (req.get_param_value("stream") != "1") return forward(req, res);
    MonteCarloRequest r;
    try {
      r = parse_montecarlo(*ctx, detail::parse_body(req.body));
      r.scenario.validate();
    } catch (...) {
      return forward(req, res);
    }
    res.set_chunked_content_provider(
        "application/x-ndjson",
        [r](std::size_t, httplib::DataSink& sink) { return detail::stream_montecarlo(r, sink); });
  });
  svr.Post(R"(/api/.*)", forward);
}

struct ServerConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  std::string preset_dir;
};

inline ServerConfig config_from_env(ServerConfig c = {}) {
  if (const char* b = std::getenv("EDFLOW_BIND"); b && *b) c.bind = b;
  if (const char* p = std::getenv("EDFLOW_PORT"); p && *p) {
    try {
      c.port = std::stoi(p);
    } catch (const std::exception&) {
      throw ValidationError("EDFLOW_PORT", std::string("not a port number: '") + p + "'");
    }
    if (c.port < 0 || c.port > 65535) throw ValidationError("EDFLOW_PORT", "must lie in 0..65535");
  }
  return c;
}

// -- OpenAPI ---------------------------------------------------------------------------

inline std::string openapi_yaml() {
  std::string v = kVersion;
  return R"(openapi: 3.0.3
info:
  title: edflow simulation service
  version: )" + v + R"(
  description: >
    Runs the emergency-department stock-and-flow model. Every response carries
    the engine version and the resolved scenario (request merged over the named
    preset). Trajectories are decimated to at most max_points samples per
    series (default and ceiling 2000), keeping endpoints, protocol switches and
    per-window extrema of the four reported outputs.
servers:
  - url: http://127.0.0.1:8080
paths:
  /api/health:
    get:
      summary: Liveness and version.
      responses:
        "200":
          description: Service is up.
          content:
            application/json:
              schema:
                type: object
                properties:
                  status: {type: string, enum: [ok]}
                  version: {type: string}
  /api/presets:
    get:
      summary: Named scenarios shipped with the service.
      responses:
        "200":
          description: Preset list.
          content:
            application/json:
              schema:
                type: object
                properties:
                  version: {type: string}
                  presets:
                    type: array
                    items:
                      type: object
                      properties:
                        name: {type: string}
                        description: {type: string}
                        scenario: {$ref: "#/components/schemas/ScenarioSpec"}
  /api/simulate:
    post:
      summary: Run one scenario.
      description: An empty body runs the baseline preset with all defaults.
      requestBody:
        content:
          application/json:
            schema:
              allOf:
                - $ref: "#/components/schemas/ScenarioSpec"
                - $ref: "#/components/schemas/Common"
      responses:
        "200":
          description: Trajectory of the run.
          content:
            application/json:
              schema:
                type: object
                properties:
                  version: {type: string}
                  scenario: {$ref: "#/components/schemas/ScenarioSpec"}
                  points: {type: integer, description: Samples before decimation.}
                  trajectory: {$ref: "#/components/schemas/Trajectory"}
                  summary: {$ref: "#/components/schemas/RunSummary"}
        "400": {$ref: "#/components/responses/SchemaError"}
        "422": {$ref: "#/components/responses/RangeError"}
  /api/sweep:
    post:
      summary: One-at-a-time sensitivity sweep (min, base, max).
      requestBody:
        required: true
        content:
          application/json:
            schema:
              allOf:
                - $ref: "#/components/schemas/Common"
                - type: object
                  required: [parameter, min, max]
                  properties:
                    scenario: {$ref: "#/components/schemas/ScenarioSpec"}
                    parameter:
                      type: string
                      enum: [boarder_trigger, census_trigger, transfer_time_h,
                             bed_assign_time_h, total_beds, mean_elective_per_day]
                    min: {type: number}
                    max: {type: number}
      responses:
        "200":
          description: Sensitivity report and the three runs (outputs only).
          content:
            application/json:
              schema:
                type: object
                properties:
                  version: {type: string}
                  scenario: {$ref: "#/components/schemas/ScenarioSpec"}
                  report: {$ref: "#/components/schemas/SensitivityReport"}
                  runs:
                    type: array
                    items: {$ref: "#/components/schemas/OutputSeries"}
        "400": {$ref: "#/components/responses/SchemaError"}
        "422": {$ref: "#/components/responses/RangeError"}
  /api/montecarlo:
    post:
      summary: Monte Carlo batch over uniform parameter ranges.
      description: >
        With ?stream=1 the response is chunked NDJSON: one
        {"progress": k, "total": n} line per finished run, then one line with
        the same object the non-streaming call returns.
      parameters:
        - name: stream
          in: query
          schema: {type: string, enum: ["0", "1"]}
      requestBody:
        content:
          application/json:
            schema:
              allOf:
                - $ref: "#/components/schemas/Common"
                - type: object
                  properties:
                    scenario: {$ref: "#/components/schemas/ScenarioSpec"}
                    n: {type: integer, minimum: 1, maximum: 5000, default: 200}
                    seed: {type: integer, minimum: 0, default: 1}
                    include_bands: {type: boolean, default: true}
                    ranges:
                      type: object
                      description: Parameter name to [min, max] or {min, max}.
                      additionalProperties:
                        oneOf:
                          - type: array
                            items: {type: number}
                            minItems: 2
                            maxItems: 2
                          - type: object
                            properties:
                              min: {type: number}
                              max: {type: number}
      responses:
        "200":
          description: Per-run summaries, percentiles and time-series bands.
          content:
            application/json:
              schema:
                type: object
                properties:
                  version: {type: string}
                  scenario: {$ref: "#/components/schemas/ScenarioSpec"}
                  result: {type: object}
            application/x-ndjson:
              schema: {type: string}
        "400": {$ref: "#/components/responses/SchemaError"}
        "422": {$ref: "#/components/responses/RangeError"}
  /api/fit:
    post:
      summary: Compare a run's census with an observed series.
      requestBody:
        required: true
        content:
          application/json:
            schema:
              allOf:
                - $ref: "#/components/schemas/Common"
                - type: object
                  required: [observed]
                  properties:
                    scenario: {$ref: "#/components/schemas/ScenarioSpec"}
                    observed:
                      type: object
                      properties:
                        time_h: {type: array, items: {type: number}}
                        census: {type: array, items: {type: number, minimum: 0}}
      responses:
        "200":
          description: Fit report.
          content:
            application/json:
              schema:
                type: object
                properties:
                  version: {type: string}
                  scenario: {$ref: "#/components/schemas/ScenarioSpec"}
                  report:
                    type: object
                    properties:
                      rmse: {type: number}
                      mae: {type: number}
                      samples: {type: integer}
                      horizon_start_h: {type: number}
                      horizon_end_h: {type: number}
        "400": {$ref: "#/components/responses/SchemaError"}
components:
  responses:
    SchemaError:
      description: Malformed body, unknown field or invalid name.
      content:
        application/json:
          schema: {$ref: "#/components/schemas/Error"}
    RangeError:
      description: Well-formed but physically invalid value.
      content:
        application/json:
          schema: {$ref: "#/components/schemas/Error"}
  schemas:
    Error:
      type: object
      properties:
        error: {type: string}
        version: {type: string}
        fields:
          type: array
          items:
            type: object
            properties:
              field: {type: string}
              message: {type: string}
    Common:
      type: object
      properties:
        preset: {type: string, description: Base scenario for unspecified fields.}
        max_points: {type: integer, minimum: 10, maximum: 2000}
    ScenarioSpec:
      type: object
      additionalProperties: false
      properties:
        label: {type: string}
        seed: {type: integer, minimum: 0}
        params: {$ref: "#/components/schemas/EdParameters"}
        grid:
          type: object
          additionalProperties: false
          properties:
            start_h: {type: number}
            end_h: {type: number}
            dt_h: {type: number, exclusiveMinimum: true, minimum: 0}
        exogenous:
          type: object
          additionalProperties: false
          properties:
            kind: {type: string, enum: [none, pulse, step, ramp, sine]}
            height: {type: number}
            start_h: {type: number}
            width_h: {type: number}
            period_h: {type: number}
            baseline: {type: number}
        surge_admit_fraction: {type: number}
        surge_admit_delay_h: {type: number}
        warmup_days: {type: integer, minimum: 0}
        initial:
          nullable: true
          type: object
          properties:
            ed_in_treatment: {type: number}
            awaiting_bed: {type: number}
            boarders: {type: number}
            inpatients: {type: number}
            return_rate: {type: number}
    EdParameters:
      type: object
      additionalProperties: false
      properties:
        total_beds: {type: number}
        bed_assign_time_h: {type: number}
        transfer_time_h: {type: number}
        mean_elective_per_day: {type: number}
        elective_sd_per_day: {type: number}
        admit_fraction: {type: number}
        ed_treatment_time_h: {type: number}
        normal_release_time_h: {type: number}
        policy_release_factor: {type: number}
        return_fraction_normal: {type: number}
        return_fraction_policy: {type: number}
        return_delay_h: {type: number}
        protocol_effect_delay_h: {type: number}
        boarder_trigger: {type: number}
        census_trigger: {type: number}
        trigger_window_h: {type: number}
        ed_priority_exponent: {type: number}
        diurnal_multipliers: {type: array, items: {type: number}, minItems: 24, maxItems: 24}
        daily_mean_arrivals: {type: array, items: {type: number}, minItems: 7, maxItems: 7}
        start_weekday: {type: integer, minimum: 0, maximum: 6}
        protocol_enabled: {type: boolean}
    Activation:
      type: object
      properties:
        start_h: {type: number}
        end_h: {type: number}
    OutputSeries:
      type: object
      properties:
        input: {type: number}
        times: {type: array, items: {type: number}}
        census: {type: array, items: {type: number}}
        boarders: {type: array, items: {type: number}}
        occupancy: {type: array, items: {type: number}}
        admitted_patients: {type: array, items: {type: number}}
        protocol_active: {type: array, items: {type: boolean}}
        activations: {type: array, items: {$ref: "#/components/schemas/Activation"}}
    Trajectory:
      type: object
      properties:
        label: {type: string}
        dt_h: {type: number}
        decimated: {type: boolean}
        times: {type: array, items: {type: number}}
        census: {type: array, items: {type: number}}
        boarders: {type: array, items: {type: number}}
        occupancy: {type: array, items: {type: number}}
        admitted_patients: {type: array, items: {type: number}}
        cum_admitted_elective: {type: array, items: {type: number}}
        awaiting_bed: {type: array, items: {type: number}}
        ed_in_treatment: {type: array, items: {type: number}}
        effective_release_time: {type: array, items: {type: number}}
        cum_returns: {type: array, items: {type: number}}
        protocol_active: {type: array, items: {type: boolean}}
        flows: {type: object, additionalProperties: {type: array, items: {type: number}}}
        activations: {type: array, items: {$ref: "#/components/schemas/Activation"}}
    RunSummary:
      type: object
      properties:
        mean_occupancy: {type: number}
        mean_census: {type: number}
        mean_boarders: {type: number}
        mean_admitted_patients: {type: number}
        peak_census: {type: number}
        peak_boarders: {type: number}
    SensitivityReport:
      type: object
      properties:
        parameter: {type: string}
        scenario: {type: string}
        min_input: {type: number}
        base_input: {type: number}
        max_input: {type: number}
        outputs:
          type: array
          items:
            type: object
            properties:
              output: {type: string}
              min_value: {type: number}
              base_value: {type: number}
              max_value: {type: number}
              min_pct: {type: number}
              max_pct: {type: number}
              divergence_time_h: {type: number}
)";
}

}  // namespace edflow::service
