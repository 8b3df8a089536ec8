#pragma once

// JSON and CSV serialization. JSON readers are strict: unknown keys and
// wrongly typed values are reported per field; absent keys keep defaults.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edflow/fit.hpp"
#include "edflow/scenario.hpp"
#include "edflow/sensitivity.hpp"

namespace edflow {

using json = nlohmann::json;

struct FieldIssue {
  std::string field;
  std::string message;

  bool operator==(const FieldIssue&) const = default;
};

// Schema problems found while reading a JSON document, all of them.
class SchemaError : public ValidationError {
 public:
  explicit SchemaError(std::vector<FieldIssue> issues)
      : ValidationError(issues.empty() ? "" : issues.front().field, summary(issues)),
        issues_(std::move(issues)) {}

  const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

 private:
  static std::string summary(const std::vector<FieldIssue>& issues) {
    std::string s;
    for (const auto& i : issues) {
      if (!s.empty()) s += "; ";
      s += i.field + " " + i.message;
    }
    return s;
  }
  std::vector<FieldIssue> issues_;
};

namespace detail {

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::vector<FieldIssue>& issues)
      : j_(j), path_(std::move(path)), issues_(issues) {
    if (!j_.is_object()) fail(path_.empty() ? "(body)" : path_, "must be an object");
  }

  ~ObjectReader() = default;
  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    if (!j_.is_object()) return nullptr;
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_number()) out = v->get<double>();
      else fail(field(key), "must be a number");
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (v->is_number_integer()) out = v->get<int>();
      else fail(field(key), "must be an integer");
    }
  }

  void uint64(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned() || (v->is_number_integer() && v->get<long long>() >= 0))
        out = v->get<std::uint64_t>();
      else fail(field(key), "must be a non-negative integer");
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (v->is_boolean()) out = v->get<bool>();
      else fail(field(key), "must be a boolean");
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) out = v->get<std::string>();
      else fail(field(key), "must be a string");
    }
  }

  template <std::size_t N>
  void numbers(const std::string& key, std::array<double, N>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != N) {
        fail(field(key), "must be an array of " + std::to_string(N) + " numbers");
        return;
      }
      for (std::size_t i = 0; i < N; ++i) {
        if (!(*v)[i].is_number()) {
          fail(field(key) + "[" + std::to_string(i) + "]", "must be a number");
          return;
        }
        out[i] = (*v)[i].get<double>();
      }
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) {
        fail(field(key), "must be an array of numbers");
        return;
      }
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) {
          fail(field(key), "must contain only numbers");
          return;
        }
        out.push_back(x.get<double>());
      }
    }
  }

  void finish() {
    if (!j_.is_object()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(field(it.key()), "is not a recognised field");
  }

  void fail(const std::string& f, const std::string& msg) { issues_.push_back({f, msg}); }

 private:
  const json& j_;
  std::string path_;
  std::vector<FieldIssue>& issues_;
  std::set<std::string> seen_;
};

inline void throw_if(std::vector<FieldIssue>& issues) {
  if (!issues.empty()) throw SchemaError(std::move(issues));
}

}  // namespace detail

// -- EdParameters -----------------------------------------------------------------

inline json to_json(const EdParameters& p) {
  json j = json::object();
  for (const auto& [name, member] : kScalarParameters) j[std::string(name)] = p.*member;
  j["diurnal_multipliers"] = p.diurnal_multipliers;
  j["daily_mean_arrivals"] = p.daily_mean_arrivals;
  j["start_weekday"] = p.start_weekday;
  j["protocol_enabled"] = p.protocol_enabled;
  return j;
}

inline void read_parameters(const json& j, const std::string& path, EdParameters& p,
                            std::vector<FieldIssue>& issues) {
  detail::ObjectReader r(j, path, issues);
  for (const auto& [name, member] : kScalarParameters) r.number(std::string(name), p.*member);
  r.numbers("diurnal_multipliers", p.diurnal_multipliers);
  r.numbers("daily_mean_arrivals", p.daily_mean_arrivals);
  r.integer("start_weekday", p.start_weekday);
  r.boolean("protocol_enabled", p.protocol_enabled);
  r.finish();
}

inline EdParameters parameters_from_json(const json& j, EdParameters p = {}) {
  std::vector<FieldIssue> issues;
  read_parameters(j, "", p, issues);
  detail::throw_if(issues);
  return p;
}

// -- ScenarioSpec -----------------------------------------------------------------

inline json to_json(const TimeGrid& g) {
  return {{"start_h", g.start_h}, {"end_h", g.end_h}, {"dt_h", g.dt_h}};
}

inline json to_json(const InputSignal& s) {
  return {{"kind", to_string(s.kind)}, {"height", s.height},     {"start_h", s.start_h},
          {"width_h", s.width_h},      {"period_h", s.period_h}, {"baseline", s.baseline}};
}

inline json to_json(const InitialStocks& s) {
  return {{"ed_in_treatment", s.ed_in_treatment},
          {"awaiting_bed", s.awaiting_bed},
          {"boarders", s.boarders},
          {"inpatients", s.inpatients},
          {"return_rate", s.return_rate}};
}

inline json to_json(const ScenarioSpec& s) {
  json j = {{"label", s.label},
            {"seed", s.seed},
            {"params", to_json(s.params)},
            {"grid", to_json(s.grid)},
            {"exogenous", to_json(s.exogenous)},
            {"surge_admit_fraction", s.surge_admit_fraction},
            {"surge_admit_delay_h", s.surge_admit_delay_h},
            {"warmup_days", s.warmup_days}};
  j["initial"] = s.initial ? to_json(*s.initial) : json(nullptr);
  return j;
}

inline void read_scenario(const json& j, const std::string& path, ScenarioSpec& s,
                          std::vector<FieldIssue>& issues) {
  detail::ObjectReader r(j, path, issues);
  r.string("label", s.label);
  r.uint64("seed", s.seed);
  if (const json* v = r.find("params")) read_parameters(*v, r.field("params"), s.params, issues);
  if (const json* v = r.find("grid")) {
    detail::ObjectReader g(*v, r.field("grid"), issues);
    g.number("start_h", s.grid.start_h);
    g.number("end_h", s.grid.end_h);
    g.number("dt_h", s.grid.dt_h);
    g.finish();
  }
  if (const json* v = r.find("exogenous")) {
    detail::ObjectReader e(*v, r.field("exogenous"), issues);
    std::string kind = to_string(s.exogenous.kind);
    e.string("kind", kind);
    try {
      s.exogenous.kind = parse_signal_kind(kind);
    } catch (const ValidationError& err) {
      e.fail(e.field("kind"), "unknown signal kind '" + kind + "'");
    }
    e.number("height", s.exogenous.height);
    e.number("start_h", s.exogenous.start_h);
    e.number("width_h", s.exogenous.width_h);
    e.number("period_h", s.exogenous.period_h);
    e.number("baseline", s.exogenous.baseline);
    e.finish();
  }
  r.number("surge_admit_fraction", s.surge_admit_fraction);
  r.number("surge_admit_delay_h", s.surge_admit_delay_h);
  r.integer("warmup_days", s.warmup_days);
  if (const json* v = r.find("initial")) {
    if (v->is_null()) {
      s.initial.reset();
    } else {
      InitialStocks init = s.initial.value_or(InitialStocks{});
      detail::ObjectReader i(*v, r.field("initial"), issues);
      i.number("ed_in_treatment", init.ed_in_treatment);
      i.number("awaiting_bed", init.awaiting_bed);
      i.number("boarders", init.boarders);
      i.number("inpatients", init.inpatients);
      i.number("return_rate", init.return_rate);
      i.finish();
      s.initial = init;
    }
  }
  r.finish();
}

// Missing keys fall back to `defaults`.
inline ScenarioSpec scenario_from_json(const json& j, ScenarioSpec defaults = baseline_scenario()) {
  std::vector<FieldIssue> issues;
  read_scenario(j, "", defaults, issues);
  detail::throw_if(issues);
  return defaults;
}

// -- Trajectory -------------------------------------------------------------------

inline json to_json(const Trajectory& t) {
  json flows = {{"arrivals", t.flows.arrivals},
                {"return_arrivals", t.flows.return_arrivals},
                {"treatment_complete", t.flows.treatment_complete},
                {"to_bed_request", t.flows.to_bed_request},
                {"direct_discharge", t.flows.direct_discharge},
                {"bed_assignment", t.flows.bed_assignment},
                {"transfer", t.flows.transfer},
                {"elective_admission", t.flows.elective_admission},
                {"ward_discharge", t.flows.ward_discharge},
                {"returns", t.flows.returns}};
  json acts = json::array();
  for (const auto& a : t.activations) acts.push_back({{"start_h", a.start_h}, {"end_h", a.end_h}});
  return {{"label", t.label},
          {"dt_h", t.dt_h},
          {"times", t.times},
          {"census", t.census},
          {"boarders", t.boarders},
          {"occupancy", t.occupancy},
          {"admitted_patients", t.admitted_patients},
          {"cum_admitted_elective", t.cum_admitted_elective},
          {"awaiting_bed", t.awaiting_bed},
          {"ed_in_treatment", t.ed_in_treatment},
          {"effective_release_time", t.effective_release_time},
          {"cum_returns", t.cum_returns},
          {"protocol_active", t.protocol_active},
          {"flows", flows},
          {"activations", acts}};
}

inline Trajectory trajectory_from_json(const json& j) {
  std::vector<FieldIssue> issues;
  Trajectory t;
  {
    detail::ObjectReader r(j, "", issues);
    r.string("label", t.label);
    r.number("dt_h", t.dt_h);
    r.numbers("times", t.times);
    r.numbers("census", t.census);
    r.numbers("boarders", t.boarders);
    r.numbers("occupancy", t.occupancy);
    r.numbers("admitted_patients", t.admitted_patients);
    r.numbers("cum_admitted_elective", t.cum_admitted_elective);
    r.numbers("awaiting_bed", t.awaiting_bed);
    r.numbers("ed_in_treatment", t.ed_in_treatment);
    r.numbers("effective_release_time", t.effective_release_time);
    r.numbers("cum_returns", t.cum_returns);
    if (const json* v = r.find("protocol_active")) {
      if (!v->is_array()) r.fail("protocol_active", "must be an array of booleans");
      else
        for (const auto& b : *v) {
          if (!b.is_boolean()) {
            r.fail("protocol_active", "must contain only booleans");
            break;
          }
          t.protocol_active.push_back(b.get<bool>());
        }
    }
    if (const json* v = r.find("flows")) {
      detail::ObjectReader f(*v, "flows", issues);
      f.numbers("arrivals", t.flows.arrivals);
      f.numbers("return_arrivals", t.flows.return_arrivals);
      f.numbers("treatment_complete", t.flows.treatment_complete);
      f.numbers("to_bed_request", t.flows.to_bed_request);
      f.numbers("direct_discharge", t.flows.direct_discharge);
      f.numbers("bed_assignment", t.flows.bed_assignment);
      f.numbers("transfer", t.flows.transfer);
      f.numbers("elective_admission", t.flows.elective_admission);
      f.numbers("ward_discharge", t.flows.ward_discharge);
      f.numbers("returns", t.flows.returns);
      f.finish();
    }
    if (const json* v = r.find("activations")) {
      if (!v->is_array()) r.fail("activations", "must be an array");
      else
        for (const auto& a : *v) {
          ActivationInterval iv;
          detail::ObjectReader ar(a, "activations[]", issues);
          ar.number("start_h", iv.start_h);
          ar.number("end_h", iv.end_h);
          ar.finish();
          t.activations.push_back(iv);
        }
    }
    r.finish();
  }
  detail::throw_if(issues);
  return t;
}

// -- Reports ----------------------------------------------------------------------

inline json to_json(const SensitivityReport& r) {
  json outs = json::array();
  for (const auto& d : r.outputs)
    outs.push_back({{"output", d.output},
                    {"min_value", d.min_value},
                    {"base_value", d.base_value},
                    {"max_value", d.max_value},
                    {"min_pct", d.min_pct},
                    {"max_pct", d.max_pct},
                    {"divergence_time_h", d.divergence_time_h}});
  return {{"parameter", r.parameter}, {"scenario", r.scenario}, {"min_input", r.min_input},
          {"base_input", r.base_input}, {"max_input", r.max_input}, {"outputs", outs}};
}

inline SensitivityReport sensitivity_report_from_json(const json& j) {
  std::vector<FieldIssue> issues;
  SensitivityReport rep;
  {
    detail::ObjectReader r(j, "", issues);
    r.string("parameter", rep.parameter);
    r.string("scenario", rep.scenario);
    r.number("min_input", rep.min_input);
    r.number("base_input", rep.base_input);
    r.number("max_input", rep.max_input);
    if (const json* v = r.find("outputs")) {
      if (!v->is_array()) r.fail("outputs", "must be an array");
      else
        for (const auto& o : *v) {
          OutputDeviation d;
          detail::ObjectReader orr(o, "outputs[]", issues);
          orr.string("output", d.output);
          orr.number("min_value", d.min_value);
          orr.number("base_value", d.base_value);
          orr.number("max_value", d.max_value);
          orr.number("min_pct", d.min_pct);
          orr.number("max_pct", d.max_pct);
          orr.number("divergence_time_h", d.divergence_time_h);
          orr.finish();
          rep.outputs.push_back(d);
        }
    }
    r.finish();
  }
  detail::throw_if(issues);
  return rep;
}

inline json to_json(const FitReport& f) {
  return {{"rmse", f.rmse},
          {"mae", f.mae},
          {"samples", f.samples},
          {"horizon_start_h", f.horizon_start_h},
          {"horizon_end_h", f.horizon_end_h}};
}

inline FitReport fit_report_from_json(const json& j) {
  std::vector<FieldIssue> issues;
  FitReport f;
  {
    detail::ObjectReader r(j, "", issues);
    r.number("rmse", f.rmse);
    r.number("mae", f.mae);
    if (const json* v = r.find("samples")) {
      if (v->is_number_unsigned()) f.samples = v->get<std::size_t>();
      else r.fail("samples", "must be a non-negative integer");
    }
    r.number("horizon_start_h", f.horizon_start_h);
    r.number("horizon_end_h", f.horizon_end_h);
    r.finish();
  }
  detail::throw_if(issues);
  return f;
}

inline json to_json(const ParameterRange& r) { return {{"min", r.min}, {"max", r.max}}; }

// {"total_beds": [400, 900], ...} or {"total_beds": {"min": 400, "max": 900}, ...}
inline std::vector<ParameterRange> ranges_from_json(const json& j) {
  std::vector<FieldIssue> issues;
  std::vector<ParameterRange> out;
  if (!j.is_object()) {
    issues.push_back({"ranges", "must be an object keyed by parameter name"});
  } else {
    for (auto it = j.begin(); it != j.end(); ++it) {
      ParameterRange r{it.key(), 0, 0};
      std::string f = "ranges." + it.key();
      try {
        scalar_parameter(it.key());
      } catch (const ValidationError&) {
        issues.push_back({f, "is not a known parameter"});
        continue;
      }
      const json& v = it.value();
      if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        r.min = v[0].get<double>();
        r.max = v[1].get<double>();
      } else if (v.is_object()) {
        detail::ObjectReader rr(v, f, issues);
        rr.number("min", r.min);
        rr.number("max", r.max);
        rr.finish();
      } else {
        issues.push_back({f, "must be [min, max] or {\"min\":..,\"max\":..}"});
        continue;
      }
      if (r.min > r.max) issues.push_back({f, "min must be <= max"});
      out.push_back(r);
    }
  }
  detail::throw_if(issues);
  return out;
}

inline json to_json(const MonteCarloResult& m, bool include_bands = true) {
  json ranges = json::object();
  for (const auto& r : m.ranges) ranges[r.name] = to_json(r);
  json runs = json::array();
  for (const auto& r : m.runs) {
    json inputs = json::object();
    for (std::size_t i = 0; i < m.ranges.size(); ++i) inputs[m.ranges[i].name] = r.inputs[i];
    json outputs = json::object();
    for (std::size_t q = 0; q < kRunSummaryNames.size(); ++q)
      outputs[std::string(kRunSummaryNames[q])] = r.outputs[q];
    runs.push_back({{"run", r.index},
                    {"inputs", inputs},
                    {"outputs", outputs},
                    {"protocol_activated", r.protocol_activated}});
  }
  json base = json::object();
  for (std::size_t q = 0; q < kRunSummaryNames.size(); ++q)
    base[std::string(kRunSummaryNames[q])] = m.base_outputs[q];
  json summary = json::object();
  for (const auto& s : m.summary) summary[s.name] = {{"p5", s.p5}, {"p50", s.p50}, {"p95", s.p95}};
  json j = {{"scenario", m.scenario}, {"seed", m.seed},       {"n", m.runs.size()},
            {"ranges", ranges},       {"base_outputs", base}, {"summary", summary},
            {"runs", runs}};
  if (include_bands) {
    json bands = json::object();
    for (const auto& b : m.bands) bands[b.output] = {{"p5", b.p5}, {"p50", b.p50}, {"p95", b.p95}};
    j["times"] = m.times;
    j["bands"] = bands;
  }
  return j;
}

// -- CSV ----------------------------------------------------------------------------

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_percent(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  return s == "-0.00" ? "0.00" : s;
}

inline void write_csv(std::ostream& os, const Trajectory& t) {
  os << "time_h,census,boarders,occupancy,admitted_patients,cum_admitted_elective,awaiting_bed,"
        "ed_in_treatment,effective_release_time_h,cum_returns,protocol_active,arrivals,"
        "return_arrivals,treatment_complete,to_bed_request,direct_discharge,bed_assignment,"
        "transfer,elective_admission,ward_discharge,returns\n";
  const auto& f = t.flows;
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << format_number(t.times[k]) << ',' << format_number(t.census[k]) << ','
       << format_number(t.boarders[k]) << ',' << format_number(t.occupancy[k]) << ','
       << format_number(t.admitted_patients[k]) << ',' << format_number(t.cum_admitted_elective[k])
       << ',' << format_number(t.awaiting_bed[k]) << ',' << format_number(t.ed_in_treatment[k])
       << ',' << format_number(t.effective_release_time[k]) << ','
       << format_number(t.cum_returns[k]) << ',' << (t.protocol_active[k] ? 1 : 0) << ','
       << format_number(f.arrivals[k]) << ',' << format_number(f.return_arrivals[k]) << ','
       << format_number(f.treatment_complete[k]) << ',' << format_number(f.to_bed_request[k])
       << ',' << format_number(f.direct_discharge[k]) << ',' << format_number(f.bed_assignment[k])
       << ',' << format_number(f.transfer[k]) << ',' << format_number(f.elective_admission[k])
       << ',' << format_number(f.ward_discharge[k]) << ',' << format_number(f.returns[k]) << '\n';
  }
}

// One row per output, laid out like the sensitivity tables: min, base, max,
// deviations in percent (two decimals) and the time of maximum divergence.
inline void write_csv(std::ostream& os, const SensitivityReport& r) {
  os << "parameter,scenario,min_input,base_input,max_input,output,min_value,min_pct,base_value,"
        "max_value,max_pct,time_max_diff_h\n";
  for (const auto& d : r.outputs)
    os << r.parameter << ',' << r.scenario << ',' << format_number(r.min_input) << ','
       << format_number(r.base_input) << ',' << format_number(r.max_input) << ',' << d.output
       << ',' << format_number(d.min_value) << ',' << format_percent(d.min_pct) << ','
       << format_number(d.base_value) << ',' << format_number(d.max_value) << ','
       << format_percent(d.max_pct) << ',' << format_number(d.divergence_time_h) << '\n';
}

inline void write_csv(std::ostream& os, const FitReport& f) {
  os << "rmse,mae,samples,horizon_start_h,horizon_end_h\n"
     << format_number(f.rmse) << ',' << format_number(f.mae) << ',' << f.samples << ','
     << format_number(f.horizon_start_h) << ',' << format_number(f.horizon_end_h) << '\n';
}

// One row per run.
inline void write_csv(std::ostream& os, const MonteCarloResult& m) {
  os << "run";
  for (const auto& r : m.ranges) os << ',' << r.name;
  for (auto n : kRunSummaryNames) os << ',' << n;
  os << ",protocol_activated\n";
  for (const auto& r : m.runs) {
    os << r.index;
    for (double v : r.inputs) os << ',' << format_number(v);
    for (double v : r.outputs) os << ',' << format_number(v);
    os << ',' << (r.protocol_activated ? 1 : 0) << '\n';
  }
}

// -- Files ----------------------------------------------------------------------------

enum class Format { csv, json };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw ValidationError("format", "expected csv or json, got '" + s + "'");
}

inline Format format_from_path(const std::string& path, Format fallback = Format::csv) {
  auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".json") return Format::json;
  if (ext == ".csv") return Format::csv;
  return fallback;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const std::string& path) {
  std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(path, std::string("invalid JSON: ") + e.what());
  }
}

template <class T>
std::string serialize(const T& value, Format format) {
  if (format == Format::json) return to_json(value).dump(2) + "\n";
  std::ostringstream os;
  write_csv(os, value);
  return os.str();
}

template <class T>
void export_result(const T& value, Format format, const std::string& path) {
  write_text_file(path, serialize(value, format));
}

}  // namespace edflow
