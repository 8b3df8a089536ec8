#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edflow/fit.hpp"
#include "edflow/io.hpp"
#include "edflow/presets.hpp"
#include "edflow/sensitivity.hpp"
#include "edflow/version.hpp"

namespace {

using namespace edflow;

struct Globals {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::string preset_dir;
};

// A preset name, or a path to a scenario JSON file.
ScenarioSpec resolve_scenario(const Globals& g, const std::string& preset,
                              const std::vector<std::string>& params) {
  ScenarioSpec s = preset.ends_with(".json") ? scenario_from_json(read_json_file(preset))
                                             : load_preset(preset, g.preset_dir);
  for (const auto& kv : params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--param", "expected k=v, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    set_parameter(s.params, key, edflow::detail::parse_number(kv.substr(eq + 1), key));
  }
  if (g.dt) s.grid.dt_h = *g.dt;
  if (g.horizon) s.grid.end_h = s.grid.start_h + *g.horizon;
  s.validate();
  return s;
}

template <class T>
void emit(const T& value, const std::string& out, const std::string& format) {
  Format f = format.empty() ? format_from_path(out) : parse_format(format);
  if (out.empty() || out == "-") std::cout << serialize(value, f);
  else export_result(value, f, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emergency-department patient flow simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--dt", g.dt, "Integration step in hours (default 1/6)");
  app.add_option("--horizon", g.horizon, "Simulated span in hours (default 168)");
  app.add_option("--preset-dir", g.preset_dir, "Directory holding <name>.json presets");

  std::string preset, out, format;
  std::vector<std::string> params;

  auto* run = app.add_subcommand("run", "Simulate one scenario and write its trajectory");
  run->add_option("--preset", preset, "baseline, stressed, or a scenario .json file")
      ->default_val("baseline");
  run->add_option("--param", params, "Override a parameter, k=v (repeatable)");
  std::optional<std::uint64_t> seed;
  run->add_option("--seed", seed, "Elective demand seed");
  run->add_option("--out", out, "Output file (stdout when omitted)");
  run->add_option("--format", format, "csv or json (default from --out extension, else csv)")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string sweep_param;
  double sweep_min = 0, sweep_max = 0;
  auto* sw = app.add_subcommand("sweep", "One-at-a-time sensitivity sweep");
  sw->add_option("--param", sweep_param, "Parameter to sweep")->required();
  sw->add_option("--min", sweep_min, "Lower value")->required();
  sw->add_option("--max", sweep_max, "Upper value")->required();
  sw->add_option("--preset", preset, "Base scenario")->default_val("stressed");
  sw->add_option("--set", params, "Override another parameter, k=v (repeatable)");
  sw->add_option("--out", out, "Output file (stdout when omitted)");
  sw->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::size_t mc_n = 200;
  std::uint64_t mc_seed = 1;
  std::string ranges_file;
  unsigned threads = 0;
  auto* mc = app.add_subcommand("mc", "Monte Carlo batch over parameter ranges");
  mc->add_option("--n", mc_n, "Number of runs")->default_val(200)->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_seed, "Sampling seed")->default_val(1);
  mc->add_option("--ranges", ranges_file, "JSON file: {\"name\": [min, max], ...}");
  mc->add_option("--threads", threads, "Worker threads (0 = hardware)")->default_val(0);
  mc->add_option("--preset", preset, "Base scenario")->default_val("baseline");
  mc->add_option("--set", params, "Override a parameter, k=v (repeatable)");
  mc->add_option("--out", out, "Per-run CSV or full JSON (stdout when omitted)");
  mc->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string observed;
  auto* fit = app.add_subcommand("fit", "Compare simulated census with observations");
  fit->add_option("--observed", observed, "CSV with header time_h,census")->required();
  fit->add_option("--preset", preset, "Scenario to compare")->default_val("baseline");
  fit->add_option("--param", params, "Override a parameter, k=v (repeatable)");
  fit->add_option("--out", out, "Output file (stdout when omitted)");
  fit->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  double surge_start = kDefaultSurgeStart;
  auto* thr = app.add_subcommand("surge-threshold",
                                 "Smallest 3 h pulse height that activates the protocol");
  thr->add_option("--preset", preset, "Base scenario")->default_val("baseline");
  thr->add_option("--param", params, "Override a parameter, k=v (repeatable)");
  thr->add_option("--start", surge_start, "Pulse start in hours")->default_val(kDefaultSurgeStart);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ScenarioSpec s = resolve_scenario(g, preset, params);
      if (seed) s.seed = *seed;
      emit(run_scenario(s).trajectory, out, format);
    } else if (*sw) {
      ScenarioSpec s = resolve_scenario(g, preset, params);
      emit(sweep(s, sweep_param, sweep_min, sweep_max).report, out, format);
    } else if (*mc) {
      ScenarioSpec s = resolve_scenario(g, preset, params);
      auto ranges = ranges_file.empty() ? default_mc_ranges()
                                        : ranges_from_json(read_json_file(ranges_file));
      auto progress = [](std::size_t d, std::size_t n) {
        if (d == n || d % 20 == 0) std::fprintf(stderr, "\r%zu/%zu runs", d, n);
        if (d == n) std::fprintf(stderr, "\n");
      };
      emit(monte_carlo(s, ranges, mc_n, mc_seed, threads, progress), out, format);
    } else if (*fit) {
      ScenarioSpec s = resolve_scenario(g, preset, params);
      emit(compare_history(run_scenario(s).trajectory, read_observed_csv(observed)), out, format);
    } else if (*thr) {
      ScenarioSpec s = resolve_scenario(g, preset, params);
      auto h = minimum_activating_pulse(s, surge_start);
      if (!h) {
        std::cout << "no activation below 400 patients/h\n";
        return 1;
      }
      std::printf("minimum activating pulse: %.3f patients/h (default %.1f is %.1f%% of it)\n", *h,
                  kDefaultSurgeHeight, 100.0 * kDefaultSurgeHeight / *h);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
