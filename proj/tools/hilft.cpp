// hilft: run, validate and analyze co-simulation scenarios.
//
// Exit status: 0 success, 1 validation or input error, 2 runtime error,
// 3 insufficient data for an analysis.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hilft/analyzer.hpp"
#include "hilft/datastore.hpp"
#include "hilft/error.hpp"
#include "hilft/orchestrator.hpp"
#include "hilft/scenario.hpp"

namespace fs = std::filesystem;
using namespace hilft;

namespace {

enum Status { kOk = 0, kInvalid = 1, kRuntime = 2, kInsufficient = 3 };

std::string sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Report {
  std::vector<std::pair<std::string, std::string>> rows;

  void add(std::string name, double v) { rows.emplace_back(std::move(name), sig6(v)); }
  void add(std::string name, std::string v) { rows.emplace_back(std::move(name), std::move(v)); }

  void emit(const std::string& path) const {
    for (const auto& [k, v] : rows) std::cout << k << ": " << v << "\n";
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write report " + path);
    out << "metric,value\n";
    for (const auto& [k, v] : rows) out << k << "," << v << "\n";
    if (!out) throw IoError("write failed for report " + path);
  }
};

struct Globals {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

Scenario load_with_globals(const Globals& g) {
  if (g.scenario.empty()) throw ValidationError("", "--scenario is required");
  std::vector<std::string> overrides = g.sets;
  if (g.seed) overrides.push_back("run.seed=" + std::to_string(*g.seed));
  return load_scenario(g.scenario, overrides);
}

fs::path output_dir(const Globals& g, const Scenario& s) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv("HILFT_OUT_DIR"); env && *env) return fs::path(env) / s.run.id;
  return fs::path("hilft-out") / s.run.id;
}

int cmd_run(const Globals& g) {
  const Scenario s = load_with_globals(g);
  const Orchestrator orch(s);
  const RunResult r = orch.run();
  const auto dir = output_dir(g, s);
  const auto files = write_run_outputs(s, r, dir);
  std::cout << "run " << s.run.id << ": " << r.log.frames.size() << " steps, "
            << r.counters.overruns << " overruns\n";
  std::cout << "wrote " << files.run_csv.string() << "\n";
  std::cout << "wrote " << files.summary_json.string() << "\n";
  std::cout << "wrote " << files.scenario_json.string() << "\n";
  if (files.hardware_csv) std::cout << "wrote " << files.hardware_csv->string() << "\n";
  return kOk;
}

int cmd_validate(const Globals& g) {
  const Scenario s = load_with_globals(g);
  std::cout << effective_config(s).dump(2) << "\n";
  return kOk;
}

struct AnalyzeArgs {
  std::string csv;
  std::string hw_csv;
  std::string report;
  std::string a = "zone.T:simulated";
  std::string b = "zone.T:emulated";
  std::int64_t shift = 0;
  std::string var = "out.T:emulated";
  std::int64_t event_step = 0;
  std::int64_t final_window = 60;
  std::int64_t lead = 10;
  std::string pv = "zone.T:emulated";
  std::string sp = "zone.T:setpoint";
  HuntingOptions hunting;
  std::optional<double> peak;
  double rated = 0.0;
  std::string load_var = "zone.load.sensible:simulated";
  double r_lo = 0.5;
  double r_hi = 1.0;
};

RunLog require_log(const std::string& path, const char* flag) {
  if (path.empty()) throw ValidationError("", std::string(flag) + " is required");
  return import_run(path);
}

int analyze_rmse(const AnalyzeArgs& a) {
  const RunLog log = require_log(a.csv, "--csv");
  const double v = rmse_shift(extract_series(log, parse_key(a.a)),
                              extract_series(log, parse_key(a.b)), a.shift);
  Report r;
  r.add("rmse", v);
  r.add("shift", static_cast<double>(a.shift));
  r.emit(a.report);
  return kOk;
}

int analyze_step(const AnalyzeArgs& a) {
  const RunLog log = require_log(a.csv, "--csv");
  ResponseOptions o;
  o.lead_samples = a.lead;
  const double t = response_time(extract_series(log, parse_key(a.var)), log.metadata.step_size_s,
                                 a.event_step, a.final_window, o);
  Report r;
  r.add("response_time_s", t);
  r.emit(a.report);
  return kOk;
}

int analyze_hunting(const AnalyzeArgs& a) {
  const RunLog log = require_log(a.csv, "--csv");
  const auto v = hunting_metric(extract_series(log, parse_key(a.pv)),
                                extract_series(log, parse_key(a.sp)), log.metadata.step_size_s,
                                a.hunting);
  Report r;
  r.add("is_hunting", v.is_hunting ? "true" : "false");
  r.add("peak_to_peak", v.peak_to_peak);
  r.add("crossings", static_cast<double>(v.crossings));
  r.add("period_s", v.period_s ? sig6(*v.period_s) : "none");
  r.add("samples", static_cast<double>(v.samples));
  r.emit(a.report);
  return kOk;
}

int analyze_delay(const AnalyzeArgs& a) {
  const RunLog hw = require_log(a.hw_csv, "--hw");
  const RunLog sw = require_log(a.csv, "--csv");
  Report r;
  r.add("comm_delay_bound_s", comm_delay_bound(hw, sw));
  r.emit(a.report);
  return kOk;
}

int analyze_capacity(const AnalyzeArgs& a) {
  double peak = 0.0;
  if (a.peak) {
    peak = *a.peak;
  } else {
    const RunLog log = require_log(a.csv, "--csv (or --peak)");
    peak = extract_series(log, parse_key(a.load_var)).maxCoeff();
  }
  const auto c = capacity_check(peak, a.rated, a.r_lo, a.r_hi);
  Report r;
  r.add("peak_load_w", peak);
  r.add("rated_capacity_w", a.rated);
  r.add("ratio", c.ratio);
  r.add("verdict", std::string(to_string(c.verdict)));
  r.emit(a.report);
  return kOk;
}

struct ExportArgs {
  std::string csv;
  std::vector<std::string> vars;
  std::optional<std::int64_t> from;
  std::optional<std::int64_t> to;
};

// Re-exports a run CSV, optionally keeping only some variables or steps.
int cmd_export(const ExportArgs& e, const Globals& g) {
  if (g.out.empty()) throw ValidationError("", "--out is required for export");
  RunLog log = require_log(e.csv, "--csv");
  std::vector<VariableKey> keep;
  for (const auto& v : e.vars) keep.push_back(parse_key(v));
  const std::int64_t first = e.from.value_or(0);
  const std::int64_t last =
      e.to.value_or(log.frames.empty() ? -1 : log.frames.back().step_index);
  RunLog out{log.metadata, {}};
  for (auto& f : log.frames) {
    if (f.step_index < first || f.step_index > last) continue;
    Frame nf{f.step_index - first, {}};
    for (auto& [k, s] : f.entries) {
      if (!keep.empty() && std::find(keep.begin(), keep.end(), k) == keep.end()) continue;
      Sample shifted = s;
      shifted.step_index = nf.step_index;
      shifted.sim_time_s = static_cast<double>(nf.step_index) * log.metadata.step_size_s;
      nf.entries.emplace(k, shifted);
    }
    out.frames.push_back(std::move(nf));
  }
  const auto summary = export_run(out, g.out);
  std::cout << "wrote " << g.out << " (" << summary.rows << " rows)\n";
  return kOk;
}

int dispatch(const std::function<int()>& action) {
  try {
    return action();
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInvalid;
  } catch (const UnknownKeyError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInvalid;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInvalid;
  } catch (const InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return kInsufficient;
  } catch (const Error& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lock-step hardware-in-the-loop co-simulation testbed"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--scenario", g.scenario, "Scenario JSON file");
  app.add_option("--out", g.out,
                 "Output directory for run, output file for export (default: "
                 "$HILFT_OUT_DIR/<id>, else hilft-out/<id>)");
  app.add_option("--seed", g.seed, "Override run.seed");
  app.add_option("--set", g.sets, "Override a scenario key, e.g. --set delays.comm_latency_s=5")
      ->take_all();

  auto* run = app.add_subcommand("run", "Run a scenario and write run.csv, summary.json, scenario.json");
  auto* validate = app.add_subcommand("validate", "Validate a scenario and print its effective configuration");

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Integration-quality metrics on exported runs");
  analyze->require_subcommand(1);
  analyze->fallthrough();
  analyze->add_option("--report", aa.report, "Also write the report as metric,value CSV");

  auto* rmse = analyze->add_subcommand("rmse", "Shift-aware RMSE between two variables");
  rmse->add_option("--csv", aa.csv, "Run CSV")->required();
  rmse->add_option("--a", aa.a, "First series as name:source")->capture_default_str();
  rmse->add_option("--b", aa.b, "Second series as name:source")->capture_default_str();
  rmse->add_option("--shift", aa.shift, "Compare a[t] with b[t - shift]")
      ->capture_default_str();

  auto* step = analyze->add_subcommand("step-response", "Time to 63.2 % of a step change");
  step->add_option("--csv", aa.csv, "Run CSV")->required();
  step->add_option("--var", aa.var, "Series as name:source")->capture_default_str();
  step->add_option("--event-step", aa.event_step, "Step index of the change")->required();
  step->add_option("--final-window", aa.final_window, "Samples averaged for the final value")
      ->capture_default_str();
  step->add_option("--lead", aa.lead, "Samples in the steadiness window")->capture_default_str();

  auto* hunt = analyze->add_subcommand("hunting", "Detect sustained control oscillation");
  hunt->add_option("--csv", aa.csv, "Run CSV")->required();
  hunt->add_option("--pv", aa.pv, "Process variable as name:source")->capture_default_str();
  hunt->add_option("--sp", aa.sp, "Setpoint as name:source")->capture_default_str();
  hunt->add_option("--settle", aa.hunting.settle_s, "Settle time in s")->capture_default_str();
  hunt->add_option("--window", aa.hunting.window_s, "Window length in s")->capture_default_str();
  hunt->add_option("--eps", aa.hunting.eps_amp, "Peak-to-peak threshold")->capture_default_str();
  hunt->add_option("--n-min", aa.hunting.n_min, "Minimum sign changes")->capture_default_str();

  auto* delay = analyze->add_subcommand("delay-bound", "Upper bound on the communication delay");
  delay->add_option("--hw", aa.hw_csv, "Hardware-side CSV")->required();
  delay->add_option("--csv", aa.csv, "Software-side run CSV")->required();

  auto* cap = analyze->add_subcommand("capacity", "Peak load against rated capacity");
  cap->add_option("--peak", aa.peak, "Peak load in W");
  cap->add_option("--csv", aa.csv, "Run CSV to take the peak from");
  cap->add_option("--var", aa.load_var, "Load series as name:source")->capture_default_str();
  cap->add_option("--rated", aa.rated, "Rated capacity in W")->required();
  cap->add_option("--r-lo", aa.r_lo, "Lower ok ratio")->capture_default_str();
  cap->add_option("--r-hi", aa.r_hi, "Upper ok ratio")->capture_default_str();

  ExportArgs ea;
  auto* exp = app.add_subcommand("export", "Re-export a run CSV, optionally subset");
  exp->add_option("--csv", ea.csv, "Run CSV")->required();
  exp->add_option("--vars", ea.vars, "Variables to keep as name:source")->delimiter(',');
  exp->add_option("--from", ea.from, "First step to keep (renumbered to 0)");
  exp->add_option("--to", ea.to, "Last step to keep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  if (*run) return dispatch([&] { return cmd_run(g); });
  if (*validate) return dispatch([&] { return cmd_validate(g); });
  if (*exp) return dispatch([&] { return cmd_export(ea, g); });
  if (*rmse) return dispatch([&] { return analyze_rmse(aa); });
  if (*step) return dispatch([&] { return analyze_step(aa); });
  if (*hunt) return dispatch([&] { return analyze_hunting(aa); });
  if (*delay) return dispatch([&] { return analyze_delay(aa); });
  if (*cap) return dispatch([&] { return analyze_capacity(aa); });
  return kInvalid;
}
