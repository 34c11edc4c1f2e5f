#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "assembly/errors.hpp"
#include "assembly/pipeline.hpp"

using namespace assembly;

namespace {

constexpr int kInputError = 3;

struct CommonArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string trace_out;
  std::string report_out;
  std::string dump_graph;
  std::string spiral_mode;
};

struct SweepArgs {
  int trials = 100;
  std::optional<double> position_mm;
  std::optional<double> rotation_deg;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_mode) {
  cmd->add_option("--scenario", a.scenario, "Scenario name or path to a YAML file")->required();
  cmd->add_option("--seed", a.seed, "Override the scenario seed");
  if (with_mode) {
    cmd->add_option("--mode", a.mode, "plan-only, control-only or full")
        ->check(CLI::IsMember({"plan-only", "control-only", "full", "plan", "control"}));
  }
  cmd->add_option("--trace-out", a.trace_out, "Write the controller trace as CSV");
  cmd->add_option("--report-out", a.report_out, "Write the report here instead of stdout");
  cmd->add_option("--dump-graph", a.dump_graph, "Write the regrasp graph after planning");
  cmd->add_option("--spiral-mode", a.spiral_mode, "literal or centered")
      ->check(CLI::IsMember({"literal", "centered"}));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("error while writing '" + path + "'");
}

int run_command(const CommonArgs& a, RunMode mode) {
  const Scenario sc = load_scenario(resolve_scenario_path(a.scenario));
  PipelineOptions opt;
  opt.mode = a.mode.empty() ? mode : parse_run_mode(a.mode);
  opt.seed = a.seed;
  if (!a.spiral_mode.empty()) opt.spiral_mode = parse_spiral_mode(a.spiral_mode);
  std::ofstream graph;
  if (!a.dump_graph.empty()) {
    graph = open_out(a.dump_graph);
    opt.graph_dump = &graph;
  }
  const RunReport report = run_pipeline(sc, opt);

  std::ostringstream text;
  write_report(report, text);
  write_text(a.report_out, text.str());
  if (!a.trace_out.empty()) {
    if (report.control.attempted && !report.control.outcome.trace.records.empty()) {
      emit_trace_csv(report.control.outcome.trace, a.trace_out);
    } else {
      std::cerr << "note: no controller trace produced, " << a.trace_out << " not written\n";
    }
  }
  if (!report.success()) {
    if (report.plan.attempted && !report.plan.success) {
      std::cerr << "planning failed: " << report.plan.error << "\n";
    } else {
      std::cerr << "insertion failed in " << to_string(report.control.outcome.failed_phase) << ": "
                << report.control.outcome.reason << "\n";
    }
  }
  return report.exit_code();
}

int sweep_command(const CommonArgs& a, const SweepArgs& s) {
  Scenario sc = load_scenario(resolve_scenario_path(a.scenario));
  if (!a.spiral_mode.empty()) sc.controller.spiral_mode = parse_spiral_mode(a.spiral_mode);
  ErrorBounds bounds = sc.error;
  if (s.position_mm) bounds.position = *s.position_mm * 1e-3;
  if (s.rotation_deg) bounds.rotation = *s.rotation_deg * 3.14159265358979323846 / 180.0;
  const SweepReport report = batch_sweep(sc, s.trials, bounds, a.seed.value_or(sc.seed), s.threads);
  std::ostringstream text;
  write_sweep_report(report, text);
  write_text(a.report_out, text.str());
  std::cerr << "success rate " << report.success_rate() << " over " << report.trials.size() << " trials\n";
  return report.success_rate() == 1.0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-arm regrasp planning and compliant peg-in-hole insertion"};
  app.require_subcommand(1);

  CommonArgs plan_args, insert_args, run_args, sweep_args;
  SweepArgs sweep;
  auto* plan = app.add_subcommand("plan", "Regrasp and motion planning only");
  add_common(plan, plan_args, false);
  auto* insert = app.add_subcommand("insert", "Compliant insertion from the pre-assembly pose");
  add_common(insert, insert_args, false);
  auto* run = app.add_subcommand("run", "Planning followed by compliant insertion");
  add_common(run, run_args, true);
  auto* sw = app.add_subcommand("sweep", "Monte-Carlo insertion trials with random pose errors");
  add_common(sw, sweep_args, false);
  sw->add_option("--trials", sweep.trials, "Number of trials")->check(CLI::PositiveNumber);
  sw->add_option("--position-mm", sweep.position_mm, "Positional error bound per axis");
  sw->add_option("--rotation-deg", sweep.rotation_deg, "Rotational error bound per axis");
  sw->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (plan->parsed()) return run_command(plan_args, RunMode::PlanOnly);
    if (insert->parsed()) return run_command(insert_args, RunMode::ControlOnly);
    if (run->parsed()) return run_command(run_args, RunMode::Full);
    return sweep_command(sweep_args, sweep);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
