#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "assembly/scenario.hpp"

namespace assembly {

enum class RunMode { PlanOnly, ControlOnly, Full };
const char* to_string(RunMode m);
RunMode parse_run_mode(const std::string& s);

/// Pose error of the mating object, in the hole frame: in-plane offset and
/// rotations about the hole axes (applied x, then y, then z).
struct InjectedError {
  Vec3 offset = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();
};
InjectedError sample_error(const ErrorBounds& bounds, Rng& rng);

/// Applies the error to a peg pose about the peg tip.
Pose apply_error(const Pose& peg_pose, const Pose& hole_frame, const InjectedError& error);

struct PlanSummary {
  bool attempted = false;
  bool success = false;
  std::string error;
  RegraspPath path;
  std::vector<RegraspNode> path_nodes;
  std::vector<double> edge_lengths;
  double approach_length = 0.0;
  std::vector<NodePair> deleted_edges;
  int researches = 0;
  int rebuilds = 0;
  std::size_t handover_count = 0;
  bool perpendicular_handover = false;
  std::vector<MotionSegment> segments;
  /// Grasp used at the goal, which fixes the peg in the hand.
  std::optional<Grasp> goal_grasp;
};

struct ControlSummary {
  bool attempted = false;
  InjectedError error;
  InsertionOutcome outcome;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  RunMode mode = RunMode::Full;
  PlanSummary plan;
  ControlSummary control;

  bool success() const;
  /// 0 success, 1 plan failure, 2 insertion failure.
  int exit_code() const;
};

struct PipelineOptions {
  RunMode mode = RunMode::Full;
  std::optional<std::uint64_t> seed;
  std::optional<SpiralMode> spiral_mode;
  /// When set, the regrasp graph is dumped here after planning.
  std::ostream* graph_dump = nullptr;
};

RunReport run_pipeline(const Scenario& scenario, const PipelineOptions& options = {});

/// Regrasp and motion planning for the mating object, from its initial pose
/// to the pre-assembly pose.
PlanSummary plan_scenario(const Scenario& scenario, std::uint64_t seed, std::ostream* graph_dump = nullptr);

/// Compliant insertion from the pre-assembly pose with the given error.
/// `grasp` fixes the nominal peg-in-hand transform.
InsertionOutcome run_control(const Scenario& scenario, const Grasp& grasp, const InjectedError& error,
                             std::uint64_t sensor_seed);

void write_report(const RunReport& report, std::ostream& out);

struct SweepTrial {
  std::uint64_t seed = 0;
  InjectedError error;
  Phase outcome = Phase::Failed;
  Phase failed_phase = Phase::Linear;
  std::size_t linear_steps = 0;
  std::size_t spiral_steps = 0;
  std::size_t impedance_steps = 0;
  double insertion_depth = 0.0;
};

struct SweepReport {
  std::string scenario;
  std::uint64_t seed = 0;
  ErrorBounds bounds;
  SpiralMode spiral_mode = SpiralMode::Literal;
  std::vector<SweepTrial> trials;

  double success_rate() const;
  double mean_steps(Phase phase) const;
};

/// Control-only Monte-Carlo: trial i uses seed + i for both the sampled error
/// and the sensor noise. Trials run on `threads` workers (0 = hardware
/// concurrency); results do not depend on the thread count.
SweepReport batch_sweep(const Scenario& scenario, int n_trials, const ErrorBounds& bounds, std::uint64_t seed,
                        unsigned threads = 0);
void write_sweep_report(const SweepReport& report, std::ostream& out);

/// CSV with header t,phase,px,py,pz,fx,fy,fz,tx,ty,tz. Throws ConfigError for
/// an empty trace and IoError when the file cannot be written.
void emit_trace_csv(const ControllerTrace& trace, std::ostream& out);
void emit_trace_csv(const ControllerTrace& trace, const std::string& path);

}  // namespace assembly
