#pragma once

#include <string>
#include <utility>
#include <vector>

#include "assembly/contact_sim.hpp"

namespace assembly {

enum class Phase { Linear, Spiral, Impedance, Done, Failed };
const char* to_string(Phase p);

enum class SpiralMode { Literal, Centered };
const char* to_string(SpiralMode m);
SpiralMode parse_spiral_mode(const std::string& s);

/// How the sensed force enters the threshold tests. Reaction: the sensor
/// reads the reaction on the peg, so the pressing force is its negation.
/// Absolute: compare the magnitude of the projection.
enum class ForceSign { Reaction, Absolute };

/// ForceDrop ends the spiral when the pressing reaction falls below the exit
/// threshold; ForceExceed ends it when the linear stop condition fires again.
enum class SpiralExit { ForceDrop, ForceExceed };

struct ImpedanceGains {
  Vec3 m = Vec3::Constant(1.0);    // kg
  Vec3 c = Vec3::Constant(50.0);   // N s / m
  Vec3 k = Vec3::Constant(200.0);  // N / m

  static ImpedanceGains uniform(double m, double c, double k);
};

struct SpiralParams {
  double delta_theta = 0.15;  // rad per probe
  double delta_r = 2.0e-6;    // m per probe
};

struct ControllerConfig {
  Vec3 v_direction = -Vec3::UnitZ();
  double linear_threshold = 3.0;       // N
  double spiral_exit_threshold = 7.0;  // N
  SpiralMode spiral_mode = SpiralMode::Literal;
  SpiralParams literal{0.15, 2.0e-6};
  SpiralParams centered{0.15, 1.35e-5};
  double max_spiral_radius = 0.005;
  double spiral_press_depth = 0.002;
  ImpedanceGains gains;
  double dt = 0.02;
  double target_insertion_depth = 0.008;
  double linear_step = 0.001;
  double insertion_feed = 0.0005;
  double impedance_force_limit = 15.0;
  int max_linear_steps = 60;
  int max_spiral_steps = 2000;
  int max_impedance_steps = 400;
  /// Expected travel from the pre-assembly pose to the surface. Travel beyond
  /// this plus the margin means the peg went straight into the hole. Zero
  /// disables the check.
  double expected_contact_distance = 0.010;
  double in_hole_margin = 0.003;
  ForceSign force_sign = ForceSign::Reaction;
  SpiralExit spiral_exit = SpiralExit::ForceDrop;

  const SpiralParams& spiral() const { return spiral_mode == SpiralMode::Literal ? literal : centered; }
  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

struct SpiralState {
  Vec3 center = Vec3::Zero();    // P_0
  Vec3 position = Vec3::Zero();  // P_i
  double r = 0.0;
  double theta = 0.0;
  int index = 0;
};

struct TraceRecord {
  double t = 0.0;
  Phase phase = Phase::Linear;
  Vec3 position = Vec3::Zero();
  Rotation orientation;
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

struct ControllerTrace {
  double dt = 0.02;
  std::vector<TraceRecord> records;

  void append(Phase phase, const Pose& hand, const WrenchSample& sensed);
  std::size_t count(Phase phase) const;
  /// Run-length encoding of the phase column.
  std::vector<std::pair<Phase, std::size_t>> runs() const;
};

/// True (stop) iff v . (R F) > threshold.
bool linear_stop_condition(const Vec3& v_direction, const Rotation& r_hnd, const Vec3& force, double threshold);

/// Pressing force along v as seen through the configured sign convention.
double pressing_force(const ControllerConfig& config, const Rotation& r_hnd, const Vec3& sensed_force);

/// Orthonormal in-plane pair (I_x, I_y): world x and y projected onto the
/// plane with normal v.
std::pair<Vec3, Vec3> spiral_basis(const Vec3& v_direction);

/// One spiral step. Literal mode adds the rotated offset to P_i, centered
/// mode to P_0. Throws SpiralExhaustedError when the radius budget is spent.
std::pair<Vec3, SpiralState> spiral_next_position(const SpiralState& state, const ControllerConfig& config);

/// Discrete impedance law, per axis. Throws ConfigError on a non-positive
/// denominator.
Vec3 impedance_update(const Vec3& f, const Vec3& p_i, const Vec3& p_im1, const ImpedanceGains& gains, double dt);

struct PhaseResult {
  bool ok = false;
  Pose pose;
  bool entered_hole = false;
  std::string reason;
};

PhaseResult run_linear_search(const ControllerConfig& config, Plant& plant, const Pose& start,
                              ControllerTrace& trace);
PhaseResult run_spiral_search(const ControllerConfig& config, Plant& plant, const Pose& contact,
                              ControllerTrace& trace, bool entered_hole = false);
PhaseResult run_impedance_insertion(const ControllerConfig& config, Plant& plant, const Pose& hole_pose,
                                    ControllerTrace& trace);

struct InsertionOutcome {
  Phase phase = Phase::Failed;  // Done or Failed
  Phase failed_phase = Phase::Linear;
  std::string reason;
  ControllerTrace trace;
  Pose final_pose;
  double insertion_depth = 0.0;

  bool success() const { return phase == Phase::Done; }
};

/// Linear search, spiral search and impedance insertion in sequence.
InsertionOutcome run_insertion(const ControllerConfig& config, Plant& plant, const Pose& pre_assembly);

}  // namespace assembly
