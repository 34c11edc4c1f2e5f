#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "assembly/contact_sim.hpp"
#include "assembly/controller.hpp"
#include "assembly/motion_planner.hpp"

namespace assembly {

struct GraspSpec {
  std::string id;
  Pose hand_in_object;
  double jaw_width = 0.02;
};

enum class ObjectRole { Mating, Assembly };

struct ObjectSpec {
  std::string id;
  ObjectRole role = ObjectRole::Mating;
  ShapePrimitive shape;
  Pose initial_pose;
  std::vector<GraspSpec> grasps;
};

/// Bounds of the pose error injected into the mating object before insertion.
struct ErrorBounds {
  double position = 0.0;  // m, per in-plane axis
  double rotation = 0.0;  // rad, per axis
};

struct Scenario {
  std::string name;
  std::string description;
  std::uint64_t seed = 1;

  std::vector<ArmModel> arms;
  std::vector<Body> environment;
  ObjectSpec mating;
  ObjectSpec assembly;
  /// Pose of the assembly object when assembled; it is mounted there as a
  /// fixture while the mating object is planned and inserted.
  Pose goal_assembly_pose;
  /// Hole frame relative to the assembly object.
  Pose hole_in_assembly;
  /// Distance of the peg tip above the hole mouth at the pre-assembly pose.
  double pre_assembly_offset = 0.010;

  std::vector<Pose> handover_region;
  std::vector<Pose> stable_placements;
  std::vector<Pose> alternate_handover_poses;
  std::vector<Pose> alternate_placements;
  bool require_perpendicular_handover = false;
  double perpendicular_tolerance = 0.15;

  PegHoleModel peg_hole;
  SensorModel sensor;
  ControllerConfig controller;
  PlannerParams planner;
  IkOptions ik;
  ErrorBounds error;

  /// World pose of the hole frame at assembly.
  Pose hole_frame() const { return goal_assembly_pose * hole_in_assembly; }
  /// Mating-object (peg frame) pose one step before assembly.
  Pose pre_assembly_pose() const;
};

/// Reads and validates a scenario file. Throws ConfigError whose message lists
/// every problem found, each prefixed by the field path and, for parse
/// errors, the line number.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");

/// Resolves a scenario name or path: existing paths are used as is, otherwise
/// `<dir>/<name>.yaml` where dir comes from ASSEMBLY_SCENARIO_DIR or the
/// compiled-in default.
std::string resolve_scenario_path(const std::string& name_or_path);

/// The six-joint arm used by the bundled scenarios, mounted at `base`.
KinematicChain default_arm_chain(const Pose& base);

// Shared YAML helpers (also used by the report writer).
YAML::Node pose_to_yaml(const Pose& p);

}  // namespace assembly
