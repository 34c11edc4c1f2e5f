#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "assembly/random.hpp"
#include "assembly/regrasp.hpp"

namespace assembly {

struct PlannerParams {
  double step_size = 0.1;          // rad
  double connect_threshold = 0.1;  // rad
  int max_iterations = 5000;
  double edge_resolution = 0.02;  // rad
  std::uint64_t seed = 1;
  int smoothing_attempts = 100;
  int max_researches = 5;
  int max_rebuilds = 3;

  /// Throws ConfigError on non-positive values. A negative iteration budget
  /// is rejected; zero is a legal (always failing) budget.
  void validate() const;
  /// True when the connect threshold is smaller than the step size, which
  /// makes tree joins rely on exact extension hits.
  bool threshold_below_step() const { return connect_threshold < step_size; }
};

using JointPath = std::vector<JointConfig>;

/// Joint-space search tree. parent[i] < i for every non-root node.
struct SearchTree {
  std::vector<JointConfig> nodes;
  std::vector<int> parent;

  int add(const JointConfig& q, int parent_index);
  int nearest(const JointConfig& q) const;
  /// Nodes from index back to the root, inclusive.
  JointPath branch(int index) const;
};

/// Joint-space box with a validity predicate (true = collision free).
struct ConfigSpace {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::function<bool(const JointConfig&)> is_free;

  bool contains(const JointConfig& q) const;
  /// Every interpolant at joint steps <= resolution is free and in bounds.
  bool edge_free(const JointConfig& a, const JointConfig& b, double resolution) const;
};

double path_length(const JointPath& path);
/// Inserts interpolants so consecutive configurations are <= max_step apart.
JointPath densify(const JointPath& path, double max_step);

/// Bidirectional RRT. Throws CollidingEndpointError if start or goal is in
/// collision and NoPathError when the iteration budget runs out.
JointPath rrt_connect(const JointConfig& start, const JointConfig& goal, const ConfigSpace& space,
                      const PlannerParams& params, Rng& rng);
JointPath rrt_connect(const JointConfig& start, const JointConfig& goal, const ConfigSpace& space,
                      const PlannerParams& params);

/// Random shortcutting; only strictly shorter collision-free shortcuts are
/// applied. Endpoints never move.
JointPath shortcut_smooth(const JointPath& path, const ConfigSpace& space, int attempts,
                          double resolution, Rng& rng);

/// Independent re-check of a path at `resolution`: in bounds and free.
bool validate_path(const JointPath& path, const ConfigSpace& space, double resolution);

// ---------------------------------------------------------------------------
// Regrasp plan realization with backtracking.

struct MotionSegment {
  int edge = -1;  // index into the regrasp path edges; -1 for the approach
  std::size_t arm = 0;
  std::string label;
  JointPath path;
};

struct MotionPlan {
  RegraspPath path;
  std::vector<MotionSegment> segments;
  std::vector<NodePair> deleted_edges;
  int researches = 0;
  int rebuilds = 0;
  std::vector<JointConfig> final_configs;
};

struct RegraspMotionSetup {
  const Scene* scene = nullptr;
  const std::vector<ArmModel>* arms = nullptr;
  std::string object_id;
  std::vector<JointConfig> rest;
  PlannerParams params;
  bool require_perpendicular = false;
  double perpendicular_tol = 0.15;
  /// Poses tried, in order, when the search is exhausted and a handover or
  /// placement node has to be rebuilt elsewhere.
  std::vector<Pose> alternate_handover_poses;
  std::vector<Pose> alternate_placements;
  IkOptions ik;
};

/// Plans the motions for one regrasp edge (edge index -1 means the approach
/// to path.nodes[0]). Returns nullopt when the motion planner fails.
using EdgeMotionPlanner = std::function<std::optional<std::vector<MotionSegment>>(
    const RegraspGraph&, const RegraspPath&, int edge, std::vector<JointConfig>& arm_state, Rng&)>;

/// Default edge planner: RRT-connect plus shortcutting in the setup's scene,
/// with the object attached according to the edge kind.
EdgeMotionPlanner make_rrt_edge_planner(const RegraspMotionSetup& setup);

/// Search the graph, realize each edge, delete failing edges and re-search,
/// and rebuild nodes at alternate poses when the search is exhausted. Throws
/// UnplannableError once the budgets are spent.
MotionPlan plan_regrasp_motion(RegraspGraph& graph, const RegraspMotionSetup& setup,
                               const EdgeMotionPlanner& edge_planner = {});

}  // namespace assembly
