#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "assembly/scene.hpp"

namespace assembly {

enum class ArmSide { Left = 0, Right = 1 };

const char* to_string(ArmSide side);
std::size_t arm_index(ArmSide side);

/// Hand pose relative to an object. The approach axis is the hand's z axis
/// expressed in the object frame.
struct Grasp {
  std::string id;
  Pose hand_pose_in_object;
  Vec3 approach_axis_in_object = Vec3::UnitZ();
  double jaw_width = 0.0;
  ArmSide arm = ArmSide::Left;
};

/// Builds a grasp whose approach axis is read off the hand pose. Throws
/// ConfigError when the jaw width is outside [0, max_jaw_width].
Grasp make_grasp(std::string id, const Pose& hand_pose_in_object, double jaw_width, ArmSide arm,
                 double max_jaw_width = 0.085);

enum class NodeContext { Initial, Handover, Placement, Goal };
const char* to_string(NodeContext c);

struct RegraspNode {
  int id = -1;
  Grasp grasp;
  NodeContext context = NodeContext::Initial;
  Pose object_pose;
  bool ik_ok = false;
  bool collision_ok = false;
  JointConfig q;  // IK solution of the grasping arm
};

enum class EdgeKind { SameGrasp, Handover, PlacementRegrasp };
enum class Action { Pick, Place, Handover, Transit, GoalMove };
const char* to_string(EdgeKind k);
const char* to_string(Action a);

using NodePair = std::pair<int, int>;  // always stored with first < second

struct NodeGroups {
  std::vector<RegraspNode> initial;
  std::vector<RegraspNode> handover;
  std::vector<RegraspNode> placement;
  std::vector<RegraspNode> goal;
  /// Index pairs into `handover` that are jointly feasible.
  std::vector<std::pair<std::size_t, std::size_t>> handover_pairs;
};

class RegraspGraph {
 public:
  const std::map<int, RegraspNode>& nodes() const { return nodes_; }
  const RegraspNode& node(int id) const;
  bool has_node(int id) const { return nodes_.count(id) > 0; }

  /// Live (non-deleted) edges with their kinds.
  std::map<NodePair, EdgeKind> live_edges() const;
  const std::map<NodePair, EdgeKind>& all_edges() const { return edges_; }
  const std::set<NodePair>& deleted_edges() const { return deleted_; }
  bool has_live_edge(int a, int b) const;
  std::optional<EdgeKind> edge_kind(int a, int b) const;
  /// Live neighbours in increasing id order.
  std::vector<int> neighbors(int id) const;

  /// Throws UnknownEdgeError if the edge does not exist or is already deleted.
  void delete_edge(int a, int b);

  /// Inserts a node (its id must be unused) and every edge implied by the
  /// transfer conditions. `compatible` lists handover partners of the node.
  void insert_node(RegraspNode node, const std::vector<int>& compatible = {});
  /// Removes the node, its edges (live and deleted) and handover pairings.
  void remove_node(int id);

  bool handover_compatible(int a, int b) const;
  int next_id() const { return nodes_.empty() ? 0 : nodes_.rbegin()->first + 1; }

 private:
  std::optional<EdgeKind> transfer_condition(const RegraspNode& u, const RegraspNode& v) const;

  std::map<int, RegraspNode> nodes_;
  std::map<NodePair, EdgeKind> edges_;
  std::set<NodePair> deleted_;
  std::set<NodePair> compatible_;
};

NodePair make_pair_key(int a, int b);
bool same_object_pose(const Pose& a, const Pose& b);

/// True iff the angle between the approach axes is within `tol` of pi/2.
bool is_perpendicular_handover(const Grasp& g1, const Grasp& g2, double tol = 0.15);

/// Assigns ids in group order (initial, handover, placement, goal) and adds
/// edges per the transfer conditions. Throws UnplannableError when the
/// initial or goal group is empty.
RegraspGraph build_regrasp_graph(const NodeGroups& groups);

struct RegraspPath {
  std::vector<int> nodes;
  std::vector<Action> actions;  // one per edge

  std::size_t length() const { return actions.size(); }
};

Action edge_action(const RegraspGraph& graph, int from, int to);

/// True iff consecutive nodes `from`, `to` form a perpendicular handover.
bool is_perpendicular_edge(const RegraspGraph& graph, int from, int to, double tol);
std::size_t handover_count(const RegraspGraph& graph, const RegraspPath& path);
bool has_perpendicular_handover(const RegraspGraph& graph, const RegraspPath& path, double tol);

/// Minimum-edge-count simple path from an initial node to a goal node, ties
/// broken by the lexicographically smallest node id sequence. With
/// `require_perpendicular`, the path must contain a perpendicular handover
/// edge. Throws NoPathError.
RegraspPath search_shortest_path(const RegraspGraph& graph, bool require_perpendicular,
                                 double perpendicular_tol = 0.15);

/// What the feasibility checks need to evaluate a grasp at an object pose.
struct FeasibilityContext {
  const Scene* scene = nullptr;
  const std::vector<ArmModel>* arms = nullptr;
  std::string object_id;
  /// Configuration of every arm when not grasping this object.
  std::vector<JointConfig> rest;
  IkOptions ik;
};

/// Evaluates one grasp of `arm` at `object_pose`; flags and q are filled in.
RegraspNode evaluate_grasp(const FeasibilityContext& ctx, const Pose& object_pose, const Grasp& grasp,
                           NodeContext context);

/// Candidates for `arm` whose hand pose admits an IK solution and a
/// collision-free configuration. Candidates for the other arm are ignored.
std::vector<RegraspNode> filter_feasible_grasps(const FeasibilityContext& ctx, const Pose& object_pose,
                                                const std::vector<Grasp>& candidates, ArmSide arm,
                                                NodeContext context = NodeContext::Initial);

/// True iff both hands can hold the object at once without collision.
bool handover_pair_feasible(const FeasibilityContext& ctx, const RegraspNode& left,
                            const RegraspNode& right);

/// Handover nodes at every pose of the region, plus the jointly feasible
/// (left, right) pairs. Nodes without a partner are not emitted.
NodeGroups generate_handover_nodes(const FeasibilityContext& ctx, const std::vector<Grasp>& left,
                                   const std::vector<Grasp>& right,
                                   const std::vector<Pose>& handover_region);

/// Nodes for every (stable placement x feasible grasp) pair.
std::vector<RegraspNode> generate_placement_nodes(const FeasibilityContext& ctx,
                                                  const std::vector<Pose>& stable_placements,
                                                  const std::vector<Grasp>& candidates);

/// Replaces the node by the same grasp re-evaluated at `new_object_pose`.
/// The node is left out when infeasible there. Returns true if reinserted.
bool rebuild_node(RegraspGraph& graph, int node_id, const Pose& new_object_pose,
                  const FeasibilityContext& ctx);

/// Structured text dump of nodes, edges and the deleted set.
void dump_graph(const RegraspGraph& graph, std::ostream& out);

}  // namespace assembly
