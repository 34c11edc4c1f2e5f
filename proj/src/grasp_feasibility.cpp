#include <algorithm>

#include "assembly/errors.hpp"
#include "assembly/regrasp.hpp"

namespace assembly {

namespace {

void check_context(const FeasibilityContext& ctx) {
  if (!ctx.scene || !ctx.arms) throw ConfigError("feasibility context is missing scene or arms");
  if (ctx.rest.size() != ctx.arms->size()) {
    throw DimensionMismatchError("feasibility context needs one rest config per arm");
  }
}

Scene scene_with_object(const FeasibilityContext& ctx, const Pose& object_pose) {
  Scene scene = *ctx.scene;
  scene.detach(ctx.object_id);
  scene.body(ctx.object_id).pose = object_pose;
  return scene;
}

}  // namespace

RegraspNode evaluate_grasp(const FeasibilityContext& ctx, const Pose& object_pose, const Grasp& grasp,
                           NodeContext context) {
  check_context(ctx);
  RegraspNode node;
  node.grasp = grasp;
  node.context = context;
  node.object_pose = object_pose;
  const std::size_t a = arm_index(grasp.arm);
  if (a >= ctx.arms->size()) throw ConfigError("grasp references a missing arm");
  const ArmModel& arm = (*ctx.arms)[a];
  const Pose hand = object_pose * grasp.hand_pose_in_object;
  try {
    node.q = inverse_kinematics(arm.chain, hand, arm.chain.clamp(ctx.rest[a]), ctx.ik);
    node.ik_ok = true;
  } catch (const UnreachableError&) {
    return node;
  }
  Scene scene = scene_with_object(ctx, object_pose);
  scene.attach(ctx.object_id, a, invert(grasp.hand_pose_in_object));
  std::vector<JointConfig> q_all = ctx.rest;
  q_all[a] = node.q;
  node.collision_ok = config_collision_free(scene, *ctx.arms, q_all);
  return node;
}

std::vector<RegraspNode> filter_feasible_grasps(const FeasibilityContext& ctx, const Pose& object_pose,
                                                const std::vector<Grasp>& candidates, ArmSide arm,
                                                NodeContext context) {
  if (candidates.empty()) throw ConfigError("filter_feasible_grasps: empty candidate list");
  std::vector<RegraspNode> out;
  for (const auto& g : candidates) {
    if (g.arm != arm) continue;
    RegraspNode n = evaluate_grasp(ctx, object_pose, g, context);
    if (n.ik_ok && n.collision_ok) out.push_back(std::move(n));
  }
  return out;
}

bool handover_pair_feasible(const FeasibilityContext& ctx, const RegraspNode& left,
                            const RegraspNode& right) {
  check_context(ctx);
  if (left.grasp.arm == right.grasp.arm) return false;
  if (!same_object_pose(left.object_pose, right.object_pose)) return false;
  Scene scene = scene_with_object(ctx, left.object_pose);
  const std::size_t la = arm_index(left.grasp.arm);
  const std::size_t ra = arm_index(right.grasp.arm);
  scene.attach(ctx.object_id, la, invert(left.grasp.hand_pose_in_object));
  scene.allow_contact(hand_id((*ctx.arms)[ra]), ctx.object_id);
  std::vector<JointConfig> q_all = ctx.rest;
  q_all[la] = left.q;
  q_all[ra] = right.q;
  return config_collision_free(scene, *ctx.arms, q_all);
}

NodeGroups generate_handover_nodes(const FeasibilityContext& ctx, const std::vector<Grasp>& left,
                                   const std::vector<Grasp>& right,
                                   const std::vector<Pose>& handover_region) {
  if (handover_region.empty()) throw ConfigError("generate_handover_nodes: empty handover region");
  NodeGroups out;
  for (const Pose& pose : handover_region) {
    std::vector<RegraspNode> l, r;
    if (!left.empty()) l = filter_feasible_grasps(ctx, pose, left, ArmSide::Left, NodeContext::Handover);
    if (!right.empty()) r = filter_feasible_grasps(ctx, pose, right, ArmSide::Right, NodeContext::Handover);
    std::vector<long> l_index(l.size(), -1), r_index(r.size(), -1);
    for (std::size_t i = 0; i < l.size(); ++i) {
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (!handover_pair_feasible(ctx, l[i], r[j])) continue;
        if (l_index[i] < 0) {
          l_index[i] = static_cast<long>(out.handover.size());
          out.handover.push_back(l[i]);
        }
        if (r_index[j] < 0) {
          r_index[j] = static_cast<long>(out.handover.size());
          out.handover.push_back(r[j]);
        }
        out.handover_pairs.emplace_back(static_cast<std::size_t>(l_index[i]),
                                        static_cast<std::size_t>(r_index[j]));
      }
    }
  }
  return out;
}

std::vector<RegraspNode> generate_placement_nodes(const FeasibilityContext& ctx,
                                                  const std::vector<Pose>& stable_placements,
                                                  const std::vector<Grasp>& candidates) {
  std::vector<RegraspNode> out;
  if (candidates.empty()) return out;
  for (const Pose& pose : stable_placements) {
    for (ArmSide side : {ArmSide::Left, ArmSide::Right}) {
      for (const auto& g : candidates) {
        if (g.arm != side) continue;
        RegraspNode n = evaluate_grasp(ctx, pose, g, NodeContext::Placement);
        if (n.ik_ok && n.collision_ok) out.push_back(std::move(n));
      }
    }
  }
  return out;
}

bool rebuild_node(RegraspGraph& graph, int node_id, const Pose& new_object_pose,
                  const FeasibilityContext& ctx) {
  const RegraspNode old = graph.node(node_id);
  graph.remove_node(node_id);
  RegraspNode fresh = evaluate_grasp(ctx, new_object_pose, old.grasp, old.context);
  if (!fresh.ik_ok || !fresh.collision_ok) return false;
  fresh.id = node_id;
  std::vector<int> partners;
  if (fresh.context == NodeContext::Handover) {
    for (const auto& [id, other] : graph.nodes()) {
      if (other.context != NodeContext::Handover || other.grasp.arm == fresh.grasp.arm) continue;
      if (!same_object_pose(other.object_pose, new_object_pose)) continue;
      const bool ok = fresh.grasp.arm == ArmSide::Left ? handover_pair_feasible(ctx, fresh, other)
                                                       : handover_pair_feasible(ctx, other, fresh);
      if (ok) partners.push_back(id);
    }
  }
  graph.insert_node(std::move(fresh), partners);
  return true;
}

}  // namespace assembly
