#include <algorithm>

#include "assembly/errors.hpp"
#include "assembly/motion_planner.hpp"

namespace assembly {

namespace {

ConfigSpace arm_space(const Scene& scene, const std::vector<ArmModel>& arms, std::size_t moving,
                      const std::vector<JointConfig>& arm_state) {
  const KinematicChain& chain = arms[moving].chain;
  ConfigSpace space;
  space.lower.resize(static_cast<Eigen::Index>(chain.dof()));
  space.upper.resize(static_cast<Eigen::Index>(chain.dof()));
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    space.lower[static_cast<Eigen::Index>(i)] = chain.joints[i].lower;
    space.upper[static_cast<Eigen::Index>(i)] = chain.joints[i].upper;
  }
  space.is_free = [&scene, &arms, moving, arm_state](const JointConfig& q) {
    std::vector<JointConfig> q_all = arm_state;
    q_all[moving] = q;
    return config_collision_free(scene, arms, q_all);
  };
  return space;
}

struct SegmentRequest {
  Scene scene;
  std::size_t arm;
  JointConfig goal;
  std::string label;
};

}  // namespace

EdgeMotionPlanner make_rrt_edge_planner(const RegraspMotionSetup& setup) {
  return [setup](const RegraspGraph& graph, const RegraspPath& path, int edge,
                 std::vector<JointConfig>& arm_state,
                 Rng& rng) -> std::optional<std::vector<MotionSegment>> {
    const std::vector<ArmModel>& arms = *setup.arms;
    const std::string& obj = setup.object_id;

    auto base_scene = [&](const Pose& object_pose) {
      Scene s = *setup.scene;
      s.detach(obj);
      s.body(obj).pose = object_pose;
      return s;
    };

    std::vector<SegmentRequest> requests;
    if (edge < 0) {
      const RegraspNode& n = graph.node(path.nodes.front());
      const std::size_t a = arm_index(n.grasp.arm);
      Scene s = base_scene(n.object_pose);
      s.allow_contact(hand_id(arms[a]), obj);
      requests.push_back({std::move(s), a, n.q, "approach"});
    } else {
      const RegraspNode& u = graph.node(path.nodes[static_cast<std::size_t>(edge)]);
      const RegraspNode& v = graph.node(path.nodes[static_cast<std::size_t>(edge) + 1]);
      const std::size_t a = arm_index(u.grasp.arm);
      const std::size_t b = arm_index(v.grasp.arm);
      const auto kind = graph.edge_kind(u.id, v.id);
      if (!kind) throw UnknownEdgeError("edge planner: path uses a missing edge");
      switch (*kind) {
        case EdgeKind::SameGrasp: {
          Scene s = base_scene(u.object_pose);
          s.attach(obj, a, invert(u.grasp.hand_pose_in_object));
          requests.push_back({std::move(s), a, v.q, "transfer"});
          break;
        }
        case EdgeKind::Handover: {
          Scene give = base_scene(u.object_pose);
          give.attach(obj, a, invert(u.grasp.hand_pose_in_object));
          give.allow_contact(hand_id(arms[b]), obj);
          requests.push_back({std::move(give), b, v.q, "handover-approach"});
          Scene take = base_scene(v.object_pose);
          take.attach(obj, b, invert(v.grasp.hand_pose_in_object));
          take.allow_contact(hand_id(arms[a]), obj);
          requests.push_back({std::move(take), a, setup.rest[a], "handover-retreat"});
          break;
        }
        case EdgeKind::PlacementRegrasp: {
          if (a == b) {
            Scene s = base_scene(u.object_pose);
            s.allow_contact(hand_id(arms[a]), obj);
            requests.push_back({std::move(s), a, v.q, "regrasp"});
          } else {
            Scene release = base_scene(u.object_pose);
            release.allow_contact(hand_id(arms[a]), obj);
            requests.push_back({std::move(release), a, setup.rest[a], "retreat"});
            Scene pick = base_scene(v.object_pose);
            pick.allow_contact(hand_id(arms[b]), obj);
            requests.push_back({std::move(pick), b, v.q, "approach"});
          }
          break;
        }
      }
    }

    std::vector<MotionSegment> out;
    for (auto& req : requests) {
      const ConfigSpace space = arm_space(req.scene, arms, req.arm, arm_state);
      JointPath joint_path;
      try {
        joint_path = rrt_connect(arm_state[req.arm], req.goal, space, setup.params, rng);
      } catch (const NoPathError&) {
        return std::nullopt;
      } catch (const CollidingEndpointError&) {
        return std::nullopt;
      }
      joint_path = shortcut_smooth(joint_path, space, setup.params.smoothing_attempts,
                                   setup.params.edge_resolution, rng);
      joint_path = densify(joint_path, setup.params.step_size);
      arm_state[req.arm] = req.goal;
      out.push_back({edge, req.arm, req.label, std::move(joint_path)});
    }
    return out;
  };
}

namespace {

// Moves every node sharing the pose of the first rebuild candidate to the next
// untried alternate pose. False when nothing can be rebuilt.
bool rebuild_step(RegraspGraph& graph, const RegraspMotionSetup& setup,
                  std::vector<std::size_t>& next_alt) {
  std::vector<int> candidates;
  for (const auto& [a, b] : graph.deleted_edges()) {
    for (int id : {a, b}) {
      const auto ctx = graph.node(id).context;
      if (ctx == NodeContext::Handover || ctx == NodeContext::Placement) candidates.push_back(id);
    }
  }
  if (candidates.empty()) return false;
  const RegraspNode& seed = graph.node(*std::min_element(candidates.begin(), candidates.end()));
  const NodeContext ctx = seed.context;
  const Pose old_pose = seed.object_pose;
  const std::size_t slot = ctx == NodeContext::Handover ? 0 : 1;
  const auto& alternates =
      ctx == NodeContext::Handover ? setup.alternate_handover_poses : setup.alternate_placements;

  auto pose_in_use = [&](const Pose& p) {
    for (const auto& [id, n] : graph.nodes()) {
      if (n.context == ctx && same_object_pose(n.object_pose, p)) return true;
    }
    return false;
  };
  std::optional<Pose> target;
  while (next_alt[slot] < alternates.size()) {
    const Pose& p = alternates[next_alt[slot]++];
    if (!pose_in_use(p)) {
      target = p;
      break;
    }
  }
  if (!target) return false;

  std::vector<int> group;
  for (const auto& [id, n] : graph.nodes()) {
    if (n.context == ctx && same_object_pose(n.object_pose, old_pose)) group.push_back(id);
  }
  FeasibilityContext fctx{setup.scene, setup.arms, setup.object_id, setup.rest, setup.ik};
  for (int id : group) rebuild_node(graph, id, *target, fctx);
  return true;
}

}  // namespace

MotionPlan plan_regrasp_motion(RegraspGraph& graph, const RegraspMotionSetup& setup,
                               const EdgeMotionPlanner& edge_planner) {
  if (!setup.scene || !setup.arms) throw ConfigError("plan_regrasp_motion: missing scene or arms");
  if (setup.rest.size() != setup.arms->size()) {
    throw DimensionMismatchError("plan_regrasp_motion: one rest configuration per arm required");
  }
  setup.params.validate();
  const EdgeMotionPlanner planner = edge_planner ? edge_planner : make_rrt_edge_planner(setup);
  Rng rng(setup.params.seed);
  std::vector<std::size_t> next_alt{0, 0};

  MotionPlan plan;
  for (;;) {
    RegraspPath path;
    try {
      path = search_shortest_path(graph, setup.require_perpendicular, setup.perpendicular_tol);
    } catch (const NoPathError&) {
      if (plan.rebuilds >= setup.params.max_rebuilds) {
        throw UnplannableError("regrasp planning failed: rebuild budget exhausted");
      }
      if (!rebuild_step(graph, setup, next_alt)) {
        throw UnplannableError("regrasp planning failed: no regrasp path and nothing to rebuild");
      }
      ++plan.rebuilds;
      continue;
    }

    std::vector<JointConfig> arm_state = setup.rest;
    std::vector<MotionSegment> segments;
    std::optional<int> failed;
    for (int e = -1; e < static_cast<int>(path.length()); ++e) {
      auto segs = planner(graph, path, e, arm_state, rng);
      if (!segs) {
        failed = e;
        break;
      }
      segments.insert(segments.end(), segs->begin(), segs->end());
    }
    if (!failed) {
      plan.path = path;
      plan.segments = std::move(segments);
      plan.final_configs = std::move(arm_state);
      return plan;
    }
    if (path.length() == 0) throw UnplannableError("regrasp planning failed: approach motion infeasible");
    const std::size_t k = static_cast<std::size_t>(std::max(*failed, 0));
    graph.delete_edge(path.nodes[k], path.nodes[k + 1]);
    plan.deleted_edges.push_back(make_pair_key(path.nodes[k], path.nodes[k + 1]));
    if (plan.researches >= setup.params.max_researches) {
      throw UnplannableError("regrasp planning failed: re-search budget exhausted");
    }
    ++plan.researches;
  }
}

}  // namespace assembly
