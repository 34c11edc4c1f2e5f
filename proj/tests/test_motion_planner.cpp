#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "assembly/errors.hpp"
#include "oracles.hpp"

using namespace assembly;

namespace {

JointConfig q2(double a, double b) {
  JointConfig q(2);
  q << a, b;
  return q;
}

ConfigSpace open_space(int dim) {
  ConfigSpace s;
  s.lower = Eigen::VectorXd::Constant(dim, -M_PI);
  s.upper = Eigen::VectorXd::Constant(dim, M_PI);
  s.is_free = [](const JointConfig&) { return true; };
  return s;
}

// Disc obstacle in a 2-D configuration space.
ConfigSpace disc_space(const JointConfig& centre, double radius) {
  ConfigSpace s = open_space(2);
  s.is_free = [centre, radius](const JointConfig& q) { return (q - centre).norm() > radius; };
  return s;
}

RegraspNode node(NodeContext ctx, const Pose& pose, const std::string& grasp, ArmSide arm) {
  RegraspNode n;
  n.context = ctx;
  n.object_pose = pose;
  n.grasp.id = grasp;
  n.grasp.arm = arm;
  n.ik_ok = n.collision_ok = true;
  return n;
}

// Initial 0 (a/L), handover 1 (a/L) and 2 (b/R), goal 3 (a/L) and 4 (b/R).
RegraspGraph handover_graph() {
  NodeGroups g;
  g.initial.push_back(node(NodeContext::Initial, Pose::from_translation(Vec3(0, 1, 0)), "a", ArmSide::Left));
  g.handover.push_back(node(NodeContext::Handover, Pose::from_translation(Vec3(1, 0, 0)), "a", ArmSide::Left));
  g.handover.push_back(node(NodeContext::Handover, Pose::from_translation(Vec3(1, 0, 0)), "b", ArmSide::Right));
  g.handover_pairs = {{0, 1}};
  g.goal.push_back(node(NodeContext::Goal, Pose::from_translation(Vec3(0, -1, 0)), "a", ArmSide::Left));
  g.goal.push_back(node(NodeContext::Goal, Pose::from_translation(Vec3(0, -1, 0)), "b", ArmSide::Right));
  return build_regrasp_graph(g);
}

struct StubSetup {
  Scene scene;
  std::vector<ArmModel> arms{ArmModel{}, ArmModel{}};
  RegraspMotionSetup setup;
  StubSetup() {
    setup.scene = &scene;
    setup.arms = &arms;
    setup.object_id = "obj";
    setup.rest = {JointConfig::Zero(1), JointConfig::Zero(1)};
  }
};

// Edge planner that fails on a fixed set of node pairs and records every call.
struct StubPlanner {
  std::set<NodePair> blocked;
  std::vector<NodePair> attempted;

  EdgeMotionPlanner fn() {
    return [this](const RegraspGraph&, const RegraspPath& path, int edge, std::vector<JointConfig>&,
                  Rng&) -> std::optional<std::vector<MotionSegment>> {
      if (edge < 0) return std::vector<MotionSegment>{MotionSegment{edge, 0, "approach", {}}};
      const auto e = static_cast<std::size_t>(edge);
      const NodePair key = make_pair_key(path.nodes[e], path.nodes[e + 1]);
      attempted.push_back(key);
      if (blocked.count(key)) return std::nullopt;
      return std::vector<MotionSegment>{MotionSegment{edge, 0, "edge", {}}};
    };
  }
};

}  // namespace

TEST_CASE("planner parameter validation") {
  PlannerParams p;
  CHECK_NOTHROW(p.validate());
  p.step_size = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = PlannerParams{};
  p.max_iterations = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = PlannerParams{};
  p.connect_threshold = 0.05;
  CHECK(p.threshold_below_step());
}

TEST_CASE("start equal to goal") {
  const JointConfig q = q2(0.3, -0.2);
  const JointPath path = rrt_connect(q, q, open_space(2), PlannerParams{});
  REQUIRE(path.size() == 1);
  CHECK(path[0] == q);
}

TEST_CASE("free space path joins the endpoints") {
  const JointConfig a = q2(-1, -1), b = q2(1.5, 2);
  PlannerParams p;
  const JointPath path = rrt_connect(a, b, open_space(2), p);
  CHECK(path.front() == a);
  CHECK(path.back() == b);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) CHECK((path[i + 1] - path[i]).norm() <= p.step_size + 1e-12);
}

TEST_CASE("colliding endpoints and an empty budget") {
  const ConfigSpace s = disc_space(q2(0, 0), 0.5);
  CHECK_THROWS_AS(rrt_connect(q2(0, 0), q2(2, 2), s, PlannerParams{}), CollidingEndpointError);
  CHECK_THROWS_AS(rrt_connect(q2(2, 2), q2(0.1, 0), s, PlannerParams{}), CollidingEndpointError);
  PlannerParams p;
  p.max_iterations = 0;
  CHECK_THROWS_AS(rrt_connect(q2(-2, -2), q2(2, 2), s, p), NoPathError);
}

TEST_CASE("paths around a disc survive a finer re-check") {
  const ConfigSpace s = disc_space(q2(0, 0), 1.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    PlannerParams p;
    p.seed = seed;
    const JointPath path = rrt_connect(q2(-2, 0.1), q2(2, -0.1), s, p);
    CHECK(oracle::revalidate(path, s, p.edge_resolution / 10));
    CHECK(validate_path(path, s, p.edge_resolution / 10));
  }
}

TEST_CASE("same seed gives the same path") {
  const ConfigSpace s = disc_space(q2(0, 0), 1.0);
  PlannerParams p;
  p.seed = 77;
  const JointPath a = rrt_connect(q2(-2, 0.1), q2(2, -0.1), s, p);
  const JointPath b = rrt_connect(q2(-2, 0.1), q2(2, -0.1), s, p);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("arm reaching through a gap in a wall") {
  Rng rng(4);
  int solved = 0;
  const int instances = 20;
  for (int i = 0; i < instances; ++i) {
    oracle::GapWall wall;
    wall.gap_center = uniform(rng, -0.3, 0.3);
    const auto goal = wall.through_gap(1.3);
    REQUIRE(goal.has_value());
    const JointConfig start = q2(M_PI / 2, 0.3);
    REQUIRE(wall.free(start));
    PlannerParams p;
    p.seed = 100 + static_cast<std::uint64_t>(i);
    p.max_iterations = 20000;
    const ConfigSpace space = wall.space();
    try {
      const JointPath path = rrt_connect(start, *goal, space, p);
      CHECK(oracle::revalidate(path, space, p.edge_resolution / 10));
      CHECK((path.front() - start).norm() == 0.0);
      CHECK((path.back() - *goal).norm() == 0.0);
      ++solved;
    } catch (const NoPathError&) {
    }
  }
  CHECK(solved >= 19);
}

TEST_CASE("shortcut smoothing") {
  Rng rng(9);
  const ConfigSpace open = open_space(2);
  const JointPath straight{q2(0, 0), q2(0.5, 0.5), q2(1, 1)};
  const JointPath smoothed = shortcut_smooth(straight, open, 50, 0.01, rng);
  CHECK(path_length(smoothed) <= path_length(straight) + 1e-12);
  CHECK(smoothed.front() == straight.front());
  CHECK(smoothed.back() == straight.back());

  const JointPath zigzag{q2(0, 0), q2(0.5, 1), q2(1, 0), q2(1.5, 1), q2(2, 0)};
  const JointPath shorter = shortcut_smooth(zigzag, open, 50, 0.01, rng);
  CHECK(path_length(shorter) < path_length(zigzag));
  CHECK(shorter.front() == zigzag.front());
  CHECK(shorter.back() == zigzag.back());

  const JointPath same = shortcut_smooth(zigzag, open, 0, 0.01, rng);
  CHECK(same == zigzag);

  // shortcuts never cut through the obstacle
  const ConfigSpace s = disc_space(q2(1, 0), 0.4);
  const JointPath around{q2(0, 0), q2(0.5, 0.8), q2(1.5, 0.8), q2(2, 0)};
  REQUIRE(validate_path(around, s, 0.005));
  const JointPath kept = shortcut_smooth(around, s, 200, 0.005, rng);
  CHECK(oracle::revalidate(kept, s, 0.0005));
}

TEST_CASE("densify bounds the step") {
  const JointPath p{q2(0, 0), q2(1, 0), q2(1, 0.25)};
  const JointPath d = densify(p, 0.1);
  CHECK(d.size() == 14);
  for (std::size_t i = 0; i + 1 < d.size(); ++i) CHECK((d[i + 1] - d[i]).norm() <= 0.1 + 1e-12);
  CHECK(path_length(d) == doctest::Approx(path_length(p)));
  CHECK(densify({q2(1, 1)}, 0.1).size() == 1);
}

TEST_CASE("failing edge is deleted and the plan goes through the handover") {
  RegraspGraph graph = handover_graph();
  StubSetup s;
  StubPlanner stub;
  stub.blocked = {make_pair_key(0, 3), make_pair_key(1, 3)};
  const MotionPlan plan = plan_regrasp_motion(graph, s.setup, stub.fn());
  CHECK(plan.path.nodes == std::vector<int>{0, 1, 2, 4});
  CHECK(plan.researches == 2);
  CHECK(plan.deleted_edges == std::vector<NodePair>{make_pair_key(0, 3), make_pair_key(1, 3)});
  CHECK_FALSE(graph.has_live_edge(0, 3));
  // a deleted edge is never tried again
  CHECK(std::count(stub.attempted.begin(), stub.attempted.end(), make_pair_key(0, 3)) == 1);
  CHECK(std::count(stub.attempted.begin(), stub.attempted.end(), make_pair_key(1, 3)) == 1);
  CHECK(plan.segments.size() == 1 + plan.path.length());
}

TEST_CASE("re-search budget") {
  StubSetup s;
  s.setup.params.max_researches = 0;
  RegraspGraph graph = handover_graph();
  StubPlanner stub;
  stub.blocked = {make_pair_key(0, 3)};
  CHECK_THROWS_AS(plan_regrasp_motion(graph, s.setup, stub.fn()), UnplannableError);

  RegraspGraph all_blocked = handover_graph();
  StubPlanner none;
  for (const auto& [key, kind] : all_blocked.live_edges()) none.blocked.insert(key);
  s.setup.params.max_researches = 10;
  CHECK_THROWS_AS(plan_regrasp_motion(all_blocked, s.setup, none.fn()), UnplannableError);
  std::set<NodePair> seen;
  for (const auto& key : none.attempted) {
    CHECK(seen.count(key) == 0);
    seen.insert(key);
  }
}
