#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "assembly/errors.hpp"
#include "assembly/pipeline.hpp"

namespace assembly {

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::PlanOnly: return "plan-only";
    case RunMode::ControlOnly: return "control-only";
    case RunMode::Full: return "full";
  }
  return "?";
}

RunMode parse_run_mode(const std::string& s) {
  if (s == "plan-only" || s == "plan") return RunMode::PlanOnly;
  if (s == "control-only" || s == "control") return RunMode::ControlOnly;
  if (s == "full") return RunMode::Full;
  throw ConfigError("unknown mode '" + s + "' (expected plan-only, control-only or full)");
}

InjectedError sample_error(const ErrorBounds& bounds, Rng& rng) {
  InjectedError e;
  e.offset.x() = uniform_symmetric(rng, bounds.position);
  e.offset.y() = uniform_symmetric(rng, bounds.position);
  for (int i = 0; i < 3; ++i) e.rotation[i] = uniform_symmetric(rng, bounds.rotation);
  return e;
}

Pose apply_error(const Pose& peg_pose, const Pose& hole_frame, const InjectedError& error) {
  const Rotation local = Rotation::about(Vec3::UnitX(), error.rotation.x()) *
                         Rotation::about(Vec3::UnitY(), error.rotation.y()) *
                         Rotation::about(Vec3::UnitZ(), error.rotation.z());
  const Rotation& h = hole_frame.rotation;
  return Pose(h * local * h.inverse() * peg_pose.rotation, peg_pose.translation + h * error.offset);
}

bool RunReport::success() const { return exit_code() == 0; }

int RunReport::exit_code() const {
  if (plan.attempted && !plan.success) return 1;
  if (control.attempted && !control.outcome.success()) return 2;
  return 0;
}

namespace {

std::vector<Grasp> grasps_for(const ObjectSpec& obj, ArmSide side) {
  std::vector<Grasp> out;
  for (const auto& g : obj.grasps) out.push_back(make_grasp(g.id, g.hand_in_object, g.jaw_width, side));
  return out;
}

Scene planning_scene(const Scenario& sc) {
  Scene scene;
  for (const auto& b : sc.environment) scene.add_body(b);
  scene.add_body({sc.assembly.id, sc.assembly.shape, sc.goal_assembly_pose, BodyKind::StaticEnvironment});
  scene.add_body({sc.mating.id, sc.mating.shape, sc.mating.initial_pose, BodyKind::Object});
  return scene;
}

std::vector<JointConfig> rest_configs(const Scenario& sc) {
  std::vector<JointConfig> rest;
  for (const auto& a : sc.arms) rest.push_back(a.home);
  return rest;
}

}  // namespace

PlanSummary plan_scenario(const Scenario& sc, std::uint64_t seed, std::ostream* graph_dump) {
  PlanSummary out;
  out.attempted = true;
  const Scene scene = planning_scene(sc);
  FeasibilityContext ctx{&scene, &sc.arms, sc.mating.id, rest_configs(sc), sc.ik};

  NodeGroups groups;
  const auto left = grasps_for(sc.mating, ArmSide::Left);
  const auto right = grasps_for(sc.mating, ArmSide::Right);
  const Pose goal_pose = sc.pre_assembly_pose();
  for (ArmSide side : {ArmSide::Left, ArmSide::Right}) {
    const auto& cand = side == ArmSide::Left ? left : right;
    auto init = filter_feasible_grasps(ctx, sc.mating.initial_pose, cand, side, NodeContext::Initial);
    auto goal = filter_feasible_grasps(ctx, goal_pose, cand, side, NodeContext::Goal);
    groups.initial.insert(groups.initial.end(), init.begin(), init.end());
    groups.goal.insert(groups.goal.end(), goal.begin(), goal.end());
  }
  if (!sc.handover_region.empty()) {
    NodeGroups h = generate_handover_nodes(ctx, left, right, sc.handover_region);
    groups.handover = std::move(h.handover);
    groups.handover_pairs = std::move(h.handover_pairs);
  }
  std::vector<Grasp> all = left;
  all.insert(all.end(), right.begin(), right.end());
  groups.placement = generate_placement_nodes(ctx, sc.stable_placements, all);

  RegraspGraph graph;
  try {
    graph = build_regrasp_graph(groups);
    RegraspMotionSetup setup;
    setup.scene = &scene;
    setup.arms = &sc.arms;
    setup.object_id = sc.mating.id;
    setup.rest = ctx.rest;
    setup.params = sc.planner;
    setup.params.seed = seed;
    setup.require_perpendicular = sc.require_perpendicular_handover;
    setup.perpendicular_tol = sc.perpendicular_tolerance;
    setup.alternate_handover_poses = sc.alternate_handover_poses;
    setup.alternate_placements = sc.alternate_placements;
    setup.ik = sc.ik;
    const MotionPlan plan = plan_regrasp_motion(graph, setup);
    out.success = true;
    out.path = plan.path;
    for (int id : plan.path.nodes) out.path_nodes.push_back(graph.node(id));
    out.edge_lengths.assign(plan.path.length(), 0.0);
    for (const auto& seg : plan.segments) {
      if (seg.edge < 0) {
        out.approach_length += path_length(seg.path);
      } else {
        out.edge_lengths[static_cast<std::size_t>(seg.edge)] += path_length(seg.path);
      }
    }
    out.deleted_edges = plan.deleted_edges;
    out.researches = plan.researches;
    out.rebuilds = plan.rebuilds;
    out.handover_count = handover_count(graph, plan.path);
    out.perpendicular_handover = has_perpendicular_handover(graph, plan.path, sc.perpendicular_tolerance);
    out.segments = plan.segments;
    out.goal_grasp = graph.node(plan.path.nodes.back()).grasp;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    out.error = e.what();
  }
  if (graph_dump) dump_graph(graph, *graph_dump);
  return out;
}

InsertionOutcome run_control(const Scenario& sc, const Grasp& grasp, const InjectedError& error,
                             std::uint64_t sensor_seed) {
  const Pose pre = sc.pre_assembly_pose();
  const Pose hand_start = pre * grasp.hand_pose_in_object;
  const Pose actual = apply_error(pre, sc.hole_frame(), error);
  PegHoleModel model = sc.peg_hole;
  model.hole_frame = sc.hole_frame();
  model.peg_in_hand = invert(hand_start) * actual;
  SensorModel sensor = sc.sensor;
  sensor.seed = sensor_seed;
  SimulatedPlant plant(model, sensor, hand_start);
  return run_insertion(sc.controller, plant, hand_start);
}

namespace {

// Distinct streams for error sampling and sensor noise from one run seed.
std::uint64_t sensor_seed_for(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL; }

}  // namespace

RunReport run_pipeline(const Scenario& scenario, const PipelineOptions& options) {
  Scenario sc = scenario;
  if (options.spiral_mode) sc.controller.spiral_mode = *options.spiral_mode;
  RunReport report;
  report.scenario = sc.name;
  report.seed = options.seed.value_or(sc.seed);
  report.mode = options.mode;

  std::optional<Grasp> grasp;
  if (options.mode != RunMode::ControlOnly) {
    report.plan = plan_scenario(sc, report.seed, options.graph_dump);
    if (!report.plan.success) return report;
    grasp = report.plan.goal_grasp;
  }
  if (options.mode == RunMode::PlanOnly) return report;
  if (!grasp) grasp = make_grasp(sc.mating.grasps.front().id, sc.mating.grasps.front().hand_in_object,
                                 sc.mating.grasps.front().jaw_width, ArmSide::Left);

  Rng rng(report.seed);
  report.control.attempted = true;
  report.control.error = sample_error(sc.error, rng);
  report.control.outcome = run_control(sc, *grasp, report.control.error, sensor_seed_for(report.seed));
  return report;
}

namespace {

YAML::Node vec_node(const Vec3& v) {
  YAML::Node n;
  n.SetStyle(YAML::EmitterStyle::Flow);
  for (int i = 0; i < 3; ++i) n.push_back(v[i]);
  return n;
}

YAML::Node phase_counts(const ControllerTrace& trace, double scale) {
  YAML::Node n;
  for (Phase p : {Phase::Linear, Phase::Spiral, Phase::Impedance}) {
    const double c = static_cast<double>(trace.count(p));
    if (scale > 0) {
      n[to_string(p)] = c * scale;
    } else {
      n[to_string(p)] = trace.count(p);
    }
  }
  return n;
}

}  // namespace

void write_report(const RunReport& r, std::ostream& out) {
  YAML::Node root;
  root["scenario"] = r.scenario;
  root["seed"] = r.seed;
  root["mode"] = to_string(r.mode);
  root["outcome"] = r.success() ? "success" : "failure";
  root["exit_code"] = r.exit_code();

  YAML::Node plan;
  if (!r.plan.attempted) {
    plan["status"] = "skipped";
  } else if (!r.plan.success) {
    plan["status"] = "failed";
    plan["error"] = r.plan.error;
  } else {
    plan["status"] = "ok";
    YAML::Node path;
    for (const auto& n : r.plan.path_nodes) {
      YAML::Node e;
      e.SetStyle(YAML::EmitterStyle::Flow);
      e["node"] = n.id;
      e["context"] = to_string(n.context);
      e["arm"] = to_string(n.grasp.arm);
      e["grasp"] = n.grasp.id;
      path.push_back(e);
    }
    plan["path"] = path;
    YAML::Node actions;
    actions.SetStyle(YAML::EmitterStyle::Flow);
    for (Action a : r.plan.path.actions) actions.push_back(to_string(a));
    plan["actions"] = actions;
    YAML::Node lengths;
    lengths.SetStyle(YAML::EmitterStyle::Flow);
    for (double l : r.plan.edge_lengths) lengths.push_back(l);
    plan["edge_path_lengths"] = lengths;
    plan["approach_path_length"] = r.plan.approach_length;
    YAML::Node deleted;
    deleted.SetStyle(YAML::EmitterStyle::Flow);
    for (const auto& [a, b] : r.plan.deleted_edges) {
      YAML::Node e;
      e.SetStyle(YAML::EmitterStyle::Flow);
      e.push_back(a);
      e.push_back(b);
      deleted.push_back(e);
    }
    plan["deleted_edges"] = deleted;
    plan["researches"] = r.plan.researches;
    plan["rebuilds"] = r.plan.rebuilds;
    plan["handover_count"] = r.plan.handover_count;
    plan["perpendicular_handover"] = r.plan.perpendicular_handover;
    YAML::Node segments;
    for (const auto& s : r.plan.segments) {
      YAML::Node seg;
      seg["edge"] = s.edge;
      seg["arm"] = s.arm;
      seg["label"] = s.label;
      YAML::Node joints;
      for (const auto& q : s.path) {
        YAML::Node row;
        row.SetStyle(YAML::EmitterStyle::Flow);
        for (Eigen::Index i = 0; i < q.size(); ++i) row.push_back(q[i]);
        joints.push_back(row);
      }
      seg["joints"] = joints;
      segments.push_back(seg);
    }
    plan["segments"] = segments;
  }
  root["plan"] = plan;

  YAML::Node control;
  if (!r.control.attempted) {
    control["status"] = "skipped";
  } else {
    const InsertionOutcome& o = r.control.outcome;
    control["status"] = to_string(o.phase);
    if (!o.success()) {
      control["failed_phase"] = to_string(o.failed_phase);
      control["reason"] = o.reason;
    }
    YAML::Node err;
    err["offset_m"] = vec_node(r.control.error.offset);
    err["rotation_rad"] = vec_node(r.control.error.rotation);
    control["injected_error"] = err;
    control["phase_steps"] = phase_counts(o.trace, 0.0);
    control["phase_durations_s"] = phase_counts(o.trace, o.trace.dt);
    control["trace_length"] = o.trace.records.size();
    control["final_insertion_depth_m"] = o.insertion_depth;
  }
  root["control"] = control;

  YAML::Emitter em;
  em.SetDoublePrecision(9);
  em << root;
  out << em.c_str() << "\n";
}

double SweepReport::success_rate() const {
  if (trials.empty()) return 0.0;
  const auto ok = std::count_if(trials.begin(), trials.end(), [](const SweepTrial& t) { return t.outcome == Phase::Done; });
  return static_cast<double>(ok) / static_cast<double>(trials.size());
}

double SweepReport::mean_steps(Phase phase) const {
  if (trials.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : trials) {
    total += static_cast<double>(phase == Phase::Linear   ? t.linear_steps
                                 : phase == Phase::Spiral ? t.spiral_steps
                                                          : t.impedance_steps);
  }
  return total / static_cast<double>(trials.size());
}

SweepReport batch_sweep(const Scenario& sc, int n_trials, const ErrorBounds& bounds, std::uint64_t seed,
                        unsigned threads) {
  if (n_trials < 1) throw ConfigError("batch_sweep: need at least one trial");
  SweepReport report;
  report.scenario = sc.name;
  report.seed = seed;
  report.bounds = bounds;
  report.spiral_mode = sc.controller.spiral_mode;
  report.trials.resize(static_cast<std::size_t>(n_trials));
  const GraspSpec& g0 = sc.mating.grasps.front();
  const Grasp grasp = make_grasp(g0.id, g0.hand_in_object, g0.jaw_width, ArmSide::Left);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < n_trials; i = next++) {
      SweepTrial& t = report.trials[static_cast<std::size_t>(i)];
      t.seed = seed + static_cast<std::uint64_t>(i);
      Rng rng(t.seed);
      t.error = sample_error(bounds, rng);
      const InsertionOutcome o = run_control(sc, grasp, t.error, sensor_seed_for(t.seed));
      t.outcome = o.phase;
      t.failed_phase = o.failed_phase;
      t.linear_steps = o.trace.count(Phase::Linear);
      t.spiral_steps = o.trace.count(Phase::Spiral);
      t.impedance_steps = o.trace.count(Phase::Impedance);
      t.insertion_depth = o.insertion_depth;
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n_trials));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return report;
}

void write_sweep_report(const SweepReport& r, std::ostream& out) {
  YAML::Node root;
  root["scenario"] = r.scenario;
  root["seed"] = r.seed;
  root["spiral_mode"] = to_string(r.spiral_mode);
  root["trials"] = r.trials.size();
  root["error_bounds"]["position_m"] = r.bounds.position;
  root["error_bounds"]["rotation_rad"] = r.bounds.rotation;
  root["success_rate"] = r.success_rate();
  root["mean_phase_steps"]["linear"] = r.mean_steps(Phase::Linear);
  root["mean_phase_steps"]["spiral"] = r.mean_steps(Phase::Spiral);
  root["mean_phase_steps"]["impedance"] = r.mean_steps(Phase::Impedance);
  YAML::Node trials;
  for (const auto& t : r.trials) {
    YAML::Node n;
    n.SetStyle(YAML::EmitterStyle::Flow);
    n["seed"] = t.seed;
    n["outcome"] = to_string(t.outcome);
    if (t.outcome != Phase::Done) n["failed_phase"] = to_string(t.failed_phase);
    n["offset_m"] = vec_node(t.error.offset);
    n["rotation_rad"] = vec_node(t.error.rotation);
    n["steps"] = vec_node(Vec3(static_cast<double>(t.linear_steps), static_cast<double>(t.spiral_steps),
                               static_cast<double>(t.impedance_steps)));
    n["depth_m"] = t.insertion_depth;
    trials.push_back(n);
  }
  root["per_trial"] = trials;
  YAML::Emitter em;
  em.SetDoublePrecision(9);
  em << root;
  out << em.c_str() << "\n";
}

}  // namespace assembly
