// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>

#include "assembly/errors.hpp"
#include "assembly/pipeline.hpp"
#include "oracles.hpp"

using namespace assembly;

namespace {

constexpr double kImpedanceRelTol = 1e-9;
constexpr double kImpedanceMaxSeconds = 1.0;
constexpr double kRodriguesSeriesTol = 1e-12;
constexpr double kAxiomTol = 1e-9;
constexpr double kOrientationTol = 1e-12;
constexpr double kRobustnessMinRate = 0.90;
constexpr double kRobustnessMaxSeconds = 120.0;
constexpr double kSweepPositionBound = 0.003;
constexpr double kSweepRotationBound = 1.5 * M_PI / 180.0;
constexpr double kCoverageMinAgreement = 0.95;
constexpr double kPlannerMinSuccess = 0.95;
constexpr double kRevalidationRefinement = 10.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Scenario nominal() { return load_scenario(resolve_scenario_path("nominal")); }

void impedance_consistency() {
  Rng rng(1001);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    ImpedanceGains g;
    for (int a = 0; a < 3; ++a) {
      g.m[a] = uniform(rng, 0.0, 5.0);
      g.c[a] = uniform(rng, 0.0, 200.0);
      g.k[a] = uniform(rng, 0.1, 1000.0);
    }
    const double dt = uniform(rng, 0.001, 0.1);
    const Vec3 f(uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, -50, 50));
    const Vec3 p(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    const Vec3 pm(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    const Vec3 back = oracle::impedance_force(impedance_update(f, p, pm, g, dt), p, pm, g, dt);
    worst = std::max(worst, (back - f).norm() / f.norm());
  }
  const double secs = seconds_since(t0);
  report(1, worst <= kImpedanceRelTol && secs < kImpedanceMaxSeconds,
         fmt("impedance round trip, 1e4 samples, max rel err %.2e, %.3f s", worst, secs));
}

void rodrigues_oracle() {
  Rng rng(1002);
  double series = 0.0, axioms = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double th = uniform(rng, -2 * M_PI, 2 * M_PI);
    const Vec3 v = oracle::random_unit(rng) * uniform(rng, 0.1, 10.0);
    const Rotation r = rodrigues(th, v);
    series = std::max(series, (r.matrix() - oracle::exp_series(v.normalized() * th)).cwiseAbs().maxCoeff());
    axioms = std::max(axioms, ((r * rodrigues(-th, v)).matrix() - Mat3::Identity()).cwiseAbs().maxCoeff());
    const Vec3 x(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5));
    axioms = std::max(axioms, std::abs((r * x).norm() - x.norm()));
    axioms = std::max(axioms, (rodrigues(th + 2 * M_PI, v).matrix() - r.matrix()).cwiseAbs().maxCoeff());
  }
  report(2, series <= kRodriguesSeriesTol && axioms <= kAxiomTol,
         fmt("rodrigues vs series max %.2e, axioms max %.2e", series, axioms));
}

void three_phase_trace() {
  const RunReport r = run_pipeline(nominal());
  const ControllerTrace& trace = r.control.outcome.trace;
  const auto runs = trace.runs();
  const bool order = runs.size() == 3 && runs[0].first == Phase::Linear && runs[1].first == Phase::Spiral &&
                     runs[2].first == Phase::Impedance;
  double deviation = INFINITY;
  if (!trace.records.empty()) {
    deviation = 0.0;
    const Rotation& r0 = trace.records.front().orientation;
    for (const auto& rec : trace.records) {
      if (rec.phase == Phase::Impedance) break;
      deviation = std::max(deviation, (rec.orientation.matrix() - r0.matrix()).cwiseAbs().maxCoeff());
    }
  }
  std::string seq;
  for (const auto& [phase, n] : runs) seq += std::string(seq.empty() ? "" : ">") + to_string(phase) + "(" + std::to_string(n) + ")";
  report(3, r.success() && order && deviation < kOrientationTol,
         "nominal run " + seq + fmt(", orientation deviation %.1e", deviation));
}

void sensor_envelope() {
  const Scenario s = nominal();
  const Pose hand = s.pre_assembly_pose() * Pose::from_translation(Vec3(0, 0, 0.05));
  SimulatedPlant plant(s.peg_hole, s.sensor, hand);
  Vec3 peak = Vec3::Zero();
  bool inside = true;
  for (int i = 0; i < 10000; ++i) {
    const WrenchSample w = plant.command(hand);
    peak = peak.cwiseMax(w.force.cwiseAbs());
    inside = inside && std::abs(w.force.x()) <= 1.2 && std::abs(w.force.y()) <= 1.2 && std::abs(w.force.z()) <= 0.5;
  }
  report(4, inside, fmt("1e4 free-space samples, peak |F| = (%.4f, %.4f, %.4f) N", peak.x(), peak.y(), peak.z()));
}

void insertion_robustness() {
  const auto t0 = Clock::now();
  Scenario s = nominal();
  const ErrorBounds bounds{kSweepPositionBound, kSweepRotationBound};
  double rate[2] = {0, 0}, zero[2] = {0, 0};
  for (int m = 0; m < 2; ++m) {
    s.controller.spiral_mode = m == 0 ? SpiralMode::Literal : SpiralMode::Centered;
    rate[m] = batch_sweep(s, 100, bounds, s.seed).success_rate();
    zero[m] = batch_sweep(s, 100, ErrorBounds{}, s.seed).success_rate();
  }
  const double secs = seconds_since(t0);
  const bool pass = rate[0] >= kRobustnessMinRate && rate[1] >= kRobustnessMinRate && zero[0] == 1.0 &&
                    zero[1] == 1.0 && secs < kRobustnessMaxSeconds;
  report(5, pass,
         fmt("100 trials at 3 mm / 1.5 deg: literal %.2f, centered %.2f", rate[0], rate[1]) +
             fmt("; zero error: literal %.2f, centered %.2f", zero[0], zero[1]) + fmt("; %.1f s", secs));
}

void spiral_coverage() {
  Scenario s = nominal();
  s.controller.spiral_mode = SpiralMode::Centered;
  const ControllerConfig& c = s.controller;
  const double clearance = s.peg_hole.clearance;
  // radial advance per turn along the (I_x + I_y) direction, which has length sqrt(2)
  const double pitch = 2 * M_PI * c.centered.delta_r * std::sqrt(2.0) / c.centered.delta_theta;
  const Pose hole = s.hole_frame();
  const Vec3 v = hole.rotation.inverse() * c.v_direction;
  const auto path = oracle::centered_spiral(Vec3::Zero(), v, c.centered.delta_theta, c.centered.delta_r,
                                            c.max_spiral_radius);
  const auto& g = s.mating.grasps.front();
  const Grasp grasp = make_grasp(g.id, g.hand_in_object, g.jaw_width, ArmSide::Left);

  Rng rng(1006);
  int covered = 0, agree = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const double rad = c.max_spiral_radius * std::sqrt(uniform01(rng));
    const double ang = uniform(rng, -M_PI, M_PI);
    InjectedError e;
    e.offset = Vec3(rad * std::cos(ang), rad * std::sin(ang), 0.0);
    // the hole sits at -offset relative to where the peg starts
    const bool reachable = oracle::path_distance(path, -e.offset) < clearance;
    covered += reachable;
    const bool found = run_control(s, grasp, e, 5000 + static_cast<std::uint64_t>(i)).success();
    agree += found == reachable;
  }
  const double agreement = static_cast<double>(agree) / n;
  report(6, pitch < 2 * clearance && covered == n && agreement >= kCoverageMinAgreement,
         fmt("pitch %.3f mm vs %.3f mm, oracle covers %.0f/1000, controller agreement %.3f", pitch * 1e3,
             2 * clearance * 1e3, covered, agreement));
}

void regrasp_optimality() {
  Rng rng(1007);
  int match = 0, perpendicular_ok = 0, perpendicular_paths = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const RegraspGraph graph = build_regrasp_graph(oracle::random_groups(rng, 12));
    bool ok = true;
    for (bool perp : {false, true}) {
      const auto expected = oracle::brute_force_path(graph, perp, 0.15);
      try {
        const RegraspPath p = search_shortest_path(graph, perp, 0.15);
        ok = ok && expected && p.nodes == *expected;
        if (perp) {
          ++perpendicular_paths;
          perpendicular_ok += has_perpendicular_handover(graph, p, 0.15);
        }
      } catch (const NoPathError&) {
        ok = ok && !expected;
      }
    }
    match += ok;
  }
  report(7, match == n && perpendicular_ok == perpendicular_paths,
         fmt("%.0f/200 graphs match brute force; %.0f/%.0f constrained paths hold a perpendicular handover", match,
             perpendicular_ok, perpendicular_paths));
}

void planner_soundness() {
  Rng rng(1008);
  int solved = 0, sound = 0;
  const int n = 20;
  for (int i = 0; i < n; ++i) {
    oracle::GapWall wall;
    wall.gap_center = uniform(rng, -0.3, 0.3);
    const auto goal = wall.through_gap(1.3);
    JointConfig start(2);
    start << M_PI / 2, 0.3;
    if (!goal || !wall.free(start)) continue;
    PlannerParams p;
    p.seed = 2000 + static_cast<std::uint64_t>(i);
    p.max_iterations = 20000;
    const ConfigSpace space = wall.space();
    try {
      const JointPath path = rrt_connect(start, *goal, space, p);
      ++solved;
      sound += oracle::revalidate(path, space, p.edge_resolution / kRevalidationRefinement);
    } catch (const NoPathError&) {
    }
  }

  // deleted regrasp edges: a stub edge planner fails a random subset of edges
  int reappeared = 0, plans = 0;
  for (int i = 0; i < 200; ++i) {
    RegraspGraph graph = build_regrasp_graph(oracle::random_groups(rng, 12));
    std::set<NodePair> blocked;
    for (const auto& [key, kind] : graph.live_edges()) {
      if (uniform01(rng) < 0.3) blocked.insert(key);
    }
    std::vector<NodePair> attempted;
    const EdgeMotionPlanner stub = [&](const RegraspGraph&, const RegraspPath& path, int edge,
                                       std::vector<JointConfig>&, Rng&) -> std::optional<std::vector<MotionSegment>> {
      if (edge < 0) return std::vector<MotionSegment>{};
      const auto e = static_cast<std::size_t>(edge);
      const NodePair key = make_pair_key(path.nodes[e], path.nodes[e + 1]);
      attempted.push_back(key);
      if (blocked.count(key)) return std::nullopt;
      return std::vector<MotionSegment>{};
    };
    Scene scene;
    std::vector<ArmModel> arms(2);
    RegraspMotionSetup setup;
    setup.scene = &scene;
    setup.arms = &arms;
    setup.rest = {JointConfig::Zero(1), JointConfig::Zero(1)};
    setup.params.max_researches = 50;
    setup.params.max_rebuilds = 0;
    std::vector<NodePair> deleted;
    try {
      const MotionPlan plan = plan_regrasp_motion(graph, setup, stub);
      ++plans;
      deleted = plan.deleted_edges;
      for (std::size_t k = 0; k + 1 < plan.path.nodes.size(); ++k) {
        const NodePair key = make_pair_key(plan.path.nodes[k], plan.path.nodes[k + 1]);
        reappeared += std::count(deleted.begin(), deleted.end(), key) > 0;
      }
    } catch (const UnplannableError&) {
    } catch (const NoPathError&) {
    }
    std::set<NodePair> seen_blocked;
    for (const auto& key : attempted) {
      if (!blocked.count(key)) continue;
      reappeared += seen_blocked.count(key) > 0;
      seen_blocked.insert(key);
    }
  }
  const double rate = static_cast<double>(solved) / n;
  report(8, sound == solved && rate >= kPlannerMinSuccess && reappeared == 0,
         fmt("gap-wall %.0f/20 solved, %.0f re-validated at 10x finer steps; deleted edges reused %.0f times over %.0f plans",
             solved, sound, reappeared, plans));
}

void determinism() {
  const Scenario s = nominal();
  std::string csv[2], rep[2];
  for (int k = 0; k < 2; ++k) {
    const RunReport r = run_pipeline(s);
    std::ostringstream c, y;
    if (!r.control.outcome.trace.records.empty()) emit_trace_csv(r.control.outcome.trace, c);
    write_report(r, y);
    csv[k] = c.str();
    rep[k] = y.str();
  }
  report(9, !csv[0].empty() && csv[0] == csv[1] && rep[0] == rep[1],
         fmt("two seeded runs: trace %.0f bytes, report %.0f bytes, identical", static_cast<double>(csv[0].size()),
             static_cast<double>(rep[0].size())));
}

template <class F>
void guarded(int id, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, impedance_consistency);
  guarded(2, rodrigues_oracle);
  guarded(3, three_phase_trace);
  guarded(4, sensor_envelope);
  guarded(5, insertion_robustness);
  guarded(6, spiral_coverage);
  guarded(7, regrasp_optimality);
  guarded(8, planner_soundness);
  guarded(9, determinism);
  return failures == 0 ? 0 : 1;
}
