#pragma once

// Reference computations the tests compare the library against. Each one is
// written from the definitions and avoids the code paths it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "assembly/controller.hpp"
#include "assembly/motion_planner.hpp"
#include "assembly/random.hpp"
#include "assembly/regrasp.hpp"

namespace oracle {

using namespace assembly;

inline Mat3 exp_series(const Vec3& w, int terms = 60) {
  const Mat3 k = skew(w);
  Mat3 sum = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int n = 1; n < terms; ++n) {
    term = term * k / static_cast<double>(n);
    sum += term;
  }
  return sum;
}

inline Vec3 random_unit(Rng& rng) {
  Vec3 v;
  do {
    v = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
  } while (v.norm() < 0.1);
  return v.normalized();
}

// Finite-difference form of the impedance law solved forward by the update:
// F = m (P+ - 2P + P-)/dt^2 + c (P+ - P)/dt + k (P+ - P).
inline Vec3 impedance_force(const Vec3& p_next, const Vec3& p, const Vec3& p_prev, const ImpedanceGains& g,
                            double dt) {
  Vec3 f;
  for (int a = 0; a < 3; ++a) {
    f[a] = g.m[a] * (p_next[a] - 2 * p[a] + p_prev[a]) / (dt * dt) + g.c[a] * (p_next[a] - p[a]) / dt +
           g.k[a] * (p_next[a] - p[a]);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Regrasp graphs

inline bool perpendicular_axes(const Vec3& a, const Vec3& b, double tol) {
  const double c = a.normalized().dot(b.normalized());
  return std::abs(std::acos(std::max(-1.0, std::min(1.0, c))) - M_PI / 2) <= tol;
}

// Shortest simple path from an initial to a goal node over live edges, by
// exhaustive enumeration. Ties go to the lexicographically smallest id list.
inline std::optional<std::vector<int>> brute_force_path(const RegraspGraph& g, bool require_perpendicular,
                                                        double tol) {
  const auto edges = g.live_edges();
  std::map<int, std::vector<int>> adj;
  for (const auto& [key, kind] : edges) {
    adj[key.first].push_back(key.second);
    adj[key.second].push_back(key.first);
  }
  auto perp_edge = [&](int a, int b) {
    const auto it = edges.find(a < b ? NodePair{a, b} : NodePair{b, a});
    return it != edges.end() && it->second == EdgeKind::Handover &&
           perpendicular_axes(g.node(a).grasp.approach_axis_in_object, g.node(b).grasp.approach_axis_in_object, tol);
  };
  std::optional<std::vector<int>> best;
  std::vector<int> path;
  std::set<int> used;
  std::function<void(int)> walk = [&](int v) {
    if (g.node(v).context == NodeContext::Goal) {
      bool ok = !require_perpendicular;
      for (std::size_t i = 0; !ok && i + 1 < path.size(); ++i) ok = perp_edge(path[i], path[i + 1]);
      if (ok && (!best || path.size() < best->size() || (path.size() == best->size() && path < *best))) best = path;
    }
    for (int u : adj[v]) {
      if (used.count(u)) continue;
      used.insert(u);
      path.push_back(u);
      walk(u);
      path.pop_back();
      used.erase(u);
    }
  };
  for (const auto& [id, n] : g.nodes()) {
    if (n.context != NodeContext::Initial) continue;
    path = {id};
    used = {id};
    walk(id);
  }
  return best;
}

// Random node groups of at most `max_nodes` nodes. Object poses, grasp ids and
// approach axes are drawn from small pools so that every kind of transfer
// condition shows up.
inline NodeGroups random_groups(Rng& rng, int max_nodes = 12) {
  const std::vector<Rotation> axis_frames{rodrigues(-M_PI / 2, Vec3::UnitY()), rodrigues(M_PI / 2, Vec3::UnitX()),
                                          Rotation(), rodrigues(-M_PI / 2, Vec3(-1, 1, 0))};
  auto pick = [&](int n) { return static_cast<int>(uniform01(rng) * n); };
  auto make_node = [&](NodeContext ctx, const Pose& pose) {
    RegraspNode n;
    n.context = ctx;
    n.object_pose = pose;
    const int gi = pick(4);
    n.grasp = make_grasp("g" + std::to_string(gi), Pose(axis_frames[static_cast<std::size_t>(gi)], Vec3::Zero()), 0.02,
                         pick(2) ? ArmSide::Right : ArmSide::Left);
    n.ik_ok = n.collision_ok = true;
    return n;
  };
  const Pose initial = Pose::from_translation(Vec3(0, 1, 0));
  const Pose goal = Pose::from_translation(Vec3(0, -1, 0));
  const std::vector<Pose> handover{Pose::from_translation(Vec3(1, 0, 0)), Pose::from_translation(Vec3(1, 0, 1))};
  const Pose placement = Pose::from_translation(Vec3(2, 0, 0));

  const int total = 4 + pick(max_nodes - 3);
  NodeGroups g;
  g.initial.push_back(make_node(NodeContext::Initial, initial));
  g.goal.push_back(make_node(NodeContext::Goal, goal));
  for (int i = 2; i < total; ++i) {
    switch (pick(4)) {
      case 0: g.initial.push_back(make_node(NodeContext::Initial, initial)); break;
      case 1: g.goal.push_back(make_node(NodeContext::Goal, goal)); break;
      case 2: g.placement.push_back(make_node(NodeContext::Placement, placement)); break;
      default: g.handover.push_back(make_node(NodeContext::Handover, handover[static_cast<std::size_t>(pick(2))])); break;
    }
  }
  for (std::size_t i = 0; i < g.handover.size(); ++i) {
    for (std::size_t j = i + 1; j < g.handover.size(); ++j) {
      const auto& a = g.handover[i];
      const auto& b = g.handover[j];
      if (a.grasp.arm != b.grasp.arm && same_object_pose(a.object_pose, b.object_pose) && uniform01(rng) < 0.8) {
        g.handover_pairs.emplace_back(i, j);
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Spiral coverage

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

// Centered spiral probes P0 + r_k Rot(theta_k, v)(Ix + Iy) with r_k = k dr and
// theta_k = k dtheta, for as long as the controller keeps searching.
inline std::vector<Vec3> centered_spiral(const Vec3& p0, const Vec3& v, double d_theta, double d_r,
                                         double max_radius) {
  const Vec3 in_plane = Vec3::UnitX() + Vec3::UnitY();
  std::vector<Vec3> out{p0};
  for (int k = 1;; ++k) {
    const double r = k * d_r;
    const Vec3 p = p0 + r * (rodrigues(k * d_theta, v) * in_plane);
    if (r > max_radius || (p - p0).norm() > std::sqrt(2.0) * max_radius) break;
    out.push_back(p);
  }
  return out;
}

inline double path_distance(const std::vector<Vec3>& path, const Vec3& target) {
  double best = (path.front() - target).norm();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) best = std::min(best, point_segment_distance(target, path[i], path[i + 1]));
  return best;
}

// ---------------------------------------------------------------------------
// Planar two-link arm behind a wall with a gap, for planner soundness checks.

struct GapWall {
  double l1 = 0.8, l2 = 0.8;
  double wall_x = 1.05, wall_thickness = 0.1;
  double gap_center = 0.0, gap_width = 0.35;

  // Does segment a-b touch the wall slab outside the gap?
  bool segment_hits(Eigen::Vector2d a, Eigen::Vector2d b) const {
    const double x0 = wall_x, x1 = wall_x + wall_thickness;
    if (std::max(a.x(), b.x()) < x0 || std::min(a.x(), b.x()) > x1) return false;
    double t0 = 0, t1 = 1;
    const double dx = b.x() - a.x();
    if (std::abs(dx) > 1e-15) {
      double ta = (x0 - a.x()) / dx, tb = (x1 - a.x()) / dx;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
    const double ya = a.y() + t0 * (b.y() - a.y());
    const double yb = a.y() + t1 * (b.y() - a.y());
    const double lo = std::min(ya, yb), hi = std::max(ya, yb);
    return lo < gap_center - gap_width / 2 || hi > gap_center + gap_width / 2;
  }

  bool free(const JointConfig& q) const {
    const Eigen::Vector2d elbow(l1 * std::cos(q[0]), l1 * std::sin(q[0]));
    const Eigen::Vector2d tip = elbow + l2 * Eigen::Vector2d(std::cos(q[0] + q[1]), std::sin(q[0] + q[1]));
    return !segment_hits(Eigen::Vector2d::Zero(), elbow) && !segment_hits(elbow, tip);
  }

  ConfigSpace space() const {
    ConfigSpace s;
    s.lower = Eigen::Vector2d(-M_PI, -M_PI);
    s.upper = Eigen::Vector2d(M_PI, M_PI);
    const GapWall self = *this;
    s.is_free = [self](const JointConfig& q) { return self.free(q); };
    return s;
  }

  // A configuration reaching through the gap, when one exists for this wall.
  std::optional<JointConfig> through_gap(double reach_x) const {
    const Eigen::Vector2d target(reach_x, gap_center);
    const double d2 = target.squaredNorm();
    const double c2 = (d2 - l1 * l1 - l2 * l2) / (2 * l1 * l2);
    if (std::abs(c2) > 1) return std::nullopt;
    for (double sign : {1.0, -1.0}) {
      const double q1 = sign * std::acos(c2);
      const double q0 = std::atan2(target.y(), target.x()) - std::atan2(l2 * std::sin(q1), l1 + l2 * std::cos(q1));
      JointConfig q(2);
      q << std::remainder(q0, 2 * M_PI), q1;
      if (free(q)) return q;
    }
    return std::nullopt;
  }
};

// Re-checks a path by interpolating every edge with steps no larger than
// `resolution` against the raw predicate, plus the joint limits.
inline bool revalidate(const JointPath& path, const ConfigSpace& space, double resolution) {
  for (const auto& q : path) {
    if ((q.array() < space.lower.array()).any() || (q.array() > space.upper.array()).any()) return false;
    if (!space.is_free(q)) return false;
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double len = (path[i + 1] - path[i]).cwiseAbs().maxCoeff();
    const int n = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    for (int k = 1; k < n; ++k) {
      if (!space.is_free(path[i] + (path[i + 1] - path[i]) * (static_cast<double>(k) / n))) return false;
    }
  }
  return true;
}

}  // namespace oracle
