#include <algorithm>
#include <cmath>
#include <limits>

#include "assembly/errors.hpp"
#include "assembly/motion_planner.hpp"

namespace assembly {

void PlannerParams::validate() const {
  if (!(step_size > 0.0)) throw ConfigError("planner: step_size must be positive");
  if (!(connect_threshold > 0.0)) throw ConfigError("planner: connect_threshold must be positive");
  if (!(edge_resolution > 0.0)) throw ConfigError("planner: edge_resolution must be positive");
  if (max_iterations < 0) throw ConfigError("planner: max_iterations must be non-negative");
  if (smoothing_attempts < 0) throw ConfigError("planner: smoothing_attempts must be non-negative");
  if (max_researches < 0 || max_rebuilds < 0) throw ConfigError("planner: budgets must be non-negative");
}

int SearchTree::add(const JointConfig& q, int parent_index) {
  if (parent_index >= static_cast<int>(nodes.size())) throw Error("search tree: bad parent index");
  nodes.push_back(q);
  parent.push_back(parent_index);
  return static_cast<int>(nodes.size()) - 1;
}

int SearchTree::nearest(const JointConfig& q) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double d = (nodes[i] - q).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

JointPath SearchTree::branch(int index) const {
  JointPath out;
  for (int i = index; i >= 0; i = parent[i]) out.push_back(nodes[i]);
  return out;
}

bool ConfigSpace::contains(const JointConfig& q) const {
  return (q.array() >= lower.array() - 1e-12).all() && (q.array() <= upper.array() + 1e-12).all();
}

bool ConfigSpace::edge_free(const JointConfig& a, const JointConfig& b, double resolution) const {
  const double largest = a.size() ? (b - a).cwiseAbs().maxCoeff() : 0.0;
  const int steps = std::max(1, static_cast<int>(std::ceil(largest / resolution)));
  for (int k = 0; k <= steps; ++k) {
    const JointConfig q = a + (static_cast<double>(k) / steps) * (b - a);
    if (!contains(q) || !is_free(q)) return false;
  }
  return true;
}

double path_length(const JointPath& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += (path[i] - path[i - 1]).norm();
  return total;
}

JointPath densify(const JointPath& path, double max_step) {
  if (path.size() < 2) return path;
  JointPath out{path.front()};
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double d = (path[i] - path[i - 1]).norm();
    const int pieces = std::max(1, static_cast<int>(std::ceil(d / max_step - 1e-12)));
    for (int k = 1; k <= pieces; ++k) {
      out.push_back(path[i - 1] + (static_cast<double>(k) / pieces) * (path[i] - path[i - 1]));
    }
  }
  return out;
}

namespace {

JointConfig sample(const ConfigSpace& space, Rng& rng) {
  JointConfig q(space.lower.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = uniform(rng, space.lower[i], space.upper[i]);
  return q;
}

enum class Extend { Trapped, Advanced, Reached };

// Grows the tree one step from its nearest node toward `target`; on success
// `added` is the new node index.
Extend extend(SearchTree& tree, const JointConfig& target, const ConfigSpace& space,
              const PlannerParams& params, int& added) {
  const int near = tree.nearest(target);
  const JointConfig& from = tree.nodes[near];
  const JointConfig delta = target - from;
  const double d = delta.norm();
  const bool reaches = d <= params.step_size;
  const JointConfig q_new = reaches ? target : JointConfig(from + delta * (params.step_size / d));
  if (!space.edge_free(from, q_new, params.edge_resolution)) return Extend::Trapped;
  added = tree.add(q_new, near);
  return reaches ? Extend::Reached : Extend::Advanced;
}

}  // namespace

JointPath rrt_connect(const JointConfig& start, const JointConfig& goal, const ConfigSpace& space,
                      const PlannerParams& params, Rng& rng) {
  params.validate();
  if (!space.contains(start) || !space.is_free(start)) {
    throw CollidingEndpointError("rrt_connect: start configuration is in collision");
  }
  if (!space.contains(goal) || !space.is_free(goal)) {
    throw CollidingEndpointError("rrt_connect: goal configuration is in collision");
  }
  if ((goal - start).norm() <= 1e-12) return {start};

  SearchTree a, b;
  a.add(start, -1);
  b.add(goal, -1);
  bool a_is_start = true;
  for (int it = 0; it < params.max_iterations; ++it) {
    const JointConfig q_rand = it == 0 ? goal : sample(space, rng);
    int new_a = -1;
    if (extend(a, q_rand, space, params, new_a) != Extend::Trapped) {
      const JointConfig& q_new = a.nodes[new_a];
      // connect: keep extending the other tree toward q_new
      int end_b = b.nearest(q_new);
      while ((b.nodes[end_b] - q_new).norm() > params.connect_threshold) {
        int added = -1;
        if (extend(b, q_new, space, params, added) == Extend::Trapped) break;
        end_b = added;
      }
      if ((b.nodes[end_b] - q_new).norm() <= params.connect_threshold &&
          space.edge_free(b.nodes[end_b], q_new, params.edge_resolution)) {
        JointPath from_a = a.branch(new_a);
        std::reverse(from_a.begin(), from_a.end());
        JointPath to_b = b.branch(end_b);
        if ((to_b.front() - from_a.back()).norm() <= 1e-12) to_b.erase(to_b.begin());
        from_a.insert(from_a.end(), to_b.begin(), to_b.end());
        if (!a_is_start) std::reverse(from_a.begin(), from_a.end());
        return densify(from_a, params.step_size);
      }
    }
    std::swap(a, b);
    a_is_start = !a_is_start;
  }
  throw NoPathError("rrt_connect: no path within iteration budget");
}

JointPath rrt_connect(const JointConfig& start, const JointConfig& goal, const ConfigSpace& space,
                      const PlannerParams& params) {
  Rng rng(params.seed);
  return rrt_connect(start, goal, space, params, rng);
}

JointPath shortcut_smooth(const JointPath& path, const ConfigSpace& space, int attempts,
                          double resolution, Rng& rng) {
  if (attempts <= 0 || path.size() < 3) return path;
  JointPath out = path;
  for (int k = 0; k < attempts && out.size() >= 3; ++k) {
    const std::size_t n = out.size();
    std::size_t i = static_cast<std::size_t>(uniform01(rng) * n);
    std::size_t j = static_cast<std::size_t>(uniform01(rng) * n);
    if (i > j) std::swap(i, j);
    if (j < i + 2) continue;
    double segment = 0.0;
    for (std::size_t m = i + 1; m <= j; ++m) segment += (out[m] - out[m - 1]).norm();
    const double direct = (out[j] - out[i]).norm();
    if (direct >= segment - 1e-9 * std::max(1.0, segment)) continue;
    if (!space.edge_free(out[i], out[j], resolution)) continue;
    out.erase(out.begin() + static_cast<long>(i) + 1, out.begin() + static_cast<long>(j));
  }
  return out;
}

bool validate_path(const JointPath& path, const ConfigSpace& space, double resolution) {
  if (path.empty()) return false;
  if (path.size() == 1) return space.contains(path[0]) && space.is_free(path[0]);
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!space.edge_free(path[i - 1], path[i], resolution)) return false;
  }
  return true;
}

}  // namespace assembly
