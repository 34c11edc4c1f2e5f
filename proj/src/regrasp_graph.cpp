#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <ostream>

#include "assembly/errors.hpp"
#include "assembly/regrasp.hpp"

namespace assembly {

const char* to_string(ArmSide side) { return side == ArmSide::Left ? "left" : "right"; }

std::size_t arm_index(ArmSide side) { return static_cast<std::size_t>(side); }

const char* to_string(NodeContext c) {
  switch (c) {
    case NodeContext::Initial: return "initial";
    case NodeContext::Handover: return "handover";
    case NodeContext::Placement: return "placement";
    case NodeContext::Goal: return "goal";
  }
  return "?";
}

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::SameGrasp: return "same_grasp";
    case EdgeKind::Handover: return "handover";
    case EdgeKind::PlacementRegrasp: return "placement_regrasp";
  }
  return "?";
}

const char* to_string(Action a) {
  switch (a) {
    case Action::Pick: return "pick";
    case Action::Place: return "place";
    case Action::Handover: return "handover";
    case Action::Transit: return "transit";
    case Action::GoalMove: return "goal-move";
  }
  return "?";
}

Grasp make_grasp(std::string id, const Pose& hand_pose_in_object, double jaw_width, ArmSide arm,
                 double max_jaw_width) {
  if (jaw_width < 0.0 || jaw_width > max_jaw_width) {
    throw ConfigError("grasp '" + id + "': jaw width outside gripper range");
  }
  Grasp g;
  g.id = std::move(id);
  g.hand_pose_in_object = hand_pose_in_object;
  g.approach_axis_in_object = hand_pose_in_object.rotation.col_z();
  g.jaw_width = jaw_width;
  g.arm = arm;
  return g;
}

NodePair make_pair_key(int a, int b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }

bool same_object_pose(const Pose& a, const Pose& b) {
  const PoseError e = pose_error(a, b);
  return e.position <= 1e-9 && e.orientation <= 1e-9;
}

bool is_perpendicular_handover(const Grasp& g1, const Grasp& g2, double tol) {
  const Vec3 a = g1.approach_axis_in_object.normalized();
  const Vec3 b = g2.approach_axis_in_object.normalized();
  const double angle = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
  return std::abs(angle - M_PI / 2.0) <= tol;
}

// ---------------------------------------------------------------------------
// RegraspGraph

const RegraspNode& RegraspGraph::node(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error("unknown regrasp node " + std::to_string(id));
  return it->second;
}

std::map<NodePair, EdgeKind> RegraspGraph::live_edges() const {
  std::map<NodePair, EdgeKind> out;
  for (const auto& [k, kind] : edges_) {
    if (!deleted_.count(k)) out.emplace(k, kind);
  }
  return out;
}

bool RegraspGraph::has_live_edge(int a, int b) const {
  const NodePair k = make_pair_key(a, b);
  return edges_.count(k) && !deleted_.count(k);
}

std::optional<EdgeKind> RegraspGraph::edge_kind(int a, int b) const {
  auto it = edges_.find(make_pair_key(a, b));
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> RegraspGraph::neighbors(int id) const {
  std::vector<int> out;
  for (const auto& [k, kind] : edges_) {
    if (deleted_.count(k)) continue;
    if (k.first == id) out.push_back(k.second);
    if (k.second == id) out.push_back(k.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void RegraspGraph::delete_edge(int a, int b) {
  const NodePair k = make_pair_key(a, b);
  if (!edges_.count(k) || deleted_.count(k)) {
    throw UnknownEdgeError("no live edge between nodes " + std::to_string(a) + " and " +
                           std::to_string(b));
  }
  deleted_.insert(k);
}

bool RegraspGraph::handover_compatible(int a, int b) const {
  return compatible_.count(make_pair_key(a, b)) > 0;
}

std::optional<EdgeKind> RegraspGraph::transfer_condition(const RegraspNode& u,
                                                         const RegraspNode& v) const {
  const bool same_pose = same_object_pose(u.object_pose, v.object_pose);
  const bool same_grasp = u.grasp.arm == v.grasp.arm && u.grasp.id == v.grasp.id;
  if (same_grasp && !same_pose) {
    // the object cannot be carried from the initial pose to the initial pose
    if (u.context == v.context &&
        (u.context == NodeContext::Initial || u.context == NodeContext::Goal)) {
      return std::nullopt;
    }
    return EdgeKind::SameGrasp;
  }
  if (!same_pose || same_grasp) return std::nullopt;
  if (u.context == NodeContext::Placement && v.context == NodeContext::Placement) {
    return EdgeKind::PlacementRegrasp;
  }
  if (u.context == NodeContext::Handover && v.context == NodeContext::Handover &&
      u.grasp.arm != v.grasp.arm && handover_compatible(u.id, v.id)) {
    return EdgeKind::Handover;
  }
  return std::nullopt;
}

void RegraspGraph::insert_node(RegraspNode node, const std::vector<int>& compatible) {
  if (node.id < 0 || nodes_.count(node.id)) {
    throw Error("regrasp node id " + std::to_string(node.id) + " is invalid or in use");
  }
  for (int other : compatible) compatible_.insert(make_pair_key(node.id, other));
  const int id = node.id;
  nodes_.emplace(id, std::move(node));
  const RegraspNode& u = nodes_.at(id);
  for (const auto& [other_id, v] : nodes_) {
    if (other_id == id) continue;
    if (auto kind = transfer_condition(u, v)) edges_[make_pair_key(id, other_id)] = *kind;
  }
}

void RegraspGraph::remove_node(int id) {
  if (!nodes_.erase(id)) throw Error("unknown regrasp node " + std::to_string(id));
  auto touches = [id](const NodePair& k) { return k.first == id || k.second == id; };
  std::erase_if(edges_, [&](const auto& e) { return touches(e.first); });
  std::erase_if(deleted_, touches);
  std::erase_if(compatible_, touches);
}

RegraspGraph build_regrasp_graph(const NodeGroups& groups) {
  if (groups.initial.empty()) throw UnplannableError("regrasp graph: no feasible initial grasps");
  if (groups.goal.empty()) throw UnplannableError("regrasp graph: no feasible goal grasps");
  RegraspGraph graph;
  int next = 0;
  auto add_group = [&](const std::vector<RegraspNode>& group, NodeContext context,
                       std::vector<int>* ids) {
    for (const auto& n : group) {
      RegraspNode copy = n;
      copy.id = next++;
      copy.context = context;
      if (ids) ids->push_back(copy.id);
      graph.insert_node(std::move(copy));
    }
  };
  add_group(groups.initial, NodeContext::Initial, nullptr);
  // Handover pairings must be known before the handover nodes are wired up,
  // so the handover nodes are inserted with their partner lists.
  std::vector<int> handover_ids;
  const int first_handover = next;
  for (std::size_t i = 0; i < groups.handover.size(); ++i) handover_ids.push_back(first_handover + static_cast<int>(i));
  std::vector<std::vector<int>> partners(groups.handover.size());
  for (const auto& [i, j] : groups.handover_pairs) {
    if (i >= groups.handover.size() || j >= groups.handover.size()) {
      throw Error("handover pair index out of range");
    }
    partners[i].push_back(handover_ids[j]);
    partners[j].push_back(handover_ids[i]);
  }
  for (std::size_t i = 0; i < groups.handover.size(); ++i) {
    RegraspNode copy = groups.handover[i];
    copy.id = next++;
    copy.context = NodeContext::Handover;
    graph.insert_node(std::move(copy), partners[i]);
  }
  add_group(groups.placement, NodeContext::Placement, nullptr);
  add_group(groups.goal, NodeContext::Goal, nullptr);
  return graph;
}

// ---------------------------------------------------------------------------
// Paths

Action edge_action(const RegraspGraph& graph, int from, int to) {
  const auto kind = graph.edge_kind(from, to);
  if (!kind) throw UnknownEdgeError("no edge between path nodes");
  const RegraspNode& u = graph.node(from);
  const RegraspNode& v = graph.node(to);
  if (*kind == EdgeKind::Handover) return Action::Handover;
  if (*kind == EdgeKind::PlacementRegrasp) return Action::Pick;
  if (v.context == NodeContext::Goal) return Action::GoalMove;
  if (v.context == NodeContext::Placement) return Action::Place;
  if (u.context == NodeContext::Placement) return Action::Pick;
  return Action::Transit;
}

bool is_perpendicular_edge(const RegraspGraph& graph, int from, int to, double tol) {
  const auto kind = graph.edge_kind(from, to);
  return kind && *kind == EdgeKind::Handover &&
         is_perpendicular_handover(graph.node(from).grasp, graph.node(to).grasp, tol);
}

std::size_t handover_count(const RegraspGraph& graph, const RegraspPath& path) {
  (void)graph;
  return static_cast<std::size_t>(
      std::count(path.actions.begin(), path.actions.end(), Action::Handover));
}

bool has_perpendicular_handover(const RegraspGraph& graph, const RegraspPath& path, double tol) {
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    if (is_perpendicular_edge(graph, path.nodes[i], path.nodes[i + 1], tol)) return true;
  }
  return false;
}

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

struct SearchSpace {
  std::vector<int> ids;
  std::map<int, int> index;
  std::vector<std::vector<std::pair<int, bool>>> adj;  // (neighbour index, perpendicular)
  std::vector<bool> is_initial, is_goal;
};

SearchSpace make_space(const RegraspGraph& graph, double tol) {
  SearchSpace s;
  for (const auto& [id, n] : graph.nodes()) {
    s.index[id] = static_cast<int>(s.ids.size());
    s.ids.push_back(id);
    s.is_initial.push_back(n.context == NodeContext::Initial);
    s.is_goal.push_back(n.context == NodeContext::Goal);
  }
  s.adj.resize(s.ids.size());
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    for (int nb : graph.neighbors(s.ids[i])) {
      s.adj[i].emplace_back(s.index.at(nb), is_perpendicular_edge(graph, s.ids[i], nb, tol));
    }
  }
  return s;
}

}  // namespace

RegraspPath search_shortest_path(const RegraspGraph& graph, bool require_perpendicular,
                                 double perpendicular_tol) {
  const SearchSpace s = make_space(graph, perpendicular_tol);
  const int n = static_cast<int>(s.ids.size());
  // Walk distance to a satisfied goal over (node, flag) states. It is a lower
  // bound on the simple-path distance and drives the pruning below.
  std::vector<std::array<int, 2>> h(n, {kInf, kInf});
  std::deque<std::pair<int, int>> queue;
  for (int i = 0; i < n; ++i) {
    if (s.is_goal[i]) {
      h[i][1] = 0;
      queue.emplace_back(i, 1);
    }
  }
  while (!queue.empty()) {
    auto [v, f] = queue.front();
    queue.pop_front();
    for (auto [u, perp] : s.adj[v]) {
      // predecessor states (u, g) with g | perp == f
      for (int g = 0; g < 2; ++g) {
        if ((g | (perp ? 1 : 0)) != f) continue;
        if (h[u][g] == kInf) {
          h[u][g] = h[v][f] + 1;
          queue.emplace_back(u, g);
        }
      }
    }
  }
  const int start_flag = require_perpendicular ? 0 : 1;
  int lower = kInf;
  for (int i = 0; i < n; ++i) {
    if (s.is_initial[i]) lower = std::min(lower, h[i][start_flag]);
  }
  if (lower == kInf) throw NoPathError("regrasp graph: no path from initial to goal grasps");

  std::vector<int> stack;
  std::vector<bool> on_path(n, false);
  std::function<bool(int, int, int, int)> dfs = [&](int v, int flag, int depth, int limit) -> bool {
    if (s.is_goal[v] && flag == 1 && depth == limit) return true;
    if (depth + h[v][flag] > limit) return false;
    for (auto [u, perp] : s.adj[v]) {
      if (on_path[u]) continue;
      const int nf = flag | (perp ? 1 : 0);
      if (depth + 1 + h[u][nf] > limit) continue;
      on_path[u] = true;
      stack.push_back(u);
      if (dfs(u, nf, depth + 1, limit)) return true;
      stack.pop_back();
      on_path[u] = false;
    }
    return false;
  };

  for (int limit = lower; limit < n; ++limit) {
    for (int i = 0; i < n; ++i) {
      if (!s.is_initial[i] || h[i][start_flag] > limit) continue;
      stack.assign(1, i);
      std::fill(on_path.begin(), on_path.end(), false);
      on_path[i] = true;
      if (dfs(i, start_flag, 0, limit)) {
        RegraspPath path;
        for (int idx : stack) path.nodes.push_back(s.ids[idx]);
        for (std::size_t k = 0; k + 1 < path.nodes.size(); ++k) {
          path.actions.push_back(edge_action(graph, path.nodes[k], path.nodes[k + 1]));
        }
        return path;
      }
    }
  }
  throw NoPathError("regrasp graph: no simple path satisfies the handover constraint");
}

// ---------------------------------------------------------------------------
// Dump

namespace {

void emit_pose(YAML::Emitter& out, const Pose& p) {
  const Vec3 r = p.rotation.log();
  out << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "xyz" << YAML::Value << YAML::Flow << YAML::BeginSeq << p.translation.x()
      << p.translation.y() << p.translation.z() << YAML::EndSeq;
  out << YAML::Key << "rotvec" << YAML::Value << YAML::Flow << YAML::BeginSeq << r.x() << r.y()
      << r.z() << YAML::EndSeq;
  out << YAML::EndMap;
}

}  // namespace

void dump_graph(const RegraspGraph& graph, std::ostream& os) {
  YAML::Emitter out;
  out.SetDoublePrecision(9);
  out << YAML::BeginMap;
  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& [id, n] : graph.nodes()) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << id;
    out << YAML::Key << "context" << YAML::Value << to_string(n.context);
    out << YAML::Key << "arm" << YAML::Value << to_string(n.grasp.arm);
    out << YAML::Key << "grasp" << YAML::Value << n.grasp.id;
    out << YAML::Key << "object_pose" << YAML::Value;
    emit_pose(out, n.object_pose);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  auto emit_edges = [&](const char* key, bool deleted) {
    out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
    for (const auto& [k, kind] : graph.all_edges()) {
      if (graph.deleted_edges().count(k) != (deleted ? 1u : 0u)) continue;
      out << YAML::Flow << YAML::BeginSeq << k.first << k.second << to_string(kind) << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  };
  emit_edges("edges", false);
  emit_edges("deleted", true);
  out << YAML::EndMap;
  os << out.c_str() << "\n";
}

}  // namespace assembly
