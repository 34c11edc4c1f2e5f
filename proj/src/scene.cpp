#include "assembly/scene.hpp"

#include <algorithm>
#include <cmath>

#include "assembly/errors.hpp"

namespace assembly {

void Scene::add_body(Body body) {
  if (has_body(body.id)) throw ConfigError("duplicate body id '" + body.id + "'");
  body.shape.validate();
  bodies_.push_back(std::move(body));
}

void Scene::remove_body(const std::string& id) {
  auto it = std::find_if(bodies_.begin(), bodies_.end(), [&](const Body& b) { return b.id == id; });
  if (it == bodies_.end()) throw ConfigError("unknown body '" + id + "'");
  bodies_.erase(it);
  attachments_.erase(id);
}

const Body& Scene::body(const std::string& id) const {
  for (const auto& b : bodies_) {
    if (b.id == id) return b;
  }
  throw ConfigError("unknown body '" + id + "'");
}

Body& Scene::body(const std::string& id) {
  for (auto& b : bodies_) {
    if (b.id == id) return b;
  }
  throw ConfigError("unknown body '" + id + "'");
}

bool Scene::has_body(const std::string& id) const {
  return std::any_of(bodies_.begin(), bodies_.end(), [&](const Body& b) { return b.id == id; });
}

void Scene::attach(const std::string& object_id, std::size_t arm, const Pose& hand_from_object) {
  if (!has_body(object_id)) throw ConfigError("cannot attach unknown body '" + object_id + "'");
  if (attachments_.count(object_id)) {
    throw ConfigError("body '" + object_id + "' is already attached to a hand");
  }
  attachments_[object_id] = Attachment{arm, hand_from_object};
}

void Scene::detach(const std::string& object_id) { attachments_.erase(object_id); }

std::optional<Attachment> Scene::attachment(const std::string& object_id) const {
  auto it = attachments_.find(object_id);
  if (it == attachments_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::pair<std::string, std::string> ordered(const std::string& a, const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

void Scene::allow_contact(const std::string& a, const std::string& b) { allowed_.insert(ordered(a, b)); }

void Scene::disallow_contact(const std::string& a, const std::string& b) { allowed_.erase(ordered(a, b)); }

bool Scene::contact_allowed(const std::string& a, const std::string& b) const {
  return allowed_.count(ordered(a, b)) > 0;
}

std::string hand_id(const ArmModel& arm) { return arm.name + "/hand"; }

namespace {

Rotation align_z_to(const Vec3& dir) {
  const Vec3 z = Vec3::UnitZ();
  const Vec3 d = dir.normalized();
  const Vec3 axis = z.cross(d);
  const double s = axis.norm();
  const double c = z.dot(d);
  if (s < 1e-12) return c > 0 ? Rotation() : rodrigues(M_PI, Vec3::UnitX());
  return rodrigues(std::atan2(s, c), axis);
}

}  // namespace

std::vector<Body> arm_bodies(const ArmModel& arm, const JointConfig& q) {
  const ChainFrames f = chain_frames(arm.chain, q);
  std::vector<Body> out;
  const std::size_t n = arm.chain.dof();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec3 a = f.joint_frames[i].translation;
    const Vec3 b = f.frames[i].translation;
    const double len = (b - a).norm();
    if (len < 1e-9) continue;
    Body link;
    link.id = arm.name + "/link" + std::to_string(i);
    link.kind = BodyKind::RobotLink;
    link.shape = ShapePrimitive::cylinder(arm.link_radius, 0.5 * len);
    link.pose = Pose(align_z_to(b - a), 0.5 * (a + b));
    out.push_back(std::move(link));
  }
  Body hand;
  hand.id = hand_id(arm);
  hand.kind = BodyKind::RobotLink;
  hand.shape = arm.hand;
  hand.pose = f.frames.back();
  out.push_back(std::move(hand));
  return out;
}

namespace {

struct Placed {
  Body body;
  int arm = -1;         // owning arm for robot links
  int link_index = -1;  // position in the arm's geometric link list
  int held_by = -1;     // arm holding an attached object
};

}  // namespace

std::optional<std::pair<std::string, std::string>> first_collision(
    const Scene& scene, const std::vector<ArmModel>& arms, const std::vector<JointConfig>& q_all) {
  if (q_all.size() != arms.size()) {
    throw DimensionMismatchError("expected one joint config per arm");
  }
  std::vector<Placed> placed;
  std::vector<Pose> tips;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    auto links = arm_bodies(arms[a], q_all[a]);
    tips.push_back(links.back().pose);
    for (std::size_t i = 0; i < links.size(); ++i) {
      placed.push_back({std::move(links[i]), static_cast<int>(a), static_cast<int>(i), -1});
    }
  }
  for (const auto& b : scene.bodies()) {
    Placed p{b, -1, -1, -1};
    if (auto att = scene.attachment(b.id)) {
      if (att->arm >= arms.size()) throw ConfigError("attachment references unknown arm");
      p.body.pose = tips[att->arm] * att->hand_from_object;
      p.held_by = static_cast<int>(att->arm);
    }
    placed.push_back(std::move(p));
  }

  for (std::size_t i = 0; i < placed.size(); ++i) {
    for (std::size_t j = i + 1; j < placed.size(); ++j) {
      const Placed& x = placed[i];
      const Placed& y = placed[j];
      const bool x_robot = x.arm >= 0;
      const bool y_robot = y.arm >= 0;
      if (x_robot && y_robot && x.arm == y.arm && std::abs(x.link_index - y.link_index) <= 1) {
        continue;
      }
      // static geometry never moves relative to itself
      const bool x_moving = x_robot || x.held_by >= 0;
      const bool y_moving = y_robot || y.held_by >= 0;
      if (!x_moving && !y_moving) continue;
      if (x_robot && y.held_by == x.arm && x.body.id == hand_id(arms[x.arm])) continue;
      if (y_robot && x.held_by == y.arm && y.body.id == hand_id(arms[y.arm])) continue;
      if (scene.contact_allowed(x.body.id, y.body.id)) continue;
      if (pair_collides(x.body, y.body)) return std::make_pair(x.body.id, y.body.id);
    }
  }
  return std::nullopt;
}

bool config_collision_free(const Scene& scene, const std::vector<ArmModel>& arms,
                           const std::vector<JointConfig>& q_all) {
  return !first_collision(scene, arms, q_all).has_value();
}

bool edge_collision_free(const Scene& scene, const std::vector<ArmModel>& arms,
                         const std::vector<JointConfig>& q_from,
                         const std::vector<JointConfig>& q_to, double resolution) {
  if (!(resolution > 0.0)) throw ConfigError("edge resolution must be positive");
  if (q_from.size() != q_to.size()) throw DimensionMismatchError("edge endpoints differ in arm count");
  double largest = 0.0;
  for (std::size_t a = 0; a < q_from.size(); ++a) {
    if (q_from[a].size() != q_to[a].size()) throw DimensionMismatchError("edge endpoint size mismatch");
    if (q_from[a].size() > 0) largest = std::max(largest, (q_to[a] - q_from[a]).cwiseAbs().maxCoeff());
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(largest / resolution)));
  std::vector<JointConfig> q = q_from;
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = q_from[a] + t * (q_to[a] - q_from[a]);
    if (!config_collision_free(scene, arms, q)) return false;
  }
  return true;
}

}  // namespace assembly
