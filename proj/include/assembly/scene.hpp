#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "assembly/collision.hpp"
#include "assembly/kinematics.hpp"

namespace assembly {

/// A robot arm as seen by the collision checker: the chain, a cylinder radius
/// for every non-degenerate link, and a gripper shape in the tip frame. The
/// link preceding the tip is covered by the hand shape.
struct ArmModel {
  std::string name;
  KinematicChain chain;
  double link_radius = 0.035;
  ShapePrimitive hand;
  JointConfig home;
};

/// Object held by a hand: object pose = tip pose * hand_from_object.
struct Attachment {
  std::size_t arm = 0;
  Pose hand_from_object;
};

class Scene {
 public:
  /// Throws ConfigError on a duplicate id or invalid shape.
  void add_body(Body body);
  void remove_body(const std::string& id);
  const Body& body(const std::string& id) const;
  Body& body(const std::string& id);
  bool has_body(const std::string& id) const;
  const std::vector<Body>& bodies() const { return bodies_; }

  /// Throws ConfigError if the object is unknown or already attached.
  void attach(const std::string& object_id, std::size_t arm, const Pose& hand_from_object);
  void detach(const std::string& object_id);
  std::optional<Attachment> attachment(const std::string& object_id) const;
  const std::map<std::string, Attachment>& attachments() const { return attachments_; }

  /// Pairs of body ids exempt from collision checks (e.g. a hand closing on an
  /// object it is about to grasp). Robot link ids are "<arm>/link<i>" and
  /// "<arm>/hand".
  void allow_contact(const std::string& a, const std::string& b);
  void disallow_contact(const std::string& a, const std::string& b);
  bool contact_allowed(const std::string& a, const std::string& b) const;

 private:
  std::vector<Body> bodies_;
  std::map<std::string, Attachment> attachments_;
  std::set<std::pair<std::string, std::string>> allowed_;
};

std::string hand_id(const ArmModel& arm);

/// Link and hand bodies of an arm at configuration q, in chain order.
std::vector<Body> arm_bodies(const ArmModel& arm, const JointConfig& q);

/// Id pair of the first colliding pair, if any. Excludes adjacent links,
/// hand-attached object pairs, allowed pairs and static-static pairs.
std::optional<std::pair<std::string, std::string>> first_collision(
    const Scene& scene, const std::vector<ArmModel>& arms, const std::vector<JointConfig>& q_all);

bool config_collision_free(const Scene& scene, const std::vector<ArmModel>& arms,
                           const std::vector<JointConfig>& q_all);

/// Checks every linear interpolant between the two configurations with joint
/// steps no larger than `resolution` (rad). Endpoints included.
bool edge_collision_free(const Scene& scene, const std::vector<ArmModel>& arms,
                         const std::vector<JointConfig>& q_from,
                         const std::vector<JointConfig>& q_to, double resolution);

}  // namespace assembly
