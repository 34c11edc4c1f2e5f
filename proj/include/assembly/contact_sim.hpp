#pragma once

#include <optional>
#include <vector>

#include "assembly/random.hpp"
#include "assembly/se3.hpp"

namespace assembly {

/// Planar contour of an extruded peg or hole, in the x-y plane of its frame.
/// Compound contours are unions of their children.
struct Contour {
  enum class Kind { Circle, Rectangle, Trapezoid, Compound };
  Kind kind = Kind::Circle;
  double radius = 0.0;        // circle
  double width = 0.0;         // rectangle width, trapezoid bottom width (x)
  double top_width = 0.0;     // trapezoid width at +y
  double depth = 0.0;         // rectangle / trapezoid extent along y
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::vector<Contour> children;

  static Contour circle(double r, Eigen::Vector2d c = Eigen::Vector2d::Zero());
  static Contour rectangle(double w, double d, Eigen::Vector2d c = Eigen::Vector2d::Zero());
  static Contour trapezoid(double w1, double w2, double d, Eigen::Vector2d c = Eigen::Vector2d::Zero());
  static Contour compound(std::vector<Contour> parts);

  /// Signed distance: negative inside, positive outside. A compound with no
  /// children is empty and returns +infinity.
  double signed_distance(const Eigen::Vector2d& p) const;
  /// Gradient of the signed distance (unit length away from the boundary).
  Eigen::Vector2d gradient(const Eigen::Vector2d& p) const;
  /// Same contour offset outward by `delta` (circles grow their radius,
  /// polygons move their edges).
  Contour offset(double delta) const;
  /// Number of primitive pieces.
  std::size_t piece_count() const;
  /// Throws ConfigError for non-positive dimensions.
  void validate() const;

  /// Leaf contours (circles and polygons) in depth-first order.
  std::vector<const Contour*> leaves() const;
  /// Vertices of a rectangle or trapezoid leaf, counter-clockwise.
  std::vector<Eigen::Vector2d> polygon() const;
};

struct GripperCompliance {
  double lateral = 20000.0;    // N/m, peg-frame x and y
  double axial = 20000.0;      // N/m, peg-frame z
  double rotational = 2.0;     // N m / rad about the peg tip
};

/// Extruded peg in an extruded hole. Hole frame: z out of the block, top
/// surface at z = 0, hole bottom at z = -hole_depth. Peg frame: origin at the
/// centre of the tip face, z pointing from the tip toward the hand.
struct PegHoleModel {
  Contour peg = Contour::circle(0.002);
  /// Hole mouths. An empty compound means a plain block without holes.
  Contour hole = Contour::circle(0.0025);
  double clearance = 0.0005;
  double hole_depth = 0.010;
  Pose hole_frame;
  double stiffness = 5000.0;
  double friction = 0.3;
  double chamfer = 0.0005;
  double peg_length = 0.020;
  double jamming_angle = 0.0523598775598;  // 3 deg
  GripperCompliance compliance;
  /// Peg frame expressed in the hand frame.
  Pose peg_in_hand;

  /// Throws ConfigError listing the first violated invariant.
  void validate() const;
};

enum class WrenchFrame { Sensor, Hand, World };

struct WrenchSample {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  WrenchFrame frame = WrenchFrame::World;
  bool noisy = false;
};

/// Material penetration of a point given in the hole frame, with the outward
/// unit normal of the surface it is pushed out through. Without `allow_wall`
/// the point can only leave through the top surface or the chamfer, which is
/// how the tip face of a peg that is not over a hole is treated.
struct Penetration {
  double depth = 0.0;
  Vec3 normal = Vec3::UnitZ();
  enum class Surface { None, Top, Wall, Chamfer, Bottom } surface = Surface::None;
};
Penetration material_penetration(const PegHoleModel& model, const Vec3& p_hole,
                                 std::optional<double> bottom_override = std::nullopt,
                                 bool allow_wall = true);

/// Penalty wrench on the peg at `peg_pose` (world). Force in world frame,
/// torque about the peg tip in world frame. Friction opposes the tangential
/// part of `motion` (world) and is zero when `motion` is zero.
WrenchSample contact_wrench(const Pose& peg_pose, const PegHoleModel& model,
                            const Vec3& motion = Vec3::Zero());

struct SensorModel {
  Vec3 force_bounds = Vec3(1.2, 1.2, 0.5);  // N
  Vec3 torque_bounds = Vec3(0.02, 0.02, 0.01);  // N m
  std::uint64_t seed = 7;
  Pose mounting;  // sensor frame in the hand frame

  static SensorModel noiseless();
  void validate() const;
};

/// World-frame wrench about the peg tip -> sensor frame, torque shifted to the
/// hand origin, plus per-axis uniform noise in [-bound, bound].
WrenchSample sense(const WrenchSample& world, const Pose& hand_pose, const Pose& peg_pose,
                   const SensorModel& sensor, Rng& rng);
/// Overload for wrenches already taken about the hand origin.
WrenchSample sense(const WrenchSample& world, const Pose& hand_pose, const SensorModel& sensor, Rng& rng);

struct SimState {
  Pose commanded_peg;  // world
  Pose peg;            // world, after gripper compliance
  Vec3 deflection = Vec3::Zero();
  Vec3 rotation_deflection = Vec3::Zero();
  bool in_contact = false;
  bool engaged = false;
  std::optional<double> jam_depth;
  double insertion_depth = 0.0;
};

SimState initial_state(const Pose& peg_pose);

/// Quasi-static step: the peg settles where gripper compliance balances the
/// contact wrench. Returns the new state and the world wrench about the tip.
std::pair<SimState, WrenchSample> step(const SimState& sim, const Pose& commanded_peg,
                                       const PegHoleModel& model);

/// Tilt of the peg axis relative to the hole axis.
double peg_tilt(const Pose& peg_pose, const PegHoleModel& model);

/// Environment the controller acts on: command a hand pose, read the sensor.
class Plant {
 public:
  virtual ~Plant() = default;
  /// Moves the hand to `hand_pose` and returns the sensed hand-frame wrench.
  virtual WrenchSample command(const Pose& hand_pose) = 0;
  virtual double insertion_depth() const = 0;
};

class SimulatedPlant : public Plant {
 public:
  SimulatedPlant(PegHoleModel model, SensorModel sensor, const Pose& initial_hand);

  WrenchSample command(const Pose& hand_pose) override;
  double insertion_depth() const override { return state_.insertion_depth; }

  const SimState& state() const { return state_; }
  const PegHoleModel& model() const { return model_; }
  const WrenchSample& last_world_wrench() const { return last_world_; }

 private:
  PegHoleModel model_;
  SensorModel sensor_;
  Rng rng_;
  SimState state_;
  WrenchSample last_world_;
};

}  // namespace assembly
