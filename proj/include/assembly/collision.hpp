#pragma once

#include <string>
#include <vector>

#include "assembly/se3.hpp"

namespace assembly {

/// Box, cylinder (axis along local z) or compound of children. Dimensions are
/// half extents; `local` places the primitive in its owner's frame.
struct ShapePrimitive {
  enum class Kind { Box, Cylinder, Compound };

  Kind kind = Kind::Box;
  Vec3 half_extents = Vec3::Zero();
  double radius = 0.0;
  double half_height = 0.0;
  Pose local;
  std::vector<ShapePrimitive> children;

  static ShapePrimitive box(const Vec3& half_extents, const Pose& local = {});
  static ShapePrimitive cylinder(double radius, double half_height, const Pose& local = {});
  static ShapePrimitive compound(std::vector<ShapePrimitive> children, const Pose& local = {});

  /// Throws ConfigError on non-positive dimensions or an empty compound.
  void validate() const;
  /// Copy with every dimension grown by `margin`.
  ShapePrimitive inflated(double margin) const;
};

enum class BodyKind { RobotLink, Object, StaticEnvironment };

struct Body {
  std::string id;
  ShapePrimitive shape;
  Pose pose;
  BodyKind kind = BodyKind::StaticEnvironment;
};

/// Convex leaf placed in the world: used by the GJK queries.
struct ConvexPiece {
  const ShapePrimitive* shape = nullptr;
  Pose pose;
  double bounding_radius = 0.0;

  Vec3 support(const Vec3& direction) const;
};

/// Flatten a (possibly compound) shape into world-placed convex leaves.
void collect_pieces(const ShapePrimitive& shape, const Pose& owner, std::vector<ConvexPiece>& out);

/// GJK distance between two convex pieces; 0 when they overlap.
double convex_distance(const ConvexPiece& a, const ConvexPiece& b);
/// True iff the pieces overlap or touch (distance <= 1e-9).
bool convex_intersect(const ConvexPiece& a, const ConvexPiece& b);

/// True iff the two bodies overlap at their current poses. Exact touching
/// counts as a collision.
bool pair_collides(const Body& a, const Body& b);
/// Minimum distance between two bodies (0 when they overlap).
double body_distance(const Body& a, const Body& b);

}  // namespace assembly
