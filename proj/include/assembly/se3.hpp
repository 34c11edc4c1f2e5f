#pragma once

#include <Eigen/Dense>

namespace assembly {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Skew-symmetric cross-product matrix [v x].
Mat3 skew(const Vec3& v);

/// Proper rotation in 3-space stored as a 3x3 matrix.
///
/// Construction from an arbitrary matrix re-orthonormalizes when the
/// orthonormality drift exceeds 1e-9; the determinant must be positive.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }
  /// Rotation of `theta` radians about `axis` (normalized internally).
  static Rotation about(const Vec3& axis, double theta);

  const Mat3& matrix() const { return m_; }

  /// First and second columns of the identity, rotated: I_x and I_y.
  Vec3 col_x() const { return m_.col(0); }
  Vec3 col_y() const { return m_.col(1); }
  Vec3 col_z() const { return m_.col(2); }

  Rotation inverse() const;
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation operator*(const Rotation& other) const;

  /// Rotation vector (axis * angle) with angle in [0, pi].
  Vec3 log() const;
  /// Angle of the relative rotation between this and `other`.
  double angle_to(const Rotation& other) const;

  bool is_valid(double tol = 1e-9) const;

 private:
  Mat3 m_;
};

/// Rodrigues' rotation formula: I + sin(theta)[v x] + (1 - cos(theta))[v x]^2.
/// Throws DegenerateAxisError for a zero-norm axis.
Rotation rodrigues(double theta, const Vec3& axis);

/// Rigid transform: x -> rotation * x + translation.
struct Pose {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(const Rotation& r, const Vec3& t) : rotation(r), translation(t) {}

  static Pose identity() { return Pose(); }
  static Pose from_translation(const Vec3& t) { return Pose(Rotation(), t); }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
};

Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);

inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

/// Position distance and rotation angle between two poses.
struct PoseError {
  double position = 0.0;
  double orientation = 0.0;
};
PoseError pose_error(const Pose& a, const Pose& b);

/// 6-vector twist error [dp; dtheta] taking `from` onto `to`, world frame.
Eigen::Matrix<double, 6, 1> twist_error(const Pose& from, const Pose& to);

}  // namespace assembly
