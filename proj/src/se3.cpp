#include "assembly/se3.hpp"

#include <algorithm>
#include <cmath>

#include "assembly/errors.hpp"

namespace assembly {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  const double drift = (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (drift > 1e-9) {
    Eigen::JacobiSVD<Mat3> svd(m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    m_ = svd.matrixU() * svd.matrixV().transpose();
  }
  if (m_.determinant() <= 0.0) {
    throw Error("rotation matrix has non-positive determinant");
  }
}

Rotation Rotation::about(const Vec3& axis, double theta) { return rodrigues(theta, axis); }

Rotation Rotation::inverse() const {
  Rotation r;
  r.m_ = m_.transpose();
  return r;
}

Rotation Rotation::operator*(const Rotation& other) const {
  Rotation r;
  r.m_ = m_ * other.m_;
  return r;
}

Vec3 Rotation::log() const {
  const double c = std::clamp((m_.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double angle = std::acos(c);
  const Vec3 w(m_(2, 1) - m_(1, 2), m_(0, 2) - m_(2, 0), m_(1, 0) - m_(0, 1));
  if (angle < 1e-9) return 0.5 * w;
  if (M_PI - angle < 1e-6) {
    // near pi the antisymmetric part vanishes; recover the axis from R + I
    const Mat3 b = 0.5 * (m_ + Mat3::Identity());
    int k = 0;
    b.diagonal().maxCoeff(&k);
    Vec3 axis = b.col(k) / std::sqrt(std::max(b(k, k), 1e-300));
    if (w.dot(axis) < 0.0) axis = -axis;
    return angle * axis.normalized();
  }
  return angle / (2.0 * std::sin(angle)) * w;
}

double Rotation::angle_to(const Rotation& other) const {
  const Mat3 rel = m_.transpose() * other.m_;
  return std::acos(std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0));
}

bool Rotation::is_valid(double tol) const {
  const double drift = (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
  return drift <= tol && std::abs(m_.determinant() - 1.0) <= tol;
}

Rotation rodrigues(double theta, const Vec3& axis) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DegenerateAxisError("rodrigues: axis has zero norm");
  }
  const Mat3 k = skew(axis / n);
  return Rotation(Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k);
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose(a.rotation * b.rotation, a.rotation * b.translation + a.translation);
}

Pose invert(const Pose& p) {
  const Rotation rt = p.rotation.inverse();
  return Pose(rt, -(rt * p.translation));
}

PoseError pose_error(const Pose& a, const Pose& b) {
  return {(a.translation - b.translation).norm(), a.rotation.angle_to(b.rotation)};
}

Eigen::Matrix<double, 6, 1> twist_error(const Pose& from, const Pose& to) {
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = to.translation - from.translation;
  e.tail<3>() = (to.rotation * from.rotation.inverse()).log();
  return e;
}

}  // namespace assembly
