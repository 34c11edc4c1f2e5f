#include "assembly/collision.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "assembly/errors.hpp"

namespace assembly {

ShapePrimitive ShapePrimitive::box(const Vec3& half_extents, const Pose& local) {
  ShapePrimitive s;
  s.kind = Kind::Box;
  s.half_extents = half_extents;
  s.local = local;
  return s;
}

ShapePrimitive ShapePrimitive::cylinder(double radius, double half_height, const Pose& local) {
  ShapePrimitive s;
  s.kind = Kind::Cylinder;
  s.radius = radius;
  s.half_height = half_height;
  s.local = local;
  return s;
}

ShapePrimitive ShapePrimitive::compound(std::vector<ShapePrimitive> children, const Pose& local) {
  ShapePrimitive s;
  s.kind = Kind::Compound;
  s.children = std::move(children);
  s.local = local;
  return s;
}

void ShapePrimitive::validate() const {
  switch (kind) {
    case Kind::Box:
      if ((half_extents.array() <= 0.0).any()) throw ConfigError("box dimensions must be positive");
      break;
    case Kind::Cylinder:
      if (radius <= 0.0 || half_height <= 0.0) {
        throw ConfigError("cylinder dimensions must be positive");
      }
      break;
    case Kind::Compound:
      if (children.empty()) throw ConfigError("compound shape needs at least one child");
      for (const auto& c : children) c.validate();
      break;
  }
}

ShapePrimitive ShapePrimitive::inflated(double margin) const {
  ShapePrimitive s = *this;
  s.half_extents.array() += margin;
  if (kind == Kind::Cylinder) {
    s.radius += margin;
    s.half_height += margin;
  }
  for (auto& c : s.children) c = c.inflated(margin);
  return s;
}

Vec3 ConvexPiece::support(const Vec3& direction) const {
  const Vec3 d = pose.rotation.inverse() * direction;
  Vec3 local;
  if (shape->kind == ShapePrimitive::Kind::Box) {
    const Vec3& h = shape->half_extents;
    local = Vec3(d.x() >= 0 ? h.x() : -h.x(), d.y() >= 0 ? h.y() : -h.y(),
                 d.z() >= 0 ? h.z() : -h.z());
  } else {
    const double radial = std::hypot(d.x(), d.y());
    local = Vec3::Zero();
    if (radial > 0.0) local.head<2>() = shape->radius * d.head<2>() / radial;
    local.z() = d.z() >= 0 ? shape->half_height : -shape->half_height;
  }
  return pose * local;
}

void collect_pieces(const ShapePrimitive& shape, const Pose& owner, std::vector<ConvexPiece>& out) {
  const Pose placed = owner * shape.local;
  if (shape.kind == ShapePrimitive::Kind::Compound) {
    for (const auto& c : shape.children) collect_pieces(c, placed, out);
    return;
  }
  ConvexPiece p;
  p.shape = &shape;
  p.pose = placed;
  p.bounding_radius = shape.kind == ShapePrimitive::Kind::Box
                          ? shape.half_extents.norm()
                          : std::hypot(shape.radius, shape.half_height);
  out.push_back(p);
}

namespace {

constexpr double kTouchTolerance = 1e-9;

struct Simplex {
  std::array<Vec3, 4> pts;
  int size = 0;
};

// Closest point to the origin on the convex hull of the simplex; the simplex
// is reduced to the vertices supporting that point. Brute force over all
// sub-simplices, which is robust for the at most 15 candidate subsets.
Vec3 closest_on_simplex(Simplex& s) {
  double best = std::numeric_limits<double>::infinity();
  Vec3 best_point = s.pts[0];
  int best_mask = 1;
  const int n = s.size;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::array<int, 4> idx{};
    int k = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) idx[k++] = i;
    }
    const Vec3 p0 = s.pts[idx[0]];
    Vec3 point = p0;
    bool valid = true;
    if (k > 1) {
      Eigen::Matrix<double, 3, Eigen::Dynamic> e(3, k - 1);
      for (int j = 1; j < k; ++j) e.col(j - 1) = s.pts[idx[j]] - p0;
      const Eigen::MatrixXd gram = e.transpose() * e;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
      if (lu.rank() < k - 1) continue;
      const Eigen::VectorXd mu = lu.solve(-(e.transpose() * p0));
      const double lambda0 = 1.0 - mu.sum();
      if (lambda0 < -1e-12 || (mu.array() < -1e-12).any()) valid = false;
      point = p0 + e * mu;
    }
    if (!valid) continue;
    const double d = point.squaredNorm();
    if (d < best - 1e-18 || (d <= best + 1e-18 && __builtin_popcount(mask) < __builtin_popcount(best_mask))) {
      best = d;
      best_point = point;
      best_mask = mask;
    }
  }
  Simplex reduced;
  for (int i = 0; i < n; ++i) {
    if (best_mask & (1 << i)) reduced.pts[reduced.size++] = s.pts[i];
  }
  s = reduced;
  return best_point;
}

// GJK on the Minkowski difference a - b. Returns the separation distance, or
// stops early once the distance is known to exceed `stop_above`.
double gjk(const ConvexPiece& a, const ConvexPiece& b, double stop_above) {
  auto support = [&](const Vec3& d) { return Vec3(a.support(d) - b.support(-d)); };
  Vec3 v = a.pose.translation - b.pose.translation;
  if (v.squaredNorm() < 1e-24) v = Vec3::UnitX();
  Simplex s;
  s.pts[0] = support(-v);
  s.size = 1;
  v = s.pts[0];
  for (int it = 0; it < 64; ++it) {
    const double vn = v.norm();
    if (vn <= kTouchTolerance) return 0.0;
    const Vec3 w = support(-v);
    const double lower = v.dot(w) / vn;
    if (lower > stop_above) return lower;
    if (vn - lower <= 1e-12 * std::max(1.0, vn)) return vn;
    bool duplicate = false;
    for (int i = 0; i < s.size; ++i) {
      if ((s.pts[i] - w).squaredNorm() < 1e-24) duplicate = true;
    }
    if (duplicate) return vn;
    s.pts[s.size++] = w;
    v = closest_on_simplex(s);
    if (s.size == 4) return 0.0;
  }
  return v.norm();
}

}  // namespace

double convex_distance(const ConvexPiece& a, const ConvexPiece& b) {
  return gjk(a, b, std::numeric_limits<double>::infinity());
}

bool convex_intersect(const ConvexPiece& a, const ConvexPiece& b) {
  const double centers = (a.pose.translation - b.pose.translation).norm();
  if (centers > a.bounding_radius + b.bounding_radius + kTouchTolerance) return false;
  return gjk(a, b, kTouchTolerance) <= kTouchTolerance;
}

bool pair_collides(const Body& a, const Body& b) {
  std::vector<ConvexPiece> pa, pb;
  collect_pieces(a.shape, a.pose, pa);
  collect_pieces(b.shape, b.pose, pb);
  for (const auto& x : pa) {
    for (const auto& y : pb) {
      if (convex_intersect(x, y)) return true;
    }
  }
  return false;
}

double body_distance(const Body& a, const Body& b) {
  std::vector<ConvexPiece> pa, pb;
  collect_pieces(a.shape, a.pose, pa);
  collect_pieces(b.shape, b.pose, pb);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : pa) {
    for (const auto& y : pb) best = std::min(best, convex_distance(x, y));
  }
  return best;
}

}  // namespace assembly
