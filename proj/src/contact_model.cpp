#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "assembly/contact_sim.hpp"
#include "assembly/errors.hpp"

namespace assembly {

using Vec2 = Eigen::Vector2d;

// ---------------------------------------------------------------------------
// Contours

Contour Contour::circle(double r, Vec2 c) {
  Contour out;
  out.kind = Kind::Circle;
  out.radius = r;
  out.center = c;
  return out;
}

Contour Contour::rectangle(double w, double d, Vec2 c) {
  Contour out;
  out.kind = Kind::Rectangle;
  out.width = w;
  out.depth = d;
  out.center = c;
  return out;
}

Contour Contour::trapezoid(double w1, double w2, double d, Vec2 c) {
  Contour out;
  out.kind = Kind::Trapezoid;
  out.width = w1;
  out.top_width = w2;
  out.depth = d;
  out.center = c;
  return out;
}

Contour Contour::compound(std::vector<Contour> parts) {
  Contour out;
  out.kind = Kind::Compound;
  out.children = std::move(parts);
  return out;
}

std::vector<Vec2> Contour::polygon() const {
  if (kind == Kind::Rectangle) {
    const double hw = width / 2, hd = depth / 2;
    return {center + Vec2(-hw, -hd), center + Vec2(hw, -hd), center + Vec2(hw, hd), center + Vec2(-hw, hd)};
  }
  if (kind == Kind::Trapezoid) {
    const double hd = depth / 2;
    return {center + Vec2(-width / 2, -hd), center + Vec2(width / 2, -hd),
            center + Vec2(top_width / 2, hd), center + Vec2(-top_width / 2, hd)};
  }
  return {};
}

namespace {

struct Closest {
  double distance;  // signed
  Vec2 gradient;
};

Closest polygon_closest(const std::vector<Vec2>& v, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_point = v[0];
  Vec2 best_normal(1, 0);
  bool inside = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    const Vec2 e = b - a;
    const Vec2 outward(e.y(), -e.x());
    if (outward.dot(p - a) > 0.0) inside = false;
    const double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    const Vec2 q = a + t * e;
    const double d = (p - q).norm();
    if (d < best) {
      best = d;
      best_point = q;
      best_normal = outward.normalized();
    }
  }
  Vec2 g = best > 1e-15 ? Vec2((p - best_point) / best) : best_normal;
  if (inside) g = best > 1e-15 ? Vec2(-g) : best_normal;
  return {inside ? -best : best, g};
}

Closest closest(const Contour& c, const Vec2& p) {
  switch (c.kind) {
    case Contour::Kind::Circle: {
      const Vec2 r = p - c.center;
      const double n = r.norm();
      return {n - c.radius, n > 1e-15 ? Vec2(r / n) : Vec2(1, 0)};
    }
    case Contour::Kind::Rectangle:
    case Contour::Kind::Trapezoid:
      return polygon_closest(c.polygon(), p);
    case Contour::Kind::Compound: {
      Closest best{std::numeric_limits<double>::infinity(), Vec2(1, 0)};
      for (const auto& child : c.children) {
        const Closest cc = closest(child, p);
        if (cc.distance < best.distance) best = cc;
      }
      return best;
    }
  }
  return {std::numeric_limits<double>::infinity(), Vec2(1, 0)};
}

}  // namespace

double Contour::signed_distance(const Vec2& p) const { return closest(*this, p).distance; }

Vec2 Contour::gradient(const Vec2& p) const { return closest(*this, p).gradient; }

Contour Contour::offset(double delta) const {
  switch (kind) {
    case Kind::Circle:
      return circle(radius + delta, center);
    case Kind::Rectangle:
      return rectangle(width + 2 * delta, depth + 2 * delta, center);
    case Kind::Trapezoid: {
      const double slope = (top_width - width) / (2 * depth);
      const double grow = 2 * delta * std::sqrt(1 + slope * slope);
      return trapezoid(width - 2 * slope * delta + grow, top_width + 2 * slope * delta + grow,
                       depth + 2 * delta, center);
    }
    case Kind::Compound: {
      std::vector<Contour> parts;
      for (const auto& c : children) parts.push_back(c.offset(delta));
      return compound(std::move(parts));
    }
  }
  return *this;
}

std::size_t Contour::piece_count() const {
  if (kind != Kind::Compound) return 1;
  std::size_t n = 0;
  for (const auto& c : children) n += c.piece_count();
  return n;
}

std::vector<const Contour*> Contour::leaves() const {
  if (kind != Kind::Compound) return {this};
  std::vector<const Contour*> out;
  for (const auto& c : children) {
    auto sub = c.leaves();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

void Contour::validate() const {
  switch (kind) {
    case Kind::Circle:
      if (!(radius > 0)) throw ConfigError("contour: circle radius must be positive");
      break;
    case Kind::Rectangle:
      if (!(width > 0 && depth > 0)) throw ConfigError("contour: rectangle dimensions must be positive");
      break;
    case Kind::Trapezoid:
      if (!(width > 0 && top_width > 0 && depth > 0)) {
        throw ConfigError("contour: trapezoid dimensions must be positive");
      }
      break;
    case Kind::Compound:
      for (const auto& c : children) c.validate();
      break;
  }
}

// ---------------------------------------------------------------------------
// Peg sampling

namespace {

std::vector<Vec2> boundary_points(const Contour& leaf) {
  std::vector<Vec2> out;
  if (leaf.kind == Contour::Kind::Circle) {
    for (int i = 0; i < 16; ++i) {
      const double a = 2 * M_PI * i / 16;
      out.push_back(leaf.center + leaf.radius * Vec2(std::cos(a), std::sin(a)));
    }
    return out;
  }
  const auto v = leaf.polygon();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    for (int k = 0; k < 4; ++k) out.push_back(a + (b - a) * (k / 4.0));
  }
  return out;
}

std::vector<Vec2> interior_points(const Contour& leaf) {
  std::vector<Vec2> out;
  if (leaf.kind == Contour::Kind::Circle) {
    out.push_back(leaf.center);
    for (int i = 0; i < 8; ++i) {
      const double a = 2 * M_PI * i / 8 + M_PI / 8;
      out.push_back(leaf.center + 0.5 * leaf.radius * Vec2(std::cos(a), std::sin(a)));
    }
    return out;
  }
  const auto v = leaf.polygon();
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : v) centroid += p;
  centroid /= static_cast<double>(v.size());
  out.push_back(centroid);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 mid = 0.5 * (v[i] + v[(i + 1) % v.size()]);
    out.push_back(0.5 * (centroid + v[i]));
    out.push_back(0.5 * (centroid + mid));
  }
  return out;
}

struct SamplePoint {
  Vec3 local;  // peg frame
  double stiffness;
  bool bottom;
  std::size_t leaf;
};

Vec2 leaf_center(const Contour& leaf) {
  if (leaf.kind == Contour::Kind::Circle) return leaf.center;
  Vec2 c = Vec2::Zero();
  const auto v = leaf.polygon();
  for (const auto& p : v) c += p;
  return c / static_cast<double>(v.size());
}

std::vector<SamplePoint> peg_samples(const PegHoleModel& model) {
  std::vector<SamplePoint> out;
  std::vector<std::pair<Vec2, std::size_t>> ring, inner;
  const auto leaves = model.peg.leaves();
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    for (const auto& p : boundary_points(*leaves[l])) ring.emplace_back(p, l);
    for (const auto& p : interior_points(*leaves[l])) inner.emplace_back(p, l);
  }
  const double k_bottom = model.stiffness / static_cast<double>(ring.size() + inner.size());
  for (const auto& [p, l] : ring) out.push_back({Vec3(p.x(), p.y(), 0.0), k_bottom, true, l});
  for (const auto& [p, l] : inner) out.push_back({Vec3(p.x(), p.y(), 0.0), k_bottom, true, l});

  std::vector<double> heights{0.25e-3, 0.75e-3};
  for (double h = 1.5e-3; h <= model.hole_depth + 1e-3; h += 1e-3) heights.push_back(h);
  const double k_side = model.stiffness / static_cast<double>(ring.size());
  for (double h : heights) {
    if (h > model.peg_length) break;
    for (const auto& [p, l] : ring) out.push_back({Vec3(p.x(), p.y(), h), k_side, false, l});
  }
  return out;
}

bool has_holes(const PegHoleModel& model) {
  return !(model.hole.kind == Contour::Kind::Compound && model.hole.piece_count() == 0);
}

}  // namespace

void PegHoleModel::validate() const {
  peg.validate();
  hole.validate();
  if (peg.piece_count() == 0) throw ConfigError("peg-hole model: peg contour is empty");
  if (!(clearance > 0)) throw ConfigError("peg-hole model: clearance must be positive");
  if (!(stiffness > 0)) throw ConfigError("peg-hole model: stiffness must be positive");
  if (!(hole_depth > 0)) throw ConfigError("peg-hole model: hole depth must be positive");
  if (friction < 0) throw ConfigError("peg-hole model: friction must be non-negative");
  if (chamfer < 0) throw ConfigError("peg-hole model: chamfer must be non-negative");
  if (!(peg_length > 0)) throw ConfigError("peg-hole model: peg length must be positive");
  if (!(jamming_angle > 0)) throw ConfigError("peg-hole model: jamming angle must be positive");
  if (!(compliance.lateral > 0 && compliance.axial > 0 && compliance.rotational > 0)) {
    throw ConfigError("peg-hole model: gripper compliance must be positive");
  }
  if (has_holes(*this)) {
    for (const Contour* leaf : peg.leaves()) {
      for (const Vec2& p : boundary_points(*leaf)) {
        if (hole.signed_distance(p) > -clearance + 1e-9) {
          throw ConfigError("peg-hole model: hole contour does not contain the peg contour with clearance");
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Penetration and wrench

Penetration material_penetration(const PegHoleModel& model, const Vec3& p, std::optional<double> bottom_override,
                                 bool allow_wall) {
  Penetration out;
  const Vec2 xy = p.head<2>();
  const Closest c = has_holes(model) ? closest(model.hole, xy)
                                     : Closest{std::numeric_limits<double>::infinity(), Vec2(1, 0)};
  const double s = c.distance;
  const double z = p.z();
  if (s < 0) {
    const double bottom = -(bottom_override ? *bottom_override : model.hole_depth);
    if (z < bottom) {
      out.depth = bottom - z;
      out.normal = Vec3::UnitZ();
      out.surface = Penetration::Surface::Bottom;
    }
    return out;
  }
  const double wc = model.chamfer;
  if (!(z < 0.0) || !(s >= wc || z < s - wc)) return out;
  out.depth = -z;
  out.normal = Vec3::UnitZ();
  out.surface = Penetration::Surface::Top;
  if (allow_wall && s < out.depth) {
    out.depth = s;
    out.normal = Vec3(-c.gradient.x(), -c.gradient.y(), 0.0);
    out.surface = Penetration::Surface::Wall;
  }
  if (wc > 0) {
    const double d = (s - wc - z) / std::sqrt(2.0);
    if (d < out.depth) {
      out.depth = d;
      out.normal = Vec3(-c.gradient.x(), -c.gradient.y(), 1.0).normalized();
      out.surface = Penetration::Surface::Chamfer;
    }
  }
  return out;
}

namespace {

struct Evaluation {
  Vec3 force = Vec3::Zero();   // hole frame
  Vec3 torque = Vec3::Zero();  // about the tip, hole frame
  Vec3 friction = Vec3::Zero();
  double energy = 0.0;
  Eigen::Matrix<double, 6, 6> hessian = Eigen::Matrix<double, 6, 6>::Zero();
  bool contact = false;
};

class ContactEvaluator {
 public:
  explicit ContactEvaluator(const PegHoleModel& model) : model_(model), samples_(peg_samples(model)) {
    for (const Contour* leaf : model.peg.leaves()) centers_.push_back(leaf_center(*leaf));
  }

  Evaluation evaluate(const Rotation& r, const Vec3& t, std::optional<double> jam, const Vec3& motion,
                      bool want_hessian) const {
    Evaluation ev;
    const std::vector<bool> over_hole = axes_over_hole(r, t);
    for (const auto& sp : samples_) {
      if (!sp.bottom && !over_hole[sp.leaf]) continue;
      const Vec3 arm = r * sp.local;
      const Penetration pen = material_penetration(model_, t + arm, jam, over_hole[sp.leaf]);
      if (pen.depth <= 0.0) continue;
      if (!sp.bottom && pen.surface == Penetration::Surface::Top) continue;
      ev.contact = true;
      const Vec3 f = sp.stiffness * pen.depth * pen.normal;
      ev.force += f;
      ev.torque += arm.cross(f);
      ev.energy += 0.5 * sp.stiffness * pen.depth * pen.depth;
      if (model_.friction > 0 && motion.squaredNorm() > 0) {
        const Vec3 tangential = motion - motion.dot(pen.normal) * pen.normal;
        if (tangential.norm() > 1e-12) ev.friction -= model_.friction * f.norm() * tangential.normalized();
      }
      if (want_hessian) {
        Eigen::Matrix<double, 1, 6> j;
        j.head<3>() = pen.normal.transpose();
        j.tail<3>() = arm.cross(pen.normal).transpose();
        ev.hessian += sp.stiffness * j.transpose() * j;
      }
    }
    return ev;
  }

  // A leaf whose axis is not over a hole rests on the top surface; only
  // leaves already over a hole can be pushed sideways by the walls.
  std::vector<bool> axes_over_hole(const Rotation& r, const Vec3& t) const {
    std::vector<bool> over(centers_.size(), false);
    if (!has_holes(model_)) return over;
    for (std::size_t l = 0; l < centers_.size(); ++l) {
      const Vec3 c = t + r * Vec3(centers_[l].x(), centers_[l].y(), 0.0);
      over[l] = model_.hole.signed_distance(c.head<2>()) < 0.0;
    }
    return over;
  }

  const std::vector<SamplePoint>& samples() const { return samples_; }

 private:
  const PegHoleModel& model_;
  std::vector<SamplePoint> samples_;
  std::vector<Vec2> centers_;
};

Rotation rotation_from_vector(const Vec3& phi) {
  const double a = phi.norm();
  return a < 1e-15 ? Rotation() : rodrigues(a, phi / a);
}

bool is_engaged(const ContactEvaluator& ev, const PegHoleModel& model, const Pose& peg_hole) {
  if (!has_holes(model) || !(peg_hole.translation.z() < 0.0)) return false;
  const std::vector<bool> over = ev.axes_over_hole(peg_hole.rotation, peg_hole.translation);
  return std::all_of(over.begin(), over.end(), [](bool b) { return b; });
}

}  // namespace

WrenchSample contact_wrench(const Pose& peg_pose, const PegHoleModel& model, const Vec3& motion) {
  const Pose local = invert(model.hole_frame) * peg_pose;
  const Rotation& hr = model.hole_frame.rotation;
  ContactEvaluator ev(model);
  const Evaluation e = ev.evaluate(local.rotation, local.translation, std::nullopt, hr.inverse() * motion, false);
  WrenchSample w;
  w.force = hr * (e.force + e.friction);
  w.torque = hr * e.torque;
  w.frame = WrenchFrame::World;
  return w;
}

double peg_tilt(const Pose& peg_pose, const PegHoleModel& model) {
  const double c = std::clamp(peg_pose.rotation.col_z().dot(model.hole_frame.rotation.col_z()), -1.0, 1.0);
  return std::acos(c);
}

SimState initial_state(const Pose& peg_pose) {
  SimState s;
  s.commanded_peg = peg_pose;
  s.peg = peg_pose;
  return s;
}

std::pair<SimState, WrenchSample> step(const SimState& sim, const Pose& commanded_peg,
                                       const PegHoleModel& model) {
  const Pose hole_inv = invert(model.hole_frame);
  const Pose cmd = hole_inv * commanded_peg;
  const Rotation& hr = model.hole_frame.rotation;
  const Vec3 motion = hr.inverse() * (commanded_peg.translation - sim.commanded_peg.translation);
  const ContactEvaluator ev(model);

  const Mat3& rc = cmd.rotation.matrix();
  const Mat3 kt = rc * Vec3(model.compliance.lateral, model.compliance.lateral, model.compliance.axial).asDiagonal() *
                  rc.transpose();
  const double kr = model.compliance.rotational;

  struct Solution {
    Vec3 d, phi;
    double energy;
  };
  auto pose_of = [&](const Vec3& d, const Vec3& phi) {
    return Pose(rotation_from_vector(phi) * cmd.rotation, cmd.translation + d);
  };
  auto energy_of = [&](const Vec3& d, const Vec3& phi, std::optional<double> jam) {
    const Pose p = pose_of(d, phi);
    const Evaluation e = ev.evaluate(p.rotation, p.translation, jam, Vec3::Zero(), false);
    return 0.5 * d.dot(kt * d) + 0.5 * kr * phi.squaredNorm() + e.energy;
  };

  auto solve = [&](std::optional<double> jam) {
    // Warm start from the previous deflection (expressed in the hole frame).
    const Vec3 d_prev = hr.inverse() * sim.deflection;
    const Vec3 phi_prev = hr.inverse() * sim.rotation_deflection;
    Solution s{Vec3::Zero(), Vec3::Zero(), energy_of(Vec3::Zero(), Vec3::Zero(), jam)};
    const double e_prev = energy_of(d_prev, phi_prev, jam);
    if (e_prev < s.energy) s = {d_prev, phi_prev, e_prev};

    for (int it = 0; it < 60; ++it) {
      const Pose p = pose_of(s.d, s.phi);
      const Evaluation e = ev.evaluate(p.rotation, p.translation, jam, Vec3::Zero(), true);
      Eigen::Matrix<double, 6, 1> g;
      g.head<3>() = kt * s.d - e.force;
      g.tail<3>() = kr * s.phi - e.torque;
      if (g.head<3>().norm() < 1e-9 && g.tail<3>().norm() < 1e-12) break;
      Eigen::Matrix<double, 6, 6> h = e.hessian;
      h.topLeftCorner<3, 3>() += kt;
      h.bottomRightCorner<3, 3>() += kr * Mat3::Identity();
      const Eigen::Matrix<double, 6, 1> delta = -h.ldlt().solve(g);
      double alpha = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 30; ++ls) {
        const Vec3 d = s.d + alpha * delta.head<3>();
        const Vec3 phi = s.phi + alpha * delta.tail<3>();
        const double en = energy_of(d, phi, jam);
        if (en <= s.energy) {
          improved = en < s.energy - 1e-18 || alpha == 1.0;
          s = {d, phi, en};
          break;
        }
        alpha *= 0.5;
      }
      if (!improved || alpha * delta.norm() < 1e-13) break;
    }
    return s;
  };

  SimState next;
  next.commanded_peg = commanded_peg;
  next.jam_depth = sim.jam_depth;
  Solution sol = solve(next.jam_depth);
  Pose peg_local = pose_of(sol.d, sol.phi);
  const double tilt_limit = model.jamming_angle;
  auto tilt_of = [&](const Pose& p) {
    return std::acos(std::clamp(p.rotation.col_z().z(), -1.0, 1.0));
  };
  const bool engaged = is_engaged(ev, model, peg_local);
  if (engaged && tilt_of(peg_local) > tilt_limit) {
    if (!next.jam_depth) {
      const Pose prev_local = hole_inv * sim.peg;
      next.jam_depth = std::clamp(-prev_local.translation.z(), 0.0, model.hole_depth);
      sol = solve(next.jam_depth);
      peg_local = pose_of(sol.d, sol.phi);
    }
  } else {
    next.jam_depth.reset();
  }

  const Evaluation final_eval = ev.evaluate(peg_local.rotation, peg_local.translation, next.jam_depth, motion, false);
  next.peg = model.hole_frame * peg_local;
  next.deflection = hr * sol.d;
  next.rotation_deflection = hr * sol.phi;
  next.in_contact = final_eval.contact;
  next.engaged = is_engaged(ev, model, peg_local);
  next.insertion_depth =
      next.engaged ? std::clamp(-peg_local.translation.z(), 0.0, model.hole_depth) : 0.0;

  WrenchSample w;
  w.force = hr * (final_eval.force + final_eval.friction);
  w.torque = hr * final_eval.torque;
  w.frame = WrenchFrame::World;
  return {next, w};
}

}  // namespace assembly
