#include "assembly/kinematics.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "assembly/errors.hpp"
#include "assembly/random.hpp"

namespace assembly {

double KinematicChain::reach() const {
  double total = 0.0;
  for (const auto& j : joints) total += j.link.translation.norm();
  return total;
}

bool KinematicChain::within_limits(const JointConfig& q, double tol) const {
  if (static_cast<std::size_t>(q.size()) != joints.size()) return false;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (q[i] < joints[i].lower - tol || q[i] > joints[i].upper + tol) return false;
  }
  return true;
}

JointConfig KinematicChain::clamp(const JointConfig& q) const {
  JointConfig out = q;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    out[i] = std::clamp(out[i], joints[i].lower, joints[i].upper);
  }
  return out;
}

void KinematicChain::validate() const {
  if (joints.empty()) throw ConfigError("kinematic chain has no joints");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (joints[i].lower > joints[i].upper) {
      throw ConfigError("joint " + std::to_string(i) + ": lower limit exceeds upper limit");
    }
    if (joints[i].axis.norm() == 0.0) {
      throw DegenerateAxisError("joint " + std::to_string(i) + ": zero axis");
    }
  }
}

namespace {

void check_size(const KinematicChain& chain, const JointConfig& q) {
  if (static_cast<std::size_t>(q.size()) != chain.dof()) {
    throw DimensionMismatchError("joint config has " + std::to_string(q.size()) +
                                 " entries, chain has " + std::to_string(chain.dof()));
  }
}

}  // namespace

ChainFrames chain_frames(const KinematicChain& chain, const JointConfig& q) {
  check_size(chain, q);
  ChainFrames out;
  out.joint_frames.reserve(chain.dof());
  out.frames.reserve(chain.dof());
  Pose current = chain.base;
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    out.joint_frames.push_back(current);
    current = current * Pose(rodrigues(q[i], chain.joints[i].axis), Vec3::Zero()) *
              chain.joints[i].link;
    out.frames.push_back(current);
  }
  return out;
}

Pose forward_kinematics(const KinematicChain& chain, const JointConfig& q) {
  check_size(chain, q);
  Pose current = chain.base;
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    current = current * Pose(rodrigues(q[i], chain.joints[i].axis), Vec3::Zero()) *
              chain.joints[i].link;
  }
  return current;
}

Jacobian jacobian(const KinematicChain& chain, const JointConfig& q) {
  const ChainFrames f = chain_frames(chain, q);
  const Vec3 tip = f.frames.back().translation;
  Jacobian j(6, chain.dof());
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const Vec3 w = f.joint_frames[i].rotation * chain.joints[i].axis.normalized();
    j.block<3, 1>(0, i) = w.cross(tip - f.joint_frames[i].translation);
    j.block<3, 1>(3, i) = w;
  }
  return j;
}

namespace {

bool solve_from(const KinematicChain& chain, const Pose& target, JointConfig q,
                const IkOptions& opt, JointConfig& out) {
  const Eigen::Matrix<double, 6, 6> damping =
      opt.damping * opt.damping * Eigen::Matrix<double, 6, 6>::Identity();
  for (int it = 0; it <= opt.max_iterations; ++it) {
    const Pose current = forward_kinematics(chain, q);
    const PoseError err = pose_error(current, target);
    if (err.position <= opt.position_tolerance && err.orientation <= opt.orientation_tolerance) {
      out = q;
      return true;
    }
    if (it == opt.max_iterations) break;
    const Eigen::Matrix<double, 6, 1> e = twist_error(current, target);
    const Jacobian jac = jacobian(chain, q);
    Eigen::VectorXd dq =
        jac.transpose() * (jac * jac.transpose() + damping).ldlt().solve(e);
    const double largest = dq.cwiseAbs().maxCoeff();
    if (largest > opt.max_step) dq *= opt.max_step / largest;
    q = chain.clamp(q + dq);
  }
  return false;
}

}  // namespace

JointConfig inverse_kinematics(const KinematicChain& chain, const Pose& target,
                               const JointConfig& seed, const IkOptions& options) {
  check_size(chain, seed);
  if (!chain.within_limits(seed)) {
    throw JointLimitError("inverse_kinematics: seed violates joint limits");
  }
  if ((target.translation - chain.base.translation).norm() >
      chain.reach() + options.position_tolerance) {
    throw UnreachableError("inverse_kinematics: target outside workspace radius");
  }
  JointConfig solution;
  if (solve_from(chain, target, seed, options, solution)) return solution;

  std::mt19937_64 rng(options.restart_seed);
  for (int attempt = 0; attempt < options.restarts; ++attempt) {
    JointConfig q(chain.dof());
    for (std::size_t i = 0; i < chain.dof(); ++i) {
      q[i] = uniform(rng, chain.joints[i].lower, chain.joints[i].upper);
    }
    if (solve_from(chain, target, q, options, solution)) return solution;
  }
  throw UnreachableError("inverse_kinematics: no convergence within iteration budget");
}

}  // namespace assembly
