#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "assembly/se3.hpp"

namespace assembly {

using JointConfig = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Revolute joint: rotate about `axis` (in the parent frame), then apply the
/// fixed `link` offset to reach the next joint frame.
struct Joint {
  Vec3 axis = Vec3::UnitZ();
  Pose link;
  double lower = -M_PI;
  double upper = M_PI;
};

struct KinematicChain {
  Pose base;
  std::vector<Joint> joints;

  std::size_t dof() const { return joints.size(); }
  /// Sum of link translation lengths; an upper bound on reach from the base.
  double reach() const;
  bool within_limits(const JointConfig& q, double tol = 0.0) const;
  JointConfig clamp(const JointConfig& q) const;
  /// Throws ConfigError if the chain is empty or a limit pair is inverted.
  void validate() const;
};

/// Frames of a chain at configuration q: joint_frames[i] is the frame in which
/// joint i rotates, frames[i] the frame after joint i and its link. The tip is
/// frames.back().
struct ChainFrames {
  std::vector<Pose> joint_frames;
  std::vector<Pose> frames;
};

ChainFrames chain_frames(const KinematicChain& chain, const JointConfig& q);
Pose forward_kinematics(const KinematicChain& chain, const JointConfig& q);
/// Rows 0-2 linear velocity of the tip, rows 3-5 angular velocity, world frame.
Jacobian jacobian(const KinematicChain& chain, const JointConfig& q);

struct IkOptions {
  double damping = 1e-2;
  int max_iterations = 200;
  double position_tolerance = 1e-4;
  double orientation_tolerance = 1e-3;
  double max_step = 0.3;  // rad per iteration, infinity norm
  /// Extra attempts from pseudo-random seeds after the caller's seed fails.
  int restarts = 4;
  std::uint64_t restart_seed = 0x5eed;
};

/// Damped least-squares IK. Throws JointLimitError for an out-of-limit seed and
/// UnreachableError when no attempt converges.
JointConfig inverse_kinematics(const KinematicChain& chain, const Pose& target,
                               const JointConfig& seed, const IkOptions& options = {});

}  // namespace assembly
