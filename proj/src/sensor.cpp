#include "assembly/contact_sim.hpp"
#include "assembly/errors.hpp"

namespace assembly {

SensorModel SensorModel::noiseless() {
  SensorModel s;
  s.force_bounds = Vec3::Zero();
  s.torque_bounds = Vec3::Zero();
  return s;
}

void SensorModel::validate() const {
  if ((force_bounds.array() < 0).any() || (torque_bounds.array() < 0).any()) {
    throw ConfigError("sensor: noise bounds must be non-negative");
  }
}

WrenchSample sense(const WrenchSample& world, const Pose& hand_pose, const SensorModel& sensor, Rng& rng) {
  const Rotation to_sensor = (hand_pose.rotation * sensor.mounting.rotation).inverse();
  WrenchSample out;
  out.force = to_sensor * world.force;
  out.torque = to_sensor * world.torque;
  for (int i = 0; i < 3; ++i) out.force[i] += uniform_symmetric(rng, sensor.force_bounds[i]);
  for (int i = 0; i < 3; ++i) out.torque[i] += uniform_symmetric(rng, sensor.torque_bounds[i]);
  out.frame = WrenchFrame::Hand;
  out.noisy = (sensor.force_bounds.array() > 0).any() || (sensor.torque_bounds.array() > 0).any();
  return out;
}

WrenchSample sense(const WrenchSample& world, const Pose& hand_pose, const Pose& peg_pose,
                   const SensorModel& sensor, Rng& rng) {
  WrenchSample shifted = world;
  shifted.torque = world.torque + (peg_pose.translation - hand_pose.translation).cross(world.force);
  return sense(shifted, hand_pose, sensor, rng);
}

}  // namespace assembly
