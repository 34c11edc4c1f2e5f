#include "assembly/contact_sim.hpp"

namespace assembly {

SimulatedPlant::SimulatedPlant(PegHoleModel model, SensorModel sensor, const Pose& initial_hand)
    : model_(std::move(model)), sensor_(sensor), rng_(sensor.seed) {
  model_.validate();
  sensor_.validate();
  state_ = initial_state(initial_hand * model_.peg_in_hand);
}

WrenchSample SimulatedPlant::command(const Pose& hand_pose) {
  auto [next, wrench] = step(state_, hand_pose * model_.peg_in_hand, model_);
  state_ = next;
  last_world_ = wrench;
  return sense(wrench, hand_pose, state_.peg, sensor_, rng_);
}

}  // namespace assembly
