#include <cmath>

#include "assembly/controller.hpp"
#include "assembly/errors.hpp"

namespace assembly {

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Linear: return "linear";
    case Phase::Spiral: return "spiral";
    case Phase::Impedance: return "impedance";
    case Phase::Done: return "done";
    case Phase::Failed: return "failed";
  }
  return "?";
}

const char* to_string(SpiralMode m) { return m == SpiralMode::Literal ? "literal" : "centered"; }

SpiralMode parse_spiral_mode(const std::string& s) {
  if (s == "literal") return SpiralMode::Literal;
  if (s == "centered") return SpiralMode::Centered;
  throw ConfigError("unknown spiral mode '" + s + "' (expected literal or centered)");
}

ImpedanceGains ImpedanceGains::uniform(double m, double c, double k) {
  return {Vec3::Constant(m), Vec3::Constant(c), Vec3::Constant(k)};
}

void ControllerConfig::validate() const {
  if (std::abs(v_direction.norm() - 1.0) > 1e-9) throw ConfigError("controller: v_direction must be unit length");
  if (!(linear_threshold > 0)) throw ConfigError("controller: linear_threshold must be positive");
  if (!(spiral_exit_threshold > 0)) throw ConfigError("controller: spiral_exit_threshold must be positive");
  if (!(dt > 0)) throw ConfigError("controller: dt must be positive");
  if ((gains.m.array() < 0).any() || (gains.c.array() < 0).any() || (gains.k.array() < 0).any()) {
    throw ConfigError("controller: gains must be non-negative");
  }
  const Vec3 den = gains.m / (dt * dt) + gains.c / dt + gains.k;
  if ((den.array() <= 0).any()) throw ConfigError("controller: impedance denominator must be positive");
  for (const SpiralParams* s : {&literal, &centered}) {
    if (s->delta_r < 0 || !std::isfinite(s->delta_theta)) throw ConfigError("controller: bad spiral step");
  }
  if (!(max_spiral_radius > 0)) throw ConfigError("controller: max_spiral_radius must be positive");
  if (!(linear_step > 0)) throw ConfigError("controller: linear_step must be positive");
  if (spiral_press_depth < 0 || insertion_feed < 0) throw ConfigError("controller: negative feed");
  if (!(target_insertion_depth > 0)) throw ConfigError("controller: target_insertion_depth must be positive");
  if (max_linear_steps < 1 || max_spiral_steps < 1 || max_impedance_steps < 1) {
    throw ConfigError("controller: step budgets must be at least 1");
  }
}

void ControllerTrace::append(Phase phase, const Pose& hand, const WrenchSample& sensed) {
  TraceRecord r;
  r.t = static_cast<double>(records.size()) * dt;
  r.phase = phase;
  r.position = hand.translation;
  r.orientation = hand.rotation;
  r.force = sensed.force;
  r.torque = sensed.torque;
  records.push_back(r);
}

std::size_t ControllerTrace::count(Phase phase) const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.phase == phase;
  return n;
}

std::vector<std::pair<Phase, std::size_t>> ControllerTrace::runs() const {
  std::vector<std::pair<Phase, std::size_t>> out;
  for (const auto& r : records) {
    if (out.empty() || out.back().first != r.phase) {
      out.emplace_back(r.phase, 1);
    } else {
      ++out.back().second;
    }
  }
  return out;
}

bool linear_stop_condition(const Vec3& v_direction, const Rotation& r_hnd, const Vec3& force, double threshold) {
  return v_direction.dot(r_hnd * force) > threshold;
}

double pressing_force(const ControllerConfig& config, const Rotation& r_hnd, const Vec3& sensed_force) {
  const double along = config.v_direction.dot(r_hnd * sensed_force);
  return config.force_sign == ForceSign::Reaction ? -along : std::abs(along);
}

std::pair<Vec3, Vec3> spiral_basis(const Vec3& v) {
  auto project = [&](const Vec3& a) { return Vec3(a - a.dot(v) * v); };
  Vec3 ix = project(Vec3::UnitX());
  if (ix.norm() < 1e-6) ix = project(Vec3::UnitZ());
  ix.normalize();
  Vec3 iy = project(Vec3::UnitY());
  iy -= iy.dot(ix) * ix;
  if (iy.norm() < 1e-6) iy = v.cross(ix);
  iy.normalize();
  return {ix, iy};
}

std::pair<Vec3, SpiralState> spiral_next_position(const SpiralState& state, const ControllerConfig& config) {
  const SpiralParams& sp = config.spiral();
  SpiralState next = state;
  next.theta = state.theta + sp.delta_theta;
  next.r = state.r + sp.delta_r;
  next.index = state.index + 1;
  if (next.r > config.max_spiral_radius) throw SpiralExhaustedError("spiral radius budget exhausted");
  const auto [ix, iy] = spiral_basis(config.v_direction);
  const Vec3 offset = next.r * (rodrigues(next.theta, config.v_direction) * (ix + iy));
  const Vec3& base = config.spiral_mode == SpiralMode::Literal ? state.position : state.center;
  next.position = base + offset;
  if ((next.position - state.center).norm() > std::sqrt(2.0) * config.max_spiral_radius) {
    throw SpiralExhaustedError("spiral left the search area");
  }
  return {next.position, next};
}

Vec3 impedance_update(const Vec3& f, const Vec3& p_i, const Vec3& p_im1, const ImpedanceGains& g, double dt) {
  if (!(dt > 0)) throw ConfigError("impedance: dt must be positive");
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    const double den = g.m[a] / (dt * dt) + g.c[a] / dt + g.k[a];
    if (!(den > 0)) throw ConfigError("impedance: zero denominator");
    const double num = f[a] + g.m[a] * (2 * p_i[a] - p_im1[a]) / (dt * dt) + g.c[a] * p_i[a] / dt + g.k[a] * p_i[a];
    out[a] = num / den;
  }
  return out;
}

PhaseResult run_linear_search(const ControllerConfig& config, Plant& plant, const Pose& start,
                              ControllerTrace& trace) {
  const Vec3& v = config.v_direction;
  PhaseResult res;
  for (int k = 1; k <= config.max_linear_steps; ++k) {
    const double travel = k * config.linear_step;
    const Pose hand(start.rotation, start.translation + travel * v);
    const WrenchSample w = plant.command(hand);
    trace.append(Phase::Linear, hand, w);
    const bool stop = config.force_sign == ForceSign::Reaction
                          ? linear_stop_condition(v, hand.rotation, -w.force, config.linear_threshold)
                          : pressing_force(config, hand.rotation, w.force) > config.linear_threshold;
    if (stop) {
      res.ok = true;
      res.pose = hand;
      return res;
    }
    if (config.expected_contact_distance > 0 &&
        travel > config.expected_contact_distance + config.in_hole_margin) {
      res.ok = true;
      res.entered_hole = true;
      res.pose = hand;
      return res;
    }
  }
  res.pose = Pose(start.rotation, start.translation + config.max_linear_steps * config.linear_step * v);
  res.reason = "linear search found no surface within the step budget";
  return res;
}

PhaseResult run_spiral_search(const ControllerConfig& config, Plant& plant, const Pose& contact,
                              ControllerTrace& trace, bool entered_hole) {
  const Vec3& v = config.v_direction;
  const Rotation& r = contact.rotation;
  PhaseResult res;
  if (entered_hole) {
    const WrenchSample w = plant.command(contact);
    trace.append(Phase::Spiral, contact, w);
    res.ok = true;
    res.pose = contact;
    return res;
  }
  SpiralState state;
  state.center = contact.translation;
  state.position = contact.translation;
  int steps = 0;
  for (;;) {
    if (steps + 2 > config.max_spiral_steps) {
      res.reason = "spiral search step budget exhausted";
      res.pose = Pose(r, state.position);
      return res;
    }
    const Pose lifted(r, state.position - config.linear_step * v);
    trace.append(Phase::Spiral, lifted, plant.command(lifted));
    const Pose pressed(r, state.position + config.spiral_press_depth * v);
    const WrenchSample w = plant.command(pressed);
    trace.append(Phase::Spiral, pressed, w);
    steps += 2;
    const double press = pressing_force(config, r, w.force);
    const bool found = config.spiral_exit == SpiralExit::ForceDrop ? press < config.spiral_exit_threshold
                                                                   : press > config.linear_threshold;
    if (found) {
      res.ok = true;
      res.pose = pressed;
      return res;
    }
    try {
      state = spiral_next_position(state, config).second;
    } catch (const SpiralExhaustedError& e) {
      res.reason = e.what();
      res.pose = pressed;
      return res;
    }
  }
}

PhaseResult run_impedance_insertion(const ControllerConfig& config, Plant& plant, const Pose& hole_pose,
                                    ControllerTrace& trace) {
  const Vec3& v = config.v_direction;
  const Rotation& r = hole_pose.rotation;
  Vec3 p_prev = hole_pose.translation;
  Vec3 p = hole_pose.translation;
  PhaseResult res;
  for (int k = 0; k < config.max_impedance_steps; ++k) {
    const Pose hand(r, p);
    const WrenchSample w = plant.command(hand);
    trace.append(Phase::Impedance, hand, w);
    if (plant.insertion_depth() >= config.target_insertion_depth) {
      res.ok = true;
      res.pose = hand;
      return res;
    }
    const Vec3 reaction = r * w.force;
    const Vec3 updated = impedance_update(reaction, p, p_prev, config.gains, config.dt);
    const double feed = pressing_force(config, r, w.force) > config.impedance_force_limit ? 0.0 : config.insertion_feed;
    const Vec3 next = updated - v.dot(updated - p) * v + feed * v;
    p_prev = p;
    p = next;
  }
  res.pose = Pose(r, p);
  res.reason = "impedance insertion step budget exhausted";
  return res;
}

InsertionOutcome run_insertion(const ControllerConfig& config, Plant& plant, const Pose& pre_assembly) {
  config.validate();
  InsertionOutcome out;
  out.trace.dt = config.dt;
  auto fail = [&](Phase phase, const PhaseResult& r) {
    out.phase = Phase::Failed;
    out.failed_phase = phase;
    out.reason = r.reason;
    out.final_pose = r.pose;
    out.insertion_depth = plant.insertion_depth();
    return out;
  };
  const PhaseResult lin = run_linear_search(config, plant, pre_assembly, out.trace);
  if (!lin.ok) return fail(Phase::Linear, lin);
  const PhaseResult spi = run_spiral_search(config, plant, lin.pose, out.trace, lin.entered_hole);
  if (!spi.ok) return fail(Phase::Spiral, spi);
  const PhaseResult imp = run_impedance_insertion(config, plant, spi.pose, out.trace);
  if (!imp.ok) return fail(Phase::Impedance, imp);
  out.phase = Phase::Done;
  out.final_pose = imp.pose;
  out.insertion_depth = plant.insertion_depth();
  return out;
}

}  // namespace assembly
