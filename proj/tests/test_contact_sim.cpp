#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "assembly/contact_sim.hpp"
#include "assembly/errors.hpp"

using namespace assembly;

namespace {

// Peg tip at (x, y, z) in the hole frame, axis straight up.
Pose peg_at(double x, double y, double z, const Rotation& r = Rotation()) { return Pose(r, Vec3(x, y, z)); }

PegHoleModel round_peg() {
  PegHoleModel m;
  m.peg = Contour::circle(0.002);
  m.hole = Contour::circle(0.0025);
  m.clearance = 0.0005;
  m.chamfer = 0.0;
  return m;
}

}  // namespace

TEST_CASE("contour signed distances") {
  const Contour c = Contour::circle(0.002, Eigen::Vector2d(0.001, 0));
  CHECK(c.signed_distance(Eigen::Vector2d(0.001, 0)) == doctest::Approx(-0.002));
  CHECK(c.signed_distance(Eigen::Vector2d(0.006, 0)) == doctest::Approx(0.003));
  const Contour r = Contour::rectangle(0.004, 0.002);
  CHECK(r.signed_distance(Eigen::Vector2d::Zero()) == doctest::Approx(-0.001));
  CHECK(r.signed_distance(Eigen::Vector2d(0.003, 0)) == doctest::Approx(0.001));
  CHECK(r.signed_distance(Eigen::Vector2d(0.005, 0.004)) == doctest::Approx(std::hypot(0.003, 0.003)));
  const Contour t = Contour::trapezoid(0.004, 0.002, 0.002);
  CHECK(t.signed_distance(Eigen::Vector2d::Zero()) < 0);
  CHECK(t.signed_distance(Eigen::Vector2d(0.0018, 0.0009)) > 0);
  CHECK(t.signed_distance(Eigen::Vector2d(0.0018, -0.0009)) < 0);
  CHECK(std::isinf(Contour::compound({}).signed_distance(Eigen::Vector2d::Zero())));
  const Contour pair = Contour::compound({Contour::circle(0.001, Eigen::Vector2d(-0.003, 0)),
                                          Contour::circle(0.001, Eigen::Vector2d(0.003, 0))});
  CHECK(pair.signed_distance(Eigen::Vector2d(0.003, 0)) == doctest::Approx(-0.001));
  CHECK(pair.signed_distance(Eigen::Vector2d::Zero()) == doctest::Approx(0.002));
  CHECK(pair.piece_count() == 2);
  CHECK(c.offset(0.0005).radius == doctest::Approx(0.0025));
  CHECK(r.offset(0.001).signed_distance(Eigen::Vector2d(0.003, 0)) == doctest::Approx(0.0));
}

TEST_CASE("model validation") {
  CHECK_NOTHROW(round_peg().validate());
  PegHoleModel m = round_peg();
  m.clearance = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = round_peg();
  m.stiffness = -1;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = round_peg();
  m.hole = Contour::circle(0.0015);
  CHECK_THROWS_AS(m.validate(), ConfigError);
  CHECK_THROWS_AS(Contour::rectangle(0.0, 0.001).validate(), ConfigError);
}

TEST_CASE("contact wrench examples") {
  const PegHoleModel m = round_peg();
  const WrenchSample free = contact_wrench(peg_at(0.01, 0, 0.005), m);
  CHECK(free.force.norm() == 0.0);
  CHECK(free.torque.norm() == 0.0);

  // pressed 1 mm into the flat top, away from the hole
  const WrenchSample pressed = contact_wrench(peg_at(0.01, 0, -0.001), m);
  CHECK(pressed.force.z() == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(pressed.force.head<2>().norm() < 1e-9);

  // centred over the hole the tip goes in freely, half off the mouth it lands on the rim
  const double press = 0.002;
  CHECK(contact_wrench(peg_at(0, 0, -press), m).force.z() < 7.0);
  CHECK(contact_wrench(peg_at(0.0035, 0, -press), m).force.z() > 7.0);
  CHECK(contact_wrench(peg_at(0.01, 0, -press), m).force.z() > 7.0);
}

TEST_CASE("friction opposes tangential motion") {
  const PegHoleModel m = round_peg();
  const WrenchSample w = contact_wrench(peg_at(0.01, 0, -0.001), m, Vec3(1, 0, 0));
  CHECK(w.force.x() == doctest::Approx(-m.friction * 5.0).epsilon(1e-6));
  CHECK(std::abs(w.force.y()) < 1e-9);
}

TEST_CASE("no wrench without contact and top reactions push back") {
  const PegHoleModel m = round_peg();
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const double x = uniform(rng, -0.02, 0.02), y = uniform(rng, -0.02, 0.02);
    const Rotation tilt = rodrigues(uniform(rng, -0.05, 0.05), Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), 0.001));
    // the tilted tip face reaches at most r sin(tilt) below its centre
    const WrenchSample above = contact_wrench(peg_at(x, y, 0.0002 + uniform(rng, 0, 0.01), tilt), m);
    CHECK(above.force.norm() == 0.0);
    if (std::hypot(x, y) > 0.006) {
      const WrenchSample below = contact_wrench(peg_at(x, y, -uniform(rng, 0.0001, 0.002)), m);
      CHECK(below.force.dot(-Vec3::UnitZ()) <= 0.0);
      CHECK(below.force.norm() > 0.0);
    }
  }
}

TEST_CASE("sense rotates into the hand frame") {
  Rng rng(1);
  const SensorModel quiet = SensorModel::noiseless();
  WrenchSample w;
  CHECK(sense(w, Pose{}, quiet, rng).force.norm() == 0.0);
  w.force = Vec3(0, 0, 10);
  const Pose hand(rodrigues(M_PI / 2, Vec3::UnitX()), Vec3(0.3, 0.1, 0.2));
  const WrenchSample s = sense(w, hand, quiet, rng);
  CHECK((s.force - Vec3(0, 10, 0)).norm() < 1e-12);
  CHECK(s.frame == WrenchFrame::Hand);
  CHECK_FALSE(s.noisy);
}

TEST_CASE("torque is moved from the peg tip to the hand origin") {
  Rng rng(1);
  const SensorModel quiet = SensorModel::noiseless();
  const Pose hand = Pose::from_translation(Vec3(0, 0, 0.05));
  const Pose peg = Pose::from_translation(Vec3(0.01, 0, 0));
  WrenchSample w;
  w.force = Vec3(0, 0, 4);
  const WrenchSample s = sense(w, hand, peg, quiet, rng);
  // r from hand to tip is (0.01, 0, -0.05); r x F = (0, -0.04, 0)
  CHECK((s.torque - Vec3(0, -0.04, 0)).norm() < 1e-12);
}

TEST_CASE("sensor noise bounds and determinism") {
  SensorModel sensor;
  sensor.seed = 5;
  Rng a(sensor.seed), b(sensor.seed);
  Vec3 peak_f = Vec3::Zero(), peak_t = Vec3::Zero();
  for (int i = 0; i < 10000; ++i) {
    const WrenchSample s = sense(WrenchSample{}, Pose{}, sensor, a);
    const WrenchSample t = sense(WrenchSample{}, Pose{}, sensor, b);
    REQUIRE(s.force == t.force);
    REQUIRE(s.torque == t.torque);
    CHECK(s.noisy);
    peak_f = peak_f.cwiseMax(s.force.cwiseAbs());
    peak_t = peak_t.cwiseMax(s.torque.cwiseAbs());
  }
  CHECK((peak_f.array() <= sensor.force_bounds.array()).all());
  CHECK((peak_t.array() <= sensor.torque_bounds.array()).all());
  CHECK((peak_f.array() > 0.95 * sensor.force_bounds.array()).all());
  SensorModel bad;
  bad.force_bounds.x() = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("step in free space follows the command") {
  const PegHoleModel m = round_peg();
  const SimState s0 = initial_state(peg_at(0.01, 0, 0.02));
  const auto [s1, w] = step(s0, peg_at(0.012, 0.001, 0.015), m);
  CHECK(pose_error(s1.peg, peg_at(0.012, 0.001, 0.015)).position < 1e-12);
  CHECK(w.force.norm() == 0.0);
  CHECK_FALSE(s1.in_contact);
}

TEST_CASE("step against a stiff surface stays near it") {
  PegHoleModel m = round_peg();
  m.stiffness = 1e6;
  SimState s = initial_state(peg_at(0.01, 0, 0.001));
  WrenchSample w;
  for (int i = 0; i <= 10; ++i) std::tie(s, w) = step(s, peg_at(0.01, 0, -0.001 * i), m);
  CHECK(s.peg.translation.z() > -0.0005);
  CHECK(w.force.z() > 100.0);
  // the gripper spring carries the same load
  CHECK(w.force.z() == doctest::Approx(m.compliance.axial * (s.peg.translation.z() + 0.010)).epsilon(1e-3));
}

TEST_CASE("penalty and gripper springs share a soft surface load") {
  const PegHoleModel m = round_peg();
  SimState s = initial_state(peg_at(0.01, 0, 0.001));
  WrenchSample w;
  for (int i = 0; i <= 8; ++i) std::tie(s, w) = step(s, peg_at(0.01, 0, -0.0005 * i), m);
  const double pen = -s.peg.translation.z();
  CHECK(pen > 0.0);
  CHECK(pen < 0.004);
  CHECK(w.force.z() == doctest::Approx(m.stiffness * pen).epsilon(1e-3));
  CHECK(w.force.z() == doctest::Approx(m.compliance.axial * (0.004 - pen)).epsilon(1e-3));
}

TEST_CASE("aligned descent inserts monotonically to the bottom") {
  const PegHoleModel m = round_peg();
  SimState s = initial_state(peg_at(0, 0, 0.002));
  double last = 0.0;
  for (double z = 0.002; z >= -0.015; z -= 0.0002) {
    s = step(s, peg_at(0, 0, z), m).first;
    CHECK(s.insertion_depth >= last);
    CHECK(s.insertion_depth <= m.hole_depth + 1e-12);
    last = s.insertion_depth;
  }
  CHECK(last == doctest::Approx(m.hole_depth).epsilon(0.02));
}

TEST_CASE("tilt measurement") {
  const PegHoleModel m = round_peg();
  CHECK(peg_tilt(peg_at(0, 0, 0), m) == doctest::Approx(0.0));
  CHECK(peg_tilt(peg_at(0, 0, 0, rodrigues(0.1, Vec3::UnitX())), m) == doctest::Approx(0.1));
}

TEST_CASE("simulated plant is reproducible") {
  const PegHoleModel m = round_peg();
  SensorModel sensor;
  sensor.seed = 99;
  SimulatedPlant a(m, sensor, peg_at(0.001, 0, 0.003));
  SimulatedPlant b(m, sensor, peg_at(0.001, 0, 0.003));
  for (int i = 0; i < 30; ++i) {
    const Pose cmd = peg_at(0.001, 0, 0.003 - 0.0002 * i);
    const WrenchSample wa = a.command(cmd), wb = b.command(cmd);
    CHECK(wa.force == wb.force);
    CHECK(wa.torque == wb.torque);
  }
  CHECK(a.insertion_depth() == b.insertion_depth());
}
