#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "assembly/errors.hpp"
#include "assembly/scenario.hpp"

namespace assembly {

namespace {

constexpr double kDeg = M_PI / 180.0;

Rotation rpy(double roll, double pitch, double yaw) {
  return Rotation::about(Vec3::UnitZ(), yaw) * Rotation::about(Vec3::UnitY(), pitch) *
         Rotation::about(Vec3::UnitX(), roll);
}

// Collects every problem instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  void error(const YAML::Node& at, const std::string& path, const std::string& msg) {
    std::ostringstream os;
    os << source_;
    if (at && at.Mark().line >= 0) os << ":" << at.Mark().line + 1;
    os << ": " << path << ": " << msg;
    errors_.push_back(os.str());
  }
  void error(const std::string& path, const std::string& msg) {
    errors_.push_back(source_ + ": " + path + ": " + msg);
  }

  YAML::Node required(const YAML::Node& parent, const std::string& key, const std::string& path) {
    const YAML::Node n = parent[key];
    if (!n || n.IsNull()) {
      error(parent, join(path, key), "missing required field");
      return YAML::Node();
    }
    return n;
  }

  double number(const YAML::Node& n, const std::string& path, double fallback = 0.0) {
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) error(n, path, "must be finite");
      return v;
    } catch (const YAML::Exception&) {
      error(n, path, "expected a number");
      return fallback;
    }
  }

  double number_or(const YAML::Node& parent, const std::string& key, const std::string& path, double fallback) {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    return number(n, join(path, key), fallback);
  }

  int integer_or(const YAML::Node& parent, const std::string& key, const std::string& path, int fallback) {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    try {
      return n.as<int>();
    } catch (const YAML::Exception&) {
      error(n, join(path, key), "expected an integer");
      return fallback;
    }
  }

  bool boolean_or(const YAML::Node& parent, const std::string& key, const std::string& path, bool fallback) {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      error(n, join(path, key), "expected true or false");
      return fallback;
    }
  }

  std::string text_or(const YAML::Node& parent, const std::string& key, const std::string& path,
                      const std::string& fallback) {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    try {
      return n.as<std::string>();
    } catch (const YAML::Exception&) {
      error(n, join(path, key), "expected a string");
      return fallback;
    }
  }

  Vec3 vec3(const YAML::Node& n, const std::string& path) {
    if (n.IsScalar()) {
      const double v = number(n, path);
      return Vec3::Constant(v);
    }
    if (!n.IsSequence() || n.size() != 3) {
      error(n, path, "expected a list of three numbers");
      return Vec3::Zero();
    }
    return Vec3(number(n[0], path + "[0]"), number(n[1], path + "[1]"), number(n[2], path + "[2]"));
  }

  Eigen::Vector2d vec2(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence() || n.size() != 2) {
      error(n, path, "expected a list of two numbers");
      return Eigen::Vector2d::Zero();
    }
    return Eigen::Vector2d(number(n[0], path + "[0]"), number(n[1], path + "[1]"));
  }

  Pose pose(const YAML::Node& n, const std::string& path) {
    if (!n.IsMap()) {
      error(n, path, "expected a pose map with position and rpy_deg");
      return Pose();
    }
    Pose p;
    if (n["position"]) p.translation = vec3(n["position"], path + ".position");
    if (n["rpy_deg"]) {
      const Vec3 a = vec3(n["rpy_deg"], path + ".rpy_deg") * kDeg;
      p.rotation = rpy(a.x(), a.y(), a.z());
    }
    return p;
  }

  std::vector<Pose> poses(const YAML::Node& parent, const std::string& key, const std::string& path) {
    std::vector<Pose> out;
    const YAML::Node n = parent[key];
    if (!n) return out;
    if (!n.IsSequence()) {
      error(n, join(path, key), "expected a list of poses");
      return out;
    }
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(pose(n[i], join(path, key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  ShapePrimitive shape(const YAML::Node& n, const std::string& path) {
    ShapePrimitive s;
    if (!n.IsMap()) {
      error(n, path, "expected a shape map");
      return ShapePrimitive::box(Vec3::Constant(0.01));
    }
    const Pose local = n["pose"] ? pose(n["pose"], path + ".pose") : Pose();
    if (n["box"]) {
      s = ShapePrimitive::box(vec3(n["box"], path + ".box"), local);
    } else if (n["cylinder"]) {
      const YAML::Node c = n["cylinder"];
      s = ShapePrimitive::cylinder(number(required(c, "radius", path + ".cylinder"), path + ".cylinder.radius"),
                                   number(required(c, "half_height", path + ".cylinder"),
                                          path + ".cylinder.half_height"),
                                   local);
    } else if (n["compound"] && n["compound"].IsSequence()) {
      std::vector<ShapePrimitive> children;
      for (std::size_t i = 0; i < n["compound"].size(); ++i) {
        children.push_back(shape(n["compound"][i], path + ".compound[" + std::to_string(i) + "]"));
      }
      s = ShapePrimitive::compound(std::move(children), local);
    } else {
      error(n, path, "shape must be one of box, cylinder or compound");
      return ShapePrimitive::box(Vec3::Constant(0.01));
    }
    try {
      s.validate();
    } catch (const ConfigError& e) {
      error(n, path, e.what());
    }
    return s;
  }

  Contour contour(const YAML::Node& n, const std::string& path) {
    if (!n.IsMap()) {
      error(n, path, "expected a contour map");
      return Contour::circle(0.001);
    }
    const Eigen::Vector2d c = n["center"] ? vec2(n["center"], path + ".center") : Eigen::Vector2d::Zero();
    if (n["circle"]) {
      return Contour::circle(number(required(n["circle"], "radius", path + ".circle"), path + ".circle.radius"), c);
    }
    if (n["rectangle"]) {
      const YAML::Node r = n["rectangle"];
      return Contour::rectangle(number(required(r, "width", path + ".rectangle"), path + ".rectangle.width"),
                                number(required(r, "depth", path + ".rectangle"), path + ".rectangle.depth"), c);
    }
    if (n["trapezoid"]) {
      const YAML::Node t = n["trapezoid"];
      const std::string tp = path + ".trapezoid";
      return Contour::trapezoid(number(required(t, "bottom_width", tp), tp + ".bottom_width"),
                                number(required(t, "top_width", tp), tp + ".top_width"),
                                number(required(t, "depth", tp), tp + ".depth"), c);
    }
    if (n["compound"]) {
      std::vector<Contour> parts;
      if (!n["compound"].IsSequence()) {
        error(n, path + ".compound", "expected a list of contours");
      } else {
        for (std::size_t i = 0; i < n["compound"].size(); ++i) {
          Contour part = contour(n["compound"][i], path + ".compound[" + std::to_string(i) + "]");
          parts.push_back(std::move(part));
        }
      }
      return Contour::compound(std::move(parts));
    }
    error(n, path, "contour must be one of circle, rectangle, trapezoid or compound");
    return Contour::circle(0.001);
  }

  const std::vector<std::string>& errors() const { return errors_; }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::string source_;
  std::vector<std::string> errors_;
};

ArmModel read_arm(Reader& rd, const YAML::Node& n, const std::string& path) {
  ArmModel arm;
  arm.name = rd.text_or(n, "name", path, "");
  if (arm.name.empty()) rd.error(n, path + ".name", "missing required field");
  const Pose base = n["base"] ? rd.pose(n["base"], path + ".base") : Pose();
  arm.chain = default_arm_chain(base);
  if (n["joints"]) {
    const YAML::Node js = n["joints"];
    arm.chain.joints.clear();
    for (std::size_t i = 0; i < js.size(); ++i) {
      const std::string jp = path + ".joints[" + std::to_string(i) + "]";
      Joint j;
      j.axis = rd.vec3(rd.required(js[i], "axis", jp), jp + ".axis");
      if (js[i]["link"]) j.link = Pose::from_translation(rd.vec3(js[i]["link"], jp + ".link"));
      j.lower = rd.number_or(js[i], "lower_deg", jp, -180.0) * kDeg;
      j.upper = rd.number_or(js[i], "upper_deg", jp, 180.0) * kDeg;
      arm.chain.joints.push_back(j);
    }
  }
  try {
    arm.chain.validate();
  } catch (const ConfigError& e) {
    rd.error(n, path + ".joints", e.what());
  }
  arm.link_radius = rd.number_or(n, "link_radius", path, 0.035);
  arm.hand = n["hand"] ? rd.shape(n["hand"], path + ".hand")
                       : ShapePrimitive::box(Vec3(0.012, 0.045, 0.025), Pose::from_translation(Vec3(0, 0, -0.025)));
  arm.home = JointConfig::Zero(static_cast<Eigen::Index>(arm.chain.dof()));
  if (n["home_deg"]) {
    const YAML::Node h = n["home_deg"];
    if (!h.IsSequence() || h.size() != arm.chain.dof()) {
      rd.error(h, path + ".home_deg", "expected one angle per joint");
    } else {
      for (std::size_t i = 0; i < h.size(); ++i) {
        arm.home[static_cast<Eigen::Index>(i)] = rd.number(h[i], path + ".home_deg") * kDeg;
      }
    }
  }
  if (!arm.chain.within_limits(arm.home)) rd.error(n, path + ".home_deg", "home configuration is outside the joint limits");
  return arm;
}

ObjectSpec read_object(Reader& rd, const YAML::Node& n, const std::string& path) {
  ObjectSpec obj;
  obj.id = rd.text_or(n, "id", path, "");
  if (obj.id.empty()) rd.error(n, path + ".id", "missing required field");
  const std::string role = rd.text_or(n, "role", path, "");
  if (role == "mating") {
    obj.role = ObjectRole::Mating;
  } else if (role == "assembly") {
    obj.role = ObjectRole::Assembly;
  } else {
    rd.error(n, path + ".role", "role must be 'mating' or 'assembly'");
  }
  const YAML::Node shape = rd.required(n, "shape", path);
  obj.shape = shape ? rd.shape(shape, path + ".shape") : ShapePrimitive::box(Vec3::Constant(0.01));
  const YAML::Node init = rd.required(n, "initial_pose", path);
  if (init) obj.initial_pose = rd.pose(init, path + ".initial_pose");
  if (n["grasps"]) {
    const YAML::Node gs = n["grasps"];
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const std::string gp = path + ".grasps[" + std::to_string(i) + "]";
      GraspSpec g;
      g.id = rd.text_or(gs[i], "id", gp, "g" + std::to_string(i));
      const YAML::Node h = rd.required(gs[i], "hand_in_object", gp);
      if (h) g.hand_in_object = rd.pose(h, gp + ".hand_in_object");
      g.jaw_width = rd.number_or(gs[i], "jaw_width", gp, 0.02);
      obj.grasps.push_back(g);
    }
  }
  return obj;
}

void read_peg_hole(Reader& rd, const YAML::Node& n, Scenario& sc) {
  const std::string path = "peg_hole";
  PegHoleModel& m = sc.peg_hole;
  const YAML::Node peg = rd.required(n, "peg", path);
  if (peg) m.peg = rd.contour(peg, path + ".peg");
  m.clearance = rd.number_or(n, "clearance", path, m.clearance);
  if (!(m.clearance > 0)) rd.error(n["clearance"], path + ".clearance", "clearance must be positive");
  if (n["hole"]) {
    m.hole = rd.contour(n["hole"], path + ".hole");
  } else if (m.clearance > 0) {
    m.hole = m.peg.offset(m.clearance);
  }
  if (rd.boolean_or(n, "blind_block", path, false)) m.hole = Contour::compound({});
  m.hole_depth = rd.number_or(n, "hole_depth", path, m.hole_depth);
  m.stiffness = rd.number_or(n, "stiffness", path, m.stiffness);
  m.friction = rd.number_or(n, "friction", path, m.friction);
  m.chamfer = rd.number_or(n, "chamfer", path, m.chamfer);
  m.peg_length = rd.number_or(n, "peg_length", path, m.peg_length);
  m.jamming_angle = rd.number_or(n, "jamming_angle_deg", path, m.jamming_angle / kDeg) * kDeg;
  if (n["compliance"]) {
    const YAML::Node c = n["compliance"];
    m.compliance.lateral = rd.number_or(c, "lateral", path + ".compliance", m.compliance.lateral);
    m.compliance.axial = rd.number_or(c, "axial", path + ".compliance", m.compliance.axial);
    m.compliance.rotational = rd.number_or(c, "rotational", path + ".compliance", m.compliance.rotational);
  }
  if (m.clearance > 0) {
    try {
      m.validate();
    } catch (const ConfigError& e) {
      rd.error(n, path, e.what());
    }
  }
}

void read_controller(Reader& rd, const YAML::Node& n, ControllerConfig& c) {
  const std::string path = "controller";
  c.linear_threshold = rd.number_or(n, "linear_threshold", path, c.linear_threshold);
  c.spiral_exit_threshold = rd.number_or(n, "spiral_exit_threshold", path, c.spiral_exit_threshold);
  const std::string mode = rd.text_or(n, "spiral_mode", path, to_string(c.spiral_mode));
  try {
    c.spiral_mode = parse_spiral_mode(mode);
  } catch (const ConfigError& e) {
    rd.error(n["spiral_mode"], path + ".spiral_mode", e.what());
  }
  for (auto [key, sp] : {std::pair<const char*, SpiralParams*>{"literal", &c.literal}, {"centered", &c.centered}}) {
    if (!n[key]) continue;
    sp->delta_theta = rd.number_or(n[key], "delta_theta", path + "." + key, sp->delta_theta);
    sp->delta_r = rd.number_or(n[key], "delta_r", path + "." + key, sp->delta_r);
  }
  c.max_spiral_radius = rd.number_or(n, "max_spiral_radius", path, c.max_spiral_radius);
  c.spiral_press_depth = rd.number_or(n, "spiral_press_depth", path, c.spiral_press_depth);
  if (n["gains"]) {
    const YAML::Node g = n["gains"];
    if (g["m"]) c.gains.m = rd.vec3(g["m"], path + ".gains.m");
    if (g["c"]) c.gains.c = rd.vec3(g["c"], path + ".gains.c");
    if (g["k"]) c.gains.k = rd.vec3(g["k"], path + ".gains.k");
  }
  c.dt = rd.number_or(n, "dt", path, c.dt);
  c.target_insertion_depth = rd.number_or(n, "target_insertion_depth", path, c.target_insertion_depth);
  c.linear_step = rd.number_or(n, "linear_step", path, c.linear_step);
  c.insertion_feed = rd.number_or(n, "insertion_feed", path, c.insertion_feed);
  c.impedance_force_limit = rd.number_or(n, "impedance_force_limit", path, c.impedance_force_limit);
  c.max_linear_steps = rd.integer_or(n, "max_linear_steps", path, c.max_linear_steps);
  c.max_spiral_steps = rd.integer_or(n, "max_spiral_steps", path, c.max_spiral_steps);
  c.max_impedance_steps = rd.integer_or(n, "max_impedance_steps", path, c.max_impedance_steps);
  c.in_hole_margin = rd.number_or(n, "in_hole_margin", path, c.in_hole_margin);
  const std::string sign = rd.text_or(n, "force_sign", path, "reaction");
  if (sign == "reaction") {
    c.force_sign = ForceSign::Reaction;
  } else if (sign == "absolute") {
    c.force_sign = ForceSign::Absolute;
  } else {
    rd.error(n["force_sign"], path + ".force_sign", "expected 'reaction' or 'absolute'");
  }
  const std::string exit = rd.text_or(n, "spiral_exit", path, "force_drop");
  if (exit == "force_drop") {
    c.spiral_exit = SpiralExit::ForceDrop;
  } else if (exit == "force_exceed") {
    c.spiral_exit = SpiralExit::ForceExceed;
  } else {
    rd.error(n["spiral_exit"], path + ".spiral_exit", "expected 'force_drop' or 'force_exceed'");
  }
}

void read_planner(Reader& rd, const YAML::Node& n, PlannerParams& p) {
  const std::string path = "planner";
  p.step_size = rd.number_or(n, "step_size", path, p.step_size);
  p.connect_threshold = rd.number_or(n, "connect_threshold", path, p.connect_threshold);
  p.max_iterations = rd.integer_or(n, "max_iterations", path, p.max_iterations);
  p.edge_resolution = rd.number_or(n, "edge_resolution", path, p.edge_resolution);
  p.smoothing_attempts = rd.integer_or(n, "smoothing_attempts", path, p.smoothing_attempts);
  p.max_researches = rd.integer_or(n, "max_researches", path, p.max_researches);
  p.max_rebuilds = rd.integer_or(n, "max_rebuilds", path, p.max_rebuilds);
}

}  // namespace

KinematicChain default_arm_chain(const Pose& base) {
  KinematicChain chain;
  chain.base = base;
  auto joint = [](const Vec3& axis, const Vec3& link, double lo_deg, double hi_deg) {
    Joint j;
    j.axis = axis;
    j.link = Pose::from_translation(link);
    j.lower = lo_deg * kDeg;
    j.upper = hi_deg * kDeg;
    return j;
  };
  chain.joints = {
      joint(Vec3::UnitZ(), Vec3(0, 0, 0.15), -180, 180), joint(Vec3::UnitY(), Vec3(0, 0, 0.25), -150, 150),
      joint(Vec3::UnitY(), Vec3(0, 0, 0.22), -160, 160), joint(Vec3::UnitZ(), Vec3::Zero(), -180, 180),
      joint(Vec3::UnitY(), Vec3::Zero(), -150, 150),     joint(Vec3::UnitZ(), Vec3(0, 0, 0.12), -180, 180),
  };
  return chain;
}

YAML::Node pose_to_yaml(const Pose& p) {
  YAML::Node n;
  n["position"] = std::vector<double>{p.translation.x(), p.translation.y(), p.translation.z()};
  const Vec3 rv = p.rotation.log();
  n["rotation_vector"] = std::vector<double>{rv.x(), rv.y(), rv.z()};
  return n;
}

Pose Scenario::pre_assembly_pose() const {
  return hole_frame() * Pose::from_translation(Vec3(0, 0, pre_assembly_offset));
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": parse error: " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError(source + ": top level must be a map");

  Reader rd(source);
  Scenario sc;
  sc.name = rd.text_or(root, "name", "", "");
  if (sc.name.empty()) rd.error(root, "name", "missing required field");
  sc.description = rd.text_or(root, "description", "", "");
  sc.seed = static_cast<std::uint64_t>(rd.integer_or(root, "seed", "", 1));

  const YAML::Node arms = rd.required(root, "arms", "");
  if (arms) {
    if (!arms.IsSequence() || arms.size() != 2) {
      rd.error(arms, "arms", "expected exactly two arms (left, right)");
    } else {
      for (std::size_t i = 0; i < arms.size(); ++i) sc.arms.push_back(read_arm(rd, arms[i], "arms[" + std::to_string(i) + "]"));
    }
  }

  if (root["environment"]) {
    const YAML::Node env = root["environment"];
    for (std::size_t i = 0; i < env.size(); ++i) {
      const std::string p = "environment[" + std::to_string(i) + "]";
      Body b;
      b.id = rd.text_or(env[i], "id", p, "");
      if (b.id.empty()) rd.error(env[i], p + ".id", "missing required field");
      const YAML::Node s = rd.required(env[i], "shape", p);
      b.shape = s ? rd.shape(s, p + ".shape") : ShapePrimitive::box(Vec3::Constant(0.01));
      if (env[i]["pose"]) b.pose = rd.pose(env[i]["pose"], p + ".pose");
      b.kind = BodyKind::StaticEnvironment;
      sc.environment.push_back(b);
    }
  }

  const YAML::Node objects = rd.required(root, "objects", "");
  int n_mating = 0, n_assembly = 0;
  if (objects) {
    for (std::size_t i = 0; i < objects.size(); ++i) {
      ObjectSpec o = read_object(rd, objects[i], "objects[" + std::to_string(i) + "]");
      if (o.role == ObjectRole::Mating) {
        ++n_mating;
        sc.mating = o;
      } else {
        ++n_assembly;
        sc.assembly = o;
      }
    }
    if (n_mating != 1 || n_assembly != 1) {
      rd.error(objects, "objects", "expected exactly one mating and one assembly object");
    }
    if (n_mating == 1 && sc.mating.grasps.empty()) rd.error(objects, "objects", "the mating object needs grasps");
  }

  const YAML::Node goal = rd.required(root, "goal_assembly_pose", "");
  if (goal) sc.goal_assembly_pose = rd.pose(goal, "goal_assembly_pose");
  if (root["hole_in_assembly"]) sc.hole_in_assembly = rd.pose(root["hole_in_assembly"], "hole_in_assembly");
  sc.pre_assembly_offset = rd.number_or(root, "pre_assembly_offset", "", sc.pre_assembly_offset);
  if (!(sc.pre_assembly_offset > 0)) rd.error(root["pre_assembly_offset"], "pre_assembly_offset", "must be positive");

  sc.handover_region = rd.poses(root, "handover_region", "");
  sc.stable_placements = rd.poses(root, "stable_placements", "");
  sc.alternate_handover_poses = rd.poses(root, "alternate_handover_poses", "");
  sc.alternate_placements = rd.poses(root, "alternate_placements", "");
  sc.require_perpendicular_handover = rd.boolean_or(root, "require_perpendicular_handover", "", false);
  sc.perpendicular_tolerance = rd.number_or(root, "perpendicular_tolerance", "", sc.perpendicular_tolerance);

  const YAML::Node ph = rd.required(root, "peg_hole", "");
  if (ph) read_peg_hole(rd, ph, sc);
  sc.peg_hole.hole_frame = sc.hole_frame();

  if (root["sensor"]) {
    const YAML::Node s = root["sensor"];
    if (s["force_bounds"]) sc.sensor.force_bounds = rd.vec3(s["force_bounds"], "sensor.force_bounds");
    if (s["torque_bounds"]) sc.sensor.torque_bounds = rd.vec3(s["torque_bounds"], "sensor.torque_bounds");
    if ((sc.sensor.force_bounds.array() < 0).any() || (sc.sensor.torque_bounds.array() < 0).any()) {
      rd.error(s, "sensor", "noise bounds must be non-negative");
    }
  }
  sc.sensor.seed = sc.seed;

  if (root["controller"]) read_controller(rd, root["controller"], sc.controller);
  sc.controller.v_direction = -sc.hole_frame().rotation.col_z();
  sc.controller.expected_contact_distance = sc.pre_assembly_offset;
  try {
    sc.controller.validate();
  } catch (const ConfigError& e) {
    rd.error("controller", e.what());
  }

  if (root["planner"]) read_planner(rd, root["planner"], sc.planner);
  sc.planner.seed = sc.seed;
  try {
    sc.planner.validate();
  } catch (const ConfigError& e) {
    rd.error("planner", e.what());
  }

  if (root["error_injection"]) {
    const YAML::Node e = root["error_injection"];
    sc.error.position = rd.number_or(e, "position_mm", "error_injection", 0.0) * 1e-3;
    sc.error.rotation = rd.number_or(e, "rotation_deg", "error_injection", 0.0) * kDeg;
    if (sc.error.position < 0 || sc.error.rotation < 0) rd.error(e, "error_injection", "bounds must be non-negative");
  }

  if (!rd.errors().empty()) {
    std::string msg = "invalid scenario (" + std::to_string(rd.errors().size()) + " problem(s)):";
    for (const auto& e : rd.errors()) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string resolve_scenario_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::exists(name_or_path)) return name_or_path;
  const char* env = std::getenv("ASSEMBLY_SCENARIO_DIR");
  const fs::path dir = env && *env ? fs::path(env) : fs::path(ASSEMBLY_DEFAULT_SCENARIO_DIR);
  fs::path candidate = dir / name_or_path;
  if (candidate.extension() != ".yaml") candidate += ".yaml";
  if (fs::exists(candidate)) return candidate.string();
  throw IoError("scenario '" + name_or_path + "' not found (looked in " + dir.string() + ")");
}

}  // namespace assembly
