#include "tmc/config.hpp"

#include <fstream>

#include "tmc/mesh_io.hpp"

namespace tmc {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double get_num(const json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return j.at(key).get<int>();
}

Vector3 get_vec3(const json& j, const std::string& key, const Vector3& fallback,
                 const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError(where + "." + key + ": expected [x, y, z]");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::array<bool, 3> parse_components(const std::string& s, const std::string& where) {
  std::array<bool, 3> c{false, false, false};
  for (char ch : s) {
    if (ch == 'x')
      c[0] = true;
    else if (ch == 'y')
      c[1] = true;
    else if (ch == 'z')
      c[2] = true;
    else
      throw ConfigError(where + ": bad component string '" + s + "' (use e.g. \"y\" or \"xyz\")");
  }
  if (!c[0] && !c[1] && !c[2]) throw ConfigError(where + ": empty component string");
  return c;
}

void parse_scenario(const json& j, SimulationConfig& cfg) {
  check_keys(j, {"kind", "path", "L", "H", "W", "t", "g0", "nx", "ny", "nz", "load_halfwidth",
                 "pad_z", "one_eighth", "radius", "gap", "n_chambers", "chamber_len", "wall",
                 "height", "base", "cap", "width", "side"},
             "scenario");
  if (!j.contains("kind")) throw ConfigError("scenario.kind is required");
  cfg.scenario_kind = j.at("kind").get<std::string>();

  if (cfg.scenario_kind == "box_self_contact") {
    BoxSelfContactParams& p = cfg.box;
    p.L = get_num(j, "L", p.L, "scenario");
    p.H = get_num(j, "H", p.H, "scenario");
    p.W = get_num(j, "W", p.W, "scenario");
    p.t = get_num(j, "t", p.t, "scenario");
    p.g0 = get_num(j, "g0", p.H - 2 * p.t, "scenario");
    p.nx = get_int(j, "nx", p.nx, "scenario");
    p.ny = get_int(j, "ny", p.ny, "scenario");
    p.nz = get_int(j, "nz", p.nz, "scenario");
    p.load_halfwidth = get_num(j, "load_halfwidth", p.load_halfwidth, "scenario");
    p.pad_z = get_num(j, "pad_z", p.pad_z, "scenario");
  } else if (cfg.scenario_kind == "pneumatic_box") {
    PneumaticBoxParams& p = cfg.pneumatic;
    p.L = get_num(j, "L", p.L, "scenario");
    p.H = get_num(j, "H", p.H, "scenario");
    p.W = get_num(j, "W", p.W, "scenario");
    p.t = get_num(j, "t", p.t, "scenario");
    p.nx = get_int(j, "nx", p.nx, "scenario");
    p.ny = get_int(j, "ny", p.ny, "scenario");
    p.nz = get_int(j, "nz", p.nz, "scenario");
    if (j.contains("one_eighth")) p.one_eighth = j.at("one_eighth").get<bool>();
  } else if (cfg.scenario_kind == "punch") {
    PunchParams& p = cfg.punch;
    p.block_L = get_num(j, "L", p.block_L, "scenario");
    p.block_H = get_num(j, "H", p.block_H, "scenario");
    p.radius = get_num(j, "radius", p.radius, "scenario");
    p.gap = get_num(j, "gap", p.gap, "scenario");
  } else if (cfg.scenario_kind == "actuator") {
    ActuatorParams& p = cfg.actuator;
    p.n_chambers = get_int(j, "n_chambers", p.n_chambers, "scenario");
    p.chamber_len = get_num(j, "chamber_len", p.chamber_len, "scenario");
    p.wall = get_num(j, "wall", p.wall, "scenario");
    p.height = get_num(j, "height", p.height, "scenario");
    p.base = get_num(j, "base", p.base, "scenario");
    p.cap = get_num(j, "cap", p.cap, "scenario");
    p.width = get_num(j, "width", p.width, "scenario");
    p.side = get_num(j, "side", p.side, "scenario");
  } else if (cfg.scenario_kind == "mesh_file") {
    if (!j.contains("path")) throw ConfigError("scenario.path is required for mesh_file");
    cfg.mesh_path = j.at("path").get<std::string>();
  } else {
    throw ConfigError("unknown scenario kind '" + cfg.scenario_kind + "'");
  }
}

void parse_materials(const json& j, SimulationConfig& cfg) {
  check_keys(j, {"solids", "third_medium", "derivative_mode"}, "materials");

  cfg.materials.solids.clear();
  if (j.contains("solids")) {
    if (!j.at("solids").is_array()) throw ConfigError("materials.solids: expected an array");
    for (const json& s : j.at("solids")) {
      check_keys(s, {"body", "K", "mu"}, "materials.solids[]");
      SolidParams p;
      p.K = get_num(s, "K", p.K, "materials.solids[]");
      p.mu = get_num(s, "mu", p.mu, "materials.solids[]");
      if (!(p.K > 0.0) || !(p.mu > 0.0))
        throw ConfigError("materials.solids[]: K and mu must be positive");
      cfg.materials.solids[get_int(s, "body", 0, "materials.solids[]")] = p;
    }
  }
  if (cfg.materials.solids.empty()) cfg.materials.solids[0] = SolidParams{};

  if (j.contains("third_medium")) {
    const json& m = j.at("third_medium");
    check_keys(m, {"K", "mu", "gamma", "alpha_r", "pbar", "regularization"}, "materials.third_medium");
    ThirdMediumParams& p = cfg.materials.medium;
    p.K = get_num(m, "K", p.K, "materials.third_medium");
    p.mu = get_num(m, "mu", p.mu, "materials.third_medium");
    p.gamma = get_num(m, "gamma", p.gamma, "materials.third_medium");
    p.alpha_r = get_num(m, "alpha_r", p.alpha_r, "materials.third_medium");
    p.pbar = get_num(m, "pbar", p.pbar, "materials.third_medium");
    if (!(p.gamma > 0.0)) throw ConfigError("materials.third_medium.gamma must be positive");
    if (p.alpha_r < 0.0) throw ConfigError("materials.third_medium.alpha_r must be nonnegative");
    if (m.contains("regularization")) {
      const std::string r = m.at("regularization").get<std::string>();
      if (r == "skew_gradient")
        p.reg_kind = RegKind::SkewGradient;
      else if (r == "full_gradient")
        p.reg_kind = RegKind::FullGradient;
      else
        throw ConfigError("materials.third_medium.regularization: unknown kind '" + r + "'");
    }
  }

  if (j.contains("derivative_mode")) {
    const std::string m = j.at("derivative_mode").get<std::string>();
    if (m == "analytic")
      cfg.materials.mode = DerivativeMode::Analytic;
    else if (m == "dual_number")
      cfg.materials.mode = DerivativeMode::DualNumber;
    else
      throw ConfigError("materials.derivative_mode: unknown mode '" + m + "'");
  }
}

void parse_bcs(const json& j, SimulationConfig& cfg) {
  check_keys(j, {"dirichlet", "tractions", "body_force"}, "bcs");
  if (j.contains("dirichlet")) {
    for (const json& d : j.at("dirichlet")) {
      check_keys(d, {"node_set", "components", "value", "kind", "axis", "center", "angle_deg"},
                 "bcs.dirichlet[]");
      DirichletSpec spec;
      if (!d.contains("node_set")) throw ConfigError("bcs.dirichlet[]: node_set is required");
      spec.node_set = d.at("node_set").get<std::string>();
      const std::string kind = d.contains("kind") ? d.at("kind").get<std::string>() : "linear";
      if (kind == "linear") {
        spec.kind = DirichletSpec::Linear;
        if (!d.contains("components")) throw ConfigError("bcs.dirichlet[]: components required");
        spec.components = parse_components(d.at("components").get<std::string>(), "bcs.dirichlet[]");
        spec.value = get_vec3(d, "value", Vector3::Zero(), "bcs.dirichlet[]");
      } else if (kind == "rotation") {
        spec.kind = DirichletSpec::Rotation;
        spec.axis = get_vec3(d, "axis", Vector3::UnitX(), "bcs.dirichlet[]");
        spec.center = get_vec3(d, "center", Vector3::Zero(), "bcs.dirichlet[]");
        spec.angle_deg = get_num(d, "angle_deg", 0.0, "bcs.dirichlet[]");
        if (spec.axis.norm() < 1e-14) throw ConfigError("bcs.dirichlet[]: zero rotation axis");
      } else {
        throw ConfigError("bcs.dirichlet[]: unknown kind '" + kind + "'");
      }
      cfg.bcs.dirichlet.push_back(spec);
    }
  }
  if (j.contains("tractions")) {
    for (const json& t : j.at("tractions")) {
      check_keys(t, {"side_set", "traction"}, "bcs.tractions[]");
      TractionSpec spec;
      spec.side_set = t.at("side_set").get<std::string>();
      spec.traction = get_vec3(t, "traction", Vector3::Zero(), "bcs.tractions[]");
      cfg.bcs.tractions.push_back(spec);
    }
  }
  cfg.bcs.body_force = get_vec3(j, "body_force", Vector3::Zero(), "bcs");
}

void parse_schedule(const json& j, SimulationConfig& cfg) {
  check_keys(j, {"n_steps", "tol_rel", "tol_abs", "max_iterations", "max_bisections"}, "schedule");
  cfg.schedule.n_steps = get_int(j, "n_steps", cfg.schedule.n_steps, "schedule");
  if (cfg.schedule.n_steps < 1) throw ConfigError("schedule.n_steps must be >= 1");
  cfg.newton.tol_rel = get_num(j, "tol_rel", cfg.newton.tol_rel, "schedule");
  cfg.newton.tol_abs = get_num(j, "tol_abs", cfg.newton.tol_abs, "schedule");
  if (!(cfg.newton.tol_rel > 0.0) || !(cfg.newton.tol_abs > 0.0))
    throw ConfigError("schedule tolerances must be positive");
  cfg.newton.max_iter = get_int(j, "max_iterations", cfg.newton.max_iter, "schedule");
  if (cfg.newton.max_iter < 1) throw ConfigError("schedule.max_iterations must be >= 1");
  cfg.newton.max_bisections = get_int(j, "max_bisections", cfg.newton.max_bisections, "schedule");
}

void parse_outputs(const json& j, SimulationConfig& cfg) {
  check_keys(j, {"directory", "basename", "vtk_every", "probes"}, "outputs");
  if (j.contains("directory")) cfg.outputs.directory = j.at("directory").get<std::string>();
  if (j.contains("basename")) cfg.outputs.basename = j.at("basename").get<std::string>();
  cfg.outputs.vtk_every = get_int(j, "vtk_every", cfg.outputs.vtk_every, "outputs");
  if (j.contains("probes")) {
    for (const json& p : j.at("probes")) {
      check_keys(p, {"name", "point_a", "point_b"}, "outputs.probes[]");
      ProbeSpec spec;
      if (p.contains("name")) spec.name = p.at("name").get<std::string>();
      spec.point_a = get_vec3(p, "point_a", Vector3::Zero(), "outputs.probes[]");
      spec.point_b = get_vec3(p, "point_b", Vector3::Zero(), "outputs.probes[]");
      cfg.probes.push_back(spec);
    }
  }
}

}  // namespace

SimulationConfig parse_config(const nlohmann::json& j) {
  check_keys(j, {"scenario", "materials", "bcs", "schedule", "outputs", "table1"}, "config");
  SimulationConfig cfg;
  if (!j.contains("scenario")) throw ConfigError("config: scenario section is required");
  parse_scenario(j.at("scenario"), cfg);
  if (j.contains("materials")) parse_materials(j.at("materials"), cfg);
  if (cfg.materials.solids.empty()) cfg.materials.solids[0] = SolidParams{};
  if (j.contains("bcs")) parse_bcs(j.at("bcs"), cfg);
  if (j.contains("schedule")) parse_schedule(j.at("schedule"), cfg);
  if (j.contains("outputs")) parse_outputs(j.at("outputs"), cfg);
  if (j.contains("table1")) {
    check_keys(j.at("table1"), {"alpha_r", "gamma"}, "table1");
    for (const json& a : j.at("table1").at("alpha_r")) cfg.table1_alpha_r.push_back(a.get<double>());
    for (const json& g : j.at("table1").at("gamma")) cfg.table1_gamma.push_back(g.get<double>());
  }
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": JSON parse error: " + e.what());
  }
  return parse_config(j);
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;  // plain string
  }

  nlohmann::json* cursor = &j;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError("bad override path '" + path + "'");
    if (dot == std::string::npos) {
      (*cursor)[key] = value;
      return;
    }
    cursor = &(*cursor)[key];
    start = dot + 1;
  }
}

Mesh build_scenario_mesh(const SimulationConfig& config) {
  if (config.scenario_kind == "box_self_contact") return build_box_self_contact(config.box);
  if (config.scenario_kind == "pneumatic_box") return build_pneumatic_box(config.pneumatic);
  if (config.scenario_kind == "punch") return build_punch(config.punch);
  if (config.scenario_kind == "actuator") return build_actuator(config.actuator);
  if (config.scenario_kind == "mesh_file") return load_mesh(config.mesh_path);
  throw ConfigError("unknown scenario kind '" + config.scenario_kind + "'");
}

}  // namespace tmc
