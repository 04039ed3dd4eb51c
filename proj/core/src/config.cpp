#include "legkit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <system_error>
#include <type_traits>

namespace legkit::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

struct Entry {
  KeyInfo info;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

template <typename Access>
Entry real(std::string name, std::string doc, Access access) {
  return {{name, std::move(doc)},
          [access, name](Config& c, const std::string& v) {
            const double x = parse_number<double>(name, v);
            if (!std::isfinite(x)) throw ConfigError("non-finite value for " + name);
            access(c) = x;
          },
          [access](const Config& c) { return format_double(access(const_cast<Config&>(c))); }};
}

template <typename Access>
Entry integer(std::string name, std::string doc, Access access) {
  return {{name, std::move(doc)},
          [access, name](Config& c, const std::string& v) {
            access(c) = parse_number<std::remove_reference_t<decltype(access(c))>>(name, v);
          },
          [access](const Config& c) { return std::to_string(access(const_cast<Config&>(c))); }};
}

template <typename Access>
Entry boolean(std::string name, std::string doc, Access access) {
  return {{name, std::move(doc)},
          [access, name](Config& c, const std::string& v) { access(c) = parse_bool(name, v); },
          [access](const Config& c) {
            return std::string(access(const_cast<Config&>(c)) ? "true" : "false");
          }};
}

// Per-leg link lengths are set for all four legs at once.
template <typename Member>
Entry leg_length(std::string name, std::string doc, Member member) {
  return {{name, std::move(doc)},
          [member, name](Config& c, const std::string& v) {
            const double x = parse_number<double>(name, v);
            for (auto& leg : c.episode.robot.geometry.legs) leg.*member = x;
          },
          [member](const Config& c) { return format_double(c.episode.robot.geometry.legs[0].*member); }};
}

std::vector<Entry> build_entries() {
  std::vector<Entry> e;
  // Simulator.
  e.push_back(real("sim.dt", "control step, s", [](Config& c) -> double& { return c.episode.sim.dt; }));
  e.push_back(integer("sim.substeps", "integration substeps per control step",
                      [](Config& c) -> int& { return c.episode.sim.substeps; }));
  e.push_back(real("sim.contact_stiffness", "normal contact stiffness, N/m",
                   [](Config& c) -> double& { return c.episode.sim.contact_stiffness; }));
  e.push_back(real("sim.contact_damping", "normal contact damping, N s/m",
                   [](Config& c) -> double& { return c.episode.sim.contact_damping; }));
  e.push_back(real("sim.friction_damping", "slope of the regularized friction law, N s/m",
                   [](Config& c) -> double& { return c.episode.sim.friction_damping; }));
  e.push_back(real("sim.gravity", "m/s^2", [](Config& c) -> double& { return c.episode.sim.gravity; }));
  e.push_back(boolean("sim.accel_includes_gravity", "accelerometer reads specific force (+g at rest)",
                      [](Config& c) -> bool& { return c.episode.sim.accel_includes_gravity; }));
  // Robot.
  e.push_back(real("robot.base_mass", "kg", [](Config& c) -> double& { return c.episode.robot.base_mass; }));
  e.push_back({{"robot.link_mass", "kg, applied to all eight links"},
               [](Config& c, const std::string& v) {
                 const double x = parse_number<double>("robot.link_mass", v);
                 c.episode.robot.link_masses.fill(x);
               },
               [](const Config& c) { return format_double(c.episode.robot.link_masses[0]); }});
  e.push_back(real("robot.foot_friction", "dimensionless",
                   [](Config& c) -> double& { return c.episode.robot.foot_friction; }));
  e.push_back(real("robot.body_length", "hip-to-hip, m",
                   [](Config& c) -> double& { return c.episode.robot.geometry.body_length; }));
  e.push_back(real("robot.body_width", "hip-to-hip, m",
                   [](Config& c) -> double& { return c.episode.robot.geometry.body_width; }));
  e.push_back(real("robot.body_height", "trunk box thickness, m",
                   [](Config& c) -> double& { return c.episode.robot.geometry.body_height; }));
  e.push_back(real("robot.standing_height", "hip height at rest, m",
                   [](Config& c) -> double& { return c.episode.robot.geometry.standing_height; }));
  e.push_back(leg_length("robot.l_abd", "lateral hip offset, m", &kin::LegGeometry::l_abd));
  e.push_back(leg_length("robot.l_upper", "m", &kin::LegGeometry::l_upper));
  e.push_back(leg_length("robot.l_lower", "m", &kin::LegGeometry::l_lower));
  // Gait.
  e.push_back(real("gait.rho", "trajectory rotation, rad", [](Config& c) -> double& { return c.episode.task.rho; }));
  e.push_back(real("gait.omega_bar", "constant yaw step added to the heading command, m",
                   [](Config& c) -> double& { return c.episode.task.omega_bar; }));
  e.push_back(real("gait.l_span", "half stride length, m",
                   [](Config& c) -> double& { return c.episode.task.l_span; }));
  e.push_back(real("gait.t_swing", "s", [](Config& c) -> double& { return c.episode.t_swing; }));
  e.push_back(real("gait.step_velocity", "m/s; stance time = 2 l_span / step_velocity",
                   [](Config& c) -> double& { return c.episode.step_velocity; }));
  e.push_back({{"gait.control_points", "mirrored | printed"},
               [](Config& c, const std::string& v) {
                 if (v == "mirrored") {
                   c.episode.control_points = gait::ControlPointTable::kMirrored;
                 } else if (v == "printed") {
                   c.episode.control_points = gait::ControlPointTable::kPrinted;
                 } else {
                   throw ConfigError("gait.control_points must be mirrored or printed");
                 }
               },
               [](const Config& c) {
                 return std::string(c.episode.control_points == gait::ControlPointTable::kPrinted
                                        ? "printed"
                                        : "mirrored");
               }});
  e.push_back(real("heading.gain", "yaw correction per rad of heading error",
                   [](Config& c) -> double& { return c.episode.heading_gain; }));
  e.push_back(real("heading.bound", "saturation of the yaw command",
                   [](Config& c) -> double& { return c.episode.heading_bound; }));
  e.push_back(real("heading.step_scale", "yaw command to yaw step length",
                   [](Config& c) -> double& { return c.episode.heading_step_scale; }));
  // Action remap.
  e.push_back(real("bounds.psi_min", "m", [](Config& c) -> double& { return c.episode.bounds.psi_min; }));
  e.push_back(real("bounds.psi_max", "m", [](Config& c) -> double& { return c.episode.bounds.psi_max; }));
  e.push_back(real("bounds.delta_min", "m", [](Config& c) -> double& { return c.episode.bounds.delta_min; }));
  e.push_back(real("bounds.delta_max", "m", [](Config& c) -> double& { return c.episode.bounds.delta_max; }));
  e.push_back(real("bounds.residual", "per-axis foot residual bound, m",
                   [](Config& c) -> double& { return c.episode.bounds.residual; }));
  // Episode plumbing.
  e.push_back(real("episode.terrain_cell", "heightfield lattice spacing, m",
                   [](Config& c) -> double& { return c.episode.terrain_cell; }));
  e.push_back(real("episode.terrain_margin", "field margin around the episode reach, m",
                   [](Config& c) -> double& { return c.episode.terrain_margin; }));
  e.push_back(real("episode.max_speed", "sizes the field, m/s",
                   [](Config& c) -> double& { return c.episode.max_speed; }));
  e.push_back(real("episode.start_jitter", "start offset range, m",
                   [](Config& c) -> double& { return c.episode.start_jitter; }));
  // ARS.
  e.push_back(integer("ars.directions", "antithetic pairs per epoch",
                      [](Config& c) -> int& { return c.ars.directions; }));
  e.push_back(real("ars.step_size", "alpha", [](Config& c) -> double& { return c.ars.step_size; }));
  e.push_back(real("ars.noise", "nu", [](Config& c) -> double& { return c.ars.noise; }));
  e.push_back(integer("ars.episode_steps", "T", [](Config& c) -> int& { return c.ars.episode_steps; }));
  e.push_back(real("ars.discount", "gamma", [](Config& c) -> double& { return c.ars.discount; }));
  e.push_back(integer("ars.threads", "rollout workers, 0 = hardware",
                      [](Config& c) -> int& { return c.ars.threads; }));
  // D2 distribution.
  e.push_back(real("d2.base_mass_nominal", "kg", [](Config& c) -> double& { return c.dist.base_mass_nominal; }));
  e.push_back(real("d2.base_mass_rel_std", "fraction of nominal",
                   [](Config& c) -> double& { return c.dist.base_mass_rel_std; }));
  e.push_back(real("d2.link_mass_nominal", "kg", [](Config& c) -> double& { return c.dist.link_mass_nominal; }));
  e.push_back(real("d2.link_mass_rel_std", "fraction of nominal",
                   [](Config& c) -> double& { return c.dist.link_mass_rel_std; }));
  e.push_back(real("d2.clip_sigmas", "Gaussian clip", [](Config& c) -> double& { return c.dist.clip_sigmas; }));
  e.push_back(real("d2.friction_min", "", [](Config& c) -> double& { return c.dist.friction_min; }));
  e.push_back(real("d2.friction_max", "", [](Config& c) -> double& { return c.dist.friction_max; }));
  e.push_back(real("d2.mesh_magnitude_min", "m", [](Config& c) -> double& { return c.dist.mesh_magnitude_min; }));
  e.push_back(real("d2.mesh_magnitude_max", "m", [](Config& c) -> double& { return c.dist.mesh_magnitude_max; }));
  // Fixed training environment.
  e.push_back(real("nominal.friction", "", [](Config& c) -> double& { return c.nominal.friction; }));
  e.push_back(real("nominal.mesh_magnitude", "m", [](Config& c) -> double& { return c.nominal.mesh_magnitude; }));
  e.push_back(integer("nominal.terrain_seed", "",
                      [](Config& c) -> std::uint64_t& { return c.nominal.terrain_seed; }));
  // Training and evaluation.
  e.push_back(integer("train.epochs", "", [](Config& c) -> int& { return c.train.epochs; }));
  e.push_back({{"train.mode", "d2 | fixed"},
               [](Config& c, const std::string& v) {
                 if (v == "d2") {
                   c.train.mode = ars::TrainingMode::kRandomized;
                 } else if (v == "fixed") {
                   c.train.mode = ars::TrainingMode::kFixed;
                 } else {
                   throw ConfigError("train.mode must be d2 or fixed");
                 }
               },
               [](const Config& c) {
                 return std::string(c.train.mode == ars::TrainingMode::kFixed ? "fixed" : "d2");
               }});
  e.push_back(integer("eval.trials", "", [](Config& c) -> int& { return c.eval.trials; }));
  e.push_back(integer("eval.max_steps", "", [](Config& c) -> int& { return c.eval.max_steps; }));
  e.push_back(real("eval.near_edge", "upper edge of the nearest bucket, m",
                   [](Config& c) -> double& { return c.eval.near_edge; }));
  e.push_back(real("eval.far_edge", "lower edge of the farthest bucket, m",
                   [](Config& c) -> double& { return c.eval.far_edge; }));
  e.push_back(integer("eval.threads", "trial workers, 0 = hardware",
                      [](Config& c) -> int& { return c.eval.threads; }));
  e.push_back(integer("seed", "master seed", [](Config& c) -> std::uint64_t& { return c.seed; }));
  return e;
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = build_entries();
  return e;
}

const Entry& find_entry(const std::string& key) {
  for (const Entry& e : entries()) {
    if (e.info.name == key) return e;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ConfigError("cannot format value");
  return std::string(buf, ptr);
}

void Config::validate() const {
  episode.validate();
  ars.validate();
  dist.validate();
  if (!(nominal.friction > 0.0) || !(nominal.mesh_magnitude >= 0.0)) {
    throw ConfigError("nominal environment needs positive friction and non-negative mesh magnitude");
  }
  if (train.epochs < 0) throw ConfigError("train.epochs must be non-negative");
  if (eval.trials < 1 || eval.max_steps < 1) throw ConfigError("eval trials and steps must be positive");
  if (!(eval.near_edge > 0.0 && eval.far_edge > eval.near_edge)) {
    throw ConfigError("eval bucket edges must satisfy 0 < near_edge < far_edge");
  }
  if (eval.threads < 0) throw ConfigError("eval.threads must be non-negative");
}

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> k;
    for (const Entry& e : entries()) k.push_back(e.info);
    return k;
  }();
  return keys;
}

void set_config_value(Config& cfg, const std::string& key, const std::string& value) {
  find_entry(key).set(cfg, value);
}

std::string get_config_value(const Config& cfg, const std::string& key) {
  return find_entry(key).get(cfg);
}

void apply_config(Config& cfg, std::istream& is, const std::string& source) {
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(number) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "expected 'key = value'");
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  Config cfg;
  apply_config(cfg, in, path);
  cfg.validate();
  return cfg;
}

void write_config(std::ostream& os, const Config& cfg, bool with_docs) {
  for (const Entry& e : entries()) {
    os << e.info.name << " = " << e.get(cfg);
    if (with_docs && !e.info.doc.empty()) os << "  # " << e.info.doc;
    os << '\n';
  }
}

}  // namespace legkit::harness
