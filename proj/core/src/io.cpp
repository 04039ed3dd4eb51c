#include "legkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "legkit/config.hpp"
#include "legkit/kinematics.hpp"

namespace legkit::harness {

namespace {

constexpr std::size_t kTrajectoryColumns = 2 + 4 + 12 + 12 + 6 + 1;

double parse_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError(where + ": invalid number '" + text + "'");
  }
  return v;
}

bool next_content_line(std::istream& is, std::string& line, int& number) {
  while (std::getline(is, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return true;
  }
  return false;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_checkpoint(std::ostream& os, const policy::PolicyMatrix& theta,
                      std::optional<std::uint64_t> seed) {
  if (seed) os << "# seed " << *seed << '\n';
  os << theta.rows() << ' ' << theta.cols() << ' ' << kCheckpointVersion << '\n';
  for (Eigen::Index r = 0; r < theta.rows(); ++r) {
    for (Eigen::Index c = 0; c < theta.cols(); ++c) {
      if (c) os << ' ';
      os << format_double(theta(r, c));
    }
    os << '\n';
  }
  if (!os) throw IoError("failed writing checkpoint");
}

policy::PolicyMatrix read_checkpoint(std::istream& is) {
  std::string line;
  int number = 0;
  if (!next_content_line(is, line, number)) throw IoError("checkpoint: missing header");
  {
    std::istringstream header(line);
    long rows = 0, cols = 0, version = 0;
    if (!(header >> rows >> cols >> version)) throw IoError("checkpoint: malformed header");
    if (rows != policy::PolicyMatrix::RowsAtCompileTime ||
        cols != policy::PolicyMatrix::ColsAtCompileTime) {
      throw IoError("checkpoint: expected a 12 x 14 matrix, got " + std::to_string(rows) + " x " +
                    std::to_string(cols));
    }
    if (version != kCheckpointVersion) {
      throw IoError("checkpoint: unsupported format version " + std::to_string(version));
    }
  }
  policy::PolicyMatrix theta;
  for (Eigen::Index r = 0; r < theta.rows(); ++r) {
    if (!next_content_line(is, line, number)) throw IoError("checkpoint: truncated matrix");
    std::istringstream row(line);
    std::string token;
    Eigen::Index c = 0;
    while (row >> token) {
      if (c >= theta.cols()) throw IoError("checkpoint: too many entries on line " + std::to_string(number));
      theta(r, c++) = parse_double(token, "checkpoint line " + std::to_string(number));
    }
    if (c != theta.cols()) throw IoError("checkpoint: too few entries on line " + std::to_string(number));
  }
  if (!theta.allFinite()) throw IoError("checkpoint: non-finite entry");
  return theta;
}

void save_checkpoint(const std::string& path, const policy::PolicyMatrix& theta,
                     std::optional<std::uint64_t> seed) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path);
  write_checkpoint(out, theta, seed);
}

policy::PolicyMatrix load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

void write_trajectory_csv(std::ostream& os, const std::vector<rollout::TrajectoryRow>& rows,
                          std::optional<std::uint64_t> seed) {
  if (seed) os << "# seed " << *seed << '\n';
  os << "step,time";
  for (Leg leg : kAllLegs) os << ",phase_" << leg_name(leg);
  for (Leg leg : kAllLegs) {
    for (char axis : {'x', 'y', 'z'}) os << ",target_" << leg_name(leg) << '_' << axis;
  }
  for (Leg leg : kAllLegs) {
    for (char axis : {'x', 'y', 'z'}) os << ",residual_" << leg_name(leg) << '_' << axis;
  }
  os << ",psi,delta,omega_bar,roll,pitch,yaw,reward\n";
  for (const auto& r : rows) {
    os << r.step << ',' << format_double(r.time);
    for (double s : r.phase) os << ',' << format_double(s);
    for (const Vec3& p : r.targets) {
      for (int k = 0; k < 3; ++k) os << ',' << format_double(p[k]);
    }
    for (const Vec3& p : r.residuals) {
      for (int k = 0; k < 3; ++k) os << ',' << format_double(p[k]);
    }
    for (double v : {r.psi, r.delta, r.omega_bar, r.roll, r.pitch, r.yaw, r.reward}) {
      os << ',' << format_double(v);
    }
    os << '\n';
  }
  if (!os) throw IoError("failed writing trajectory log");
}

std::vector<rollout::TrajectoryRow> read_trajectory_csv(std::istream& is) {
  std::string line;
  int number = 0;
  if (!next_content_line(is, line, number)) throw IoError("trajectory log: missing header");
  if (split(line, ',').size() != kTrajectoryColumns) {
    throw IoError("trajectory log: header has the wrong number of columns");
  }
  std::vector<rollout::TrajectoryRow> rows;
  while (next_content_line(is, line, number)) {
    const auto f = split(line, ',');
    const std::string where = "trajectory log line " + std::to_string(number);
    if (f.size() != kTrajectoryColumns) throw IoError(where + ": wrong number of columns");
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = parse_double(f[i], where);
    rollout::TrajectoryRow r;
    std::size_t k = 0;
    r.step = static_cast<int>(v[k++]);
    r.time = v[k++];
    for (double& s : r.phase) s = v[k++];
    for (Vec3& p : r.targets) {
      for (int a = 0; a < 3; ++a) p[a] = v[k++];
    }
    for (Vec3& p : r.residuals) {
      for (int a = 0; a < 3; ++a) p[a] = v[k++];
    }
    r.psi = v[k++];
    r.delta = v[k++];
    r.omega_bar = v[k++];
    r.roll = v[k++];
    r.pitch = v[k++];
    r.yaw = v[k++];
    r.reward = v[k++];
    rows.push_back(r);
  }
  return rows;
}

void save_trajectory_csv(const std::string& path, const std::vector<rollout::TrajectoryRow>& rows,
                         std::optional<std::uint64_t> seed) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trajectory log " + path);
  write_trajectory_csv(out, rows, seed);
}

std::vector<rollout::TrajectoryRow> load_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory log " + path);
  return read_trajectory_csv(in);
}

void write_training_log(std::ostream& os, const std::vector<ars::EpochLog>& log,
                        std::optional<std::uint64_t> seed) {
  if (seed) os << "# seed " << *seed << '\n';
  os << "epoch,base_mass";
  for (std::size_t i = 0; i < sim::kNumLinks; ++i) os << ",link_mass_" << i;
  os << ",friction,mesh_magnitude,terrain_seed,eval_return,eval_distance,eval_fell,wall_seconds\n";
  for (const auto& e : log) {
    os << e.epoch << ',' << format_double(e.sample.base_mass);
    for (double m : e.sample.link_masses) os << ',' << format_double(m);
    os << ',' << format_double(e.sample.friction) << ',' << format_double(e.sample.mesh_magnitude)
       << ',' << e.sample.terrain_seed << ',' << format_double(e.eval_return) << ','
       << format_double(e.eval_distance) << ',' << (e.eval_fell ? 1 : 0) << ','
       << format_double(e.wall_seconds) << '\n';
  }
  if (!os) throw IoError("failed writing training log");
}

std::vector<gait::FootTargets> replay_targets(const std::vector<rollout::TrajectoryRow>& rows,
                                              const rollout::EpisodeConfig& cfg) {
  const kin::RobotGeometry& geometry = cfg.robot.geometry;
  const gait::StanceGeometry stance = kin::default_stand_pose(geometry);
  gait::YawMemory memory(stance);
  std::vector<gait::FootTargets> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    gait::MotionCommand cmd = cfg.task;
    cmd.omega_bar = r.omega_bar;
    const gait::FootTargets g = gait::compose_foot_targets(cmd, {r.psi, r.delta}, r.phase, stance,
                                                           memory, cfg.control_points);
    gait::FootTargets final_targets;
    rollout::apply_residuals(geometry, g, r.residuals, final_targets);
    out.push_back(final_targets);
  }
  return out;
}

double replay_error(const std::vector<rollout::TrajectoryRow>& rows,
                    const rollout::EpisodeConfig& cfg) {
  const auto replayed = replay_targets(rows, cfg);
  double worst = 0.0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      worst = std::max(worst, (replayed[t][i] - rows[t].targets[i]).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace legkit::harness
