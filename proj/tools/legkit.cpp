// legkit command-line tool: train, eval, replay, export-gait, print-config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "legkit/ars.hpp"
#include "legkit/campaign.hpp"
#include "legkit/config.hpp"
#include "legkit/gait.hpp"
#include "legkit/io.hpp"
#include "legkit/randomization.hpp"
#include "legkit/rollout.hpp"
#include "legkit/terrain.hpp"

namespace fs = std::filesystem;
using namespace legkit;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigFailure = 2, kIoFailure = 3, kDivergence = 4 };

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int threads = -1;
};

harness::Config load(const Common& c) {
  harness::Config cfg = c.config_path.empty() ? harness::Config{} : harness::load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads >= 0) {
    cfg.ars.threads = c.threads;
    cfg.eval.threads = c.threads;
  }
  cfg.validate();
  return cfg;
}

fs::path output_dir(const Common& c) {
  fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key = value configuration file");
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--out", c.out_dir, "output directory");
  app->add_option("--threads", c.threads, "worker threads, 0 = hardware");
}

rollout::Controller controller_for(const std::string& mode, const std::string& checkpoint,
                                   const harness::Config& cfg) {
  if (mode == "openloop") return rollout::Controller::open_loop(cfg.episode.bounds.midpoint());
  if (checkpoint.empty()) return rollout::Controller::linear(policy::PolicyMatrix::Zero());
  return rollout::Controller::linear(harness::load_checkpoint(checkpoint));
}

int run_train(const Common& c, const std::string& mode, std::optional<int> epochs,
              const std::string& checkpoint) {
  const harness::Config cfg = load(c);
  const fs::path dir = output_dir(c);
  ars::TrainOptions opt;
  opt.ars = cfg.ars;
  opt.dist = cfg.dist;
  opt.nominal = cfg.nominal;
  opt.episode = cfg.episode;
  opt.mode = cfg.train.mode;
  if (mode == "d2") opt.mode = ars::TrainingMode::kRandomized;
  if (mode == "fixed") opt.mode = ars::TrainingMode::kFixed;
  if (mode == "openloop") throw ConfigError("train needs --mode d2 or fixed");
  opt.epochs = epochs.value_or(cfg.train.epochs);
  opt.master_seed = cfg.seed;
  if (!checkpoint.empty()) opt.initial = harness::load_checkpoint(checkpoint);
  opt.on_epoch = [](const ars::EpochLog& e) {
    std::printf("epoch %4d  return %9.4f  distance %7.2f  %s  %.2fs\n", e.epoch, e.eval_return,
                e.eval_distance, e.eval_fell ? "fell " : "lived", e.wall_seconds);
    std::fflush(stdout);
  };
  std::printf("seed %llu  mode %s  epochs %d\n", static_cast<unsigned long long>(cfg.seed),
              opt.mode == ars::TrainingMode::kFixed ? "fixed" : "d2", opt.epochs);
  const ars::TrainResult result = ars::train_d2gmbc(opt);
  std::printf("initial return %.4f\n", result.initial_eval_return);

  harness::save_checkpoint((dir / "policy.txt").string(), result.theta, cfg.seed);
  std::ofstream log(dir / "train_log.csv");
  if (!log) throw IoError("cannot write " + (dir / "train_log.csv").string());
  harness::write_training_log(log, result.log, cfg.seed);
  std::printf("wrote %s and %s\n", (dir / "policy.txt").c_str(), (dir / "train_log.csv").c_str());
  return kOk;
}

int run_eval(const Common& c, const std::string& mode, const std::string& checkpoint,
             std::optional<int> trials, bool full_scale, bool flat) {
  harness::Config cfg = load(c);
  const fs::path dir = output_dir(c);
  harness::EvalCampaignSpec spec;
  spec.trials = trials.value_or(cfg.eval.trials);
  spec.max_steps = cfg.eval.max_steps;
  spec.near_edge = cfg.eval.near_edge;
  spec.far_edge = cfg.eval.far_edge;
  if (full_scale) {
    spec.trials = trials.value_or(1000);
    spec.max_steps = 50000;
    spec.far_edge = 90.0;
  }
  spec.master_seed = cfg.seed;
  spec.force_flat = flat;
  spec.threads = cfg.eval.threads;
  std::string method;
  if (mode == "openloop") {
    spec.source = harness::PolicySource::kOpenLoop;
    method = "Open-loop";
  } else if (checkpoint.empty()) {
    spec.source = harness::PolicySource::kZero;
    method = "Zero policy";
  } else {
    spec.source = harness::PolicySource::kCheckpoint;
    spec.controller = controller_for(mode, checkpoint, cfg);
    method = mode == "fixed" ? "GMBC" : "D2-GMBC";
  }
  const harness::CampaignReport report = harness::run_eval_campaign(spec, cfg.dist, cfg.episode);
  const std::vector<harness::ReportColumn> columns{{method, report.buckets}};
  std::printf("seed %llu  trials %d  max steps %d  survived %d\n",
              static_cast<unsigned long long>(cfg.seed), spec.trials, spec.max_steps,
              report.survived());
  harness::write_bucket_table(std::cout, columns);

  std::ofstream buckets(dir / "buckets.csv");
  std::ofstream per_trial(dir / "trials.csv");
  if (!buckets || !per_trial) throw IoError("cannot write campaign reports to " + dir.string());
  buckets << "# seed " << cfg.seed << '\n';
  harness::write_bucket_csv(buckets, columns);
  harness::write_trials_csv(per_trial, report);
  return kOk;
}

int run_replay(const Common& c, const std::string& mode, const std::string& checkpoint,
               const std::string& log_path, int steps, double magnitude) {
  const harness::Config cfg = load(c);
  if (!log_path.empty()) {
    const auto rows = harness::load_trajectory_csv(log_path);
    const double err = harness::replay_error(rows, cfg.episode);
    std::printf("replayed %zu rows, max target error %.3e m\n", rows.size(), err);
    return err < 1e-9 ? kOk : kFailure;
  }
  const fs::path dir = output_dir(c);
  d2::D2Sample sample = d2::nominal_sample(cfg.dist, cfg.nominal);
  if (magnitude >= 0.0) sample.mesh_magnitude = magnitude;
  const d2::AppliedD2 env = d2::apply_d2(sample, cfg.episode.robot, cfg.episode.layout_for(steps));
  std::vector<rollout::TrajectoryRow> rows;
  const rollout::RolloutResult r = rollout::episode_rollout(
      controller_for(mode, checkpoint, cfg), env, cfg.episode, steps, cfg.seed, 1.0, &rows);
  harness::save_trajectory_csv((dir / "trajectory.csv").string(), rows, cfg.seed);
  sim::save_terrain((dir / "terrain.txt").string(), *env.terrain);
  std::printf("steps %d  distance %.3f  %s  return %.4f\n", r.steps, r.distance,
              r.fell ? "fell" : "lived", r.normalized_return);
  std::printf("wrote %s and %s\n", (dir / "trajectory.csv").c_str(), (dir / "terrain.txt").c_str());
  return kOk;
}

int run_export_gait(const Common& c, double tau, std::optional<double> psi,
                    std::optional<double> delta, int samples) {
  const harness::Config cfg = load(c);
  const gait::GaitParams mid = cfg.episode.bounds.midpoint();
  const gait::GaitParams params{psi.value_or(mid.psi), delta.value_or(mid.delta)};
  params.validate();
  if (samples < 2) throw ConfigError("--samples must be at least 2");
  const fs::path dir = output_dir(c);
  std::ofstream out(dir / "gait.csv");
  if (!out) throw IoError("cannot write " + (dir / "gait.csv").string());
  out << "s,q,z\n";
  for (int i = 0; i < samples; ++i) {
    const double s = 2.0 * i / samples;
    const gait::PlanarPoint p = gait::trajectory(s, tau, params, cfg.episode.control_points);
    out << harness::format_double(s) << ',' << harness::format_double(p.q) << ','
        << harness::format_double(p.z) << '\n';
  }
  std::printf("wrote %s\n", (dir / "gait.csv").c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bezier gait modulation and D2-randomized ARS training toolkit"};
  app.require_subcommand(1);
  Common common;
  std::string mode;
  std::string checkpoint;
  std::optional<int> epochs;
  std::optional<int> trials;

  auto* train = app.add_subcommand("train", "train a linear gait-modulation policy with ARS");
  add_common(train, common);
  train->add_option("--mode", mode, "d2 | fixed")->check(CLI::IsMember({"d2", "fixed", "openloop"}));
  train->add_option("--epochs", epochs, "ARS epochs");
  train->add_option("--checkpoint", checkpoint, "initial policy");

  bool full_scale = false;
  bool flat = false;
  auto* eval = app.add_subcommand("eval", "survivability campaign on D2-randomized trials");
  add_common(eval, common);
  eval->add_option("--mode", mode, "openloop, or the label for a checkpoint: d2 | fixed")
      ->check(CLI::IsMember({"d2", "fixed", "openloop"}));
  eval->add_option("--checkpoint", checkpoint, "policy to evaluate; zero policy if omitted");
  eval->add_option("--trials", trials, "number of trials");
  eval->add_flag("--full-scale", full_scale, "1000 trials of 50,000 steps, 90 m far bucket");
  eval->add_flag("--flat", flat, "force every trial onto flat terrain");

  std::string log_path;
  int steps = 1000;
  double magnitude = -1.0;
  auto* replay = app.add_subcommand("replay", "log one rollout, or check a log by replaying it");
  add_common(replay, common);
  replay->add_option("--mode", mode, "openloop | d2 | fixed")->check(CLI::IsMember({"d2", "fixed", "openloop"}));
  replay->add_option("--checkpoint", checkpoint, "policy; zero policy if omitted");
  replay->add_option("--steps", steps, "rollout length")->check(CLI::PositiveNumber);
  replay->add_option("--magnitude", magnitude, "terrain mesh magnitude (default: nominal)");
  replay->add_option("--log", log_path, "existing trajectory log to verify");

  double tau = 0.035;
  std::optional<double> psi;
  std::optional<double> delta;
  int samples = 200;
  auto* gait_cmd = app.add_subcommand("export-gait", "sample the stance and swing curves");
  add_common(gait_cmd, common);
  gait_cmd->add_option("--tau", tau, "half step length, m");
  gait_cmd->add_option("--psi", psi, "clearance, m");
  gait_cmd->add_option("--delta", delta, "penetration, m");
  gait_cmd->add_option("--samples", samples, "points over [0, 2)");

  auto* print = app.add_subcommand("print-config", "print the effective configuration");
  print->add_option("--config", common.config_path, "key = value configuration file");
  print->add_option("--seed", common.seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    if (*train) return run_train(common, mode, epochs, checkpoint);
    if (*eval) return run_eval(common, mode, checkpoint, trials, full_scale, flat);
    if (*replay) return run_replay(common, mode, checkpoint, log_path, steps, magnitude);
    if (*gait_cmd) return run_export_gait(common, tau, psi, delta, samples);
    if (*print) {
      harness::write_config(std::cout, load(common));
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigFailure;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kConfigFailure;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIoFailure;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "simulation diverged: %s\n", e.what());
    return kDivergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
