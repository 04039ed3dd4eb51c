// Acceptance runner: one PASS/FAIL line per criterion.
//
//   legkit_acceptance            run all criteria
//   legkit_acceptance 1 4 7      run a subset
//
// Exit status is 0 only if every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "legkit/ars.hpp"
#include "legkit/campaign.hpp"
#include "legkit/gait.hpp"
#include "legkit/io.hpp"
#include "legkit/kinematics.hpp"
#include "legkit/policy.hpp"
#include "legkit/randomization.hpp"
#include "legkit/rollout.hpp"
#include "legkit/sim.hpp"
#include "legkit/terrain.hpp"
#include "oracles.hpp"

using namespace legkit;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string fmt_int(const char* f, long long v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Curves -------------------------------------------------------------

Verdict curves() {
  Verdict v;
  double pou = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double s = i / 1000.0;
    double sum = 0.0;
    for (int k = 0; k <= gait::kSwingDegree; ++k) sum += gait::bernstein_basis(gait::kSwingDegree, k, s);
    pou = std::max(pou, std::abs(sum - 1.0));
  }
  v.check(pou < 1e-12, fmt("partition of unity %.1e", pou));

  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> tau_d(-0.06, 0.06), psi_d(0.0, 0.08), delta_d(0.0, 0.03);
  std::uniform_real_distribution<double> s_d(1.0, 2.0);
  double endpoint = 0.0, closure = 0.0, casteljau = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double tau = tau_d(rng), psi = psi_d(rng);
    const gait::GaitParams params{psi, delta_d(rng)};
    const auto c = gait::swing_control_points(tau, psi);
    endpoint = std::max({endpoint, std::abs(c.front().q + tau), std::abs(c.front().z),
                         std::abs(c.back().q - tau), std::abs(c.back().z)});
    const auto start = gait::swing_curve(1.0, tau, psi);
    endpoint = std::max({endpoint, std::abs(start.q + tau), std::abs(start.z)});

    const auto a = gait::trajectory(std::nextafter(1.0, 0.0), tau, params);
    const auto b = gait::trajectory(1.0, tau, params);
    const auto e = gait::trajectory(std::nextafter(2.0, 0.0), tau, params);
    const auto z = gait::trajectory(0.0, tau, params);
    closure = std::max({closure, std::hypot(a.q - b.q, a.z - b.z), std::hypot(e.q - z.q, e.z - z.z)});

    const double s = s_d(rng);
    const auto lib = gait::swing_curve(s, tau, psi);
    const auto ref = oracle::de_casteljau(oracle::table_points(tau, psi), s - 1.0);
    casteljau = std::max(casteljau, std::hypot(lib.q - ref.q, lib.z - ref.z));
  }
  v.check(endpoint == 0.0, fmt("endpoints c0=(-tau,0) c11=(tau,0) err %.1e", endpoint));
  v.check(closure < 1e-9, fmt("closure %.1e", closure));
  v.check(casteljau < 1e-12, fmt("de Casteljau %.1e", casteljau));
  return v;
}

// 2. Phase --------------------------------------------------------------

Verdict phase() {
  Verdict v;
  const gait::PhaseClock def;
  v.check(def.lag[index(Leg::FL)] == 0.0 && def.lag[index(Leg::FR)] == 0.5 &&
              def.lag[index(Leg::BL)] == 0.5 && def.lag[index(Leg::BR)] == 0.0,
          "lags (0, 0.5, 0.5, 0)");

  const double tst = 0.23, tsw = 0.2;
  double jump = 0.0;
  for (double b : {-tsw, 0.0, tst}) {
    const double lo = gait::phase_from_leg_clock(b - 1e-9, tst, tsw).s;
    const double hi = gait::phase_from_leg_clock(b + 1e-9, tst, tsw).s;
    jump = std::max(jump, std::abs(std::remainder(hi - lo, 2.0)));
  }
  v.check(jump < 1e-7, fmt("case boundary jump %.1e", jump));

  gait::PhaseClock clock;
  clock.t_stance = tst;
  clock.t_swing = tsw;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> t_d(0.0, 50.0);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const double t = t_d(rng);
    const auto fl = gait::leg_phase(clock, Leg::FL, t), br = gait::leg_phase(clock, Leg::BR, t);
    const auto fr = gait::leg_phase(clock, Leg::FR, t), bl = gait::leg_phase(clock, Leg::BL, t);
    if (fl.s != br.s || fr.s != bl.s || fl.contact != br.contact || fr.contact != bl.contact) {
      ++mismatches;
    }
  }
  v.check(mismatches == 0, fmt_int("pair mismatches %lld / 10000", mismatches));
  return v;
}

// 3. Kinematics ---------------------------------------------------------

Verdict kinematics() {
  Verdict v;
  const kin::LegGeometry g{0.04, 0.11, 0.11, 1.0};
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> abd(-0.8, 0.8), hip(-1.2, 1.2), knee(0.05, 2.6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = oracle::leg_fk(g.l_abd, g.l_upper, g.l_lower, g.side, abd(rng), hip(rng), knee(rng));
    const kin::JointAngles q = kin::inverse_kinematics(g, p);
    const Vec3 back = oracle::leg_fk(g.l_abd, g.l_upper, g.l_lower, g.side, q.abduction, q.hip_pitch, q.knee);
    worst = std::max(worst, (back - p).norm());
  }
  v.check(worst < 1e-6, fmt("round trip %.1e m", worst));

  bool raised = false;
  try {
    kin::inverse_kinematics(g, Vec3(0.0, 0.04, -0.25));
  } catch (const kin::OutOfReach&) {
    raised = true;
  }
  v.check(raised, "unreachable target raises OutOfReach");
  return v;
}

// 4. Simulator ----------------------------------------------------------

Verdict simulator() {
  Verdict v;
  const sim::RobotModel model;
  const sim::SimConfig cfg;
  const auto flat = std::make_shared<const sim::TerrainField>(sim::generate_terrain(0.0, 4.0, 0.1, 0));
  const auto stand = kin::default_stand_pose(model.geometry);

  sim::SimState s;
  s.body.position = Vec3(0.0, 0.0, 10.0);
  s.feet = stand.f_stand;
  for (int i = 0; i < 50; ++i) s = sim::step(s, model, *flat, s.feet, cfg);
  const double drop_err = std::abs(10.0 - s.body.position.z() - 0.5 * cfg.gravity * 0.25);
  v.check(drop_err < 1e-6, fmt("ballistic error %.1e m", drop_err));

  sim::World w(model, flat);
  w.reset(sim::standing_state(model, *flat, stand));
  const Vec3 p0 = w.body().position;
  double drift = 0.0;
  for (int i = 0; i < 1000; ++i) {
    w.step(stand.f_stand);
    drift = std::max(drift, (w.body().position - p0).norm());
  }
  v.check(drift < 0.005, fmt("standing drift %.2e m over 10 s", drift));

  const rollout::EpisodeConfig episode;
  const d2::D2Sample sample = d2::sample_d2(d2::D2Distribution{}, 404);
  const auto ctl = rollout::Controller::open_loop(episode.bounds.midpoint());
  const auto r1 = rollout::episode_rollout(ctl, sample, episode, 2000, 9);
  const auto r2 = rollout::episode_rollout(ctl, sample, episode, 2000, 9);
  v.check(r1 == r2, "repeat runs bit-identical");

  harness::EvalCampaignSpec spec;
  spec.trials = 8;
  spec.max_steps = 1000;
  spec.source = harness::PolicySource::kOpenLoop;
  spec.master_seed = 44;
  spec.threads = 1;
  const auto a = harness::run_eval_campaign(spec, d2::D2Distribution{}, episode);
  spec.threads = 4;
  const auto b = harness::run_eval_campaign(spec, d2::D2Distribution{}, episode);
  v.check(a.trials == b.trials && a.buckets == b.buckets, "1 vs 4 threads bit-identical");
  return v;
}

// 5. Open-loop baseline -------------------------------------------------

Verdict open_loop() {
  Verdict v;
  const rollout::EpisodeConfig episode;
  const auto ctl = rollout::Controller::open_loop(episode.bounds.midpoint());
  d2::D2Sample nominal = d2::nominal_sample(d2::D2Distribution{}, d2::NominalEnvironment{});
  nominal.mesh_magnitude = 0.0;
  const auto flat = rollout::episode_rollout(ctl, nominal, episode, 1000, 0);
  v.check(!flat.fell && flat.distance >= 1.0,
          std::string("flat 10 s ") + (flat.fell ? "fell" : "lived") + fmt(" at %.2f m", flat.distance));

  std::vector<rollout::RolloutResult> rough(20);
  ars::parallel_for(20, 0, [&](int i) {
    d2::D2Sample s = nominal;
    s.mesh_magnitude = 0.08;
    s.terrain_seed = 500 + static_cast<std::uint64_t>(i);
    rough[i] = rollout::episode_rollout(ctl, s, episode, 10000, static_cast<std::uint64_t>(i));
  });
  const auto early = std::count_if(rough.begin(), rough.end(), [](const rollout::RolloutResult& r) {
    return r.fell && r.distance < 5.0;
  });
  v.check(early >= 16, fmt_int("rough 0.08 m: %lld/20 fell before 5 m", early));
  return v;
}

// 6. Learning -----------------------------------------------------------

Verdict learning() {
  Verdict v;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ars::TrainOptions opt;
    opt.mode = ars::TrainingMode::kFixed;
    opt.nominal.mesh_magnitude = 0.0;
    opt.epochs = 50;
    opt.master_seed = seed;
    const ars::TrainResult r = ars::train_d2gmbc(opt);
    const double end = r.log.back().eval_return;
    char buf[128];
    std::snprintf(buf, sizeof buf, "seed %llu: %.4f -> %.4f", static_cast<unsigned long long>(seed),
                  r.initial_eval_return, end);
    v.check(end > r.initial_eval_return, buf);
  }
  return v;
}

// 7. Survivability ordering ---------------------------------------------

Verdict ordering() {
  Verdict v;
  constexpr std::uint64_t kSeed = 1;
  const d2::D2Distribution dist;
  const rollout::EpisodeConfig episode;

  auto train = [&](ars::TrainingMode mode, double nominal_mesh) {
    ars::TrainOptions opt;
    opt.mode = mode;
    opt.nominal.mesh_magnitude = nominal_mesh;
    opt.epochs = 200;
    opt.master_seed = kSeed;
    return ars::train_d2gmbc(opt).theta;
  };
  auto evaluate = [&](harness::PolicySource source, const policy::PolicyMatrix& theta) {
    harness::EvalCampaignSpec spec;  // 100 trials x 10000 steps, shared master seed
    spec.source = source;
    spec.controller = rollout::Controller::linear(theta);
    return harness::run_eval_campaign(spec, dist, episode);
  };
  auto far = [](const harness::CampaignReport& r) {
    return r.buckets.back().died + r.buckets.back().lived;
  };

  const auto d2gmbc = evaluate(harness::PolicySource::kCheckpoint, train(ars::TrainingMode::kRandomized, 0.0));
  const auto open = evaluate(harness::PolicySource::kOpenLoop, policy::PolicyMatrix::Zero());
  char buf[160];
  std::snprintf(buf, sizeof buf, "D2-GMBC lived %d far %d, open-loop lived %d", d2gmbc.survived(),
                far(d2gmbc), open.survived());
  v.detail = buf;

  // The fixed environment is either flat or mid-roughness; both are checked.
  for (double mesh : {0.0, 0.04}) {
    const auto gmbc = evaluate(harness::PolicySource::kCheckpoint, train(ars::TrainingMode::kFixed, mesh));
    std::snprintf(buf, sizeof buf, "GMBC(mesh %.2f) lived %d far %d", mesh, gmbc.survived(), far(gmbc));
    v.check(d2gmbc.survived() >= gmbc.survived() && gmbc.survived() > open.survived() &&
                far(d2gmbc) >= far(gmbc),
            buf);
  }
  return v;
}

// 8. Reward arithmetic --------------------------------------------------

Verdict reward() {
  Verdict v;
  v.check(policy::step_reward(0.01, 0.0, 0.0, Vec3::Zero()) == 0.01, "(0.01,0,0,0) = 0.01");
  const double b = policy::step_reward(0.0, 0.1, 0.1, Vec3(0.5, -0.25, 0.25));
  v.check(b == -2.03, fmt("(0,0.1,0.1,|w|=1) = %.15g", b));
  const double c = policy::step_reward(0.005, -0.05, 0.0, Vec3::Zero());
  v.check(c == -0.495, fmt("(0.005,-0.05,0,0) = %.15g", c));
  const double d = policy::step_reward(-0.02, 0.0, -0.3, Vec3(0.0, 0.0, -2.0));
  v.check(d == -0.02 - 10.0 * 0.3 - 0.03 * 2.0, fmt("(-0.02,0,-0.3,|w|=2) = %.15g", d));

  const rollout::EpisodeConfig episode;
  std::mt19937_64 rng(808);
  std::normal_distribution<double> n(0.0, 0.5);
  int exact = 0, episodes = 0;
  for (double magnitude : {0.0, 0.04, 0.08}) {
    for (int k = 0; k < 3; ++k) {
      policy::PolicyMatrix theta;
      for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = k == 0 ? 0.0 : n(rng);
      d2::D2Sample s = d2::sample_d2(d2::D2Distribution{}, 80 + k);
      s.mesh_magnitude = magnitude;
      std::vector<rollout::TrajectoryRow> log;
      const auto r = rollout::episode_rollout(rollout::Controller::linear(theta), s, episode, 1500,
                                              k, 1.0, &log);
      double sum = 0.0;
      for (const auto& row : log) sum += row.reward;
      ++episodes;
      if (r.normalized_return == sum / r.steps && static_cast<int>(log.size()) == r.steps) ++exact;
    }
  }
  v.check(exact == episodes, fmt_int("normalized == sum/K on %lld episodes", episodes));
  return v;
}

// 9. ARS oracle ---------------------------------------------------------

Verdict ars_oracle() {
  Verdict v;
  const ars::ARSConfig cfg;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd target(policy::PolicyMatrix::RowsAtCompileTime, policy::PolicyMatrix::ColsAtCompileTime);
    Eigen::MatrixXd start(target.rows(), target.cols());
    for (Eigen::Index k = 0; k < target.size(); ++k) {
      target(k) = n(rng);
      start(k) = n(rng);
    }
    start = target + (start - target).normalized();
    const ars::Objective f = [&](const Eigen::MatrixXd& t) { return -(t - target).squaredNorm(); };
    const double dist = (ars::optimize(f, start, 200, cfg, seed) - target).norm();
    char buf[96];
    std::snprintf(buf, sizeof buf, "quadratic 12x14 seed %llu: %.3f",
                  static_cast<unsigned long long>(seed), dist);
    v.check(dist < 0.1, buf);
  }

  std::mt19937_64 rng(909);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto deltas = ars::sample_directions(12, 14, cfg.directions, 9000 + trial);
    std::vector<double> plus(cfg.directions), minus(cfg.directions);
    for (int i = 0; i < cfg.directions; ++i) {
      plus[i] = n(rng);
      minus[i] = n(rng);
    }
    const Eigen::MatrixXd theta = Eigen::MatrixXd::Random(12, 14);
    const Eigen::MatrixXd ref = ars::ars_update(theta, deltas, plus, minus, cfg);
    std::vector<int> order(cfg.directions);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Eigen::MatrixXd> d(cfg.directions);
    std::vector<double> p(cfg.directions), m(cfg.directions);
    for (int i = 0; i < cfg.directions; ++i) {
      d[i] = deltas[order[i]];
      p[i] = plus[order[i]];
      m[i] = minus[order[i]];
    }
    worst = std::max(worst, (ars::ars_update(theta, d, p, m, cfg) - ref).cwiseAbs().maxCoeff());
  }
  v.check(worst < 1e-12, fmt("permutation invariance %.1e", worst));
  return v;
}

// 10. Format round trips ------------------------------------------------

Verdict formats() {
  Verdict v;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "legkit_acceptance";
  fs::create_directories(dir);

  std::mt19937_64 rng(1010);
  std::normal_distribution<double> n(0.0, 1.0);
  policy::PolicyMatrix theta;
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = n(rng) * std::pow(10.0, k % 9 - 4);
  harness::save_checkpoint((dir / "policy.txt").string(), theta, 7);
  v.check(harness::load_checkpoint((dir / "policy.txt").string()) == theta, "checkpoint identity");

  const sim::TerrainField field = sim::generate_terrain(0.08, 6.0, 0.1, 77);
  sim::save_terrain((dir / "terrain.txt").string(), field);
  v.check(sim::load_terrain((dir / "terrain.txt").string()) == field, "terrain identity");

  const rollout::EpisodeConfig episode;
  policy::PolicyMatrix noisy;
  for (Eigen::Index k = 0; k < noisy.size(); ++k) noisy(k) = 0.3 * n(rng);
  d2::D2Sample s = d2::sample_d2(d2::D2Distribution{}, 1011);
  s.mesh_magnitude = 0.04;
  std::vector<rollout::TrajectoryRow> log;
  rollout::episode_rollout(rollout::Controller::linear(noisy), s, episode, 500, 3, 1.0, &log);
  harness::save_trajectory_csv((dir / "trajectory.csv").string(), log, 3);
  const auto back = harness::load_trajectory_csv((dir / "trajectory.csv").string());
  const double err = harness::replay_error(back, episode);
  v.check(back.size() == log.size() && err < 1e-9, fmt("replay error %.1e", err));

  fs::remove_all(dir);
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "curve correctness", curves},
      {2, "phase correctness", phase},
      {3, "kinematics round trip", kinematics},
      {4, "simulator sanity", simulator},
      {5, "open-loop baseline", open_loop},
      {6, "learning improves return", learning},
      {7, "survivability ordering", ordering},
      {8, "reward arithmetic", reward},
      {9, "ARS oracle", ars_oracle},
      {10, "format round trips", formats},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));

  bool all_pass = true;
  for (const Criterion& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %-26s %s  (%.1fs)\n", c.id, v.pass ? "PASS" : "FAIL", c.name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && v.pass;
  }
  return all_pass ? 0 : 1;
}
