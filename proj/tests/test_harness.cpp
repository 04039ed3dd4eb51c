#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "legkit/campaign.hpp"
#include "legkit/config.hpp"
#include "legkit/io.hpp"
#include "legkit/terrain.hpp"

using namespace legkit;
using namespace legkit::harness;

namespace {

Config parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  apply_config(cfg, in, "test.cfg");
  return cfg;
}

std::vector<TrialRecord> fixture_trials(int died_near, int lived_near, int died_mid, int lived_mid,
                                        int died_far, int lived_far) {
  std::vector<TrialRecord> out;
  auto add = [&](int count, double distance, bool fell) {
    for (int i = 0; i < count; ++i) {
      TrialRecord r;
      r.index = static_cast<int>(out.size());
      r.distance = distance;
      r.fell = fell;
      out.push_back(r);
    }
  };
  add(died_near, 1.0, true);
  add(lived_near, 4.0, false);
  add(died_mid, 40.0, true);
  add(lived_mid, 60.0, false);
  add(died_far, 95.0, true);
  add(lived_far, 120.0, false);
  return out;
}

}  // namespace

TEST(Config, EmptyInputKeepsDefaults) {
  const Config cfg = parse("");
  std::ostringstream a, b;
  write_config(a, cfg);
  write_config(b, Config{});
  EXPECT_EQ(a.str(), b.str());
  const Config comments = parse("# nothing here\n\n   \n");
  std::ostringstream c;
  write_config(c, comments);
  EXPECT_EQ(c.str(), b.str());
}

TEST(Config, FrictionOverrideReachesSampler) {
  const Config cfg = parse("d2.friction_min = 0.9\nd2.friction_max = 1.2  # narrower\n");
  EXPECT_EQ(cfg.dist.friction_min, 0.9);
  EXPECT_EQ(cfg.dist.friction_max, 1.2);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const double f = d2::sample_d2(cfg.dist, seed).friction;
    ASSERT_GE(f, 0.9);
    ASSERT_LE(f, 1.2);
  }
}

TEST(Config, MalformedLineNamesLine) {
  try {
    parse("sim.dt = 0.01\n# ok\nthis line has no equals sign\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("test.cfg:3"), std::string::npos) << e.what();
  }
  try {
    parse("sim.dt = fast\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("test.cfg:1"), std::string::npos) << e.what();
  }
}

TEST(Config, UnknownKeyRejected) {
  try {
    parse("sim.dt = 0.01\nsim.timestep = 0.01\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("test.cfg:2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("sim.timestep"), std::string::npos) << msg;
  }
}

TEST(Config, RoundTripThroughText) {
  Config cfg;
  set_config_value(cfg, "robot.base_mass", "1.37");
  set_config_value(cfg, "gait.control_points", "printed");
  set_config_value(cfg, "train.mode", "fixed");
  set_config_value(cfg, "ars.step_size", "0.1");
  set_config_value(cfg, "seed", "987654321");
  cfg.episode.robot.geometry.legs[2].l_lower = 0.123456789;
  std::stringstream ss;
  write_config(ss, cfg);
  const Config back = parse(ss.str());
  std::ostringstream a, b;
  write_config(a, cfg, false);
  write_config(b, back, false);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.episode.robot.base_mass, 1.37);
  EXPECT_EQ(back.episode.control_points, gait::ControlPointTable::kPrinted);
  EXPECT_EQ(back.train.mode, ars::TrainingMode::kFixed);
  EXPECT_EQ(back.seed, 987654321u);
  for (const auto& key : config_keys()) {
    EXPECT_EQ(get_config_value(back, key.name), get_config_value(cfg, key.name)) << key.name;
  }
}

TEST(Config, ValidationFailureIsConfigError) {
  EXPECT_THROW(parse("d2.friction_min = 2\nd2.friction_max = 1\n").validate(), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/legkit.cfg"), IoError);
}

TEST(Config, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.035), "0.035");
}

TEST(Buckets, ThousandTrialFixtureRendersVerbatim) {
  const auto trials = fixture_trials(488, 64, 207, 95, 0, 146);
  const auto buckets = bucket_counts(trials, 5.0, 90.0);
  ASSERT_EQ(buckets.size(), 3u);
  EXPECT_EQ(buckets[0], (BucketCount{"<= 5m", 488, 64}));
  EXPECT_EQ(buckets[1], (BucketCount{"5m to 90m", 207, 95}));
  EXPECT_EQ(buckets[2], (BucketCount{">= 90m", 0, 146}));

  std::ostringstream table;
  write_bucket_table(table, {{"D2-GMBC", buckets}});
  const std::string text = table.str();
  for (const char* row : {"<= 5m", "488", "64", "5m to 90m", "207", "95", ">= 90m", "146"}) {
    EXPECT_NE(text.find(row), std::string::npos) << row << "\n" << text;
  }
  std::ostringstream csv;
  write_bucket_csv(csv, {{"D2-GMBC", buckets}});
  EXPECT_EQ(csv.str(),
            "method,bucket,died,lived\n"
            "D2-GMBC,<= 5m,488,64\n"
            "D2-GMBC,5m to 90m,207,95\n"
            "D2-GMBC,>= 90m,0,146\n");
}

TEST(Buckets, EmptyMiddleRendersZero) {
  const auto buckets = bucket_counts(fixture_trials(3, 0, 0, 0, 0, 2), 5.0, 90.0);
  EXPECT_EQ(buckets[1].died, 0);
  EXPECT_EQ(buckets[1].lived, 0);
  std::ostringstream csv;
  write_bucket_csv(csv, {{"m", buckets}});
  EXPECT_NE(csv.str().find("m,5m to 90m,0,0\n"), std::string::npos);
}

TEST(Buckets, EdgesInclusive) {
  std::vector<TrialRecord> t(3);
  t[0].distance = 5.0;
  t[1].distance = 90.0;
  t[2].distance = -3.0;
  const auto b = bucket_counts(t, 5.0, 90.0);
  EXPECT_EQ(b[0].lived, 2);
  EXPECT_EQ(b[1].lived, 0);
  EXPECT_EQ(b[2].lived, 1);
}

TEST(Campaign, OpenLoopFlatLives) {
  EvalCampaignSpec spec;
  spec.trials = 1;
  spec.max_steps = 1000;
  spec.source = PolicySource::kOpenLoop;
  spec.force_flat = true;
  // Unaugmented gait: nominal masses, only friction still drawn.
  d2::D2Distribution dist;
  dist.base_mass_rel_std = 0.0;
  dist.link_mass_rel_std = 0.0;
  const CampaignReport r = run_eval_campaign(spec, dist, rollout::EpisodeConfig{});
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_FALSE(r.trials[0].fell);
  EXPECT_GT(r.trials[0].distance, 0.0);
  EXPECT_EQ(r.trials[0].sample.mesh_magnitude, 0.0);
  EXPECT_EQ(r.trials[0].sample.base_mass, dist.base_mass_nominal);
}

// With randomized masses a few heavy-trunk draws do fall on flat ground
// (4 of 100 at master seed 1); pin the rate rather than a single draw.
TEST(Campaign, OpenLoopFlatMostlyLivesUnderRandomDynamics) {
  EvalCampaignSpec spec;
  spec.trials = 100;
  spec.max_steps = 1000;
  spec.source = PolicySource::kOpenLoop;
  spec.force_flat = true;
  const CampaignReport r = run_eval_campaign(spec, d2::D2Distribution{}, rollout::EpisodeConfig{});
  int lived = 0;
  for (const auto& t : r.trials) lived += t.fell ? 0 : 1;
  EXPECT_GE(lived, 90);
}

TEST(Campaign, ConservationAndDeterminismAcrossThreads) {
  EvalCampaignSpec spec;
  spec.trials = 12;
  spec.max_steps = 600;
  spec.source = PolicySource::kOpenLoop;
  spec.master_seed = 77;
  spec.threads = 1;
  const d2::D2Distribution dist;
  const rollout::EpisodeConfig episode;
  const CampaignReport a = run_eval_campaign(spec, dist, episode);
  spec.threads = 4;
  const CampaignReport b = run_eval_campaign(spec, dist, episode);
  EXPECT_EQ(a.trials, b.trials);
  EXPECT_EQ(a.buckets, b.buckets);
  int total = 0, died = 0;
  for (const auto& bc : a.buckets) {
    total += bc.died + bc.lived;
    died += bc.died;
  }
  EXPECT_EQ(total, spec.trials);
  int fell = 0;
  for (const auto& t : a.trials) fell += t.fell ? 1 : 0;
  EXPECT_EQ(died, fell);
  EXPECT_EQ(a.survived(), spec.trials - fell);

  spec.master_seed = 78;
  EXPECT_NE(run_eval_campaign(spec, dist, episode).trials, a.trials);
}

TEST(Campaign, AllFallAtOriginLandInNearBucket) {
  rollout::EpisodeConfig episode;
  episode.robot.geometry.body_height = 0.5;
  EvalCampaignSpec spec;
  spec.trials = 5;
  spec.max_steps = 50;
  const CampaignReport r = run_eval_campaign(spec, d2::D2Distribution{}, episode);
  EXPECT_EQ(r.buckets[0].died, 5);
}

TEST(Checkpoint, RoundTripIdentity) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  policy::PolicyMatrix theta;
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = n(rng) * std::pow(10.0, k % 7 - 3);
  std::stringstream ss;
  write_checkpoint(ss, theta, 42);
  EXPECT_EQ(ss.str().rfind("# seed 42\n12 14 1\n", 0), 0u);
  EXPECT_EQ(read_checkpoint(ss), theta);
}

TEST(Checkpoint, RejectsBadInput) {
  std::stringstream shape("3 3 1\n1 2 3\n4 5 6\n7 8 9\n");
  EXPECT_THROW(read_checkpoint(shape), IoError);
  std::stringstream version("12 14 2\n");
  EXPECT_THROW(read_checkpoint(version), IoError);
  std::stringstream truncated("12 14 1\n1 2 3\n");
  EXPECT_THROW(read_checkpoint(truncated), IoError);
  EXPECT_THROW(load_checkpoint("/nonexistent/policy.txt"), IoError);
}

TEST(Terrain, DumpLoadIdentity) {
  sim::TerrainField f = sim::generate_terrain(0.08, 6.0, 0.1, 1234);
  std::stringstream ss;
  sim::write_terrain(ss, f);
  EXPECT_EQ(sim::read_terrain(ss), f);
}

namespace {

std::vector<rollout::TrajectoryRow> logged_rollout(const rollout::EpisodeConfig& cfg,
                                                   const policy::PolicyMatrix& theta, int steps,
                                                   double magnitude) {
  d2::D2Sample s = d2::sample_d2(d2::D2Distribution{}, 31);
  s.mesh_magnitude = magnitude;
  std::vector<rollout::TrajectoryRow> log;
  rollout::episode_rollout(rollout::Controller::linear(theta), s, cfg, steps, 5, 1.0, &log);
  return log;
}

}  // namespace

TEST(Trajectory, HeaderAndRowCount) {
  const rollout::EpisodeConfig cfg;
  const auto log = logged_rollout(cfg, policy::PolicyMatrix::Zero(), 100, 0.0);
  ASSERT_EQ(log.size(), 100u);
  for (const auto& row : log) {
    for (const Vec3& r : row.residuals) EXPECT_EQ(r, Vec3::Zero());
  }
  std::stringstream ss;
  write_trajectory_csv(ss, log);
  int lines = 0;
  std::string line, header;
  while (std::getline(ss, line)) {
    if (lines == 0) header = line;
    ++lines;
  }
  EXPECT_EQ(lines, 101);
  EXPECT_EQ(header.rfind("step,time,phase_FL,", 0), 0u);
  EXPECT_NE(header.find(",residual_BR_z,psi,delta,"), std::string::npos);
}

TEST(Trajectory, CsvRoundTripAndReplay) {
  rollout::EpisodeConfig cfg;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 0.3);
  policy::PolicyMatrix theta;
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = n(rng);
  const auto log = logged_rollout(cfg, theta, 400, 0.04);
  ASSERT_FALSE(log.empty());
  std::stringstream ss;
  write_trajectory_csv(ss, log, 5);
  const auto back = read_trajectory_csv(ss);
  ASSERT_EQ(back.size(), log.size());
  for (std::size_t t = 0; t < log.size(); ++t) {
    EXPECT_EQ(back[t].targets, log[t].targets);
    EXPECT_EQ(back[t].phase, log[t].phase);
    EXPECT_EQ(back[t].reward, log[t].reward);
  }
  EXPECT_LT(replay_error(back, cfg), 1e-9);
}
