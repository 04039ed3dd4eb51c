#include <memory>

#include <benchmark/benchmark.h>

#include "legkit/gait.hpp"
#include "legkit/kinematics.hpp"
#include "legkit/randomization.hpp"
#include "legkit/rollout.hpp"
#include "legkit/sim.hpp"
#include "legkit/terrain.hpp"

using namespace legkit;

static void BM_SwingCurve(benchmark::State& state) {
  double s = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gait::swing_curve(s, 0.035, 0.02));
    s = s < 1.99 ? s + 0.001 : 1.0;
  }
}
BENCHMARK(BM_SwingCurve);

static void BM_ComposeFootTargets(benchmark::State& state) {
  const kin::RobotGeometry geom;
  const auto stance = kin::default_stand_pose(geom);
  gait::YawMemory memory(stance);
  gait::PhaseClock clock;
  const gait::MotionCommand cmd{0.0, 0.005, 0.035};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gait::compose_foot_targets(cmd, gait::GaitParams{}, clock, stance, memory));
    clock.advance(0.01);
  }
}
BENCHMARK(BM_ComposeFootTargets);

static void BM_InverseKinematics(benchmark::State& state) {
  const kin::LegGeometry g{0.04, 0.11, 0.11, 1.0};
  const Vec3 target(0.02, 0.05, -0.19);
  for (auto _ : state) benchmark::DoNotOptimize(kin::inverse_kinematics(g, target));
}
BENCHMARK(BM_InverseKinematics);

static void BM_SimStep(benchmark::State& state) {
  const sim::RobotModel model;
  const auto field = std::make_shared<const sim::TerrainField>(
      sim::generate_terrain(static_cast<double>(state.range(0)) / 100.0, 4.0, 0.1, 3));
  const auto stance = kin::default_stand_pose(model.geometry);
  sim::World w(model, field);
  w.reset(sim::standing_state(model, *field, stance));
  const sim::SimState start = w.state();
  int n = 0;
  for (auto _ : state) {
    w.step(stance.f_stand);
    if (++n == 1000) {
      w.reset(start);
      n = 0;
    }
  }
}
BENCHMARK(BM_SimStep)->Arg(0)->Arg(8);

static void BM_Rollout1000(benchmark::State& state) {
  const rollout::EpisodeConfig cfg;
  d2::D2Sample sample = d2::sample_d2(d2::D2Distribution{}, 12);
  sample.mesh_magnitude = 0.0;
  const auto ctl = rollout::Controller::linear(policy::PolicyMatrix::Zero());
  for (auto _ : state) benchmark::DoNotOptimize(rollout::episode_rollout(ctl, sample, cfg, 1000, 1));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Rollout1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
