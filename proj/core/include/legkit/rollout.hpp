#pragma once

// One episode of gait modulation: observe, act, compose Bezier targets, add
// residuals, IK, simulate, reward.

#include <cstdint>
#include <optional>
#include <vector>

#include "legkit/gait.hpp"
#include "legkit/policy.hpp"
#include "legkit/randomization.hpp"
#include "legkit/sim.hpp"

namespace legkit::rollout {

/// Everything that defines the episode environment except the D2 draw.
struct EpisodeConfig {
  sim::SimConfig sim;
  sim::RobotModel robot;              // nominal model; D2 samples override masses/friction
  gait::MotionCommand task;           // omega_bar here is a bias added to the heading controller output
  double t_swing = 0.2;
  double step_velocity = 0.35;        // stance duration = 2 l_span / v_d
  double heading_gain = 0.1;          // m of yaw step per rad of heading error
  double heading_bound = 0.01;        // m
  // Converts the controller's yaw command into the generator's yaw step. With
  // the arc-angle construction a positive step turns the trunk clockwise.
  double heading_step_scale = -1.0;
  policy::ActionBounds bounds;
  gait::ControlPointTable control_points = gait::ControlPointTable::kMirrored;
  double terrain_cell = 0.1;
  double terrain_margin = 5.0;        // m behind the start and around the reach
  double max_speed = 1.0;             // m/s, sizes the field to the episode reach
  double start_jitter = 0.1;          // m, start offset drawn from the rollout seed

  void validate() const;
  gait::PhaseClock clock() const;
  /// Field extent that covers `steps` steps at max_speed.
  sim::TerrainLayout layout_for(int steps) const;
};

/// The gait modulation source: a linear policy or the unaugmented open-loop
/// generator with fixed curve parameters.
struct Controller {
  enum class Kind { kLinear, kOpenLoop };
  Kind kind = Kind::kLinear;
  policy::PolicyMatrix theta = policy::PolicyMatrix::Zero();
  gait::GaitParams open_loop_params;

  static Controller linear(const policy::PolicyMatrix& theta);
  static Controller open_loop(const gait::GaitParams& params);
};

struct RolloutResult {
  double normalized_return = 0.0;  // sum of (discounted) rewards / steps executed
  double total_reward = 0.0;
  double distance = 0.0;           // final minus initial trunk x, m
  bool fell = false;
  int steps = 0;
  sim::FallStatus fall_status = sim::FallStatus::kNone;
  bool diverged = false;
  bool left_field = false;
  int clamped_steps = 0;           // steps with at least one unreachable target

  friend bool operator==(const RolloutResult&, const RolloutResult&) = default;
};

struct TrajectoryRow {
  int step = 0;
  double time = 0.0;
  PerLeg<double> phase{};
  gait::FootTargets targets;    // final targets after residuals and reach clamp
  gait::FootTargets residuals;
  double psi = 0.0;
  double delta = 0.0;
  double omega_bar = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  double reward = 0.0;
};

/// Runs up to `steps` control steps on the environment described by `sample`.
/// `seed` draws the start offset. Terminates early on a fall, divergence or
/// leaving the terrain field.
RolloutResult episode_rollout(const Controller& controller, const d2::D2Sample& sample,
                              const EpisodeConfig& cfg, int steps, std::uint64_t seed,
                              double discount = 1.0,
                              std::vector<TrajectoryRow>* log = nullptr);

/// Same, on an already-built model and terrain.
RolloutResult episode_rollout(const Controller& controller, const d2::AppliedD2& env,
                              const EpisodeConfig& cfg, int steps, std::uint64_t seed,
                              double discount = 1.0,
                              std::vector<TrajectoryRow>* log = nullptr);

/// Final targets for one control step: Gamma + residual, clamped to reach.
/// Returns the number of legs that needed clamping.
int apply_residuals(const kin::RobotGeometry& geometry, const gait::FootTargets& gait_targets,
                    const gait::FootTargets& residuals, gait::FootTargets& out);

}  // namespace legkit::rollout
