#include "legkit/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "legkit/kinematics.hpp"
#include "legkit/seed.hpp"

namespace legkit::rollout {

void EpisodeConfig::validate() const {
  sim.validate();
  robot.validate();
  task.validate();
  bounds.validate();
  if (!(t_swing > 0.0) || !(step_velocity > 0.0)) {
    throw ConfigError("swing period and step velocity must be positive");
  }
  if (!(heading_bound >= 0.0) || !(heading_gain >= 0.0)) {
    throw ConfigError("heading gain and bound must be non-negative");
  }
  if (!(terrain_cell > 0.0) || !(max_speed > 0.0) || !(terrain_margin > 0.0)) {
    throw ConfigError("terrain sizing parameters must be positive");
  }
  if (task.l_span <= 0.0) throw ConfigError("task l_span must be positive");
}

gait::PhaseClock EpisodeConfig::clock() const {
  return gait::PhaseClock::from_step_velocity(t_swing, task.l_span, step_velocity);
}

sim::TerrainLayout EpisodeConfig::layout_for(int steps) const {
  const double reach = max_speed * sim.dt * std::max(steps, 1);
  const double half_width = std::max(5.0, 0.25 * reach);
  return {-terrain_margin, reach + terrain_margin, -half_width, half_width, terrain_cell};
}

Controller Controller::linear(const policy::PolicyMatrix& theta) {
  Controller c;
  c.kind = Kind::kLinear;
  c.theta = theta;
  return c;
}

Controller Controller::open_loop(const gait::GaitParams& params) {
  Controller c;
  c.kind = Kind::kOpenLoop;
  c.open_loop_params = params;
  return c;
}

int apply_residuals(const kin::RobotGeometry& geometry, const gait::FootTargets& gait_targets,
                    const gait::FootTargets& residuals, gait::FootTargets& out) {
  int clamped = 0;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const kin::ReachResult r =
        kin::nearest_reachable(geometry.legs[i], gait_targets[i] + residuals[i]);
    out[i] = r.point;
    clamped += r.clamped ? 1 : 0;
  }
  return clamped;
}

RolloutResult episode_rollout(const Controller& controller, const d2::D2Sample& sample,
                              const EpisodeConfig& cfg, int steps, std::uint64_t seed,
                              double discount, std::vector<TrajectoryRow>* log) {
  const d2::AppliedD2 env = d2::apply_d2(sample, cfg.robot, cfg.layout_for(steps));
  return episode_rollout(controller, env, cfg, steps, seed, discount, log);
}

RolloutResult episode_rollout(const Controller& controller, const d2::AppliedD2& env,
                              const EpisodeConfig& cfg, int steps, std::uint64_t seed,
                              double discount, std::vector<TrajectoryRow>* log) {
  cfg.validate();
  if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("discount must be in (0, 1]");
  const kin::RobotGeometry& geometry = env.model.geometry;
  const gait::StanceGeometry stance = kin::default_stand_pose(geometry);

  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> jitter(0.0, cfg.start_jitter);
  const double x0 = jitter(rng);
  const double y0 = jitter(rng);

  sim::World world(env.model, env.terrain, cfg.sim);
  world.reset(sim::standing_state(env.model, *env.terrain, stance, x0, y0));
  gait::PhaseClock clock = cfg.clock();
  gait::YawMemory memory(stance);

  RolloutResult result;
  const double start_x = world.body().position.x();
  double weight = 1.0;
  if (log) log->reserve(log->size() + static_cast<std::size_t>(steps));

  for (int t = 0; t < steps; ++t) {
    const sim::Observation obs = sim::observe(world.body(), clock);
    policy::PolicyAction action;
    if (controller.kind == Controller::Kind::kLinear) {
      action = policy::policy_forward(controller.theta, obs, cfg.bounds);
    } else {
      for (auto& r : action.residuals) r.setZero();
      action.params = controller.open_loop_params;
      action.raw.setZero();
    }

    const sim::RollPitchYaw before = sim::euler_angles(world.body().orientation);
    gait::MotionCommand cmd = cfg.task;
    cmd.omega_bar += cfg.heading_step_scale *
                     policy::heading_controller(before.yaw, cfg.heading_gain, cfg.heading_bound);

    PerLeg<double> phases{};
    for (Leg leg : kAllLegs) phases[index(leg)] = gait::leg_phase(clock, leg).s;
    const gait::FootTargets gait_targets = gait::compose_foot_targets(
        cmd, action.params, phases, stance, memory, cfg.control_points);

    gait::FootTargets reachable;
    const int clamped = apply_residuals(geometry, gait_targets, action.residuals, reachable);
    if (clamped) ++result.clamped_steps;
    gait::FootTargets joint_targets;
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      const kin::JointAngles q = kin::inverse_kinematics(geometry.legs[i], reachable[i]);
      joint_targets[i] = kin::forward_kinematics(geometry.legs[i], q);
    }

    const double x_before = world.body().position.x();
    try {
      world.step(joint_targets);
    } catch (const DivergenceError&) {
      result.diverged = true;
      result.fell = true;
      break;
    } catch (const sim::TerrainBoundsError&) {
      result.left_field = true;
      break;
    }

    const sim::BodyState& body = world.body();
    const sim::RollPitchYaw rpy = sim::euler_angles(body.orientation);
    const double r =
        policy::step_reward(body.position.x() - x_before, rpy.roll, rpy.pitch, body.angular_velocity);
    result.total_reward += weight * r;
    weight *= discount;
    ++result.steps;

    if (log) {
      TrajectoryRow row;
      row.step = t;
      row.time = t * cfg.sim.dt;
      row.phase = phases;
      row.targets = reachable;
      row.residuals = action.residuals;
      row.psi = action.params.psi;
      row.delta = action.params.delta;
      row.omega_bar = cmd.omega_bar;
      row.roll = rpy.roll;
      row.pitch = rpy.pitch;
      row.yaw = rpy.yaw;
      row.reward = r;
      log->push_back(row);
    }

    clock.advance(cfg.sim.dt);
    const sim::FallStatus fall = world.fall_status();
    if (fall != sim::FallStatus::kNone) {
      result.fell = true;
      result.fall_status = fall;
      break;
    }
  }
  result.distance = world.body().position.x() - start_x;
  result.normalized_return = result.steps > 0 ? result.total_reward / result.steps : 0.0;
  return result;
}

}  // namespace legkit::rollout
