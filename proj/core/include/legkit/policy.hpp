#pragma once

// Linear gait-modulation policy, per-step reward and the heading controller.

#include <Eigen/Core>

#include "legkit/gait.hpp"
#include "legkit/sim.hpp"

namespace legkit::policy {

inline constexpr Eigen::Index kActionSize = 14;  // 12 foot residuals + psi + delta

using PolicyMatrix = Eigen::Matrix<double, sim::kObservationSize, kActionSize>;
using RawAction = Eigen::Matrix<double, kActionSize, 1>;

struct ActionBounds {
  double psi_min = 0.005;
  double psi_max = 0.06;
  double delta_min = 0.0;
  double delta_max = 0.02;
  double residual = 0.005;  // per axis, m

  void validate() const;
  gait::GaitParams midpoint() const {
    return {(psi_min + psi_max) / 2, (delta_min + delta_max) / 2};
  }
};

struct PolicyAction {
  gait::FootTargets residuals;  // per leg, hip frame
  gait::GaitParams params;
  RawAction raw;                // theta^T o before clipping
};

/// theta^T o before clipping.
RawAction raw_output(const PolicyMatrix& theta, const sim::Observation& o);

/// Clips theta^T o to [-1,1], scales the first 12 channels by the residual
/// bound and maps the last two affinely onto the psi and delta ranges.
PolicyAction policy_forward(const PolicyMatrix& theta, const sim::Observation& o,
                            const ActionBounds& bounds);

/// r = dx - 10 (|roll| + |pitch|) - 0.03 sum |omega_i|
double step_reward(double dx, double roll, double pitch, const Vec3& omega);

/// omega_bar = -gain * yaw, saturated at +-bound.
double heading_controller(double yaw, double gain, double bound);

}  // namespace legkit::policy
