#include "legkit/policy.hpp"

#include <algorithm>
#include <cmath>

namespace legkit::policy {

void ActionBounds::validate() const {
  if (!(psi_max > psi_min) || psi_min < 0.0) throw ConfigError("psi range must be non-degenerate");
  if (!(delta_max > delta_min) || delta_min < 0.0) {
    throw ConfigError("delta range must be non-degenerate");
  }
  if (!(residual > 0.0)) throw ConfigError("residual bound must be positive");
}

RawAction raw_output(const PolicyMatrix& theta, const sim::Observation& o) {
  return theta.transpose() * o;
}

PolicyAction policy_forward(const PolicyMatrix& theta, const sim::Observation& o,
                            const ActionBounds& bounds) {
  if (!o.allFinite()) throw DomainError("policy observation is not finite");
  PolicyAction a;
  a.raw = raw_output(theta, o);
  const RawAction c = a.raw.cwiseMax(-1.0).cwiseMin(1.0);
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    a.residuals[i] = bounds.residual * c.segment<3>(static_cast<Eigen::Index>(3 * i));
  }
  a.params.psi = bounds.psi_min + (c(12) + 1.0) / 2.0 * (bounds.psi_max - bounds.psi_min);
  a.params.delta = bounds.delta_min + (c(13) + 1.0) / 2.0 * (bounds.delta_max - bounds.delta_min);
  return a;
}

double step_reward(double dx, double roll, double pitch, const Vec3& omega) {
  return dx - 10.0 * (std::abs(roll) + std::abs(pitch)) - 0.03 * omega.cwiseAbs().sum();
}

double heading_controller(double yaw, double gain, double bound) {
  return std::clamp(-gain * yaw, -bound, bound);
}

}  // namespace legkit::policy
