#include "legkit/sim.hpp"

#include <algorithm>
#include <cmath>

namespace legkit::sim {

namespace {

struct ContactForce {
  Vec3 force = Vec3::Zero();
  double normal = 0.0;
  double penetration = 0.0;
};

ContactForce foot_contact(const TerrainField& field, const Vec3& p, const Vec3& v, double mu,
                          const SimConfig& cfg) {
  const TerrainField::Sample s = field.sample(p.x(), p.y());
  ContactForce out;
  if (p.z() >= s.height) return out;
  const Vec3 n = Vec3(-s.dhdx, -s.dhdy, 1.0).normalized();
  out.penetration = (s.height - p.z()) * n.z();
  const double vn = v.dot(n);
  out.normal = std::max(0.0, cfg.contact_stiffness * out.penetration - cfg.contact_damping * vn);
  const Vec3 vt = v - vn * n;
  const double slip = vt.norm();
  Vec3 friction = Vec3::Zero();
  if (slip > 0.0) {
    const double magnitude = std::min(mu * out.normal, cfg.friction_damping * slip);
    friction = -magnitude / slip * vt;
  }
  out.force = out.normal * n + friction;
  return out;
}

bool finite(const BodyState& b) {
  return b.position.allFinite() && b.orientation.coeffs().allFinite() &&
         b.linear_velocity.allFinite() && b.angular_velocity.allFinite();
}

Eigen::Quaterniond integrate_rotation(const Eigen::Quaterniond& q, const Vec3& omega_body,
                                      double h) {
  const double angle = omega_body.norm() * h;
  if (angle <= 0.0) return q;
  const Eigen::Quaterniond dq(Eigen::AngleAxisd(angle, omega_body.normalized()));
  return (q * dq).normalized();
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (substeps < 1) throw ConfigError("substeps must be at least 1");
  if (!(contact_stiffness > 0.0) || !(contact_damping > 0.0)) {
    throw ConfigError("contact stiffness and damping must be positive");
  }
  if (!(friction_damping > 0.0)) throw ConfigError("friction damping must be positive");
  if (!(gravity >= 0.0)) throw ConfigError("gravity must be non-negative");
}

void RobotModel::validate() const {
  if (!(base_mass > 0.0)) throw ConfigError("base mass must be positive");
  for (double m : link_masses) {
    if (!(m > 0.0)) throw ConfigError("link masses must be positive");
  }
  if (!(foot_friction > 0.0)) throw ConfigError("foot friction must be positive");
  geometry.validate();
}

double RobotModel::total_mass() const {
  double m = base_mass;
  for (double l : link_masses) m += l;
  return m;
}

Eigen::Matrix3d RobotModel::inertia() const {
  const auto& g = geometry;
  const double a = g.body_length, b = g.body_width, c = g.body_height;
  Eigen::Matrix3d I = Eigen::Matrix3d::Zero();
  I(0, 0) = base_mass * (b * b + c * c) / 12.0;
  I(1, 1) = base_mass * (a * a + c * c) / 12.0;
  I(2, 2) = base_mass * (a * a + b * b) / 12.0;
  // Link point masses hang below each hip at 1/4 and 3/4 of the standing height.
  for (Leg leg : kAllLegs) {
    const std::size_t i = index(leg);
    const Vec3 hip = g.hip_offset(leg) + Vec3(0.0, g.legs[i].side * g.legs[i].l_abd, 0.0);
    for (std::size_t k = 0; k < 2; ++k) {
      const double depth = g.standing_height * (k == 0 ? 0.25 : 0.75);
      const Vec3 r = hip + Vec3(0.0, 0.0, -depth);
      const double m = link_masses[2 * i + k];
      I += m * (r.squaredNorm() * Eigen::Matrix3d::Identity() - r * r.transpose());
    }
  }
  return I;
}

RollPitchYaw euler_angles(const Eigen::Quaterniond& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  const double roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
  const double sp = std::clamp(2.0 * (w * y - z * x), -1.0, 1.0);
  const double pitch = std::asin(sp);
  const double yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
  return {roll, pitch, yaw};
}

SimState step(const SimState& state, const RobotModel& model, const TerrainField& field,
              const gait::FootTargets& targets, const SimConfig& cfg, ContactReport* report) {
  const double mass = model.total_mass();
  const Eigen::Matrix3d inertia = model.inertia();
  const Eigen::Matrix3d inertia_inv = inertia.inverse();
  const double mu = model.foot_friction * field.friction;
  const Vec3 gravity(0.0, 0.0, -cfg.gravity);
  const int n = cfg.substeps;
  const double h = cfg.substep();

  PerLeg<Vec3> start, rate;
  for (Leg leg : kAllLegs) {
    const std::size_t i = index(leg);
    const Vec3 hip = model.geometry.hip_offset(leg);
    start[i] = hip + state.feet[i];
    rate[i] = (targets[i] - state.feet[i]) / cfg.dt;
  }

  BodyState b = state.body;
  const Vec3 v_begin = b.linear_velocity;
  ContactReport contacts;
  for (int k = 0; k < n; ++k) {
    const Eigen::Matrix3d R = b.orientation.toRotationMatrix();
    const double alpha = static_cast<double>(k + 1) / n;
    Vec3 force = Vec3::Zero();
    Vec3 torque = Vec3::Zero();  // world frame, about the trunk centre
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      const Vec3 foot_body = start[i] + alpha * cfg.dt * rate[i];
      const Vec3 r = R * foot_body;
      const Vec3 p = b.position + r;
      const Vec3 v = b.linear_velocity + R * (b.angular_velocity.cross(foot_body) + rate[i]);
      const ContactForce c = foot_contact(field, p, v, mu, cfg);
      force += c.force;
      torque += r.cross(c.force);
      if (k == n - 1) {
        contacts.normal_force[i] = c.normal;
        contacts.in_contact[i] = c.penetration > 0.0;
      }
    }
    // Second-order position update with the substep-start acceleration: exact
    // for constant forces (free fall) and at rest for balanced forces.
    const Vec3 accel = force / mass + gravity;
    b.position += h * b.linear_velocity + 0.5 * h * h * accel;
    b.linear_velocity += h * accel;

    const Vec3& w = b.angular_velocity;
    const Vec3 torque_body = R.transpose() * torque;
    b.angular_velocity = w + h * (inertia_inv * (torque_body - w.cross(inertia * w)));
    b.orientation = integrate_rotation(b.orientation, b.angular_velocity, h);
  }
  const Vec3 accel_world = (b.linear_velocity - v_begin) / cfg.dt;
  const Vec3 measured = cfg.accel_includes_gravity ? Vec3(accel_world - gravity) : accel_world;
  b.linear_acceleration = b.orientation.toRotationMatrix().transpose() * measured;

  if (!finite(b)) throw DivergenceError("simulation diverged (non-finite state)");
  if (report) *report = contacts;
  return {b, targets};
}

double mechanical_energy(const SimState& state, const RobotModel& model,
                         const TerrainField& field, const SimConfig& cfg) {
  const BodyState& b = state.body;
  const double mass = model.total_mass();
  const Eigen::Matrix3d I = model.inertia();
  double e = 0.5 * mass * b.linear_velocity.squaredNorm() +
             0.5 * b.angular_velocity.dot(I * b.angular_velocity) +
             mass * cfg.gravity * b.position.z();
  const Eigen::Matrix3d R = b.orientation.toRotationMatrix();
  for (Leg leg : kAllLegs) {
    const std::size_t i = index(leg);
    const Vec3 p = b.position + R * (model.geometry.hip_offset(leg) + state.feet[i]);
    const TerrainField::Sample s = field.sample(p.x(), p.y());
    if (p.z() < s.height) {
      const Vec3 n = Vec3(-s.dhdx, -s.dhdy, 1.0).normalized();
      const double pen = (s.height - p.z()) * n.z();
      e += 0.5 * cfg.contact_stiffness * pen * pen;
    }
  }
  return e;
}

Observation observe(const BodyState& state, const gait::PhaseClock& clock) {
  const RollPitchYaw rpy = euler_angles(state.orientation);
  Observation o;
  o(0) = rpy.roll;
  o(1) = rpy.pitch;
  o.segment<3>(2) = state.angular_velocity;
  o.segment<3>(5) = state.linear_acceleration;
  for (Leg leg : kAllLegs) {
    o(8 + static_cast<Eigen::Index>(index(leg))) = gait::leg_phase(clock, leg).s - 1.0;
  }
  return o;
}

FallStatus detect_fall(const BodyState& state, const TerrainField& field,
                       const kin::RobotGeometry& geometry) {
  const RollPitchYaw rpy = euler_angles(state.orientation);
  if (std::abs(rpy.roll) > kFallTiltLimit || std::abs(rpy.pitch) > kFallTiltLimit) {
    return FallStatus::kTilt;
  }
  const Eigen::Matrix3d R = state.orientation.toRotationMatrix();
  const double hx = geometry.body_length / 2, hy = geometry.body_width / 2;
  const double hz = geometry.body_height / 2;
  const std::array<Vec3, 5> underside = {Vec3(0, 0, -hz), Vec3(hx, hy, -hz), Vec3(hx, -hy, -hz),
                                         Vec3(-hx, hy, -hz), Vec3(-hx, -hy, -hz)};
  for (const Vec3& corner : underside) {
    const Vec3 p = state.position + R * corner;
    if (!field.contains(p.x(), p.y())) continue;
    if (p.z() <= height_at(field, p.x(), p.y())) return FallStatus::kTrunkContact;
  }
  return FallStatus::kNone;
}

SimState standing_state(const RobotModel& model, const TerrainField& field,
                        const gait::StanceGeometry& stance, double x, double y) {
  SimState s;
  s.body.position = Vec3(x, y, height_at(field, x, y) + model.geometry.standing_height);
  s.feet = stance.f_stand;
  return s;
}

World::World(RobotModel model, std::shared_ptr<const TerrainField> field, SimConfig cfg)
    : model_(std::move(model)), field_(std::move(field)), cfg_(cfg) {
  if (!field_) throw ConfigError("world requires a terrain field");
  model_.validate();
  cfg_.validate();
  state_.feet = kin::default_stand_pose(model_.geometry).f_stand;
}

}  // namespace legkit::sim
