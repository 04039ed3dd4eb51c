#pragma once

// Minimal quadruped simulator: one floating trunk, kinematically placed point
// feet, spring-damper normal contact with regularized Coulomb friction on a
// heightfield.

#include <array>
#include <memory>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "legkit/gait.hpp"
#include "legkit/kinematics.hpp"
#include "legkit/terrain.hpp"
#include "legkit/types.hpp"

namespace legkit::sim {

inline constexpr std::size_t kNumLinks = 8;  // upper + lower link per leg
inline constexpr std::size_t kObservationSize = 12;

using Observation = Eigen::Matrix<double, kObservationSize, 1>;

struct SimConfig {
  double dt = 0.01;
  int substeps = 10;
  double contact_stiffness = 2000.0;  // N/m
  double contact_damping = 50.0;      // N s/m
  double friction_damping = 300.0;    // N s/m, slope of the regularized friction law
  double gravity = 9.81;
  // Accelerometer reports specific force (level rest reads +g on z).
  bool accel_includes_gravity = true;

  void validate() const;
  double substep() const { return dt / substeps; }
};

struct RobotModel {
  double base_mass = 1.1;
  std::array<double, kNumLinks> link_masses{0.15, 0.15, 0.15, 0.15, 0.15, 0.15, 0.15, 0.15};
  double foot_friction = 1.0;
  kin::RobotGeometry geometry;

  void validate() const;
  double total_mass() const;
  /// Trunk box plus link point masses about the trunk centre, body frame.
  Eigen::Matrix3d inertia() const;
};

struct BodyState {
  Vec3 position = Vec3::Zero();                              // world
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();  // body -> world
  Vec3 linear_velocity = Vec3::Zero();                       // world
  Vec3 angular_velocity = Vec3::Zero();                      // body
  Vec3 linear_acceleration = Vec3::Zero();                   // body, accelerometer reading
};

/// Trunk state plus the last commanded foot positions (hip frame), needed for
/// foot velocities.
struct SimState {
  BodyState body;
  gait::FootTargets feet;
};

struct ContactReport {
  PerLeg<double> normal_force{};
  PerLeg<bool> in_contact{};
};

struct RollPitchYaw {
  double roll;
  double pitch;
  double yaw;
};

/// ZYX Euler angles of the trunk, roll/pitch relative to gravity.
RollPitchYaw euler_angles(const Eigen::Quaterniond& q);

/// Advances one control step of length cfg.dt. Feet move linearly from
/// state.feet to `targets` across the step. Throws DivergenceError on
/// non-finite state and TerrainBoundsError when a foot leaves the field.
SimState step(const SimState& state, const RobotModel& model, const TerrainField& field,
              const gait::FootTargets& targets, const SimConfig& cfg,
              ContactReport* report = nullptr);

/// Mechanical energy: kinetic + gravitational + contact spring.
double mechanical_energy(const SimState& state, const RobotModel& model,
                         const TerrainField& field, const SimConfig& cfg);

/// o = [roll, pitch, omega(3), accel(3), S_FL, S_FR, S_BL, S_BR] with phases
/// mapped from [0,2) to [-1,1).
Observation observe(const BodyState& state, const gait::PhaseClock& clock);

enum class FallStatus { kNone, kTilt, kTrunkContact };

inline constexpr double kFallTiltLimit = 60.0 * 3.14159265358979323846 / 180.0;

/// Fall if |roll| or |pitch| exceeds 60 degrees or the underside of the trunk
/// box touches the terrain.
FallStatus detect_fall(const BodyState& state, const TerrainField& field,
                       const kin::RobotGeometry& geometry);

/// Standing pose: trunk level at the standing height above terrain at (x, y).
SimState standing_state(const RobotModel& model, const TerrainField& field,
                        const gait::StanceGeometry& stance, double x = 0.0, double y = 0.0);

/// Stateful wrapper owning one simulation instance.
class World {
 public:
  World(RobotModel model, std::shared_ptr<const TerrainField> field, SimConfig cfg = {});

  void reset(const SimState& state) { state_ = state; }
  const SimState& state() const { return state_; }
  const BodyState& body() const { return state_.body; }
  const RobotModel& model() const { return model_; }
  const TerrainField& terrain() const { return *field_; }
  const SimConfig& config() const { return cfg_; }

  void step(const gait::FootTargets& targets) {
    state_ = sim::step(state_, model_, *field_, targets, cfg_, &contacts_);
  }
  const ContactReport& contacts() const { return contacts_; }
  double energy() const { return mechanical_energy(state_, model_, *field_, cfg_); }
  FallStatus fall_status() const { return detect_fall(state_.body, *field_, model_.geometry); }

 private:
  RobotModel model_;
  std::shared_ptr<const TerrainField> field_;
  SimConfig cfg_;
  SimState state_;
  ContactReport contacts_;
};

}  // namespace legkit::sim
