#pragma once

// Closed-form kinematics of a 3-DOF leg: hip abduction about +x, then a planar
// hip-pitch/knee chain. Hip frame: x forward, y left, z up.

#include "legkit/gait.hpp"
#include "legkit/types.hpp"

namespace legkit::kin {

struct LegGeometry {
  double l_abd = 0.04;    // lateral hip offset
  double l_upper = 0.11;
  double l_lower = 0.11;
  double side = 1.0;      // +1 left leg, -1 right leg

  void validate() const;
  double max_reach() const { return l_upper + l_lower; }
  double min_reach() const;
};

struct JointAngles {
  double abduction = 0.0;
  double hip_pitch = 0.0;
  double knee = 0.0;
};

struct JointLimits {
  double abduction_min = -1.2, abduction_max = 1.2;
  double hip_pitch_min = -3.2, hip_pitch_max = 3.2;
  double knee_min = 0.0, knee_max = 3.1416;

  bool contains(const JointAngles& q) const;
};

/// Raised when a target lies outside the leg's workspace.
class OutOfReach : public DomainError {
 public:
  OutOfReach(const Vec3& target, const Vec3& nearest);
  const Vec3& target() const { return target_; }
  const Vec3& nearest() const { return nearest_; }

 private:
  Vec3 target_;
  Vec3 nearest_;
};

Vec3 forward_kinematics(const LegGeometry& geom, const JointAngles& angles);

/// Knee-backward branch (knee >= 0). Throws OutOfReach for unreachable
/// targets.
JointAngles inverse_kinematics(const LegGeometry& geom, const Vec3& target);

struct ReachResult {
  Vec3 point;
  bool clamped = false;
};

/// Nearest point of the reachable set; identity for reachable targets.
ReachResult nearest_reachable(const LegGeometry& geom, const Vec3& target);

struct RobotGeometry {
  double body_length = 0.25;  // hip-to-hip, x
  double body_width = 0.15;   // hip-to-hip, y
  double body_height = 0.05;  // trunk box thickness
  PerLeg<LegGeometry> legs{{{0.04, 0.11, 0.11, 1.0},
                            {0.04, 0.11, 0.11, -1.0},
                            {0.04, 0.11, 0.11, 1.0},
                            {0.04, 0.11, 0.11, -1.0}}};
  double standing_height = 0.2;

  void validate() const;
  /// Hip position in the body frame.
  Vec3 hip_offset(Leg leg) const;
};

/// Rest foot positions at the standing height, directly below the abduction
/// offset, and their rest angles. phi_stand uses the body-frame foot position
/// with the lateral coordinate measured outward, so mirrored legs share |angle|.
gait::StanceGeometry default_stand_pose(const RobotGeometry& geom);

}  // namespace legkit::kin
