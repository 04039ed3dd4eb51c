#include "legkit/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace legkit::kin {

namespace {

std::string describe_out_of_reach(const Vec3& t) {
  std::ostringstream os;
  os << "foot target (" << t.x() << ", " << t.y() << ", " << t.z() << ") is out of reach";
  return os.str();
}

// Position in the leg plane: (x, -D) after undoing abduction.
struct PlaneCoords {
  double x;
  double depth;  // D >= 0, distance below the hip along the rotated leg axis
  double r_yz;
};

PlaneCoords to_plane(const LegGeometry& g, const Vec3& p) {
  const double r_yz = std::hypot(p.y(), p.z());
  const double d2 = r_yz * r_yz - g.l_abd * g.l_abd;
  return {p.x(), d2 > 0.0 ? std::sqrt(d2) : 0.0, r_yz};
}

}  // namespace

void LegGeometry::validate() const {
  if (!(l_abd > 0.0 && l_upper > 0.0 && l_lower > 0.0)) {
    throw ConfigError("leg link lengths must be positive");
  }
  if (side != 1.0 && side != -1.0) throw ConfigError("leg side must be +1 or -1");
}

double LegGeometry::min_reach() const { return std::abs(l_upper - l_lower); }

bool JointLimits::contains(const JointAngles& q) const {
  return q.abduction >= abduction_min && q.abduction <= abduction_max &&
         q.hip_pitch >= hip_pitch_min && q.hip_pitch <= hip_pitch_max && q.knee >= knee_min &&
         q.knee <= knee_max;
}

OutOfReach::OutOfReach(const Vec3& target, const Vec3& nearest)
    : DomainError(describe_out_of_reach(target)), target_(target), nearest_(nearest) {}

Vec3 forward_kinematics(const LegGeometry& g, const JointAngles& q) {
  const double x = g.l_upper * std::sin(q.hip_pitch) + g.l_lower * std::sin(q.hip_pitch + q.knee);
  const double zp =
      -g.l_upper * std::cos(q.hip_pitch) - g.l_lower * std::cos(q.hip_pitch + q.knee);
  const double yp = g.side * g.l_abd;
  const double ca = std::cos(q.abduction);
  const double sa = std::sin(q.abduction);
  return {x, yp * ca - zp * sa, yp * sa + zp * ca};
}

ReachResult nearest_reachable(const LegGeometry& g, const Vec3& target) {
  const PlaneCoords pc = to_plane(g, target);
  const double r = std::hypot(pc.x, pc.depth);
  const double r_min = g.min_reach();
  const double r_max = g.max_reach();
  constexpr double kTol = 1e-12;
  const bool lateral_ok = pc.r_yz >= g.l_abd * (1.0 - kTol);
  if (lateral_ok && r <= r_max * (1.0 + kTol) && r >= r_min * (1.0 - kTol)) {
    return {target, false};
  }

  // Clamp within the leg plane, keeping the abduction angle of the target.
  double x = pc.x;
  double depth = pc.depth;
  if (r > r_max) {
    x *= r_max / r;
    depth *= r_max / r;
  } else if (r < r_min) {
    if (r > 0.0) {
      x *= r_min / r;
      depth *= r_min / r;
    } else {
      depth = r_min;
    }
  }
  const double zp = -depth;
  const double yp = g.side * g.l_abd;
  // Abduction that maps (yp, zp) toward the target's y-z direction.
  double abduction = 0.0;
  if (pc.r_yz > 0.0) abduction = std::atan2(target.z(), target.y()) - std::atan2(zp, yp);
  const double ca = std::cos(abduction);
  const double sa = std::sin(abduction);
  return {Vec3(x, yp * ca - zp * sa, yp * sa + zp * ca), true};
}

JointAngles inverse_kinematics(const LegGeometry& g, const Vec3& target) {
  const ReachResult reach = nearest_reachable(g, target);
  if (reach.clamped) throw OutOfReach(target, reach.point);

  const PlaneCoords pc = to_plane(g, target);
  const double yp = g.side * g.l_abd;
  JointAngles q;
  q.abduction = std::atan2(target.z(), target.y()) - std::atan2(-pc.depth, yp);
  q.abduction = std::remainder(q.abduction, 2.0 * M_PI);

  const double r2 = pc.x * pc.x + pc.depth * pc.depth;
  const double c =
      (r2 - g.l_upper * g.l_upper - g.l_lower * g.l_lower) / (2.0 * g.l_upper * g.l_lower);
  q.knee = std::acos(std::clamp(c, -1.0, 1.0));
  q.hip_pitch = std::atan2(pc.x, pc.depth) -
                std::atan2(g.l_lower * std::sin(q.knee), g.l_upper + g.l_lower * std::cos(q.knee));
  return q;
}

void RobotGeometry::validate() const {
  if (!(body_length > 0.0 && body_width > 0.0 && body_height > 0.0)) {
    throw ConfigError("body dimensions must be positive");
  }
  for (const auto& leg : legs) {
    leg.validate();
    if (standing_height > leg.max_reach() || standing_height < leg.min_reach()) {
      throw ConfigError("standing height is not reachable by every leg");
    }
  }
  if (!(standing_height > 0.0)) throw ConfigError("standing height must be positive");
}

Vec3 RobotGeometry::hip_offset(Leg leg) const {
  const double x = is_front(leg) ? body_length / 2 : -body_length / 2;
  const double y = is_left(leg) ? body_width / 2 : -body_width / 2;
  return {x, y, 0.0};
}

gait::StanceGeometry default_stand_pose(const RobotGeometry& geom) {
  geom.validate();
  gait::StanceGeometry stance;
  for (Leg leg : kAllLegs) {
    const std::size_t i = index(leg);
    const LegGeometry& g = geom.legs[i];
    stance.f_stand[i] = Vec3(0.0, g.side * g.l_abd, -geom.standing_height);
    const Vec3 body = geom.hip_offset(leg) + stance.f_stand[i];
    stance.phi_stand[i] = gait::stand_angle(leg, body.x(), std::abs(body.y()));
  }
  return stance;
}

}  // namespace legkit::kin
