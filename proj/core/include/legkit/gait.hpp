#pragma once

// Open-loop trot gait: planar stance/swing curves, the per-leg phase clock and
// the 3D steering composition that turns planar curves into hip-frame foot
// targets.

#include <array>

#include "legkit/types.hpp"

namespace legkit::gait {

/// Steering input: trajectory rotation, yaw step length and half stride.
struct MotionCommand {
  double rho = 0.0;        // rad, rotation of the translation curve vs. +x
  double omega_bar = 0.0;  // m, half step length of the yaw curve
  double l_span = 0.035;   // m, half stride length

  void validate() const;
};

/// Curve shape parameters the policy modulates.
struct GaitParams {
  double psi = 0.02;     // m, swing clearance
  double delta = 0.01;   // m, virtual ground penetration

  void validate() const;
};

struct PlanarPoint {
  double q = 0.0;  // in-plane travel coordinate, m
  double z = 0.0;  // vertical, m
};

enum class BernsteinForm {
  kStandard,  // C(n,k) (1-s)^(n-k) s^k
  kPrinted,   // C(n,k) (1-s)^(n-k) s, reproduces the typeset formula (not a basis)
};

enum class ControlPointTable {
  kMirrored,  // symmetric swing profile: c8,c9 = (+1.5tau, 1.1psi), c10 = (+1.4tau, 0)
  kPrinted,   // c8,c9 = (-1.5tau, 1.1psi), c10 = (-1.4tau, 0) as typeset
};

inline constexpr int kSwingDegree = 11;
inline constexpr int kNumControlPoints = kSwingDegree + 1;

/// Bernstein basis polynomial B^n_k(s). Throws DomainError for k outside
/// [0, n] or s outside [0, 1].
double bernstein_basis(int n, int k, double s, BernsteinForm form = BernsteinForm::kStandard);

/// The twelve swing control points scaled by step length and clearance.
std::array<PlanarPoint, kNumControlPoints> swing_control_points(
    double tau, double psi, ControlPointTable table = ControlPointTable::kMirrored);

/// Stance sinusoid (tau(1-2s), delta cos(pi tau (1-2s) / 2 tau)) for s in [0,1).
/// The tau/tau factor is cancelled, so tau = 0 is valid. The z value is the
/// unsigned profile; trajectory() applies the downward penetration sign.
PlanarPoint stance_curve(double s, double tau, double delta);

/// Degree-11 Bezier swing evaluated at s - 1 for s in [1,2).
PlanarPoint swing_curve(double s, double tau, double psi,
                        ControlPointTable table = ControlPointTable::kMirrored);

/// Full closed trajectory generator over s in [0,2). Stance z is -delta*cos(.)
/// so the stance foot presses below nominal ground.
PlanarPoint trajectory(double s, double tau, const GaitParams& params,
                       ControlPointTable table = ControlPointTable::kMirrored);

enum class Contact { kStance, kSwing };

struct LegPhase {
  double s = 0.0;  // [0,1) stance, [1,2) swing
  Contact contact = Contact::kStance;
};

/// Per-robot phase clock. t_elapse_fl wraps to zero every stride.
struct PhaseClock {
  double t_swing = 0.2;
  double t_stance = 0.2;
  PerLeg<double> lag = {0.0, 0.5, 0.5, 0.0};  // trot
  double t_elapse_fl = 0.0;

  double t_stride() const { return t_swing + t_stance; }
  void validate() const;
  void advance(double dt);
  void reset() { t_elapse_fl = 0.0; }

  /// Stance duration from a fixed step velocity: 2 L_span / v_d.
  static PhaseClock from_step_velocity(double t_swing, double l_span, double step_velocity);
};

/// Maps a leg clock t_leg in (-T_stride, T_stride) to its phase. Swing cases
/// are offset by +1 so they land in [1,2).
LegPhase phase_from_leg_clock(double t_leg, double t_stance, double t_swing);

/// Phase of `leg` at the clock's current time.
LegPhase leg_phase(const PhaseClock& clock, Leg leg);

/// Phase of `leg` at absolute time t (seconds since the FL cycle origin).
LegPhase leg_phase(const PhaseClock& clock, Leg leg, double t);

/// Rest stance per leg: foot position in the hip frame and the rest angle used
/// by the yaw composition.
struct StanceGeometry {
  PerLeg<Vec3> f_stand;
  PerLeg<double> phi_stand{};
};

/// Two-case rest angle: +atan(y/x) for FR and BL, -atan(y/x) for FL and BR.
double stand_angle(Leg leg, double x, double y);

/// Previously composed foot position per leg.
struct YawMemory {
  PerLeg<Vec3> previous;

  /// g(0) = 0: memory starts at the rest positions.
  explicit YawMemory(const StanceGeometry& stance);
  YawMemory() = default;
};

/// g_ang + phi_stand + pi/2, where g is the previous composed position
/// relative to rest. g_ang = atan2(g_y, g_x), or 0 when |g_xy| < 1e-9.
double compute_phi_arc(Leg leg, const YawMemory& memory, const StanceGeometry& stance);

using FootTargets = PerLeg<Vec3>;

/// Composes f = f_tr + f_yaw + f_stand for every leg at the clock's current
/// time and stores the result in `memory`.
FootTargets compose_foot_targets(const MotionCommand& cmd, const GaitParams& params,
                                 const PhaseClock& clock, const StanceGeometry& stance,
                                 YawMemory& memory,
                                 ControlPointTable table = ControlPointTable::kMirrored);

/// Same as above with the phases supplied directly (used for log replay).
FootTargets compose_foot_targets(const MotionCommand& cmd, const GaitParams& params,
                                 const PerLeg<double>& phases, const StanceGeometry& stance,
                                 YawMemory& memory,
                                 ControlPointTable table = ControlPointTable::kMirrored);

}  // namespace legkit::gait
