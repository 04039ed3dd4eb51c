#include "legkit/gait.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace legkit::gait {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kYawEpsilon = 1e-9;

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return c;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

void MotionCommand::validate() const {
  require_finite(rho, "rho");
  require_finite(omega_bar, "omega_bar");
  require_finite(l_span, "l_span");
  if (rho < -kPi / 2 || rho > kPi / 2) throw DomainError("rho outside [-pi/2, pi/2]");
  if (l_span < 0.0) throw DomainError("l_span must be non-negative");
}

void GaitParams::validate() const {
  require_finite(psi, "psi");
  require_finite(delta, "delta");
  if (psi < 0.0) throw DomainError("psi must be non-negative");
  if (delta < 0.0) throw DomainError("delta must be non-negative");
}

double bernstein_basis(int n, int k, double s, BernsteinForm form) {
  if (n < 0 || k < 0 || k > n) throw DomainError("bernstein_basis: k outside [0, n]");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("bernstein_basis: s outside [0, 1]");
  const double tail = std::pow(1.0 - s, n - k);
  if (form == BernsteinForm::kPrinted) return binomial(n, k) * tail * s;
  return binomial(n, k) * tail * std::pow(s, k);
}

std::array<PlanarPoint, kNumControlPoints> swing_control_points(double tau, double psi,
                                                                ControlPointTable table) {
  const double back = table == ControlPointTable::kPrinted ? -1.0 : 1.0;
  return {{
      {-tau, 0.0},
      {-1.4 * tau, 0.0},
      {-1.5 * tau, 0.9 * psi},
      {-1.5 * tau, 0.9 * psi},
      {-1.5 * tau, 0.9 * psi},
      {0.0, 0.9 * psi},
      {0.0, 0.9 * psi},
      {0.0, 1.1 * psi},
      {back * 1.5 * tau, 1.1 * psi},
      {back * 1.5 * tau, 1.1 * psi},
      {back * 1.4 * tau, 0.0},
      {tau, 0.0},
  }};
}

PlanarPoint stance_curve(double s, double tau, double delta) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("stance_curve: s outside [0, 1)");
  const double u = 1.0 - 2.0 * s;
  return {tau * u, delta * std::cos(kPi * u / 2.0)};
}

PlanarPoint swing_curve(double s, double tau, double psi, ControlPointTable table) {
  if (!(s >= 1.0 && s < 2.0)) throw DomainError("swing_curve: s outside [1, 2)");
  const auto points = swing_control_points(tau, psi, table);
  const double u = s - 1.0;
  PlanarPoint out;
  for (int k = 0; k < kNumControlPoints; ++k) {
    const double b = bernstein_basis(kSwingDegree, k, u);
    out.q += b * points[static_cast<std::size_t>(k)].q;
    out.z += b * points[static_cast<std::size_t>(k)].z;
  }
  return out;
}

PlanarPoint trajectory(double s, double tau, const GaitParams& params, ControlPointTable table) {
  if (s < 1.0) {
    PlanarPoint p = stance_curve(s, tau, params.delta);
    p.z = -p.z;
    return p;
  }
  return swing_curve(s, tau, params.psi, table);
}

void PhaseClock::validate() const {
  if (!(t_swing > 0.0)) throw ConfigError("t_swing must be positive");
  if (!(t_stance > 0.0)) throw ConfigError("t_stance must be positive");
  for (double l : lag) {
    if (!(l >= 0.0 && l < 1.0)) throw ConfigError("phase lag outside [0, 1)");
  }
}

void PhaseClock::advance(double dt) {
  t_elapse_fl += dt;
  const double stride = t_stride();
  if (t_elapse_fl >= stride) t_elapse_fl = std::fmod(t_elapse_fl, stride);
}

PhaseClock PhaseClock::from_step_velocity(double t_swing, double l_span, double step_velocity) {
  if (!(step_velocity > 0.0)) throw ConfigError("step velocity must be positive");
  PhaseClock clock;
  clock.t_swing = t_swing;
  clock.t_stance = 2.0 * l_span / step_velocity;
  clock.validate();
  return clock;
}

LegPhase phase_from_leg_clock(double t_leg, double t_stance, double t_swing) {
  const double stride = t_stance + t_swing;
  if (t_leg >= 0.0 && t_leg < t_stance) return {t_leg / t_stance, Contact::kStance};
  if (t_leg >= -stride && t_leg < -t_swing) {
    return {(t_leg + stride) / t_stance, Contact::kStance};
  }
  if (t_leg >= -t_swing && t_leg < 0.0) {
    return {1.0 + (t_leg + t_swing) / t_swing, Contact::kSwing};
  }
  if (t_leg >= t_stance && t_leg < stride) {
    return {1.0 + (t_leg - t_stance) / t_swing, Contact::kSwing};
  }
  throw DomainError("leg clock outside (-T_stride, T_stride)");
}

LegPhase leg_phase(const PhaseClock& clock, Leg leg) {
  const double t_leg = clock.t_elapse_fl - clock.lag[index(leg)] * clock.t_stride();
  LegPhase p = phase_from_leg_clock(t_leg, clock.t_stance, clock.t_swing);
  // Guard against rounding landing exactly on 2.
  if (p.s >= 2.0) p.s = std::nextafter(2.0, 0.0);
  return p;
}

LegPhase leg_phase(const PhaseClock& clock, Leg leg, double t) {
  PhaseClock at = clock;
  const double stride = clock.t_stride();
  at.t_elapse_fl = t - std::floor(t / stride) * stride;
  if (at.t_elapse_fl >= stride) at.t_elapse_fl = 0.0;
  return leg_phase(at, leg);
}

double stand_angle(Leg leg, double x, double y) {
  const double a = std::atan(y / x);
  return (leg == Leg::FR || leg == Leg::BL) ? a : -a;
}

YawMemory::YawMemory(const StanceGeometry& stance) : previous(stance.f_stand) {}

double compute_phi_arc(Leg leg, const YawMemory& memory, const StanceGeometry& stance) {
  const std::size_t i = index(leg);
  const Vec3 g = memory.previous[i] - stance.f_stand[i];
  const double g_mag = std::hypot(g.x(), g.y());
  const double g_ang = g_mag < kYawEpsilon ? 0.0 : std::atan2(g.y(), g.x());
  return g_ang + stance.phi_stand[i] + kPi / 2.0;
}

FootTargets compose_foot_targets(const MotionCommand& cmd, const GaitParams& params,
                                 const PerLeg<double>& phases, const StanceGeometry& stance,
                                 YawMemory& memory, ControlPointTable table) {
  const double cr = std::cos(cmd.rho);
  const double sr = std::sin(cmd.rho);
  FootTargets out;
  for (Leg leg : kAllLegs) {
    const std::size_t i = index(leg);
    const double s = phases[i];
    const PlanarPoint tr = trajectory(s, cmd.l_span, params, table);
    const PlanarPoint yaw = trajectory(s, cmd.omega_bar, params, table);
    const double phi_arc = compute_phi_arc(leg, memory, stance);
    const Vec3 f_tr(tr.q * cr, tr.q * sr, tr.z);
    // The vertical profile comes from the translation curve alone; adding the
    // yaw curve's z as well would double the clearance and penetration.
    const Vec3 f_yaw(yaw.q * std::cos(phi_arc), yaw.q * std::sin(phi_arc), 0.0);
    out[i] = f_tr + f_yaw + stance.f_stand[i];
  }
  memory.previous = out;
  return out;
}

FootTargets compose_foot_targets(const MotionCommand& cmd, const GaitParams& params,
                                 const PhaseClock& clock, const StanceGeometry& stance,
                                 YawMemory& memory, ControlPointTable table) {
  PerLeg<double> phases{};
  for (Leg leg : kAllLegs) phases[index(leg)] = leg_phase(clock, leg).s;
  return compose_foot_targets(cmd, params, phases, stance, memory, table);
}

}  // namespace legkit::gait
