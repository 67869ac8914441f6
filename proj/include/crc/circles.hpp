#pragma once

// R-circles as solutions of the first-order system in (p, u, r, z):
//
//   gamma' = rho (u Z_1 + conj(u) Z_1bar)
//   u'     = u (6 i r rho - omega^1_1)
//   r'     = -1/4 (conj(u) phi^1 + u conj(phi^1)) + r/2 phi - z rho
//   z'     = 1/4 psi - i r (conj(u) phi^1 - u conj(phi^1)) + z phi + 2 i r^2 omega^1_1 + 8 r^3 rho
//
// with every form evaluated on gamma'. Along a solution omega(gamma') = 0 and
// conj(u) omega^1(gamma') - u conj(omega^1(gamma')) = 0.
//
// rho may vary with t: the system only involves rho dt, so a speed profile is
// a reparametrisation of the same curve.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crc/algebra.hpp"
#include "crc/cr_frame.hpp"

namespace crc {

inline constexpr double kUnitModulusTol = 1e-9;

struct CircleState {
  Point p;
  Complex u{1.0, 0.0};
  double r = 1.0;
  double z = 0.0;
};

struct CircleParams {
  double rho = 1.0;
  // When set, rho(t) replaces the constant rho.
  std::function<double(double)> speed;
  double t0 = 0.0;
  double t1 = 1.0;
  double step = 1e-3;
  double tol = 1e-9;

  double rho_at(double t) const { return speed ? speed(t) : rho; }
  bool variable_speed() const { return static_cast<bool>(speed); }
};

struct CircleDerivative {
  Tangent dp;
  Complex du{};
  double dr = 0.0;
  double dz = 0.0;
};

// rho (u Z_1 + conj(u) Z_1bar) = 2 rho Re(u Z_1).
inline Tangent circle_velocity(const SectionFrame& f, const Point& p, Complex u, double rho) {
  const ComplexTangent z1 = f.z1(p);
  return (z1.re * u.real() - z1.im * u.imag()) * (2.0 * rho);
}

inline CircleDerivative circle_rhs(const SectionFrame& f, const CircleState& st, double rho) {
  const Tangent gamma = circle_velocity(f, st.p, st.u, rho);
  const FormValues fv = f.forms(st.p, gamma);
  const Complex u = st.u, ub = std::conj(st.u);
  const double r = st.r, z = st.z;
  const Complex p1 = fv.phi1, p1b = std::conj(fv.phi1);

  CircleDerivative d;
  d.dp = gamma;
  d.du = u * (6.0 * kI * r * rho - fv.omega1_1);
  d.dr = (-0.25 * (ub * p1 + u * p1b) + 0.5 * r * fv.phi - z * rho).real();
  d.dz = (0.25 * fv.psi - kI * r * (ub * p1 - u * p1b) + z * fv.phi + 2.0 * kI * r * r * fv.omega1_1 +
          8.0 * r * r * r * rho)
             .real();
  return d;
}

// |omega(gamma')| and |conj(u) omega^1(gamma') - u conj(omega^1(gamma'))|.
struct ConstraintResidual {
  double omega = 0.0;
  double direction = 0.0;
};

inline ConstraintResidual constraint_residual(const SectionFrame& f, const CircleState& st, double rho) {
  const FormValues fv = f.forms(st.p, circle_velocity(f, st.p, st.u, rho));
  return {std::abs(fv.omega), std::abs(std::conj(st.u) * fv.omega1 - st.u * std::conj(fv.omega1))};
}

struct TrajectorySample {
  double t = 0.0;
  CircleState state;
  ConstraintResidual residual;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double rho = 1.0;  // constant speed, or rho(t0) for a speed profile
  bool variable_speed = false;
  double step = 0.0;
  double tol = 0.0;
  bool r_nonpositive = false;  // r reached <= 0; integration continued formally

  std::vector<std::string> flags() const {
    std::vector<std::string> out;
    if (variable_speed) out.emplace_back("variable_speed");
    if (r_nonpositive) out.emplace_back("r_nonpositive");
    return out;
  }

  double max_constraint_residual() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max({m, s.residual.omega, s.residual.direction});
    return m;
  }

  double max_unit_defect() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, std::abs(std::abs(s.state.u) - 1.0));
    return m;
  }
};

class StepUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using OdeVector = std::array<double, 7>;  // x1, y1, x2, Re u, Im u, r, z

inline OdeVector pack(const CircleState& s) { return {s.p.x1, s.p.y1, s.p.x2, s.u.real(), s.u.imag(), s.r, s.z}; }
inline CircleState unpack(const OdeVector& y) { return {{y[0], y[1], y[2]}, {y[3], y[4]}, y[5], y[6]}; }

inline OdeVector axpy(const OdeVector& y, double a, const OdeVector& k) {
  OdeVector r;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] + a * k[i];
  return r;
}

inline OdeVector rhs_vector(const SectionFrame& f, const CircleParams& cp, double t, const OdeVector& y) {
  const CircleDerivative d = circle_rhs(f, unpack(y), cp.rho_at(t));
  return {d.dp.dx1, d.dp.dy1, d.dp.dx2, d.du.real(), d.du.imag(), d.dr, d.dz};
}

// Classical fourth-order Runge-Kutta, `substeps` equal steps over [t, t + h].
inline OdeVector rk4(const SectionFrame& f, const CircleParams& cp, double t, OdeVector y, double h, int substeps) {
  const double dt = h / substeps;
  for (int i = 0; i < substeps; ++i) {
    const double ti = t + i * dt;
    const OdeVector k1 = rhs_vector(f, cp, ti, y);
    const OdeVector k2 = rhs_vector(f, cp, ti + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const OdeVector k3 = rhs_vector(f, cp, ti + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const OdeVector k4 = rhs_vector(f, cp, ti + dt, axpy(y, dt, k3));
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return y;
}

inline double max_abs_diff(const OdeVector& a, const OdeVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace detail

inline void validate(const CircleState& st) {
  if (!st.p.finite() || !std::isfinite(st.r) || !std::isfinite(st.z) || !std::isfinite(std::abs(st.u))) {
    throw std::invalid_argument("CircleState: non-finite component");
  }
  if (std::abs(std::abs(st.u) - 1.0) > kUnitModulusTol) throw std::invalid_argument("CircleState: |u| must be 1");
  if (!(st.r > 0.0)) throw std::invalid_argument("CircleState: r must be positive initially");
}

inline void validate(const CircleParams& cp) {
  if (!(cp.step > 0.0)) throw std::invalid_argument("CircleParams: step must be positive");
  if (!(cp.tol > 0.0)) throw std::invalid_argument("CircleParams: tol must be positive");
  if (!std::isfinite(cp.t0) || !std::isfinite(cp.t1)) throw std::invalid_argument("CircleParams: non-finite span");
  if (!cp.speed && (cp.rho == 0.0 || !std::isfinite(cp.rho))) {
    throw std::invalid_argument("CircleParams: rho must be finite and nonzero");
  }
}

// Samples on the uniform grid t0, t0 + h, ..., t1 (h within rounding of
// `step`). t1 < t0 integrates backwards; samples are always returned in
// increasing t. Each grid interval is covered by RK4
// with n and 2n substeps, doubling n until the two agree within tol; the 2n
// result is kept and u is projected back onto |u| = 1.
inline Trajectory integrate_circle(const SectionFrame& f, const CircleState& st0, const CircleParams& cp) {
  validate(st0);
  validate(cp);

  Trajectory traj;
  traj.rho = cp.rho_at(cp.t0);
  traj.variable_speed = cp.variable_speed();
  traj.tol = cp.tol;

  const double span = cp.t1 - cp.t0;
  const auto intervals = static_cast<long>(std::llround(std::abs(span) / cp.step));
  const double h = intervals == 0 ? 0.0 : span / static_cast<double>(intervals);
  traj.step = std::abs(h);

  auto record = [&](double t, const CircleState& s) {
    if (s.r <= 0.0) traj.r_nonpositive = true;
    traj.samples.push_back({t, s, constraint_residual(f, s, cp.rho_at(t))});
  };

  CircleState state = st0;
  record(cp.t0, state);
  if (intervals == 0) return traj;
  traj.samples.reserve(static_cast<std::size_t>(intervals) + 1);

  constexpr int kMaxSubsteps = 1 << 20;
  int substeps = 1;
  for (long i = 0; i < intervals; ++i) {
    const double t = cp.t0 + static_cast<double>(i) * h;
    const detail::OdeVector y = detail::pack(state);
    detail::OdeVector fine;
    for (;;) {
      const detail::OdeVector coarse = detail::rk4(f, cp, t, y, h, substeps);
      fine = detail::rk4(f, cp, t, y, h, 2 * substeps);
      const double err = detail::max_abs_diff(coarse, fine);
      if (!std::isfinite(err)) throw std::runtime_error("integrate_circle: non-finite state");
      if (err <= cp.tol) {
        // Step error scales like (h/n)^5: relax when far below tol.
        if (err < cp.tol / 64.0 && substeps > 1) substeps /= 2;
        break;
      }
      substeps *= 2;
      if (substeps > kMaxSubsteps) throw StepUnderflow("integrate_circle: step size underflow");
    }
    state = detail::unpack(fine);
    state.u /= std::abs(state.u);
    const double t_next = (i + 1 == intervals) ? cp.t1 : cp.t0 + static_cast<double>(i + 1) * h;
    record(t_next, state);
  }
  if (h < 0.0) std::reverse(traj.samples.begin(), traj.samples.end());
  return traj;
}

// Integrates both ways from st0 given at t_init in [cp.t0, cp.t1]; one merged
// trajectory in increasing t.
inline Trajectory integrate_circle_through(const SectionFrame& f, const CircleState& st0, double t_init,
                                           const CircleParams& cp) {
  if (!(t_init >= std::min(cp.t0, cp.t1) && t_init <= std::max(cp.t0, cp.t1))) {
    throw std::invalid_argument("integrate_circle_through: t_init outside the span");
  }
  CircleParams back = cp, fwd = cp;
  back.t0 = fwd.t0 = t_init;
  back.t1 = std::min(cp.t0, cp.t1);
  fwd.t1 = std::max(cp.t0, cp.t1);
  Trajectory a = integrate_circle(f, st0, back);
  const Trajectory b = integrate_circle(f, st0, fwd);
  a.samples.pop_back();
  a.samples.insert(a.samples.end(), b.samples.begin(), b.samples.end());
  a.rho = b.rho;
  a.step = std::max(a.step, b.step);
  a.r_nonpositive = a.r_nonpositive || b.r_nonpositive;
  return a;
}

// Per-sample constraint residuals of an existing trajectory.
inline std::vector<ConstraintResidual> constraint_residuals(const SectionFrame& f, const Trajectory& traj,
                                                            const CircleParams& cp) {
  std::vector<ConstraintResidual> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.push_back(constraint_residual(f, s.state, cp.rho_at(s.t)));
  return out;
}

inline std::vector<ConstraintResidual> constraint_residuals(const SectionFrame& f, const Trajectory& traj,
                                                            double rho) {
  CircleParams cp;
  cp.rho = rho;
  return constraint_residuals(f, traj, cp);
}

// Splits a contact direction as v = rho (u Z_1 + conj(u) Z_1bar) with rho > 0,
// |u| = 1: rho = |omega^1(v)|, u = omega^1(v) / rho.
inline std::pair<CircleState, double> init_from_direction(const SectionFrame& f, const Point& p, const Tangent& v,
                                                          double r0, double z0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("init_from_direction: r0 must be positive");
  if (!(v.norm() > 0.0)) throw std::invalid_argument("init_from_direction: zero direction");
  const FormValues fv = f.forms(p, v);
  if (std::abs(fv.omega) > 1e-10 * std::max(1.0, v.norm())) {
    throw std::invalid_argument("init_from_direction: direction is not horizontal");
  }
  const double rho = std::abs(fv.omega1);
  if (!(rho > 0.0)) throw std::invalid_argument("init_from_direction: degenerate direction");
  return {CircleState{p, fv.omega1 / rho, r0, z0}, rho};
}

// ---------------------------------------------------------------------------
// Closed-form circle on the quadric through z1 = -i, x2 = 0
// ---------------------------------------------------------------------------

inline Point quadric_closed_form(double t) {
  const double t2 = t * t;
  const double d = 1.0 + 6.0 * t2 + t2 * t2;
  return {2.0 * t * (1.0 - t2) / d, -(1.0 - t2) * (1.0 + t2) / d, -4.0 * t * (1.0 + t2) / d};
}

// |omega^1(gamma')| along the closed form: the curve is not parametrised at
// constant speed.
inline double quadric_closed_form_speed(double t) {
  const double t2 = t * t;
  return 2.0 / std::sqrt(1.0 + 6.0 * t2 + t2 * t2);
}

// (u, r, z) along the closed form under the speed profile above. At t = 0:
// u = 1, r = 1/2, z = 0.
inline CircleState quadric_closed_form_state(double t) {
  const double t2 = t * t;
  const double d = 1.0 + 6.0 * t2 + t2 * t2;
  const Complex num{1.0 + t2, 2.0 * t};  // t^2 + 2 i t + 1
  const Complex den{1.0 + t2, -2.0 * t};  // t^2 - 2 i t + 1
  CircleState s;
  s.p = quadric_closed_form(t);
  s.u = std::sqrt(d) * num / (den * den);
  s.r = (1.0 - t2) / (2.0 * std::sqrt(d));
  s.z = 2.0 * t * (1.0 + t2) / d;
  return s;
}

// Initial data of the closed form at t = 0 with the given r(0).
inline CircleState quadric_golden_state(double r0) { return {{0.0, -1.0, 0.0}, {1.0, 0.0}, r0, 0.0}; }

inline double max_closed_form_deviation(const Trajectory& traj) {
  double m = 0.0;
  for (const auto& s : traj.samples) m = std::max(m, (s.state.p - quadric_closed_form(s.t)).norm());
  return m;
}

// ---------------------------------------------------------------------------
// Circle residual of sampled curve data
// ---------------------------------------------------------------------------

struct CurveSample {
  double t = 0.0;
  Point p;
};

struct RecoveredDirection {
  double t = 0.0;
  double rho = 0.0;
  Complex u{};
};

struct CircleResidual {
  double horizontality = 0.0;  // max |omega(g')| / (|omega(g')| + |omega^1(g')|)
  double r_leak = 0.0;         // max |Im r| of the recovered r
  double z_equation = 0.0;     // max |z-equation residual| / rho
  std::vector<RecoveredDirection> directions;

  double total() const { return horizontality + r_leak + z_equation; }
};

inline constexpr double kDefaultCircleFdStep = 2e-3;

// Scores how far sampled curve data is from solving the circle system: gamma'
// by finite differences, (rho, u) from omega^1(gamma'), r from the u-equation,
// z from the r-equation, then the z-equation residual. Every derivative is a
// 5-point central stencil with spacing ~ fd_step (a whole multiple of the grid),
// so 16 strides of samples are consumed at the ends.
inline CircleResidual circle_residual(const SectionFrame& f, const std::vector<CurveSample>& samples,
                                      double fd_step = kDefaultCircleFdStep) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("circle_residual: too few samples");
  const double dt = samples[1].t - samples[0].t;
  if (!(std::abs(dt) > 0.0)) throw std::invalid_argument("circle_residual: repeated sample times");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs((samples[i].t - samples[i - 1].t) - dt) > 1e-9 * std::abs(dt)) {
      throw std::invalid_argument("circle_residual: samples must lie on a uniform grid");
    }
  }
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(fd_step / std::abs(dt))));
  if (n < 16 * stride + 1) throw std::invalid_argument("circle_residual: too few samples for the stencils");
  const double h = static_cast<double>(stride) * dt;

  auto d5 = [&](const auto& v, std::size_t i) {
    return (v[i - 2 * stride] - 8.0 * v[i - stride] + 8.0 * v[i + stride] - v[i + 2 * stride]) / (12.0 * h);
  };

  CircleResidual out;

  // Level 1: velocity, forms on it, (rho, u).
  std::vector<Tangent> vel(n);
  std::vector<FormValues> fv(n);
  std::vector<double> rho(n, 0.0);
  std::vector<Complex> u(n);
  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = samples[i].p;
  auto d5_point = [&](std::size_t i) {
    const Tangent a = pts[i + stride] - pts[i - stride];
    const Tangent b = pts[i + 2 * stride] - pts[i - 2 * stride];
    return (a * 8.0 - b) * (1.0 / (12.0 * h));
  };
  bool degenerate_direction = false;
  for (std::size_t i = 2 * stride; i + 2 * stride < n; ++i) {
    vel[i] = d5_point(i);
    if (!(vel[i].norm() > 1e-10)) throw std::domain_error("circle_residual: degenerate velocity");
    fv[i] = f.forms(pts[i], vel[i]);
    const double om = std::abs(fv[i].omega);
    rho[i] = std::abs(fv[i].omega1);
    out.horizontality = std::max(out.horizontality, om / (om + rho[i]));
    if (!(rho[i] > 1e-12 * vel[i].norm())) {
      degenerate_direction = true;
      continue;
    }
    u[i] = fv[i].omega1 / rho[i];
    out.directions.push_back({samples[i].t, rho[i], u[i]});
  }
  // Vertical velocity: no direction to follow, the horizontality term says it all.
  if (degenerate_direction) return out;

  // Level 2: r from u' / u = 6 i r rho - omega^1_1.
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 4 * stride; i + 4 * stride < n; ++i) {
    const Complex rc = (d5(u, i) / u[i] + fv[i].omega1_1) / (6.0 * kI * rho[i]);
    out.r_leak = std::max(out.r_leak, std::abs(rc.imag()));
    r[i] = rc.real();
  }

  // Level 3: z from the r-equation.
  std::vector<double> z(n, 0.0);
  for (std::size_t i = 6 * stride; i + 6 * stride < n; ++i) {
    const Complex ub = std::conj(u[i]);
    const double forcing = (-0.25 * (ub * fv[i].phi1 + u[i] * std::conj(fv[i].phi1))).real() + 0.5 * r[i] * fv[i].phi;
    z[i] = (forcing - d5(r, i)) / rho[i];
  }

  // Level 4: the z-equation.
  for (std::size_t i = 8 * stride; i + 8 * stride < n; ++i) {
    const Complex ub = std::conj(u[i]);
    const Complex p1 = fv[i].phi1, p1b = std::conj(fv[i].phi1);
    const double expected = (0.25 * fv[i].psi - kI * r[i] * (ub * p1 - u[i] * p1b) + z[i] * fv[i].phi +
                             2.0 * kI * r[i] * r[i] * fv[i].omega1_1 + 8.0 * r[i] * r[i] * r[i] * rho[i])
                                .real();
    const double res = std::abs(d5(z, i) - expected) / rho[i];
    if (std::isnan(res)) {
      out.z_equation = res;
      break;
    }
    out.z_equation = std::max(out.z_equation, res);
  }
  return out;
}

inline std::vector<CurveSample> curve_samples(const Trajectory& traj) {
  std::vector<CurveSample> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.push_back({s.t, s.state.p});
  return out;
}

}  // namespace crc
