#pragma once

// Numerical verification of the Cartan-connection machinery:
//   * structure equations and flatness d(pi) + pi^pi = 0 on flat frames,
//   * the closed-form gauge formulas (Ad_{h^-1} pi entries, h^-1 dh, and the
//     transformed forms) against direct 3x3 matrix computation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crc/algebra.hpp"
#include "crc/cr_frame.hpp"
#include "crc/sampling.hpp"

namespace crc {

inline constexpr double kDefaultFdStep = 1e-5;
inline constexpr double kStructureTol = 1e-6;
inline constexpr double kGaugeTol = 1e-10;

// ---------------------------------------------------------------------------
// Residual reports
// ---------------------------------------------------------------------------

struct EquationResidual {
  std::string equation;
  double max_residual = 0.0;
};

class ResidualReport {
 public:
  ResidualReport(std::string suite, double tol) : suite_(std::move(suite)), tol_(tol) {}

  // Folds one observation of `equation` into its running maximum. NaN is
  // sticky so that a broken sample can never be hidden by a later one.
  void record(const std::string& equation, double residual) {
    for (auto& e : equations_) {
      if (e.equation == equation) {
        if (std::isnan(residual) || residual > e.max_residual) e.max_residual = residual;
        return;
      }
    }
    equations_.push_back({equation, residual});
  }

  // Folds in another report's maxima; the sample count is left to the caller.
  void merge(const ResidualReport& other) {
    for (const auto& e : other.equations_) record(e.equation, e.max_residual);
  }

  void add_samples(int n) { samples_ += n; }

  const std::string& suite() const { return suite_; }
  double tol() const { return tol_; }
  int samples() const { return samples_; }
  const std::vector<EquationResidual>& equations() const { return equations_; }

  bool passes(const EquationResidual& e) const { return e.max_residual <= tol_; }

  bool pass() const {
    return std::all_of(equations_.begin(), equations_.end(), [&](const auto& e) { return passes(e); });
  }

  double max_residual() const {
    double m = 0.0;
    for (const auto& e : equations_) {
      if (std::isnan(e.max_residual)) return e.max_residual;
      m = std::max(m, e.max_residual);
    }
    return m;
  }

  double residual(const std::string& equation) const {
    for (const auto& e : equations_)
      if (e.equation == equation) return e.max_residual;
    throw std::out_of_range("ResidualReport: no equation '" + equation + "'");
  }

 private:
  std::string suite_;
  double tol_;
  int samples_ = 0;
  std::vector<EquationResidual> equations_;
};

// ---------------------------------------------------------------------------
// Exterior derivatives
// ---------------------------------------------------------------------------

// d(eta)(u, v) = u(eta(v)) - v(eta(u)) with u, v extended as constant-coefficient
// fields (so [u, v] = 0), by central differences. O(h^2).
template <class Form>
auto exterior_derivative_fd(const Form& form, const Point& p, const Tangent& u, const Tangent& v, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("exterior_derivative_fd: h must be positive");
  const auto du = (form(p + u * h, v) - form(p + u * -h, v)) * (0.5 / h);
  const auto dv = (form(p + v * h, u) - form(p + v * -h, u)) * (0.5 / h);
  return du - dv;
}

enum class DerivativeMode { FiniteDifference, Analytic };

// Exterior derivatives of all six section forms on (u, v) at p.
inline FormValues form_derivatives(const SectionFrame& f, const Point& p, const Tangent& u, const Tangent& v,
                                   DerivativeMode mode = DerivativeMode::FiniteDifference,
                                   double h = kDefaultFdStep) {
  if (mode == DerivativeMode::Analytic) return f.derivatives(p, u, v);
  auto forms = [&f](const Point& q, const Tangent& w) { return f.forms(q, w); };
  return exterior_derivative_fd(forms, p, u, v, h);
}

// (a ^ b)(u, v) from the values of a and b on u and v.
inline Complex wedge(Complex a_u, Complex a_v, Complex b_u, Complex b_v) { return a_u * b_v - a_v * b_u; }

inline constexpr std::array<const char*, 6> kStructureEquationNames = {"d_omega",    "d_omega1", "d_phi",
                                                                       "d_omega1_1", "d_phi1",   "d_psi"};

// Right-hand sides of the six structure equations with vanishing curvature
// (Q^1_1bar = R_1 = 0), in the order of kStructureEquationNames. `a` holds the
// form values on u, `b` on v.
inline std::array<Complex, 6> structure_rhs(const FormValues& a, const FormValues& b) {
  auto W = [](Complex au, Complex bu, Complex av, Complex bv) { return wedge(au, av, bu, bv); };
  const Complex w_u = a.omega, w_v = b.omega;
  const Complex w1_u = a.omega1, w1_v = b.omega1;
  const Complex w1b_u = std::conj(a.omega1), w1b_v = std::conj(b.omega1);
  const Complex w11_u = a.omega1_1, w11_v = b.omega1_1;
  const Complex ph_u = a.phi, ph_v = b.phi;
  const Complex p1_u = a.phi1, p1_v = b.phi1;
  const Complex p1b_u = std::conj(a.phi1), p1b_v = std::conj(b.phi1);
  const Complex ps_u = a.psi, ps_v = b.psi;

  std::array<Complex, 6> r;
  r[0] = W(w_u, ph_u, w_v, ph_v) + kI * W(w1_u, w1b_u, w1_v, w1b_v);
  r[1] = 0.5 * W(w1_u, ph_u, w1_v, ph_v) + W(w1_u, w11_u, w1_v, w11_v) + W(w_u, p1_u, w_v, p1_v);
  r[2] = kI * W(w1_u, p1b_u, w1_v, p1b_v) - kI * W(w1b_u, p1_u, w1b_v, p1_v) + W(w_u, ps_u, w_v, ps_v);
  r[3] = 1.5 * kI * W(w1_u, p1b_u, w1_v, p1b_v) + 1.5 * kI * W(w1b_u, p1_u, w1b_v, p1_v);
  r[4] = 0.5 * W(ph_u, p1_u, ph_v, p1_v) - W(w11_u, p1_u, w11_v, p1_v) + 0.5 * W(w1_u, ps_u, w1_v, ps_v);
  r[5] = 2.0 * kI * W(p1_u, p1b_u, p1_v, p1b_v) + W(ph_u, ps_u, ph_v, ps_v);
  return r;
}

inline std::array<Complex, 6> as_equation_order(const FormValues& d) {
  return {d.omega, d.omega1, d.phi, d.omega1_1, d.phi1, d.psi};
}

inline constexpr std::array<std::pair<int, int>, 3> kBasisPairs = {{{0, 1}, {0, 2}, {1, 2}}};

// Structure-equation residuals at p over the three pairs of frame vectors.
// The frame must be flat: curvature terms are taken to be zero.
inline ResidualReport structure_residuals(const SectionFrame& f, const Point& p, double h = kDefaultFdStep,
                                          DerivativeMode mode = DerivativeMode::FiniteDifference,
                                          double tol = kStructureTol) {
  ResidualReport report("structure", tol);
  const auto basis = f.real_basis(p);
  for (const auto& [i, j] : kBasisPairs) {
    const auto lhs = as_equation_order(form_derivatives(f, p, basis[i], basis[j], mode, h));
    const auto rhs = structure_rhs(f.forms(p, basis[i]), f.forms(p, basis[j]));
    for (std::size_t k = 0; k < 6; ++k) report.record(kStructureEquationNames[k], std::abs(lhs[k] - rhs[k]));
  }
  report.add_samples(1);
  return report;
}

// max over frame-vector pairs of |d(pi)(u,v) + pi(u)pi(v) - pi(v)pi(u)|. Zero
// curvature is assumed, so this is only meaningful on flat frames.
inline double flatness_residual(const SectionFrame& f, const Point& p, double h = kDefaultFdStep,
                                DerivativeMode mode = DerivativeMode::FiniteDifference) {
  const auto basis = f.real_basis(p);
  double worst = 0.0;
  for (const auto& [i, j] : kBasisPairs) {
    const ComplexMatrix3 dpi = connection_matrix(form_derivatives(f, p, basis[i], basis[j], mode, h));
    const ComplexMatrix3 pu = connection_matrix(f, p, basis[i]);
    const ComplexMatrix3 pv = connection_matrix(f, p, basis[j]);
    worst = std::max(worst, (dpi + pu * pv - pv * pu).max_abs());
  }
  return worst;
}

// The quadric with omega^1 = (1 + x1) dz1 (and Z_1 rescaled to stay dual).
// Not flat; residual suites must notice.
inline SectionFrame fault_injected_quadric_frame() {
  const SectionFrame q = quadric_frame();
  auto forms = [q](const Point& p, const Tangent& v) {
    FormValues fv = q.forms(p, v);
    fv.omega1 *= (1.0 + p.x1);
    return fv;
  };
  auto z0 = [q](const Point& p) { return q.z0(p); };
  auto z1 = [q](const Point& p) {
    ComplexTangent z = q.z1(p);
    const double k = 1.0 / (1.0 + p.x1);
    return ComplexTangent{z.re * k, z.im * k};
  };
  return SectionFrame("quadric_fault_injected", forms, z0, z1);
}

// ---------------------------------------------------------------------------
// Gauge formulas
// ---------------------------------------------------------------------------

// Closed-form entries of B = Ad_{h^-1} pi for h = h_matrix(hp).
struct BEntries {
  Complex b31, b21, b11, b22, b23, b13;
  Complex b11_plus_half_b22;  // the stated combination, from its own formula
};

inline BEntries b_entries_formula(const HParams& hp, const FormValues& fv) {
  const Complex a = hp.a, ab = std::conj(a);
  const Complex b = hp.b, bb = std::conj(b);
  const double s = hp.s;
  const Complex bbb = b * bb;
  const Complex aab = a * ab;
  const Complex w = fv.omega, w1 = fv.omega1, w1b = std::conj(fv.omega1), w11 = fv.omega1_1;
  const Complex phi = fv.phi, p1 = fv.phi1, p1b = std::conj(fv.phi1), psi = fv.psi;
  const Complex i = kI;

  BEntries e;
  e.b31 = 2.0 * aab * w;
  e.b21 = a * a / ab * w1 - 2.0 * a * a * b * w;
  e.b11 = -w11 / 3.0 - 0.5 * phi + 2.0 * i * a * bb * w1 - 2.0 * aab * (s + i * bbb) * w;
  e.b22 = 2.0 / 3.0 * (w11 - 3.0 * i * a * bb * w1 - 3.0 * i * ab * b * w1b + 6.0 * i * aab * bbb * w);
  e.b23 = 0.5 * (a / (ab * ab) * p1 - b * a / ab * phi + 2.0 * a / ab * b * w11 +
                 2.0 * a * a / ab * (s - i * bbb) * w1 - 4.0 * i * a * b * b * w1b - 4.0 * a * a * b * (s - i * bbb) * w);
  e.b13 = -0.25 * (psi / aab + 4.0 * i / a * b * p1b - 4.0 * i / ab * bb * p1 - 8.0 * i * bbb * w11 -
                   8.0 * i * a * bb * (s - i * bbb) * w1 + 8.0 * i * ab * b * (s + i * bbb) * w1b + 4.0 * s * phi +
                   8.0 * aab * (s * s + bbb * bbb) * w);
  e.b11_plus_half_b22 = -0.5 * (phi - 2.0 * i * a * bb * w1 + 2.0 * i * ab * b * w1b + 4.0 * aab * s * w);
  return e;
}

// Compares every closed-form entry with h^-1 pi h computed directly.
inline ResidualReport ad_entry_check(const HParams& hp, const FormValues& fv, double tol = kGaugeTol) {
  const ComplexMatrix3 direct = adjoint(h_matrix(hp), connection_matrix(fv));
  const BEntries f = b_entries_formula(hp, fv);
  ResidualReport report("ad_entries", tol);
  report.record("B31", std::abs(direct(2, 0) - f.b31));
  report.record("B21", std::abs(direct(1, 0) - f.b21));
  report.record("B11", std::abs(direct(0, 0) - f.b11));
  report.record("B22", std::abs(direct(1, 1) - f.b22));
  report.record("B23", std::abs(direct(1, 2) - f.b23));
  report.record("B13", std::abs(direct(0, 2) - f.b13));
  report.record("B11+B22/2", std::abs(direct(0, 0) + 0.5 * direct(1, 1) - f.b11_plus_half_b22));
  report.add_samples(1);
  return report;
}

// Differentials of the isotropy parameters on one tangent vector.
struct HDifferentials {
  Complex da{};
  Complex db{};
  double ds = 0.0;
};

// dh: entrywise derivative of h_matrix along (da, db, ds).
inline ComplexMatrix3 h_differential(const HParams& hp, const HDifferentials& d) {
  const Complex a = hp.a, ab = std::conj(a), b = hp.b, bb = std::conj(b);
  const Complex da = d.da, dab = std::conj(d.da), db = d.db, dbb = std::conj(d.db);
  const Complex bbb = b * bb, dbbb = db * bb + b * dbb;
  ComplexMatrix3 m;
  m(0, 0) = da;
  m(0, 1) = -2.0 * kI * (dab * bb + ab * dbb);
  m(0, 2) = da * (hp.s - kI * bbb) + a * (d.ds - kI * dbbb);
  m(1, 1) = dab / a - ab * da / (a * a);
  m(1, 2) = db;
  m(2, 2) = -dab / (ab * ab);
  return m;
}

// h^-1 dh by matrix product.
inline ComplexMatrix3 maurer_cartan_direct(const HParams& hp, const HDifferentials& d) {
  return h_matrix(hp).inverse() * h_differential(hp, d);
}

// h^-1 dh from its closed form.
inline ComplexMatrix3 maurer_cartan_formula(const HParams& hp, const HDifferentials& d) {
  const Complex a = hp.a, ab = std::conj(a), b = hp.b, bb = std::conj(b);
  const Complex da = d.da, dab = std::conj(d.da), db = d.db, dbb = std::conj(d.db);
  const double s = hp.s;
  const Complex bbb = b * bb;
  ComplexMatrix3 m;
  m(0, 0) = da / a;
  m(0, 1) = -2.0 * kI * (ab * bb * da / (a * a) + ab / a * dbb);
  m(0, 2) = d.ds + kI * bb * db - kI * b * dbb + (s - kI * bbb) * da / a + (s + kI * bbb) * dab / ab;
  m(1, 1) = -da / a + dab / ab;
  m(1, 2) = a / ab * db + a / (ab * ab) * b * dab;
  m(2, 2) = -dab / ab;
  return m;
}

// Transformed forms read off h^-1 dh + Ad_{h^-1} pi, both computed by
// direct matrix products.
inline FormValues tilde_forms_direct(const HParams& hp, const FormValues& fv, const HDifferentials& d) {
  return read_forms(maurer_cartan_direct(hp, d) + adjoint(h_matrix(hp), connection_matrix(fv)));
}

// The same transformed forms from their general closed-form list.
inline FormValues tilde_forms_general_formula(const HParams& hp, const FormValues& fv, const HDifferentials& d) {
  const BEntries e = b_entries_formula(hp, fv);
  const Complex a = hp.a, ab = std::conj(a), b = hp.b, bb = std::conj(b);
  const Complex da = d.da, dab = std::conj(d.da), db = d.db, dbb = std::conj(d.db);
  const double s = hp.s;
  const Complex bbb = b * bb;

  FormValues t;
  t.omega = (a * ab * fv.omega).real();
  t.omega1 = e.b21;
  t.phi = (-2.0 * e.b11_plus_half_b22 + (-da / a - dab / ab)).real();
  t.omega1_1 = Complex{0.0, (1.5 * e.b22 + 1.5 * (-da / a + dab / ab)).imag()};
  t.phi1 = 2.0 * e.b23 + 2.0 * (a / ab * db + a / (ab * ab) * b * dab);
  t.psi = (-4.0 * e.b13 -
           4.0 * (d.ds + kI * bb * db - kI * b * dbb + (s - kI * bbb) * da / a + (s + kI * bbb) * dab / ab))
              .real();
  return t;
}

// The section b = conj(a)/a with a = r v, r > 0, |v| = 1.
struct SectionGauge {
  double r = 1.0;
  Complex v{1.0, 0.0};
  double s = 0.0;
};

// Differentials of the section parameters; |v| = 1 forces dv/v imaginary.
struct GaugeDifferentials {
  double dr = 0.0;
  Complex dv{};
  double ds = 0.0;
};

inline void validate(const SectionGauge& g) {
  if (!(g.r > 0.0)) throw std::invalid_argument("SectionGauge: r must be positive");
  if (std::abs(std::abs(g.v) - 1.0) > 1e-12) throw std::invalid_argument("SectionGauge: |v| must be 1");
}

inline void validate(const SectionGauge& g, const GaugeDifferentials& d) {
  validate(g);
  if (std::abs((d.dv * std::conj(g.v)).real()) > 1e-12 * std::max(1.0, std::abs(d.dv))) {
    throw std::invalid_argument("GaugeDifferentials: Re(dv conj(v)) must vanish");
  }
}

inline HParams to_hparams(const SectionGauge& g) {
  validate(g);
  const Complex a = g.r * g.v;
  return {a, std::conj(a) / a, g.s};
}

inline HDifferentials to_hdifferentials(const SectionGauge& g, const GaugeDifferentials& d) {
  validate(g, d);
  const Complex a = g.r * g.v;
  const Complex da = d.dr * g.v + g.r * d.dv;
  const Complex dab = std::conj(da);
  return {da, dab / a - std::conj(a) * da / (a * a), d.ds};
}

// Transformed forms for the section b = conj(a)/a, a = r v.
inline FormValues tilde_forms_formula(const SectionGauge& g, const FormValues& fv, const GaugeDifferentials& d) {
  validate(g, d);
  const double r = g.r, s = g.s;
  const Complex v3 = g.v * g.v * g.v, vb3 = std::conj(v3);
  const Complex w = fv.omega, w1 = fv.omega1, w1b = std::conj(fv.omega1), w11 = fv.omega1_1;
  const Complex phi = fv.phi, p1 = fv.phi1, p1b = std::conj(fv.phi1), psi = fv.psi;
  const Complex i = kI;
  const double dr_r = d.dr / r;
  const Complex dv_v = d.dv / g.v;

  FormValues t;
  t.omega = r * r * fv.omega;
  t.omega1 = r * v3 * w1 - 2.0 * r * r * w;
  t.phi = (phi - 2.0 * i * r * v3 * w1 + 2.0 * i * r * vb3 * w1b + 4.0 * r * r * s * w - 2.0 * dr_r).real();
  t.omega1_1 =
      Complex{0.0, (w11 - 3.0 * i * r * (v3 * w1 + vb3 * w1b) + 6.0 * i * r * r * w - 3.0 * dv_v).imag()};
  t.phi1 = v3 * p1 / r + 2.0 * w11 - phi + 2.0 * r * (s - i) * v3 * w1 - 4.0 * i * r * vb3 * w1b -
           4.0 * r * r * (s - i) * w + 2.0 * dr_r - 6.0 * dv_v;
  t.psi = (psi / (r * r) - 4.0 * i / r * v3 * p1 + 4.0 * i / r * vb3 * p1b - 8.0 * i * w11 + 4.0 * s * phi -
           8.0 * r * v3 * (1.0 + i * s) * w1 - 8.0 * r * vb3 * (1.0 - i * s) * w1b + 8.0 * r * r * (s * s + 1.0) * w -
           4.0 * (d.ds + 2.0 * s * dr_r - 6.0 * i * dv_v))
              .real();
  return t;
}

// Slotwise maximum difference.
inline double form_values_distance(const FormValues& a, const FormValues& b) { return (a - b).max_abs(); }

// ---------------------------------------------------------------------------
// Seeded suites (shared by tests, acceptance and the CLI)
// ---------------------------------------------------------------------------

inline ResidualReport su21_suite(int samples, std::uint64_t seed, double tol = kDefaultMembershipTol) {
  ResidualReport report("su21", tol);
  for (int k = 0; k < samples; ++k) {
    SampleStream rng(seed, static_cast<std::uint64_t>(k));
    HParams hp;
    hp.a = rng.uniform(0.5, 2.0) * rng.unit_complex();
    hp.b = rng.complex_in_disk(2.0);
    hp.s = rng.uniform(-2.0, 2.0);
    report.record("h_matrix_in_group", su21_group_defect(h_matrix(hp)));

    // max-entry norm exactly 5
    ComplexMatrix3 x = rng.su21_element_sample(1.0);
    x = x * (5.0 / x.max_abs());
    report.record("exp_in_group", su21_group_defect(mat_exp(x)));
    report.record("exp_inverse", max_abs_diff(mat_exp(x) * mat_exp(-x), ComplexMatrix3::identity()));

    const ComplexMatrix3 y = rng.su21_element_sample(1.0);
    report.record("bracket_closure", su21_algebra_defect(bracket(x, y)));
    report.record("adjoint_closure", su21_algebra_defect(adjoint(h_matrix(hp), y)));
  }
  report.add_samples(samples);
  return report;
}

inline ResidualReport structure_suite(const SectionFrame& f, int samples, std::uint64_t seed,
                                      double h = kDefaultFdStep,
                                      DerivativeMode mode = DerivativeMode::FiniteDifference,
                                      double tol = kStructureTol) {
  ResidualReport report("structure", tol);
  for (int k = 0; k < samples; ++k) {
    SampleStream rng(seed, static_cast<std::uint64_t>(k));
    report.merge(structure_residuals(f, rng.point_in_box(), h, mode, tol));
  }
  report.add_samples(samples);
  return report;
}

inline ResidualReport flatness_suite(const SectionFrame& f, int samples, std::uint64_t seed,
                                     double h = kDefaultFdStep,
                                     DerivativeMode mode = DerivativeMode::FiniteDifference,
                                     double tol = kStructureTol) {
  ResidualReport report("flatness", tol);
  for (int k = 0; k < samples; ++k) {
    SampleStream rng(seed, static_cast<std::uint64_t>(k));
    report.record("d_pi+pi^pi", flatness_residual(f, rng.point_in_box(), h, mode));
  }
  report.add_samples(samples);
  return report;
}

// The fault-injected frame must show a flatness residual above `threshold` at
// every sample (x1 kept away from the -1 singularity). Reported as
// threshold / observed, so the report passes iff every ratio is <= 1.
inline ResidualReport fault_injection_suite(int samples, std::uint64_t seed, double threshold = 1e-3,
                                            double h = kDefaultFdStep) {
  const SectionFrame faulty = fault_injected_quadric_frame();
  ResidualReport report("fault_injection", 1.0);
  for (int k = 0; k < samples; ++k) {
    SampleStream rng(seed, static_cast<std::uint64_t>(k));
    Point p = rng.point_in_box();
    p.x1 *= 0.5;
    const double flat = flatness_residual(faulty, p, h);
    const double structure = structure_residuals(faulty, p, h).max_residual();
    report.record("flatness_threshold_over_observed", threshold / flat);
    report.record("structure_threshold_over_observed", threshold / structure);
  }
  report.add_samples(samples);
  return report;
}

inline ResidualReport gauge_suite(int samples, std::uint64_t seed, double tol = kGaugeTol) {
  ResidualReport report("gauge", tol);
  for (int k = 0; k < samples; ++k) {
    SampleStream rng(seed, static_cast<std::uint64_t>(k));
    const HParams hp = rng.hparams();
    const FormValues fv = rng.form_values();
    report.merge(ad_entry_check(hp, fv, tol));

    const HDifferentials hd{rng.complex_in_disk(1.0), rng.complex_in_disk(1.0), rng.uniform(-1.0, 1.0)};
    report.record("h^-1dh", max_abs_diff(maurer_cartan_direct(hp, hd), maurer_cartan_formula(hp, hd)));
    const ComplexMatrix3 pi_tilde =
        maurer_cartan_direct(hp, hd) + adjoint(h_matrix(hp), connection_matrix(fv));
    report.record("pi_tilde_in_algebra", su21_algebra_defect(pi_tilde));
    report.record("tilde_general",
                  form_values_distance(tilde_forms_direct(hp, fv, hd), tilde_forms_general_formula(hp, fv, hd)));

    SectionGauge g;
    g.r = std::abs(hp.a);
    g.v = hp.a / g.r;
    g.s = hp.s;
    GaugeDifferentials gd;
    gd.dr = rng.uniform(-1.0, 1.0);
    gd.dv = kI * g.v * rng.uniform(-1.0, 1.0);
    gd.ds = rng.uniform(-1.0, 1.0);
    report.record("tilde_section", form_values_distance(tilde_forms_formula(g, fv, gd),
                                                        tilde_forms_direct(to_hparams(g), fv,
                                                                           to_hdifferentials(g, gd))));
  }
  report.add_samples(samples);
  return report;
}

}  // namespace crc
