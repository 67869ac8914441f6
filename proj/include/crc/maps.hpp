#pragma once

// Maps between charted CR models: pushforwards, the contact test, the
// pullback coefficients of omega^1 and the CR / conjugate-CR classifier.
//
// For a contactomorphism f, f^* omega~ = lambda omega and
//   f^* omega~^1 = alpha omega^1 + beta omega^1bar + c omega,
// with alpha = omega~^1(f_* Z_1), beta = omega~^1(f_* Z_1bar), c = omega~^1(f_* Z_0).
// beta = 0 everywhere means f is CR, alpha = 0 means f is conjugate CR.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crc/algebra.hpp"
#include "crc/circles.hpp"
#include "crc/cr_frame.hpp"
#include "crc/sampling.hpp"

namespace crc {

inline constexpr double kDefaultJacobianStep = 1e-6;
inline constexpr double kDefaultContactTol = 1e-8;
inline constexpr double kDefaultClassifyTol = 1e-6;
inline constexpr int kMinClassifySamples = 10;

struct SmoothMap {
  std::string name;
  std::function<Point(const Point&)> forward;
  std::optional<std::function<Tangent(const Point&, const Tangent&)>> jacobian;
};

// g after f.
inline SmoothMap compose(const SmoothMap& g, const SmoothMap& f) {
  SmoothMap out;
  out.name = g.name + "*" + f.name;
  out.forward = [g, f](const Point& p) { return g.forward(f.forward(p)); };
  if (g.jacobian && f.jacobian) {
    out.jacobian = [g, f](const Point& p, const Tangent& v) { return (*g.jacobian)(f.forward(p), (*f.jacobian)(p, v)); };
  }
  return out;
}

// df_p(v). Without an analytic Jacobian, a central difference along v with
// step fd_step * max(1, |p|) in the ambient coordinates.
inline Tangent pushforward(const SmoothMap& m, const Point& p, const Tangent& v,
                           double fd_step = kDefaultJacobianStep) {
  Tangent out;
  if (m.jacobian) {
    out = (*m.jacobian)(p, v);
  } else {
    const double vn = v.norm();
    if (vn == 0.0) return {};
    const double scale = std::max({1.0, std::abs(p.x1), std::abs(p.y1), std::abs(p.x2)});
    const double h = fd_step * scale / vn;
    out = (m.forward(p + v * h) - m.forward(p + v * -h)) * (0.5 / h);
  }
  if (!out.finite()) throw std::domain_error("pushforward: non-finite output");
  return out;
}

struct ComplexPushforward {
  Tangent re;
  Tangent im;
};

inline ComplexPushforward pushforward(const SmoothMap& m, const Point& p, const ComplexTangent& w,
                                      double fd_step = kDefaultJacobianStep) {
  return {pushforward(m, p, w.re, fd_step), pushforward(m, p, w.im, fd_step)};
}

inline std::vector<Point> sample_points(int count, std::uint64_t seed, double half_width = 1.0) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) out.push_back(SampleStream(seed, static_cast<std::uint64_t>(i)).point_in_box(half_width));
  return out;
}

// ---------------------------------------------------------------------------
// Contact test
// ---------------------------------------------------------------------------

struct ContactCheck {
  bool contact = true;
  std::vector<double> lambdas;
  double max_leak = 0.0;  // max |omega~(f_* Z_1)| relative to |f_* Z_1|
};

inline ContactCheck contact_check(const SmoothMap& m, const SectionFrame& src, const SectionFrame& dst,
                                  const std::vector<Point>& points, double tol = kDefaultContactTol,
                                  double fd_step = kDefaultJacobianStep) {
  ContactCheck out;
  for (const Point& p : points) {
    const Point q = m.forward(p);
    const ComplexPushforward w = pushforward(m, p, src.z1(p), fd_step);
    const double scale = std::max({1.0, w.re.norm(), w.im.norm()});
    const double leak = std::max(std::abs(dst.forms(q, w.re).omega), std::abs(dst.forms(q, w.im).omega)) / scale;
    const double lambda = dst.forms(q, pushforward(m, p, src.z0(p), fd_step)).omega;
    out.max_leak = std::max(out.max_leak, leak);
    out.lambdas.push_back(lambda);
    if (!(leak <= tol) || !(std::abs(lambda) > tol)) out.contact = false;
  }
  return out;
}

inline ContactCheck contact_check(const SmoothMap& m, const SectionFrame& src, const SectionFrame& dst, int samples,
                                  std::uint64_t seed = kDefaultSeed, double tol = kDefaultContactTol) {
  return contact_check(m, src, dst, sample_points(samples, seed), tol);
}

// ---------------------------------------------------------------------------
// Pullback coefficients and the direction map
// ---------------------------------------------------------------------------

struct AlphaBetaSample {
  Point p;
  Complex alpha{};
  Complex beta{};
  Complex c{};
  double lambda = 0.0;

  double orientation() const { return std::norm(alpha) - std::norm(beta); }
};

class DegenerateMap : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline AlphaBetaSample alpha_beta(const SmoothMap& m, const SectionFrame& src, const SectionFrame& dst, const Point& p,
                                  double fd_step = kDefaultJacobianStep) {
  const Point q = m.forward(p);
  const ComplexPushforward w = pushforward(m, p, src.z1(p), fd_step);
  const Complex a_re = dst.forms(q, w.re).omega1;
  const Complex a_im = dst.forms(q, w.im).omega1;
  const FormValues on_z0 = dst.forms(q, pushforward(m, p, src.z0(p), fd_step));

  AlphaBetaSample s;
  s.p = p;
  s.alpha = a_re + kI * a_im;
  s.beta = a_re - kI * a_im;
  s.c = on_z0.omega1;
  s.lambda = on_z0.omega;
  const double mass = std::norm(s.alpha) + std::norm(s.beta);
  if (!(std::abs(s.orientation()) > 1e-12 * mass)) throw DegenerateMap("alpha_beta: |alpha|^2 - |beta|^2 vanishes");
  return s;
}

// Direction of the image circle: u~^2 = (alpha u^2 + beta) / (conj(beta) u^2 + conj(alpha)).
// Principal root; the sign is left to the caller.
inline Complex predicted_direction(Complex alpha, Complex beta, Complex u) {
  if (std::abs(std::abs(u) - 1.0) > kUnitModulusTol) throw std::invalid_argument("predicted_direction: |u| must be 1");
  const Complex den = std::conj(beta) * u * u + std::conj(alpha);
  if (std::abs(den) == 0.0) throw std::domain_error("predicted_direction: zero denominator");
  return std::sqrt((alpha * u * u + beta) / den);
}

// min(|a - b|, |a + b|).
inline double distance_up_to_sign(Complex a, Complex b) { return std::min(std::abs(a - b), std::abs(a + b)); }

// ---------------------------------------------------------------------------
// Circle images
// ---------------------------------------------------------------------------

struct CircleImage {
  Trajectory source;
  std::vector<CurveSample> image;
  CircleResidual residual;
};

inline CircleImage circle_image(const SmoothMap& m, const SectionFrame& src, const SectionFrame& dst,
                                const CircleState& st0, const CircleParams& cp,
                                double fd_step = kDefaultCircleFdStep) {
  CircleImage out;
  out.source = integrate_circle(src, st0, cp);
  out.image.reserve(out.source.samples.size());
  for (const auto& s : out.source.samples) out.image.push_back({s.t, m.forward(s.state.p)});
  out.residual = circle_residual(dst, out.image, fd_step);
  return out;
}

inline double circle_image_test(const SmoothMap& m, const SectionFrame& src, const SectionFrame& dst,
                                const CircleState& st0, const CircleParams& cp,
                                double fd_step = kDefaultCircleFdStep) {
  return circle_image(m, src, dst, st0, cp, fd_step).residual.total();
}

// Largest sign-free gap between u~ predicted from (alpha, beta, u) along the
// source circle and u~ recovered from the image curve.
inline double direction_prediction_error(const SmoothMap& m, const SectionFrame& src, const SectionFrame& dst,
                                         const CircleImage& img, double fd_step = kDefaultJacobianStep) {
  double worst = 0.0;
  std::size_t k = 0;
  for (const RecoveredDirection& d : img.residual.directions) {
    while (k < img.source.samples.size() && img.source.samples[k].t != d.t) ++k;
    if (k == img.source.samples.size()) throw std::logic_error("direction_prediction_error: sample grid mismatch");
    const TrajectorySample& s = img.source.samples[k];
    const AlphaBetaSample ab = alpha_beta(m, src, dst, s.state.p, fd_step);
    worst = std::max(worst, distance_up_to_sign(predicted_direction(ab.alpha, ab.beta, s.state.u), d.u));
  }
  return worst;
}

// Three circles through the first sample points with spread directions.
inline std::vector<CircleState> witness_states(const std::vector<Point>& points) {
  std::vector<CircleState> out;
  for (std::size_t k = 0; k < 3 && k < points.size(); ++k) {
    out.push_back({points[k], std::polar(1.0, 0.3 + 2.0 * std::numbers::pi * static_cast<double>(k) / 3.0), 1.0, 0.2});
  }
  return out;
}

inline CircleParams default_witness_params() {
  CircleParams cp;
  cp.rho = 1.0;
  cp.t0 = 0.0;
  cp.t1 = 0.5;
  return cp;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class Verdict { CR, ConjugateCR, NotContact, NotCirclePreserving };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CR: return "CR";
    case Verdict::ConjugateCR: return "ConjugateCR";
    case Verdict::NotContact: return "NotContact";
    case Verdict::NotCirclePreserving: return "NotCirclePreserving";
  }
  return "unknown";
}

struct ClassificationReport {
  Verdict verdict = Verdict::NotContact;
  std::vector<AlphaBetaSample> samples;
  std::vector<double> lambdas;
  std::vector<double> circle_residuals;
  double tol = kDefaultClassifyTol;
  double contact_tol = kDefaultContactTol;
  double contact_leak = 0.0;
  double beta_ratio = 0.0;   // max|beta| / (max|alpha| + max|beta|)
  double alpha_ratio = 0.0;  // max|alpha| / (max|alpha| + max|beta|)
  bool orientation_flip = false;
  bool inconsistent = false;  // mixed alpha, beta with every witness circle preserved

  std::pair<double, double> lambda_range() const {
    if (lambdas.empty()) return {0.0, 0.0};
    const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
    return {*lo, *hi};
  }
};

inline ClassificationReport classify(const SmoothMap& m, const SectionFrame& src, const SectionFrame& dst,
                                     const std::vector<Point>& sample_points, const CircleParams& cp,
                                     double tol = kDefaultClassifyTol) {
  if (static_cast<int>(sample_points.size()) < kMinClassifySamples) {
    throw std::invalid_argument("classify: at least 10 sample points required");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("classify: tol must be positive");

  ClassificationReport rep;
  rep.tol = tol;
  const ContactCheck cc = contact_check(m, src, dst, sample_points, rep.contact_tol);
  rep.lambdas = cc.lambdas;
  rep.contact_leak = cc.max_leak;
  if (!cc.contact) {
    rep.verdict = Verdict::NotContact;
    return rep;
  }

  double max_alpha = 0.0, max_beta = 0.0;
  for (const Point& p : sample_points) {
    rep.samples.push_back(alpha_beta(m, src, dst, p));
    max_alpha = std::max(max_alpha, std::abs(rep.samples.back().alpha));
    max_beta = std::max(max_beta, std::abs(rep.samples.back().beta));
  }
  rep.beta_ratio = max_beta / (max_alpha + max_beta);
  rep.alpha_ratio = max_alpha / (max_alpha + max_beta);
  const bool positive = rep.samples.front().orientation() > 0.0;
  for (const auto& s : rep.samples) rep.orientation_flip |= ((s.orientation() > 0.0) != positive);

  for (const CircleState& st : witness_states(sample_points)) {
    rep.circle_residuals.push_back(circle_image_test(m, src, dst, st, cp));
  }

  if (rep.beta_ratio <= tol) {
    rep.verdict = Verdict::CR;
  } else if (rep.alpha_ratio <= tol) {
    rep.verdict = Verdict::ConjugateCR;
  } else {
    rep.verdict = Verdict::NotCirclePreserving;
    rep.inconsistent = std::all_of(rep.circle_residuals.begin(), rep.circle_residuals.end(),
                                   [&](double r) { return r <= 100.0 * tol; });
  }
  return rep;
}

inline ClassificationReport classify(const SmoothMap& m, const SectionFrame& src, const SectionFrame& dst,
                                     int samples = kMinClassifySamples, std::uint64_t seed = kDefaultSeed,
                                     double tol = kDefaultClassifyTol) {
  return classify(m, src, dst, sample_points(samples, seed), default_witness_params(), tol);
}

// ---------------------------------------------------------------------------
// Quadric map catalog
// ---------------------------------------------------------------------------

namespace maps {

inline SmoothMap identity() {
  return {"identity", [](const Point& p) { return p; }, [](const Point&, const Tangent& v) { return v; }};
}

// z1 -> e^{i theta} z1.
inline SmoothMap rotation(double theta) {
  const Complex e = std::polar(1.0, theta);
  return {"rotation",
          [e](const Point& p) {
            const Complex z = e * p.z1();
            return Point{z.real(), z.imag(), p.x2};
          },
          [e](const Point&, const Tangent& v) {
            const Complex dz = e * v.dz1();
            return Tangent{dz.real(), dz.imag(), v.dx2};
          }};
}

// (z1, x2) -> (l z1, l^2 x2).
inline SmoothMap dilation(double l) {
  if (l == 0.0 || !std::isfinite(l)) throw std::invalid_argument("dilation: factor must be finite and nonzero");
  return {"dilation", [l](const Point& p) { return Point{l * p.x1, l * p.y1, l * l * p.x2}; },
          [l](const Point&, const Tangent& v) { return Tangent{l * v.dx1, l * v.dy1, l * l * v.dx2}; }};
}

// (z1, x2) -> (z1 + a, x2 + s - 2 Im(conj(a) z1)).
inline SmoothMap heisenberg_translation(Complex a, double s) {
  return {"heis-translation",
          [a, s](const Point& p) {
            return Point{p.x1 + a.real(), p.y1 + a.imag(), p.x2 + s - 2.0 * (std::conj(a) * p.z1()).imag()};
          },
          [a](const Point&, const Tangent& v) {
            return Tangent{v.dx1, v.dy1, v.dx2 - 2.0 * (std::conj(a) * v.dz1()).imag()};
          }};
}

// (x1, y1, x2) -> (x1, -y1, -x2).
inline SmoothMap conjugation() {
  return {"conjugation", [](const Point& p) { return Point{p.x1, -p.y1, -p.x2}; },
          [](const Point&, const Tangent& v) { return Tangent{v.dx1, -v.dy1, -v.dx2}; }};
}

// (x1, y1, x2) -> (x1 + x2, y1, x2); not contact.
inline SmoothMap shear() {
  return {"shear", [](const Point& p) { return Point{p.x1 + p.x2, p.y1, p.x2}; },
          [](const Point&, const Tangent& v) { return Tangent{v.dx1 + v.dx2, v.dy1, v.dx2}; }};
}

// (x1, y1, x2) -> (k x1, y1 / k, x2): contact with lambda = 1 but neither CR
// nor conjugate CR for k != 1 (alpha = (k + 1/k)/2, beta = (k - 1/k)/2).
inline SmoothMap squeeze(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("squeeze: factor must be positive");
  return {"squeeze", [k](const Point& p) { return Point{k * p.x1, p.y1 / k, p.x2}; },
          [k](const Point&, const Tangent& v) { return Tangent{k * v.dx1, v.dy1 / k, v.dx2}; }};
}

inline std::vector<std::string> names() {
  return {"identity", "rotation", "dilation", "heis-translation", "conjugation", "shear", "squeeze"};
}

}  // namespace maps

}  // namespace crc
