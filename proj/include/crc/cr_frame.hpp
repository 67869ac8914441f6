#pragma once

// CR models on a coordinate chart, consumed as prepared section frames.
//
// A section frame supplies, at every chart point, the values of the six
// pulled-back connection forms (omega, omega^1, omega^1_1, phi, phi^1, psi)
// on a tangent vector, together with the dual vector fields Z_0 and Z_1
// (Z_1bar is always the conjugate of Z_1 and is never stored).

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crc/algebra.hpp"

namespace crc {

// Chart coordinates; z1 = x1 + i y1.
struct Point {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;

  Complex z1() const { return {x1, y1}; }
  bool finite() const { return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2); }
};

struct Tangent {
  double dx1 = 0.0;
  double dy1 = 0.0;
  double dx2 = 0.0;

  Complex dz1() const { return {dx1, dy1}; }
  double norm() const { return std::sqrt(dx1 * dx1 + dy1 * dy1 + dx2 * dx2); }
  bool finite() const { return std::isfinite(dx1) && std::isfinite(dy1) && std::isfinite(dx2); }

  Tangent& operator+=(const Tangent& o) {
    dx1 += o.dx1;
    dy1 += o.dy1;
    dx2 += o.dx2;
    return *this;
  }
  Tangent& operator*=(double s) {
    dx1 *= s;
    dy1 *= s;
    dx2 *= s;
    return *this;
  }
  friend Tangent operator+(Tangent a, const Tangent& b) { return a += b; }
  friend Tangent operator-(Tangent a, const Tangent& b) { return a += (b * -1.0); }
  friend Tangent operator*(Tangent a, double s) { return a *= s; }
  friend Tangent operator*(double s, Tangent a) { return a *= s; }
};

inline Point operator+(const Point& p, const Tangent& v) { return {p.x1 + v.dx1, p.y1 + v.dy1, p.x2 + v.dx2}; }
inline Tangent operator-(const Point& p, const Point& q) { return {p.x1 - q.x1, p.y1 - q.y1, p.x2 - q.x2}; }

// A complex vector field value stored as real and imaginary tangents.
struct ComplexTangent {
  Tangent re;
  Tangent im;
};

// Values of the six section forms on one tangent vector (or, for exterior
// derivatives, on one pair of vectors). omega, phi and psi are real,
// omega1_1 is purely imaginary.
struct FormValues {
  double omega = 0.0;
  Complex omega1{};
  Complex omega1_1{};
  double phi = 0.0;
  Complex phi1{};
  double psi = 0.0;

  FormValues& operator+=(const FormValues& o) {
    omega += o.omega;
    omega1 += o.omega1;
    omega1_1 += o.omega1_1;
    phi += o.phi;
    phi1 += o.phi1;
    psi += o.psi;
    return *this;
  }
  FormValues& operator*=(double s) {
    omega *= s;
    omega1 *= s;
    omega1_1 *= s;
    phi *= s;
    phi1 *= s;
    psi *= s;
    return *this;
  }
  friend FormValues operator+(FormValues a, const FormValues& b) { return a += b; }
  friend FormValues operator-(FormValues a, const FormValues& b) { return a += (b * -1.0); }
  friend FormValues operator*(FormValues a, double s) { return a *= s; }
  friend FormValues operator*(double s, FormValues a) { return a *= s; }

  // Largest modulus over the six slots.
  double max_abs() const {
    return std::max({std::abs(omega), std::abs(omega1), std::abs(omega1_1), std::abs(phi), std::abs(phi1),
                     std::abs(psi)});
  }
};

inline constexpr double kFormRealityTol = 1e-12;

class SectionFrame {
 public:
  using FormEvaluator = std::function<FormValues(const Point&, const Tangent&)>;
  using FieldEvaluator = std::function<Tangent(const Point&)>;
  using ComplexFieldEvaluator = std::function<ComplexTangent(const Point&)>;
  // Exterior derivatives of the six forms evaluated on (u, v) at a point.
  using DerivativeEvaluator = std::function<FormValues(const Point&, const Tangent&, const Tangent&)>;

  SectionFrame(std::string name, FormEvaluator forms, FieldEvaluator z0, ComplexFieldEvaluator z1,
               std::optional<DerivativeEvaluator> derivatives = std::nullopt)
      : name_(std::move(name)),
        forms_(std::move(forms)),
        z0_(std::move(z0)),
        z1_(std::move(z1)),
        derivatives_(std::move(derivatives)) {
    if (!forms_ || !z0_ || !z1_) throw std::invalid_argument("SectionFrame: evaluators must be callable");
  }

  const std::string& name() const { return name_; }

  FormValues forms(const Point& p, const Tangent& v) const {
    FormValues fv = forms_(p, v);
    if (std::abs(fv.omega1_1.real()) > kFormRealityTol * std::max(1.0, std::abs(fv.omega1_1))) {
      throw std::domain_error("SectionFrame '" + name_ + "': omega^1_1 must be purely imaginary");
    }
    return fv;
  }

  Tangent z0(const Point& p) const { return z0_(p); }
  ComplexTangent z1(const Point& p) const { return z1_(p); }

  bool has_analytic_derivatives() const { return derivatives_.has_value(); }

  FormValues derivatives(const Point& p, const Tangent& u, const Tangent& v) const {
    if (!derivatives_) throw std::logic_error("SectionFrame '" + name_ + "': no analytic derivatives");
    return (*derivatives_)(p, u, v);
  }

  // Real frame (Re Z_1, Im Z_1, Z_0) at p.
  std::array<Tangent, 3> real_basis(const Point& p) const {
    const ComplexTangent z = z1(p);
    return {z.re, z.im, z0(p)};
  }

  // omega^1 evaluated on the complex vector re + i im (complex-linear extension).
  Complex omega1_on(const Point& p, const ComplexTangent& w) const {
    return forms(p, w.re).omega1 + kI * forms(p, w.im).omega1;
  }
  // conj(omega^1) on re + i im.
  Complex omega1bar_on(const Point& p, const ComplexTangent& w) const {
    return std::conj(forms(p, w.re).omega1) + kI * std::conj(forms(p, w.im).omega1);
  }
  Complex omega_on(const Point& p, const ComplexTangent& w) const {
    return Complex{forms(p, w.re).omega, forms(p, w.im).omega};
  }

 private:
  std::string name_;
  FormEvaluator forms_;
  FieldEvaluator z0_;
  ComplexFieldEvaluator z1_;
  std::optional<DerivativeEvaluator> derivatives_;
};

// Largest deviation from omega(Z0)=1, omega(Z1)=0, omega^1(Z1)=1,
// omega^1(Z1bar)=0, omega^1(Z0)=0 at p.
inline double duality_defect(const SectionFrame& f, const Point& p) {
  const ComplexTangent z1 = f.z1(p);
  const ComplexTangent z1bar{z1.re, z1.im * -1.0};
  const FormValues on_z0 = f.forms(p, f.z0(p));
  double d = std::abs(on_z0.omega - 1.0);
  d = std::max(d, std::abs(f.omega_on(p, z1)));
  d = std::max(d, std::abs(f.omega1_on(p, z1) - 1.0));
  d = std::max(d, std::abs(f.omega1_on(p, z1bar)));
  d = std::max(d, std::abs(on_z0.omega1));
  return d;
}

// omega(v). A curve is horizontal iff this vanishes along it.
inline double horizontality(const SectionFrame& f, const Point& p, const Tangent& v) { return f.forms(p, v).omega; }

// The flat quadric Im z2 = |z1|^2 in chart (x1, y1, x2):
//   omega   = 1/2 (dx2 - i conj(z1) dz1 + i z1 dconj(z1)) = dx2/2 + x1 dy1 - y1 dx1
//   omega^1 = dz1
//   Z_1 = d/dz1 + i conj(z1) d/dx2,  Z_0 = 2 d/dx2
// and phi = omega^1_1 = phi^1 = psi = 0.
inline SectionFrame quadric_frame() {
  auto forms = [](const Point& p, const Tangent& v) {
    FormValues fv;
    fv.omega = 0.5 * v.dx2 + p.x1 * v.dy1 - p.y1 * v.dx1;
    fv.omega1 = v.dz1();
    return fv;
  };
  auto z0 = [](const Point&) { return Tangent{0.0, 0.0, 2.0}; };
  // d/dz1 = (d/dx1 - i d/dy1)/2 and i conj(z1) = y1 + i x1.
  auto z1 = [](const Point& p) { return ComplexTangent{{0.5, 0.0, p.y1}, {0.0, -0.5, p.x1}}; };
  auto d = [](const Point&, const Tangent& u, const Tangent& v) {
    FormValues dv;
    dv.omega = 2.0 * (u.dx1 * v.dy1 - u.dy1 * v.dx1);
    return dv;
  };
  return SectionFrame("quadric", forms, z0, z1, d);
}

// The connection matrix
//
//   ( -phi/2 - w11/3    -i conj(phi1)    -psi/4         )
//   (  omega1            2 w11/3          phi1/2        )
//   (  2 omega           2i conj(omega1)  phi/2 - w11/3 )
//
// built from form values (w11 = omega^1_1). Linear in the values, so it also
// turns exterior derivatives of the forms into d(pi).
inline ComplexMatrix3 connection_matrix(const FormValues& fv) {
  ComplexMatrix3 m;
  m(0, 0) = -0.5 * fv.phi - fv.omega1_1 / 3.0;
  m(0, 1) = -kI * std::conj(fv.phi1);
  m(0, 2) = -0.25 * fv.psi;
  m(1, 0) = fv.omega1;
  m(1, 1) = 2.0 * fv.omega1_1 / 3.0;
  m(1, 2) = 0.5 * fv.phi1;
  m(2, 0) = 2.0 * fv.omega;
  m(2, 1) = 2.0 * kI * std::conj(fv.omega1);
  m(2, 2) = 0.5 * fv.phi - fv.omega1_1 / 3.0;
  return m;
}

inline ComplexMatrix3 connection_matrix(const SectionFrame& f, const Point& p, const Tangent& v) {
  return connection_matrix(f.forms(p, v));
}

// Inverse of connection_matrix(FormValues): reads the six forms off the
// matrix layout. Real parts of real forms are taken; the discarded imaginary
// parts are what is_su21_algebra measures.
inline FormValues read_forms(const ComplexMatrix3& m) {
  FormValues fv;
  fv.omega = 0.5 * m(2, 0).real();
  fv.omega1 = m(1, 0);
  fv.omega1_1 = Complex{0.0, 1.5 * m(1, 1).imag()};
  fv.phi = (m(2, 2) - m(0, 0)).real();
  fv.phi1 = 2.0 * m(1, 2);
  fv.psi = -4.0 * m(0, 2).real();
  return fv;
}

// ---------------------------------------------------------------------------
// Coframe group acting on (phi, omega^1, omega^1bar, omega). The line-bundle
// scale is fixed to 1, so the group is parametrised by (alpha, v1, s).
// ---------------------------------------------------------------------------

struct CoframeParams {
  double alpha = 0.0;
  Complex v1{};
  double s = 0.0;
};

// Values of (phi, omega^1, omega^1bar, omega) as a row vector. omega^1bar is an
// independent slot so the action can be checked as plain linear algebra.
struct CoframeValues {
  Complex phi{};
  Complex omega1{};
  Complex omega1bar{};
  Complex omega{};

  std::array<Complex, 4> as_array() const { return {phi, omega1, omega1bar, omega}; }
  static CoframeValues from_array(const std::array<Complex, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
};

using Matrix4 = std::array<std::array<Complex, 4>, 4>;

inline Matrix4 coframe_matrix(const CoframeParams& p) {
  const Complex e = std::polar(1.0, p.alpha);
  const Complex eb = std::conj(e);
  const Complex v = p.v1;
  const Complex vb = std::conj(v);
  Matrix4 m{};
  m[0] = {1.0, 0.0, 0.0, 0.0};
  m[1] = {kI * e * vb, e, 0.0, 0.0};
  m[2] = {-kI * eb * v, 0.0, eb, 0.0};
  m[3] = {p.s, v, vb, 1.0};
  return m;
}

inline Matrix4 multiply(const Matrix4& a, const Matrix4& b) {
  Matrix4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

inline CoframeValues apply_coframe(const CoframeValues& x, const Matrix4& m) {
  const auto in = x.as_array();
  std::array<Complex, 4> out{};
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) out[j] += in[k] * m[k][j];
  return CoframeValues::from_array(out);
}

//   omega'   = omega
//   omega'^1 = e^{i alpha} omega^1 + v1 omega
//   phi'     = phi + i e^{i alpha} conj(v1) omega^1 - i e^{-i alpha} v1 omega^1bar + s omega
inline CoframeValues coframe_transform(const CoframeValues& x, const CoframeParams& p) {
  return apply_coframe(x, coframe_matrix(p));
}

// Parameters of the product coframe_matrix(first) * coframe_matrix(second).
inline CoframeParams compose(const CoframeParams& first, const CoframeParams& second) {
  const Complex e2 = std::polar(1.0, second.alpha);
  CoframeParams r;
  r.alpha = first.alpha + second.alpha;
  r.v1 = e2 * first.v1 + second.v1;
  r.s = first.s + second.s - 2.0 * std::imag(e2 * first.v1 * std::conj(second.v1));
  return r;
}

// Named frames. The quadric is always present.
class FrameRegistry {
 public:
  FrameRegistry() { add(quadric_frame()); }

  void add(SectionFrame frame) {
    const std::string key = frame.name();
    frames_.insert_or_assign(key, std::move(frame));
  }

  const SectionFrame& get(const std::string& name) const {
    auto it = frames_.find(name);
    if (it == frames_.end()) throw std::out_of_range("FrameRegistry: unknown model '" + name + "'");
    return it->second;
  }

  bool contains(const std::string& name) const { return frames_.count(name) != 0; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : frames_) out.push_back(k);
    return out;
  }

 private:
  std::map<std::string, SectionFrame> frames_;
};

}  // namespace crc
