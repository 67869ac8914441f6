#pragma once

// SU(2,1) and su(2,1) in the Hermitian form
//
//         ( 0    0   i/2 )
//     Q = ( 0    1    0  )
//         (-i/2  0    0  )
//
// Everything here is fixed-size 3x3 complex arithmetic. The cyclic center of
// SU(2,1) is not modelled: membership checks are for SU(2,1) itself.

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace crc {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

inline constexpr double kDefaultMembershipTol = 1e-10;

class ComplexMatrix3 {
 public:
  using Entries = std::array<std::array<Complex, 3>, 3>;

  constexpr ComplexMatrix3() = default;

  explicit ComplexMatrix3(const Entries& entries) : m_(entries) {
    for (const auto& row : m_) {
      for (const auto& e : row) {
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
          throw std::invalid_argument("ComplexMatrix3: non-finite entry");
        }
      }
    }
  }

  static ComplexMatrix3 identity() {
    ComplexMatrix3 r;
    r.m_[0][0] = r.m_[1][1] = r.m_[2][2] = 1.0;
    return r;
  }

  static ComplexMatrix3 zero() { return {}; }

  static ComplexMatrix3 diagonal(Complex d0, Complex d1, Complex d2) {
    ComplexMatrix3 r;
    r.m_[0][0] = d0;
    r.m_[1][1] = d1;
    r.m_[2][2] = d2;
    return r;
  }

  // Zero-based (row, col).
  Complex& operator()(int row, int col) { return m_[row][col]; }
  const Complex& operator()(int row, int col) const { return m_[row][col]; }

  const Entries& entries() const { return m_; }

  ComplexMatrix3 conj_transpose() const {
    ComplexMatrix3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m_[i][j] = std::conj(m_[j][i]);
    return r;
  }

  Complex trace() const { return m_[0][0] + m_[1][1] + m_[2][2]; }

  // Cofactor expansion accumulated in long double: for large entries the
  // terms cancel down to O(1).
  Complex determinant() const {
    using W = std::complex<long double>;
    auto w = [&](int i, int j) { return W(m_[i][j].real(), m_[i][j].imag()); };
    const W d = w(0, 0) * (w(1, 1) * w(2, 2) - w(1, 2) * w(2, 1)) -
                w(0, 1) * (w(1, 0) * w(2, 2) - w(1, 2) * w(2, 0)) +
                w(0, 2) * (w(1, 0) * w(2, 1) - w(1, 1) * w(2, 0));
    return {static_cast<double>(d.real()), static_cast<double>(d.imag())};
  }

  // Adjugate over determinant. Throws std::domain_error when singular.
  ComplexMatrix3 inverse() const {
    const Complex det = determinant();
    const double scale = max_abs();
    if (scale == 0.0 || std::abs(det) <= 1e-14 * scale * scale * scale) {
      throw std::domain_error("ComplexMatrix3::inverse: singular matrix");
    }
    ComplexMatrix3 r;
    r.m_[0][0] = m_[1][1] * m_[2][2] - m_[1][2] * m_[2][1];
    r.m_[0][1] = m_[0][2] * m_[2][1] - m_[0][1] * m_[2][2];
    r.m_[0][2] = m_[0][1] * m_[1][2] - m_[0][2] * m_[1][1];
    r.m_[1][0] = m_[1][2] * m_[2][0] - m_[1][0] * m_[2][2];
    r.m_[1][1] = m_[0][0] * m_[2][2] - m_[0][2] * m_[2][0];
    r.m_[1][2] = m_[0][2] * m_[1][0] - m_[0][0] * m_[1][2];
    r.m_[2][0] = m_[1][0] * m_[2][1] - m_[1][1] * m_[2][0];
    r.m_[2][1] = m_[0][1] * m_[2][0] - m_[0][0] * m_[2][1];
    r.m_[2][2] = m_[0][0] * m_[1][1] - m_[0][1] * m_[1][0];
    return r / det;
  }

  // Largest entry modulus. All residuals in this library use this norm.
  double max_abs() const {
    double best = 0.0;
    for (const auto& row : m_)
      for (const auto& e : row) best = std::max(best, std::abs(e));
    return best;
  }

  ComplexMatrix3& operator+=(const ComplexMatrix3& o) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m_[i][j] += o.m_[i][j];
    return *this;
  }
  ComplexMatrix3& operator-=(const ComplexMatrix3& o) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m_[i][j] -= o.m_[i][j];
    return *this;
  }
  ComplexMatrix3& operator*=(Complex s) {
    for (auto& row : m_)
      for (auto& e : row) e *= s;
    return *this;
  }
  ComplexMatrix3& operator/=(Complex s) {
    for (auto& row : m_)
      for (auto& e : row) e /= s;
    return *this;
  }

  friend ComplexMatrix3 operator+(ComplexMatrix3 a, const ComplexMatrix3& b) { return a += b; }
  friend ComplexMatrix3 operator-(ComplexMatrix3 a, const ComplexMatrix3& b) { return a -= b; }
  friend ComplexMatrix3 operator-(ComplexMatrix3 a) { return a *= -1.0; }
  friend ComplexMatrix3 operator*(ComplexMatrix3 a, Complex s) { return a *= s; }
  friend ComplexMatrix3 operator*(Complex s, ComplexMatrix3 a) { return a *= s; }
  friend ComplexMatrix3 operator/(ComplexMatrix3 a, Complex s) { return a /= s; }

  friend ComplexMatrix3 operator*(const ComplexMatrix3& a, const ComplexMatrix3& b) {
    ComplexMatrix3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Complex acc = 0.0;
        for (int k = 0; k < 3; ++k) acc += a.m_[i][k] * b.m_[k][j];
        r.m_[i][j] = acc;
      }
    return r;
  }

  friend bool operator==(const ComplexMatrix3& a, const ComplexMatrix3& b) { return a.m_ == b.m_; }

 private:
  Entries m_{};
};

inline double max_abs_diff(const ComplexMatrix3& a, const ComplexMatrix3& b) { return (a - b).max_abs(); }

inline ComplexMatrix3 hermitian_form() {
  ComplexMatrix3 q;
  q(0, 2) = 0.5 * kI;
  q(1, 1) = 1.0;
  q(2, 0) = -0.5 * kI;
  return q;
}

// Residual of conj(g)^T Q g = Q and det g = 1, whichever is larger.
inline double su21_group_defect(const ComplexMatrix3& g) {
  const ComplexMatrix3 q = hermitian_form();
  return std::max(max_abs_diff(g.conj_transpose() * q * g, q), std::abs(g.determinant() - 1.0));
}

inline bool is_su21_group(const ComplexMatrix3& g, double tol = kDefaultMembershipTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_su21_group: tol must be positive");
  return su21_group_defect(g) <= tol;
}

inline double su21_algebra_defect(const ComplexMatrix3& x) {
  const ComplexMatrix3 q = hermitian_form();
  return std::max((x.conj_transpose() * q + q * x).max_abs(), std::abs(x.trace()));
}

inline bool is_su21_algebra(const ComplexMatrix3& x, double tol = kDefaultMembershipTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_su21_algebra: tol must be positive");
  return su21_algebra_defect(x) <= tol;
}

inline ComplexMatrix3 bracket(const ComplexMatrix3& x, const ComplexMatrix3& y) { return x * y - y * x; }

// ---------------------------------------------------------------------------
// Grading g = g^-2 + g^-1 + g^0 + g^1 + g^2.
//
//   ( u       -2i conj(y)   w        )
//   ( x        a            y        )     z, w real; a imaginary; u - conj(u) = -a
//   ( z        2i conj(x)  -conj(u)  )
// ---------------------------------------------------------------------------

inline ComplexMatrix3 grade_m2_element(double z) {
  ComplexMatrix3 m;
  m(2, 0) = z;
  return m;
}

inline ComplexMatrix3 grade_m1_element(Complex x) {
  ComplexMatrix3 m;
  m(1, 0) = x;
  m(2, 1) = 2.0 * kI * std::conj(x);
  return m;
}

// The middle entry is fixed by the trace condition: a = conj(u) - u.
inline ComplexMatrix3 grade_0_element(Complex u) {
  return ComplexMatrix3::diagonal(u, std::conj(u) - u, -std::conj(u));
}

inline ComplexMatrix3 grade_1_element(Complex y) {
  ComplexMatrix3 m;
  m(0, 1) = -2.0 * kI * std::conj(y);
  m(1, 2) = y;
  return m;
}

inline ComplexMatrix3 grade_2_element(double w) {
  ComplexMatrix3 m;
  m(0, 2) = w;
  return m;
}

struct GradedDecomposition {
  double z = 0.0;   // g^-2
  Complex x{};      // g^-1
  Complex u{};      // g^0, upper-left entry
  Complex a{};      // g^0, middle entry (purely imaginary)
  Complex y{};      // g^1
  double w = 0.0;   // g^2

  ComplexMatrix3 component(int grade) const {
    switch (grade) {
      case -2: return grade_m2_element(z);
      case -1: return grade_m1_element(x);
      case 0: return ComplexMatrix3::diagonal(u, a, -std::conj(u));
      case 1: return grade_1_element(y);
      case 2: return grade_2_element(w);
      default: throw std::out_of_range("GradedDecomposition: grade must lie in [-2, 2]");
    }
  }

  ComplexMatrix3 reassemble() const {
    // Entries are written positionally so that reassembly is exact.
    ComplexMatrix3 m;
    m(0, 0) = u;
    m(0, 1) = -2.0 * kI * std::conj(y);
    m(0, 2) = w;
    m(1, 0) = x;
    m(1, 1) = a;
    m(1, 2) = y;
    m(2, 0) = z;
    m(2, 1) = 2.0 * kI * std::conj(x);
    m(2, 2) = -std::conj(u);
    return m;
  }
};

// Reads the graded components positionally. Rejects matrices that are not in
// su(2,1) within tol.
inline GradedDecomposition grade_decompose(const ComplexMatrix3& x, double tol = kDefaultMembershipTol) {
  if (!is_su21_algebra(x, tol * std::max(1.0, x.max_abs()))) {
    throw std::invalid_argument("grade_decompose: matrix is not in su(2,1)");
  }
  GradedDecomposition d;
  d.z = x(2, 0).real();
  d.x = x(1, 0);
  d.u = x(0, 0);
  d.a = x(1, 1);
  d.y = x(1, 2);
  d.w = x(0, 2).real();
  return d;
}

// Build an algebra element from the graded parametrization.
inline ComplexMatrix3 su21_element(double z, Complex x, Complex u, Complex y, double w) {
  GradedDecomposition d{z, x, u, std::conj(u) - u, y, w};
  return d.reassemble();
}

// ---------------------------------------------------------------------------
// Isotropy subgroup H = CU(1) x| N at [1,0,0]^T.
// ---------------------------------------------------------------------------

struct HParams {
  Complex a{1.0, 0.0};
  Complex b{};
  double s = 0.0;
};

//   ( a    -2i conj(a) conj(b)    a (s - i |b|^2) )
//   ( 0     conj(a) / a           b               )
//   ( 0     0                     1 / conj(a)     )
inline ComplexMatrix3 h_matrix(const HParams& p) {
  if (std::abs(p.a) == 0.0) throw std::invalid_argument("h_matrix: a must be nonzero");
  const Complex a = p.a;
  const Complex ab = std::conj(a);
  const Complex b = p.b;
  const double bb = std::norm(b);
  ComplexMatrix3 h;
  h(0, 0) = a;
  h(0, 1) = -2.0 * kI * ab * std::conj(b);
  h(0, 2) = a * (p.s - kI * bb);
  h(1, 1) = ab / a;
  h(1, 2) = b;
  h(2, 2) = 1.0 / ab;
  return h;
}

// Ad_{h^-1} X = h^-1 X h.
inline ComplexMatrix3 adjoint(const ComplexMatrix3& h, const ComplexMatrix3& x) { return h.inverse() * x * h; }

namespace detail {

using WideComplex = std::complex<long double>;
using WideMatrix = std::array<std::array<WideComplex, 3>, 3>;

inline WideMatrix wide_multiply(const WideMatrix& a, const WideMatrix& b) {
  WideMatrix r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

}  // namespace detail

// Scaling and squaring with a degree-18 Taylor polynomial. The scaled
// argument has max-entry norm <= 1/8; series and squarings run in long
// double and are rounded once, since squaring amplifies rounding error by
// roughly the norm of the result.
inline ComplexMatrix3 mat_exp(const ComplexMatrix3& x) {
  const double norm = x.max_abs() * 3.0;  // bounds the induced inf-norm
  int squarings = 0;
  long double scale = 1.0L;
  while (norm * scale > 0.125L) {
    scale *= 0.5L;
    ++squarings;
  }
  detail::WideMatrix a{}, id{};
  for (int i = 0; i < 3; ++i) {
    id[i][i] = 1.0L;
    for (int j = 0; j < 3; ++j) a[i][j] = detail::WideComplex(x(i, j).real(), x(i, j).imag()) * scale;
  }
  constexpr int kOrder = 18;
  // Horner: I + a(I + a/2(I + a/3(...)))
  detail::WideMatrix result = id;
  for (int k = kOrder; k >= 1; --k) {
    result = detail::wide_multiply(a, result);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) result[i][j] = id[i][j] + result[i][j] / static_cast<long double>(k);
  }
  for (int i = 0; i < squarings; ++i) result = detail::wide_multiply(result, result);
  ComplexMatrix3::Entries out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out[i][j] = Complex(static_cast<double>(result[i][j].real()), static_cast<double>(result[i][j].imag()));
  return ComplexMatrix3(out);
}

}  // namespace crc
