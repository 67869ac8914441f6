#include <gtest/gtest.h>

#include <complex>
#include <limits>

#include "crc/algebra.hpp"
#include "crc/sampling.hpp"

using crc::Complex;
using crc::ComplexMatrix3;
using crc::kI;

namespace {

ComplexMatrix3 from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  ComplexMatrix3::Entries e{};
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (const Complex& v : row) e[i][j++] = v;
    ++i;
  }
  return ComplexMatrix3(e);
}

// Plain Taylor series in long double, no scaling; fine for small arguments.
ComplexMatrix3 exp_oracle(const ComplexMatrix3& x) {
  using W = std::complex<long double>;
  W term[3][3], sum[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) term[i][j] = sum[i][j] = (i == j) ? 1.0L : 0.0L;
  for (int k = 1; k < 80; ++k) {
    W next[3][3] = {};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        for (int m = 0; m < 3; ++m) next[i][j] += term[i][m] * W(x(m, j).real(), x(m, j).imag());
        next[i][j] /= static_cast<long double>(k);
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        term[i][j] = next[i][j];
        sum[i][j] += next[i][j];
      }
  }
  ComplexMatrix3::Entries e{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e[i][j] = {static_cast<double>(sum[i][j].real()), static_cast<double>(sum[i][j].imag())};
  return ComplexMatrix3(e);
}

}  // namespace

TEST(ComplexMatrix3, RejectsNonFiniteEntries) {
  ComplexMatrix3::Entries e{};
  e[1][2] = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  EXPECT_THROW(ComplexMatrix3{e}, std::invalid_argument);
  e[1][2] = {0.0, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(ComplexMatrix3{e}, std::invalid_argument);
}

TEST(ComplexMatrix3, InverseAndDeterminant) {
  const ComplexMatrix3 m = from_rows({{2.0, kI, 0.0}, {0.0, 1.0, 3.0}, {1.0, 0.0, 1.0}});
  // det = 2(1) - i(0 - 3) + 0 = 2 + 3i
  EXPECT_NEAR(std::abs(m.determinant() - Complex(2.0, 3.0)), 0.0, 1e-15);
  EXPECT_LE(crc::max_abs_diff(m * m.inverse(), ComplexMatrix3::identity()), 1e-15);
  EXPECT_THROW(ComplexMatrix3::diagonal(1.0, 0.0, 1.0).inverse(), std::domain_error);
}

TEST(HermitianForm, ExactEntries) {
  const ComplexMatrix3 q = crc::hermitian_form();
  EXPECT_EQ(q, from_rows({{0.0, 0.0, 0.5 * kI}, {0.0, 1.0, 0.0}, {-0.5 * kI, 0.0, 0.0}}));
  EXPECT_EQ(q.conj_transpose(), q);
  EXPECT_EQ(q * q, ComplexMatrix3::diagonal(0.25, 1.0, 0.25));
}

TEST(Membership, GroupExamples) {
  EXPECT_TRUE(crc::is_su21_group(ComplexMatrix3::identity()));
  EXPECT_TRUE(crc::is_su21_group(crc::h_matrix({1.0, {1.0, 1.0}, 2.0})));
  EXPECT_FALSE(crc::is_su21_group(ComplexMatrix3::diagonal(2.0, 1.0, 1.0)));
  EXPECT_THROW(crc::is_su21_group(ComplexMatrix3::identity(), 0.0), std::invalid_argument);
}

TEST(Membership, AlgebraExamples) {
  EXPECT_TRUE(crc::is_su21_algebra(ComplexMatrix3::zero()));
  EXPECT_FALSE(crc::is_su21_algebra(ComplexMatrix3::identity()));
  EXPECT_TRUE(crc::is_su21_algebra(crc::su21_element(0.7, {1.0, -2.0}, kI, {0.5, 0.25}, -1.5)));
  EXPECT_THROW(crc::is_su21_algebra(ComplexMatrix3::zero(), -1.0), std::invalid_argument);
}

TEST(Grading, MiddleEntryIsImaginary) {
  crc::SampleStream rng(7, 0);
  for (int k = 0; k < 20; ++k) {
    const auto d = crc::grade_decompose(rng.su21_element_sample(3.0));
    EXPECT_EQ(d.a.real(), 0.0);
  }
}

TEST(Grading, SingleEntryIsGradeMinusTwo) {
  ComplexMatrix3 x;
  x(2, 0) = 1.25;
  const auto d = crc::grade_decompose(x);
  EXPECT_EQ(d.z, 1.25);
  EXPECT_EQ(d.x, Complex{});
  EXPECT_EQ(d.u, Complex{});
  EXPECT_EQ(d.y, Complex{});
  EXPECT_EQ(d.w, 0.0);
  EXPECT_EQ(d.component(-2), x);
}

TEST(Grading, ZeroAndReassembly) {
  const auto zero = crc::grade_decompose(ComplexMatrix3::zero());
  for (int g = -2; g <= 2; ++g) EXPECT_EQ(zero.component(g), ComplexMatrix3::zero());
  EXPECT_THROW(zero.component(3), std::out_of_range);

  crc::SampleStream rng(11, 0);
  for (int k = 0; k < 100; ++k) {
    const ComplexMatrix3 x = rng.su21_element_sample(4.0);
    const auto d = crc::grade_decompose(x);
    EXPECT_EQ(d.reassemble(), x);
    ComplexMatrix3 sum;
    for (int g = -2; g <= 2; ++g) sum += d.component(g);
    EXPECT_LE(crc::max_abs_diff(sum, x), 1e-15);
  }
}

TEST(Grading, RejectsNonAlgebra) {
  EXPECT_THROW(crc::grade_decompose(ComplexMatrix3::identity()), std::invalid_argument);
}

TEST(Bracket, Examples) {
  crc::SampleStream rng(3, 0);
  const ComplexMatrix3 x = rng.su21_element_sample();
  EXPECT_EQ(crc::bracket(x, x), ComplexMatrix3::zero());
  EXPECT_EQ(crc::bracket(crc::grade_m1_element(1.0), crc::grade_m1_element(kI)), crc::grade_m2_element(-4.0));
}

TEST(Bracket, GradedAndClosed) {
  crc::SampleStream rng(5, 0);
  const auto graded = [&](int g) {
    switch (g) {
      case -2: return crc::grade_m2_element(rng.uniform(-1, 1));
      case -1: return crc::grade_m1_element(rng.complex_in_disk(1));
      case 0: return crc::grade_0_element(rng.complex_in_disk(1));
      case 1: return crc::grade_1_element(rng.complex_in_disk(1));
      default: return crc::grade_2_element(rng.uniform(-1, 1));
    }
  };
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      const ComplexMatrix3 b = crc::bracket(graded(i), graded(j));
      if (i + j < -2 || i + j > 2) {
        EXPECT_EQ(b, ComplexMatrix3::zero()) << i << "," << j;
        continue;
      }
      EXPECT_EQ(crc::grade_decompose(b).component(i + j), b) << i << "," << j;
    }
  }
  for (int k = 0; k < 100; ++k) {
    EXPECT_TRUE(crc::is_su21_algebra(crc::bracket(rng.su21_element_sample(2.0), rng.su21_element_sample(2.0))));
  }
}

TEST(HMatrix, Examples) {
  EXPECT_EQ(crc::h_matrix({1.0, 0.0, 0.0}), ComplexMatrix3::identity());
  EXPECT_EQ(crc::h_matrix({1.0, 1.0, 0.0}), from_rows({{1.0, -2.0 * kI, -kI}, {0.0, 1.0, 1.0}, {0.0, 0.0, 1.0}}));
  EXPECT_THROW(crc::h_matrix({0.0, 1.0, 0.0}), std::invalid_argument);
}

TEST(HMatrix, AlwaysInGroup) {
  for (int k = 0; k < 100; ++k) {
    crc::SampleStream rng(13, static_cast<std::uint64_t>(k));
    crc::HParams hp;
    hp.a = rng.uniform(0.5, 2.0) * rng.unit_complex();
    hp.b = rng.complex_in_disk(2.0);
    hp.s = rng.uniform(-2.0, 2.0);
    EXPECT_TRUE(crc::is_su21_group(crc::h_matrix(hp), 1e-12));
  }
}

TEST(Adjoint, IdentityAndClosure) {
  crc::SampleStream rng(17, 0);
  const ComplexMatrix3 x = rng.su21_element_sample();
  EXPECT_LE(crc::max_abs_diff(crc::adjoint(ComplexMatrix3::identity(), x), x), 0.0);
  for (int k = 0; k < 100; ++k) {
    crc::SampleStream r(17, static_cast<std::uint64_t>(k + 1));
    EXPECT_TRUE(crc::is_su21_algebra(crc::adjoint(crc::h_matrix(r.hparams()), r.su21_element_sample()), 1e-9));
  }
  EXPECT_THROW(crc::adjoint(ComplexMatrix3::zero(), x), std::domain_error);
}

TEST(MatExp, Examples) {
  EXPECT_EQ(crc::mat_exp(ComplexMatrix3::zero()), ComplexMatrix3::identity());
  const ComplexMatrix3 w = crc::grade_2_element(3.5);
  EXPECT_LE(crc::max_abs_diff(crc::mat_exp(w), ComplexMatrix3::identity() + w), 1e-15);
}

TEST(MatExp, MatchesSeriesOracle) {
  crc::SampleStream rng(19, 0);
  for (int k = 0; k < 50; ++k) {
    ComplexMatrix3 x = rng.su21_element_sample(1.0);
    x = x * (2.0 / x.max_abs());
    const ComplexMatrix3 oracle = exp_oracle(x);
    EXPECT_LE(crc::max_abs_diff(crc::mat_exp(x), oracle), 1e-12 * std::max(1.0, oracle.max_abs()));
  }
}

TEST(MatExp, InverseAndMembership) {
  crc::SampleStream rng(23, 0);
  for (int k = 0; k < 100; ++k) {
    ComplexMatrix3 x = rng.su21_element_sample(1.0);
    x = x * (rng.uniform(0.0, 5.0) / x.max_abs());
    EXPECT_LE(crc::max_abs_diff(crc::mat_exp(x) * crc::mat_exp(-x), ComplexMatrix3::identity()), 1e-10);
    EXPECT_TRUE(crc::is_su21_group(crc::mat_exp(x)));
  }
}

TEST(MatExp, FrobeniusTenInverse) {
  crc::SampleStream rng(29, 0);
  for (int k = 0; k < 50; ++k) {
    ComplexMatrix3 x = rng.su21_element_sample(1.0);
    double fro = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) fro += std::norm(x(i, j));
    x = x * (10.0 / std::sqrt(fro));
    const ComplexMatrix3 e = crc::mat_exp(x), f = crc::mat_exp(-x);
    // Forming e * f in double already rounds at eps |e| |f|.
    const double tol = std::max(1e-12, 1e-15 * e.max_abs() * f.max_abs());
    EXPECT_LE(crc::max_abs_diff(e * f, ComplexMatrix3::identity()), tol);
  }
}

TEST(MatExp, SemigroupProperty) {
  crc::SampleStream rng(31, 0);
  for (int k = 0; k < 20; ++k) {
    const ComplexMatrix3 x = rng.su21_element_sample(1.0);
    const ComplexMatrix3 e = crc::mat_exp(x);
    EXPECT_LE(crc::max_abs_diff(e * e, crc::mat_exp(x * 2.0)), 1e-12 * std::max(1.0, (e * e).max_abs()));
  }
}
