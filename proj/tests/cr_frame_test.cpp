#include <gtest/gtest.h>

#include <numbers>

#include "crc/cr_frame.hpp"
#include "crc/sampling.hpp"

using crc::Complex;
using crc::ComplexMatrix3;
using crc::Point;
using crc::Tangent;

namespace {

const crc::SectionFrame kQuadric = crc::quadric_frame();

}  // namespace

TEST(QuadricFrame, DualityAtRandomPoints) {
  for (int k = 0; k < 100; ++k) {
    const Point p = crc::SampleStream(crc::kDefaultSeed, static_cast<std::uint64_t>(k)).point_in_box();
    EXPECT_LE(crc::duality_defect(kQuadric, p), 1e-10);
  }
}

TEST(QuadricFrame, Examples) {
  const Point p{0.3, -0.7, 0.2};
  EXPECT_EQ(kQuadric.forms(p, kQuadric.z0(p)).omega, 1.0);
  EXPECT_EQ(kQuadric.omega1_on(p, kQuadric.z1(p)), Complex(1.0, 0.0));
  EXPECT_EQ(kQuadric.omega_on(p, kQuadric.z1(p)), Complex(0.0, 0.0));
  EXPECT_EQ(kQuadric.forms({0.0, -1.0, 0.0}, {2.0, 0.0, -4.0}).omega, 0.0);
}

TEST(QuadricFrame, Z1MatchesComplexCoordinates) {
  // Z_1 = d/dz1 + i conj(z1) d/dx2: dz1(Z_1) = 1, dconj(z1)(Z_1) = 0, dx2(Z_1) = i conj(z1).
  const Point p{0.4, 0.9, -0.1};
  const crc::ComplexTangent z = kQuadric.z1(p);
  const Complex dx1{z.re.dx1, z.im.dx1}, dy1{z.re.dy1, z.im.dy1}, dx2{z.re.dx2, z.im.dx2};
  EXPECT_EQ(dx1 + crc::kI * dy1, Complex(1.0, 0.0));
  EXPECT_EQ(dx1 - crc::kI * dy1, Complex(0.0, 0.0));
  EXPECT_EQ(dx2, crc::kI * std::conj(p.z1()));
}

TEST(Horizontality, Examples) {
  const Point p{-0.2, 0.5, 0.8};
  const auto z1 = kQuadric.z1(p);
  EXPECT_EQ(crc::horizontality(kQuadric, p, z1.re), 0.0);
  EXPECT_EQ(crc::horizontality(kQuadric, p, z1.im), 0.0);
  EXPECT_EQ(crc::horizontality(kQuadric, p, kQuadric.z0(p)), 1.0);
  EXPECT_EQ(crc::horizontality(kQuadric, {0.0, -1.0, 0.0}, {2.0, 0.0, -4.0}), 0.0);
}

TEST(SectionFrame, RejectsRealOmega11) {
  auto forms = [](const Point&, const Tangent& v) {
    crc::FormValues fv;
    fv.omega1_1 = {v.dx1, 0.0};
    return fv;
  };
  const crc::SectionFrame bad("bad", forms, [](const Point&) { return Tangent{0, 0, 1}; },
                              [](const Point&) { return crc::ComplexTangent{}; });
  EXPECT_THROW(bad.forms({}, {1.0, 0.0, 0.0}), std::domain_error);
  EXPECT_FALSE(bad.has_analytic_derivatives());
  EXPECT_THROW(bad.derivatives({}, {}, {}), std::logic_error);
}

TEST(ConnectionMatrix, QuadricExamples) {
  const Point p{0.1, 0.2, 0.3};
  const auto z1 = kQuadric.z1(p);
  // pi is complex-linear in the complexified vector: pi(Z_1) = pi(Re) + i pi(Im).
  const ComplexMatrix3 on_z1 =
      crc::connection_matrix(kQuadric, p, z1.re) + crc::kI * crc::connection_matrix(kQuadric, p, z1.im);
  ComplexMatrix3 expected;
  expected(1, 0) = 1.0;
  EXPECT_LE(crc::max_abs_diff(on_z1, expected), 1e-15);

  ComplexMatrix3 expected0;
  expected0(2, 0) = 2.0;
  EXPECT_EQ(crc::connection_matrix(kQuadric, p, kQuadric.z0(p)), expected0);
}

TEST(ConnectionMatrix, InAlgebraAndLinear) {
  for (int k = 0; k < 100; ++k) {
    crc::SampleStream rng(41, static_cast<std::uint64_t>(k));
    EXPECT_TRUE(crc::is_su21_algebra(crc::connection_matrix(rng.form_values(3.0))));
    const Point p = rng.point_in_box();
    const Tangent u = rng.tangent(), v = rng.tangent();
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const ComplexMatrix3 lhs = crc::connection_matrix(kQuadric, p, u * a + v * b);
    const ComplexMatrix3 rhs = crc::connection_matrix(kQuadric, p, u) * a + crc::connection_matrix(kQuadric, p, v) * b;
    EXPECT_LE(crc::max_abs_diff(lhs, rhs), 1e-12);
    const crc::FormValues fv = kQuadric.forms(p, u);
    EXPECT_EQ(fv.phi, 0.0);
    EXPECT_EQ(fv.omega1_1, Complex{});
    EXPECT_EQ(fv.phi1, Complex{});
    EXPECT_EQ(fv.psi, 0.0);
  }
}

TEST(ConnectionMatrix, ReadFormsRoundTrip) {
  crc::SampleStream rng(43, 0);
  for (int k = 0; k < 50; ++k) {
    const crc::FormValues fv = rng.form_values(2.0);
    EXPECT_LE((fv - crc::read_forms(crc::connection_matrix(fv))).max_abs(), 1e-15);
  }
}

TEST(Coframe, Examples) {
  const crc::CoframeValues x{{0.3, 0.1}, {1.0, -2.0}, {1.0, 2.0}, {0.5, 0.0}};
  const auto same = crc::coframe_transform(x, {});
  EXPECT_EQ(same.as_array(), x.as_array());

  const auto flipped = crc::coframe_transform(x, {std::numbers::pi, 0.0, 0.0});
  EXPECT_LE(std::abs(flipped.omega1 + x.omega1), 1e-15);
  EXPECT_LE(std::abs(flipped.phi - x.phi), 1e-15);
  EXPECT_EQ(flipped.omega, x.omega);
}

TEST(Coframe, CompositionIsMatrixProduct) {
  for (int k = 0; k < 50; ++k) {
    crc::SampleStream rng(47, static_cast<std::uint64_t>(k));
    const crc::CoframeParams p{rng.uniform(-3, 3), rng.complex_in_disk(2), rng.uniform(-2, 2)};
    const crc::CoframeParams q{rng.uniform(-3, 3), rng.complex_in_disk(2), rng.uniform(-2, 2)};
    const crc::CoframeValues x{rng.complex_in_disk(1), rng.complex_in_disk(1), rng.complex_in_disk(1),
                               rng.complex_in_disk(1)};
    const auto twice = crc::coframe_transform(crc::coframe_transform(x, p), q);
    const auto product = crc::apply_coframe(x, crc::multiply(crc::coframe_matrix(p), crc::coframe_matrix(q)));
    const auto composed = crc::coframe_transform(x, crc::compose(p, q));
    for (int i = 0; i < 4; ++i) {
      EXPECT_LE(std::abs(twice.as_array()[i] - product.as_array()[i]), 1e-12);
      EXPECT_LE(std::abs(twice.as_array()[i] - composed.as_array()[i]), 1e-12);
    }
  }
}

TEST(FrameRegistry, QuadricPreregistered) {
  crc::FrameRegistry reg;
  EXPECT_TRUE(reg.contains("quadric"));
  EXPECT_EQ(reg.get("quadric").name(), "quadric");
  EXPECT_THROW(reg.get("missing"), std::out_of_range);
  reg.add(crc::SectionFrame("other", [](const Point&, const Tangent&) { return crc::FormValues{}; },
                            [](const Point&) { return Tangent{}; }, [](const Point&) { return crc::ComplexTangent{}; }));
  EXPECT_EQ(reg.names().size(), 2u);
}
