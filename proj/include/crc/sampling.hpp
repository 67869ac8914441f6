#pragma once

// Seeded, per-index random streams. Sample k of a suite always draws from
// its own engine, so results do not depend on evaluation order.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>

#include "crc/algebra.hpp"
#include "crc/cr_frame.hpp"

namespace crc {

inline constexpr std::uint64_t kDefaultSeed = 42;

// CRC_SEED overrides the default seed when it parses as an unsigned integer.
inline std::uint64_t seed_from_env(std::uint64_t fallback = kDefaultSeed) {
  const char* env = std::getenv("CRC_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  return (end != nullptr && *end == '\0') ? static_cast<std::uint64_t>(v) : fallback;
}

class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  Complex unit_complex() { return std::polar(1.0, uniform(0.0, 2.0 * std::numbers::pi)); }

  // Complex number with modulus uniform in [0, max_modulus].
  Complex complex_in_disk(double max_modulus) { return uniform(0.0, max_modulus) * unit_complex(); }

  Point point_in_box(double half_width = 1.0) {
    return {uniform(-half_width, half_width), uniform(-half_width, half_width), uniform(-half_width, half_width)};
  }

  Tangent tangent(double half_width = 1.0) {
    return {uniform(-half_width, half_width), uniform(-half_width, half_width), uniform(-half_width, half_width)};
  }

  // Isotropy parameters with |a| log-uniform in [0.1, 10], |b| <= 5, |s| <= 5.
  HParams hparams() {
    HParams p;
    p.a = std::pow(10.0, uniform(-1.0, 1.0)) * unit_complex();
    p.b = complex_in_disk(5.0);
    p.s = uniform(-5.0, 5.0);
    return p;
  }

  // Free form values with the reality conditions respected.
  FormValues form_values(double scale = 1.0) {
    FormValues fv;
    fv.omega = uniform(-scale, scale);
    fv.omega1 = {uniform(-scale, scale), uniform(-scale, scale)};
    fv.omega1_1 = {0.0, uniform(-scale, scale)};
    fv.phi = uniform(-scale, scale);
    fv.phi1 = {uniform(-scale, scale), uniform(-scale, scale)};
    fv.psi = uniform(-scale, scale);
    return fv;
  }

  // su(2,1) element with every graded parameter bounded by `scale`.
  ComplexMatrix3 su21_element_sample(double scale = 1.0) {
    return su21_element(uniform(-scale, scale), complex_in_disk(scale), complex_in_disk(scale),
                        complex_in_disk(scale), uniform(-scale, scale));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace crc
