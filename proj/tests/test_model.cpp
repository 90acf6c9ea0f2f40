#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ponder/model.hpp"

using namespace ponder;

namespace {

// Values frozen from a 40-digit mpmath evaluation of the closed forms.
constexpr double kOpticalOmega1064 = 1770349217395538.794;       // 2 pi c / 1064 nm
constexpr double kAmplitude5mW = 163650542.7908406071;           // sqrt(5 mW / hbar w)
constexpr double kDefaultBetaAbs2 = 214252001245.8940208;           // |beta|^2
constexpr double kDefaultBetaRe = 207003.3822167618694;
constexpr double kDefaultBetaIm = 414006.7644335237389;
constexpr double kDefaultAlpha = 327301.0855816812142;
constexpr double kDefaultQ1 = -10176970.05917996599;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(PowerToAmplitude, ZeroPowerGivesZero) {
  EXPECT_EQ(power_to_amplitude(0.0, 1e15), 0.0);
}

TEST(PowerToAmplitude, OnePhotonPerSecond) {
  const double w = 1.234e15;
  EXPECT_NEAR(power_to_amplitude(constants::hbar * w, w), 1.0, 1e-15);
}

TEST(PowerToAmplitude, FiveMilliwattsAt1064nm) {
  EXPECT_LT(rel(optical_angular_frequency(1064e-9), kOpticalOmega1064), 1e-15);
  EXPECT_LT(rel(power_to_amplitude(5e-3, kOpticalOmega1064), kAmplitude5mW), 1e-14);
}

TEST(PowerToAmplitude, RejectsNonPositiveFrequency) {
  EXPECT_THROW(power_to_amplitude(1.0, 0.0), InvalidParameter);
  EXPECT_THROW(power_to_amplitude(1.0, -3.0), InvalidParameter);
  EXPECT_THROW(power_to_amplitude(-1.0, 3.0), InvalidParameter);
}

TEST(SteadyState, NoDriveNoDisplacement) {
  auto p = default_params();
  p.p_in_a = 0.0;
  p.p_in_b = 0.0;
  const auto ss = steady_state(p);
  EXPECT_EQ(ss.alpha, cplx(0.0));
  EXPECT_EQ(ss.beta, cplx(0.0));
  EXPECT_EQ(ss.q1_ss, 0.0);
  EXPECT_EQ(ss.q2_ss, 0.0);
}

TEST(SteadyState, ResonantEntanglerIsReal) {
  auto p = default_params();
  p.delta_b = 0.0;
  const auto ss = steady_state(p);
  EXPECT_EQ(ss.beta.imag(), 0.0);
  const double beta_in = power_to_amplitude(p.p_in_b, p.omega_b0);
  EXPECT_LT(rel(std::abs(ss.beta), 2.0 * beta_in / std::sqrt(p.gamma_b)), 1e-14);
}

TEST(SteadyState, DefaultWorkingPoint) {
  const auto ss = steady_state(default_params());
  EXPECT_LT(rel(std::norm(ss.beta), kDefaultBetaAbs2), 1e-12);
  EXPECT_LT(rel(ss.beta.real(), kDefaultBetaRe), 1e-12);
  EXPECT_LT(rel(ss.beta.imag(), kDefaultBetaIm), 1e-12);
  EXPECT_LT(rel(ss.alpha.real(), kDefaultAlpha), 1e-12);
  EXPECT_LT(rel(ss.q1_ss, kDefaultQ1), 1e-12);
}

TEST(SteadyState, Invariants) {
  const auto ss = steady_state(default_params());
  EXPECT_EQ(ss.alpha.imag(), 0.0);
  EXPECT_GT(ss.alpha.real(), 0.0);
  EXPECT_EQ(ss.q1_ss, -ss.q2_ss);
  EXPECT_EQ(ss.p1_ss, 0.0);
  EXPECT_EQ(ss.p2_ss, 0.0);
}

TEST(SteadyState, DoublingPowerDoublesIntensity) {
  auto p = default_params();
  const auto a = steady_state(p);
  p.p_in_a *= 2.0;
  p.p_in_b *= 2.0;
  const auto b = steady_state(p);
  EXPECT_LT(rel(std::norm(b.alpha), 2.0 * std::norm(a.alpha)), 1e-14);
  EXPECT_LT(rel(std::norm(b.beta), 2.0 * std::norm(a.beta)), 1e-14);
}

TEST(SteadyState, DisplacementsHaveOppositeSigns) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    auto p = default_params();
    p.g = 10.0 * u(rng);
    p.big_g = 10.0 * u(rng);
    p.p_in_a = 1e-2 * u(rng);
    p.p_in_b = 1e-2 * u(rng);
    p.delta_b = 2e5 * (u(rng) - 0.5);
    const auto ss = steady_state(p);
    EXPECT_LE(ss.q1_ss * ss.q2_ss, 0.0);
  }
  auto p = default_params();
  p.g = 0.0;
  p.big_g = 0.0;
  const auto ss = steady_state(p);
  EXPECT_EQ(ss.q1_ss * ss.q2_ss, 0.0);
}

TEST(SteadyState, IsPure) {
  const auto a = steady_state(default_params());
  const auto b = steady_state(default_params());
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.q1_ss, b.q1_ss);
}

TEST(Validate, RejectsNonPositiveRates) {
  auto p = default_params();
  p.mass = 0.0;
  EXPECT_THROW(validate(p), InvalidParameter);
  p = default_params();
  p.gamma_b = -1.0;
  EXPECT_THROW(validate(p), InvalidParameter);
  p = default_params();
  p.temperature = -1e-3;
  EXPECT_THROW(validate(p), InvalidParameter);
  p = default_params();
  p.temperature = 0.0;
  EXPECT_NO_THROW(validate(p));
}

TEST(Validate, WarnsWhenMeterDominates) {
  EXPECT_TRUE(validate(default_params()).empty());
  auto p = default_params();
  p.g = 6.0;
  EXPECT_EQ(validate(p).size(), 1u);
  p.p_in_a = 1.0;
  EXPECT_EQ(validate(p).size(), 2u);
}

TEST(Config, ReadsFieldsAndRejectsUnknownKeys) {
  auto cfg = KeyValueConfig::parse_string(
      "# test\n"
      "big_gamma = 2.5\n"
      "temperature=0.1   # K\n"
      "wavelength = 532e-9\n");
  auto p = default_params();
  apply_config(cfg, p);
  EXPECT_NO_THROW(cfg.reject_unknown());
  EXPECT_EQ(p.big_gamma, 2.5);
  EXPECT_EQ(p.temperature, 0.1);
  EXPECT_EQ(p.omega_b0, optical_angular_frequency(532e-9));

  auto bad = KeyValueConfig::parse_string("big_gamma = 1\nbogus = 3\n");
  apply_config(bad, p);
  EXPECT_THROW(bad.reject_unknown(), ConfigError);
}

TEST(Config, ParseErrors) {
  EXPECT_THROW(KeyValueConfig::parse_string("no equals sign\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse_string("a = 1\na = 2\n"), ConfigError);
  auto cfg = KeyValueConfig::parse_string("g = 1.0x\n");
  auto p = default_params();
  EXPECT_THROW(apply_config(cfg, p), ConfigError);
}
