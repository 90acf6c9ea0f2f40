#include <gtest/gtest.h>

#include <cmath>

#include "ponder/entanglement.hpp"
#include "ponder/readout.hpp"

using namespace ponder;

namespace {

PhysicalParams stable_coupled() {
  auto p = default_params();
  p.delta_b = -1e5;
  p.p_in_b = 1e-6;
  p.big_gamma = 1e3;
  return p;
}

// Frozen from an mpmath evaluation at 40 digits: g^2 alpha^2 / ((gamma_a^2/4 + Omega^2)/4).
constexpr double kDefaultGainRatio = 8.5700800498357608;

}  // namespace

TEST(Readout, UncoupledMeterReadsVacuum) {
  auto p = default_params();
  p.g = 0.0;
  const auto sys = build_linear_system(p, StabilityPolicy::formal);
  const auto noise = make_noise_model(p);
  const auto ss = steady_state(p);
  for (int ch : {1, 2}) {
    const auto c = ReadoutChannel::make(p, ss, ch);
    for (double w : {1e3, 1e5, 1e7}) {
      EXPECT_NEAR(output_spectrum(sys, noise, c, w), 1.0, 1e-13);
      EXPECT_NEAR(output_spectrum_cavity(sys, noise, c, w), 1.0, 1e-13);
    }
  }
}

TEST(Readout, ReflectionIsAllPass) {
  const auto c = ReadoutChannel::make(default_params(), steady_state(default_params()), 1);
  for (double w : {-1e7, -3.0, 0.0, 1e5, 1e9}) EXPECT_NEAR(std::abs(c.noise_reflection(w)), 1.0, 1e-15);
}

TEST(Readout, ChannelSigns) {
  const auto p = default_params();
  const auto ss = steady_state(p);
  const auto c1 = ReadoutChannel::make(p, ss, 1);
  const auto c2 = ReadoutChannel::make(p, ss, 2);
  EXPECT_GT(c1.gain_scale, 0.0);
  EXPECT_EQ(c2.gain_scale, -c1.gain_scale);
  EXPECT_THROW(ReadoutChannel::make(p, ss, 3), InvalidParameter);
  EXPECT_THROW(ReadoutChannel::make(p, ss, 1, 0.0), InvalidParameter);
  EXPECT_THROW(ReadoutChannel::make(p, ss, 1, 1.2), InvalidParameter);
}

TEST(Readout, ClosedFormAndTransferRoutesAgree) {
  for (const auto& p : {default_params(), stable_coupled()}) {
    const auto sys = build_linear_system(p, StabilityPolicy::formal);
    const auto noise = make_noise_model(p);
    const auto ss = steady_state(p);
    for (int ch : {1, 2}) {
      const auto c = ReadoutChannel::make(p, ss, ch);
      for (double w : {2e3, 8e4, 1e5, 1.05e5, 6e5}) {
        const double a = output_spectrum(sys, noise, c, w);
        const double b = output_spectrum_cavity(sys, noise, c, w);
        EXPECT_LT(std::abs(a - b) / std::abs(b), 1e-10) << ch << " " << w;
        EXPECT_GE(a, 0.0);
      }
    }
  }
}

TEST(Readout, SumCurrentTracksCenterOfMassVariance) {
  // The phase quadrature Y_in never drives the mirrors, so
  // S_{I1+I2} = |gain|^2 * 2 Var(R_u) + 2 exactly.
  const auto p = stable_coupled();
  const auto sys = build_linear_system(p);
  const auto noise = make_noise_model(p);
  const auto ss = steady_state(p);
  const auto c1 = ReadoutChannel::make(p, ss, 1);
  const auto c2 = ReadoutChannel::make(p, ss, 2);
  const std::vector<double> grid = {5e4, 1e5, 1.5e5};
  const auto sum = combine_currents(two_channel_spectra(sys, noise, c1, c2, grid), CombineMode::sum);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double var_u = degree_of_entanglement(sys, noise, grid[i]).var_u;
    const double expected = std::norm(c1.gain(grid[i])) * 2.0 * var_u + 2.0;
    EXPECT_LT(std::abs(sum.value[i] - expected) / expected, 1e-9);
  }
}

TEST(Readout, CombineModes) {
  TwoChannelSpectra d;
  d.channel1 = {{1.0, 2.0}, {3.0, 4.0}};
  d.channel2 = {{1.0, 2.0}, {5.0, 6.0}};
  d.cross = {{1.0, 2.0}, {0.5, -1.0}};
  const auto s = combine_currents(d, CombineMode::sum);
  const auto m = combine_currents(d, CombineMode::difference);
  EXPECT_EQ(s.value, (std::vector<double>{9.0, 8.0}));
  EXPECT_EQ(m.value, (std::vector<double>{7.0, 12.0}));
  d.channel2.omega = {1.0, 2.5};
  EXPECT_THROW(combine_currents(d, CombineMode::sum), GridMismatchError);
  d.channel2.omega = {1.0, 2.0};
  d.cross.value.pop_back();
  EXPECT_THROW(combine_currents(d, CombineMode::sum), GridMismatchError);
}

TEST(Readout, DetectorEfficiencyMixesInVacuum) {
  const auto p = stable_coupled();
  const auto sys = build_linear_system(p);
  const auto noise = make_noise_model(p);
  const auto ss = steady_state(p);
  const double ideal = output_spectrum(sys, noise, ReadoutChannel::make(p, ss, 1), p.big_omega);
  const double lossy = output_spectrum(sys, noise, ReadoutChannel::make(p, ss, 1, 0.6), p.big_omega);
  EXPECT_NEAR(lossy, 0.6 * ideal + 0.4, 1e-12 * ideal);
}

TEST(GainCondition, DefaultWorkingPoint) {
  const auto p = default_params();
  const auto gc = gain_condition(p, p.big_omega);
  EXPECT_LT(std::abs(gc.ratio - kDefaultGainRatio) / kDefaultGainRatio, 1e-12);
  EXPECT_FALSE(gc.satisfied);
  EXPECT_TRUE(gain_condition(p, p.big_omega, 5.0).satisfied);
}

TEST(GainCondition, Limits) {
  auto p = default_params();
  EXPECT_LT(gain_condition(p, 1e12).ratio, 1e-6);
  // ratio falls monotonically with frequency
  double prev = INFINITY;
  for (double w : {0.0, 1e4, 1e5, 1e6}) {
    const double r = gain_condition(p, w).ratio;
    EXPECT_LT(r, prev);
    prev = r;
  }
  p.p_in_a = 0.0;
  EXPECT_EQ(gain_condition(p, p.big_omega).ratio, 0.0);
  EXPECT_FALSE(gain_condition(p, p.big_omega).satisfied);
}
