#include <gtest/gtest.h>

#include "ponder/sweep.hpp"

using namespace ponder;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.omega_min = 5e4;
  s.omega_max = 2e5;
  s.omega_count = 40;
  s.resonance_count = 101;
  s.resonance_halfwidth = 0.1;
  s.temperatures = {0.1, 4.0, 300.0};
  return s;
}

}  // namespace

TEST(Sweep, CsvHeaders) {
  EXPECT_EQ(csv_header(true),
            "omega,temperature,var_u,var_v,commutator_sq,degree,degree_clipped,entangled,epr\n");
  EXPECT_EQ(csv_header(false), "omega,temperature,degree,degree_clipped,entangled,epr\n");
}

TEST(Sweep, SinglePointGrid) {
  auto spec = small_spec();
  spec.spacing = GridSpacing::linear;
  spec.omega_min = 1e5;
  spec.omega_count = 1;
  spec.temperatures = {4.0};
  const auto r = run_sweep(default_params(), spec);
  ASSERT_EQ(r.points.size(), 1u);
  const auto csv = format_csv(r, false);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_NE(csv.find("1.000000000000000e+05,4.000000000000000e+00,"), std::string::npos);
  EXPECT_FALSE(r.stable);
}

TEST(Sweep, MatchesPointwiseEvaluation) {
  const auto p = default_params();
  const auto r = run_sweep(p, small_spec());
  const auto sys = build_linear_system(p, StabilityPolicy::formal);
  for (std::size_t t = 0; t < r.temperatures.size(); ++t) {
    for (std::size_t w : {std::size_t{0}, r.omega.size() / 2, r.omega.size() - 1}) {
      NoiseModel noise{r.temperatures[t], p.big_gamma, p.big_omega};
      const auto ref = degree_of_entanglement(sys, noise, r.omega[w]);
      EXPECT_EQ(r.at(t, w).degree, ref.degree);
    }
  }
}

TEST(Sweep, WorkerCountDoesNotChangeOutput) {
  auto spec = small_spec();
  const auto one = format_csv(run_sweep(default_params(), spec), true);
  spec.workers = 8;
  const auto eight = format_csv(run_sweep(default_params(), spec), true);
  EXPECT_EQ(one, eight);
}

TEST(Sweep, EnforcePolicyRejectsUnstablePoint) {
  auto spec = small_spec();
  spec.stability = StabilityPolicy::enforce;
  EXPECT_THROW(run_sweep(default_params(), spec), StabilityError);
}

TEST(Sweep, RejectsBadGrids) {
  auto spec = small_spec();
  spec.temperatures = {4.0, 1.0};
  EXPECT_THROW(run_sweep(default_params(), spec), InvalidParameter);
  spec.temperatures = {-1.0};
  EXPECT_THROW(run_sweep(default_params(), spec), InvalidParameter);
  spec = small_spec();
  spec.spacing = GridSpacing::linear;
  spec.omega_max = spec.omega_min;
  EXPECT_THROW(run_sweep(default_params(), spec), InvalidParameter);
}

TEST(Sweep, SummaryBands) {
  SweepResult r;
  r.omega = {1.0, 2.0, 3.0, 4.0, 5.0};
  r.temperatures = {1.0};
  for (double d : {2.0, 0.5, 0.2, 3.0, 0.9}) {
    EntanglementPoint p;
    p.degree = d;
    p.entangled = d < 1.0;
    p.epr = d < 0.25;
    r.points.push_back(p);
  }
  const auto s = summarize(r).at(0);
  EXPECT_EQ(s.min_degree, 0.2);
  EXPECT_EQ(s.argmin_omega, 3.0);
  ASSERT_EQ(s.entangled_bands.size(), 2u);
  EXPECT_EQ(s.entangled_bands[0].lo, 2.0);
  EXPECT_EQ(s.entangled_bands[0].hi, 3.0);
  EXPECT_EQ(s.entangled_bands[1].lo, 5.0);
  ASSERT_EQ(s.epr_bands.size(), 1u);
  EXPECT_EQ(s.epr_bands[0].lo, 3.0);
}

TEST(Sweep, ConfigKeys) {
  auto cfg = KeyValueConfig::parse_string(
      "omega_spacing = log\ntemperatures = 0.1, 1, 4\nworkers = 3\nstability = enforce\n"
      "brownian_kernel = halved\nemit_components = false\n");
  SweepSpec s;
  apply_config(cfg, s);
  EXPECT_NO_THROW(cfg.reject_unknown());
  EXPECT_EQ(s.spacing, GridSpacing::log);
  EXPECT_EQ(s.temperatures, (std::vector<double>{0.1, 1.0, 4.0}));
  EXPECT_EQ(s.workers, 3);
  EXPECT_EQ(s.stability, StabilityPolicy::enforce);
  EXPECT_EQ(s.kernel, BrownianKernel::halved);
  EXPECT_FALSE(s.emit_components);
  auto bad = KeyValueConfig::parse_string("omega_spacing = cubic\n");
  EXPECT_THROW(apply_config(bad, s), ConfigError);
}

TEST(Sweep, GridFileBlocks) {
  auto spec = small_spec();
  spec.temperatures = {0.1, 4.0};
  const auto r = run_sweep(default_params(), spec);
  const auto g = format_grid(r);
  EXPECT_EQ(g.rfind("# omega temperature degree_clipped\n", 0), 0u);
  EXPECT_EQ(std::count(g.begin(), g.end(), '\n'),
            static_cast<long>(1 + 2 * r.omega.size() + 1));
}
