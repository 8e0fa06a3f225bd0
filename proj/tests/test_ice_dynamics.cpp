#include <gtest/gtest.h>

#include "seaice/verification.hpp"

using namespace seaice;

namespace {
const Torus kT{16, 16};
}

TEST(GrowthRate, ConstantKind) {
  const GrowthRate f{GrowthKind::Constant, 0.1};
  EXPECT_EQ(growth_rate(f, 0.0), 0.1);
  EXPECT_EQ(growth_rate(f, 7.3), 0.1);
}

TEST(GrowthRate, DecayingExponential) {
  const GrowthRate f{GrowthKind::DecayingExponential, 0.3, 2.0};
  EXPECT_EQ(growth_rate(f, 0.0), 0.3);
  EXPECT_NEAR(growth_rate(f, 2.0), 0.3 / std::numbers::e, 1e-16);
  EXPECT_THROW(growth_rate(f, -1e-3), ArgumentError);
}

TEST(GrowthRate, TableInterpolatesAndClamps) {
  const GrowthRate f{GrowthKind::Table, 0.0, 1.0, {{0.0, -1.0}, {1.0, 1.0}, {3.0, 0.0}}};
  EXPECT_EQ(growth_rate(f, 0.0), -1.0);
  EXPECT_NEAR(growth_rate(f, 0.5), 0.0, 1e-15);
  EXPECT_NEAR(growth_rate(f, 2.0), 0.5, 1e-15);
  EXPECT_EQ(growth_rate(f, 10.0), 0.0);
  const GrowthRate bad{GrowthKind::Table, 0.0, 1.0, {{1.0, 0.0}, {0.5, 1.0}}};
  EXPECT_FALSE(bad.violations().empty());
}

TEST(ThermoSources, ConstantRateGivesUniformThicknessSource) {
  PhysParams p;
  std::mt19937_64 rng(1);
  auto [u, h, a] = random_ice_state(p, kT, rng);
  const ThermoSources s = thermo_sources(p, h, a, {GrowthKind::Constant, 0.1});
  EXPECT_LT(max_abs_diff(s.S_h, Field2D(kT, 0.1)), 1e-15);
  for (std::size_t n = 0; n < a.size(); ++n) EXPECT_NEAR(s.S_a[n], (0.1 / p.kappa1) * (1.0 - a[n]), 1e-13);
}

TEST(ThermoSources, NoOpenWaterFreezingWithFullCover) {
  PhysParams p;
  const ThermoSources s = thermo_sources(p, Field2D(kT, 1.0), Field2D(kT, 1.0), {GrowthKind::Constant, 0.2});
  EXPECT_EQ(max_abs(s.S_a), 0.0);
}

TEST(ThermoSources, NegativeZeroRateWithGrowthLeavesCompactness) {
  PhysParams p;
  const GrowthRate f{GrowthKind::Table, 0.0, 1.0, {{0.0, -0.01}, {0.3, 1.0}}};
  const ThermoSources s = thermo_sources(p, Field2D(kT, 1.0), Field2D(kT, 0.9), f);
  EXPECT_GT(s.S_h[0], 0.0);
  EXPECT_EQ(max_abs(s.S_a), 0.0);
}

TEST(ThermoSources, MeltingReducesCompactness) {
  PhysParams p;
  const double h = 1.0, a = 0.5, f0 = -0.2;
  const ThermoSources s = thermo_sources(p, Field2D(kT, h), Field2D(kT, a), {GrowthKind::Constant, f0});
  EXPECT_NEAR(s.S_h[0], f0, 1e-15);
  EXPECT_NEAR(s.S_a[0], a / (2.0 * h) * f0, 1e-15);
}

TEST(ThermoSources, CompactnessFloorAtOpenWater) {
  PhysParams p;
  const GrowthRate f{GrowthKind::DecayingExponential, 0.1, 1.0};
  const ThermoSources s = thermo_sources(p, Field2D(kT, 1.0), Field2D(kT, 0.0), f);
  EXPECT_NEAR(s.S_h[0], 0.1, 1e-15);
  EXPECT_TRUE(std::isfinite(s.S_a[0]));
}

TEST(IceAdvection, SimpleCases) {
  const VecField2D u(sample(kT, [](double x, double) { return std::sin(x); }),
                     sample(kT, [](double, double y) { return std::cos(y); }));
  EXPECT_EQ(max_abs(ice_advection(kT, VecField2D(kT), Field2D(kT, 2.0))), 0.0);
  EXPECT_LT(max_abs_diff(ice_advection(kT, u, Field2D(kT, 2.0)), 2.0 * divergence(kT, u)), 1e-13);
}

TEST(IceAdvection, IntegralVanishes) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const VecField2D u{random_grid(kT, rng), random_grid(kT, rng)};
    EXPECT_LT(std::abs(integrate(kT, ice_advection(kT, u, random_grid(kT, rng)))), 1e-11);
  }
}

TEST(MomentumNonlin, SimpleCases) {
  EXPECT_EQ(max_abs(momentum_nonlin(kT, VecField2D(kT, 0.4))), 0.0);
  const VecField2D shear(sample(kT, [](double, double y) { return std::sin(y); }), Field2D(kT));
  EXPECT_LT(max_abs(momentum_nonlin(kT, shear)), 1e-14);
}

TEST(MomentumNonlin, MatchesTermwiseComposition) {
  std::mt19937_64 rng(3);
  const VecField2D u = random_smooth_vec(kT, rng);
  const VecField2D got = momentum_nonlin(kT, u);
  const VecField2D gx = gradient(kT, u.x), gy = gradient(kT, u.y);
  for (std::size_t n = 0; n < kT.size(); ++n) {
    EXPECT_NEAR(got.x[n], u.x[n] * gx.x[n] + u.y[n] * gx.y[n], 1e-12);
    EXPECT_NEAR(got.y[n], u.x[n] * gy.x[n] + u.y[n] * gy.y[n], 1e-12);
  }
}

TEST(AtmosphericStress, ZeroAndConstantWind) {
  PhysParams p;
  p.theta_atm = 0.0;
  EXPECT_EQ(max_abs(tau_atm(p, VecField2D(kT))), 0.0);
  for (double w : {3.0, -3.0}) {
    const VecField2D t = tau_atm(p, VecField2D(Field2D(kT, w), Field2D(kT)));
    EXPECT_NEAR(t.x[0], p.rho_atm * p.C_atm * w * w * (w > 0 ? 1.0 : -1.0), 1e-15);
    EXPECT_EQ(t.y[0], 0.0);
  }
}

TEST(AtmosphericStress, QuarterTurnRotatesOutput) {
  PhysParams p;
  std::mt19937_64 rng(4);
  const VecField2D w{random_grid(kT, rng), random_grid(kT, rng)};
  p.theta_atm = 0.0;
  const VecField2D t0 = tau_atm(p, w);
  p.theta_atm = std::numbers::pi / 2.0;
  const VecField2D t1 = tau_atm(p, w);
  EXPECT_LT(max_abs_diff(t1.x, -1.0 * t0.y), 1e-14);
  EXPECT_LT(max_abs_diff(t1.y, t0.x), 1e-14);
}

TEST(AtmosphericStress, OddInWind) {
  PhysParams p;
  std::mt19937_64 rng(5);
  const VecField2D w{random_grid(kT, rng), random_grid(kT, rng)};
  EXPECT_LT(max_abs(tau_atm(p, -1.0 * w) + tau_atm(p, w)), 1e-15);
}

TEST(OceanStress, LinearMapWithRotation) {
  PhysParams p;
  p.theta_ocn = 0.0;
  EXPECT_EQ(max_abs(tau_ocn(p, VecField2D(kT))), 0.0);
  const VecField2D t = tau_ocn(p, VecField2D(Field2D(kT, 0.2), Field2D(kT)));
  EXPECT_NEAR(t.x[0], p.rho_ocn * p.C_ocn * 0.2, 1e-14);
  EXPECT_EQ(t.y[0], 0.0);
  p.theta_ocn = 0.4;
  std::mt19937_64 rng(6);
  const VecField2D a{random_grid(kT, rng), random_grid(kT, rng)}, b{random_grid(kT, rng), random_grid(kT, rng)};
  EXPECT_LT(max_abs_diff(tau_ocn(p, a + 3.0 * b), tau_ocn(p, a) + 3.0 * tau_ocn(p, b)), 1e-12);
}
