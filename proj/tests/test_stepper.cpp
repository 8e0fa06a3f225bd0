#include <gtest/gtest.h>

#include "seaice/verification.hpp"

using namespace seaice;

namespace {

const Torus kT{8, 8};

Model small_model(PhysParams p = {}, GrowthRate g = {}) { return make_model(p, kT, 9, 9, g); }

State quiet_state(const Model& m, double h = 1.0, double a = 0.9) {
  State s = State::zeros(m);
  s.h = Field2D(m.plane(), h);
  s.a = Field2D(m.plane(), a);
  return s;
}

State random_state(const Model& m, std::mt19937_64& rng, double amp = 0.05) {
  State s = State::zeros(m);
  auto [u, h, a] = random_ice_state(m.phys, m.plane(), rng, amp, {0.8, 1.2, 0.8, 0.95});
  s.u_ice = std::move(u);
  s.h = std::move(h);
  s.a = std::move(a);
  s.v_atm = random_smooth_vec(m.atm, rng);
  s.v_atm *= amp;
  s.v_ocn = random_smooth_vec(m.ocn, rng);
  s.v_ocn *= amp;
  return s;
}

// Cyclic shift by one cell in x, or mirror x -> -x with x-components negated.
template <class F>
F remap(const F& f, bool mirror) {
  F out = f;
  const int nx = f.nx();
  const std::size_t ns = static_cast<std::size_t>(nx) * f.ny();
  const std::size_t layers = f.size() / ns;
  for (std::size_t k = 0; k < layers; ++k)
    for (int j = 0; j < f.ny(); ++j)
      for (int i = 0; i < nx; ++i) {
        const int src = mirror ? (nx - i) % nx : (i + nx - 1) % nx;
        out[k * ns + j * nx + i] = f[k * ns + j * nx + src];
      }
  return out;
}

State remap(const State& s, bool mirror) {
  State r = s;
  const double sx = mirror ? -1.0 : 1.0;
  r.v_atm = {sx * remap(s.v_atm.x, mirror), remap(s.v_atm.y, mirror)};
  r.v_ocn = {sx * remap(s.v_ocn.x, mirror), remap(s.v_ocn.y, mirror)};
  r.u_ice = {sx * remap(s.u_ice.x, mirror), remap(s.u_ice.y, mirror)};
  r.h = remap(s.h, mirror);
  r.a = remap(s.a, mirror);
  return r;
}

double mode_amplitude(const Field2D& f, int m) { return std::abs(spectral_forward(f)(m, 0)); }

}  // namespace

TEST(ExplicitRhs, QuietStateLeavesOnlyThermodynamics) {
  const Model m = small_model({}, {GrowthKind::Constant, 0.1});
  const State r = explicit_rhs(m, quiet_state(m, 1.0, 0.9), Forcing{});
  EXPECT_EQ(max_abs(r.v_atm), 0.0);
  EXPECT_EQ(max_abs(r.v_ocn), 0.0);
  EXPECT_EQ(max_abs(r.u_ice), 0.0);
  EXPECT_LT(max_abs_diff(r.h, Field2D(kT, 0.1)), 1e-15);
  EXPECT_LT(max_abs_diff(r.a, Field2D(kT, (0.1 / m.phys.kappa1) * 0.1)), 1e-13);
}

TEST(ExplicitRhs, TranslationEquivariant) {
  const Model m = small_model({}, {GrowthKind::DecayingExponential, 0.05, 1.0});
  std::mt19937_64 rng(1);
  const State s = random_state(m, rng, 0.2);
  const State shifted_rhs = explicit_rhs(m, remap(s, false), Forcing{});
  EXPECT_LT(max_abs_diff(shifted_rhs, remap(explicit_rhs(m, s, Forcing{}), false)), 1e-12);
}

TEST(ExplicitRhs, RejectsInadmissibleState) {
  const Model m = small_model();
  State s = quiet_state(m);
  s.a[3] = 1.2;
  EXPECT_THROW(explicit_rhs(m, s, Forcing{}), DomainError);
}

TEST(ImplicitBlockSolve, ZeroRightHandSide) {
  const Model m = small_model();
  State b = State::zeros(m);
  const State x = implicit_block_solve(m, quiet_state(m), b, 0.1);
  EXPECT_EQ(max_abs(x), 0.0);
  EXPECT_THROW(implicit_block_solve(m, quiet_state(m), b, 0.0), ArgumentError);
}

TEST(ImplicitBlockSolve, SingleModeDiffusion) {
  const Model m = small_model();
  const double dt = 0.3;
  State b = State::zeros(m);
  b.h = sample(kT, [](double x, double) { return std::cos(2.0 * x); });
  b.a = sample(kT, [](double, double y) { return std::sin(3.0 * y); });
  const State x = implicit_block_solve(m, quiet_state(m), b, dt);
  EXPECT_LT(max_abs_diff(x.h, (1.0 / (1.0 + dt * m.phys.d_h * 4.0)) * b.h), 1e-14);
  EXPECT_LT(max_abs_diff(x.a, (1.0 / (1.0 + dt * m.phys.d_a * 9.0)) * b.a), 1e-14);
}

TEST(ImplicitBlockSolve, ApproachesIdentityAsStepShrinks) {
  const Model m = small_model();
  std::mt19937_64 rng(2);
  State b = State::zeros(m);
  b.h = random_smooth(kT, rng);
  b.a = random_smooth(kT, rng);
  std::vector<double> dts, errs;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const State x = implicit_block_solve(m, quiet_state(m), b, dt);
    dts.push_back(dt);
    errs.push_back(std::max(max_abs_diff(x.h, b.h), max_abs_diff(x.a, b.a)));
  }
  EXPECT_NEAR(convergence_order(dts, errs).fitted_order, 1.0, 0.1);
}

TEST(CoupledSolve, ZeroDataConvergesImmediately) {
  const Model m = small_model();
  const State s = quiet_state(m);
  IceImplicitOperator ice(linearize_hibler(m.phys, kT, s.u_ice, s.h, s.a), 0.1, m.ice_solver);
  const OceanIceSolution r = coupled_ocean_ice_solve(m, ice, s.h, VecField3D(m.ocn), VecField2D(kT));
  EXPECT_EQ(r.picard_iters, 1);
  EXPECT_EQ(max_abs(r.u_ice), 0.0);
  EXPECT_EQ(max_abs(r.v_ocn), 0.0);
}

TEST(CoupledSolve, TraceMatchesIceAndOceanIsDirichletLift) {
  const Model m = small_model();
  std::mt19937_64 rng(3);
  const State s = random_state(m, rng);
  const double dt = 0.1;
  IceImplicitOperator ice(linearize_hibler(m.phys, kT, s.u_ice, s.h, s.a), dt, m.ice_solver);
  const OceanIceSolution r = coupled_ocean_ice_solve(m, ice, s.h, VecField3D(m.ocn), random_smooth_vec(kT, rng));
  EXPECT_LE(r.coupling_residual, 1e-8);
  EXPECT_LE(r.last_update, m.couple_tol);
  // with no ocean forcing the ocean is exactly the Dirichlet lift of the ice velocity
  EXPECT_LT(max_abs_diff(r.v_ocn, dirichlet_operator(m.ocn, 1.0 / dt, r.u_ice, false).v), 1e-12);
}

TEST(CoupledSolve, RandomDataSatisfiesBothRows) {
  const Model m = small_model();
  std::mt19937_64 rng(4);
  const State s = random_state(m, rng);
  const double dt = 0.1;
  IceImplicitOperator ice(linearize_hibler(m.phys, kT, s.u_ice, s.h, s.a), dt, m.ice_solver);
  const VecField3D b_ocn = random_smooth_vec(m.ocn, rng);
  const VecField2D b_ice = random_smooth_vec(kT, rng);
  const OceanIceSolution r = coupled_ocean_ice_solve(m, ice, s.h, b_ocn, b_ice);
  EXPECT_LE(r.coupling_residual, 1e-8);
  // ice row: (I - dt A^H) u - dt c tau_ocn(d_z v) = b_ice
  VecField2D res = ice.apply(r.u_ice);
  axpy(-dt, ocean_force_on_ice(m, ocean_coupling_coefficient(m, s.h), dz_hi(m.ocn, r.v_ocn)), res);
  res -= b_ice;
  EXPECT_LT(max_abs(res) / max_abs(b_ice), 1e-7);
  // ocean row: projected (1/dt - Delta) v = b_ocn / dt with the lifted trace
  const VecField3D w = stokes_resolvent(m.ocn, 1.0 / dt, (1.0 / dt) * b_ocn, false).v;
  EXPECT_LT(max_abs_diff(r.v_ocn, w + dirichlet_operator(m.ocn, 1.0 / dt, r.u_ice, false).v), 1e-12);
}

TEST(CoupledSolve, PicardAgreesWithSimilarityTransform) {
  const Model m = small_model();
  std::mt19937_64 rng(5);
  const State s = random_state(m, rng);
  IceImplicitOperator ice(linearize_hibler(m.phys, kT, s.u_ice, s.h, s.a), 0.05, m.ice_solver);
  const VecField3D b_ocn = random_smooth_vec(m.ocn, rng);
  const VecField2D b_ice = random_smooth_vec(kT, rng);
  const OceanIceSolution p = coupled_ocean_ice_solve(m, ice, s.h, b_ocn, b_ice);
  const OceanIceSolution q = similarity_transform_solve(m, ice, s.h, b_ocn, b_ice);
  EXPECT_LT(max_abs_diff(p.u_ice, q.u_ice), 1e-7);
  EXPECT_LT(max_abs_diff(p.v_ocn, q.v_ocn), 1e-7);
}

TEST(ImexStep, EquilibriumIsFixedPoint) {
  const Model m = small_model({}, {GrowthKind::Constant, 0.0});
  const State s = quiet_state(m, 1.3, 0.85);
  auto [x, rep] = imex_step(m, s, Forcing{}, 0.2);
  EXPECT_LT(max_abs_diff(x, s), 1e-12);
  EXPECT_NEAR(x.t, 0.2, 1e-15);
  EXPECT_GT(rep.constraint_margin, 0.0);
}

TEST(ImexStep, SingleModeThicknessDiffusion) {
  PhysParams p;
  p.p_star = 1e-12;  // ice effectively strengthless, so no motion feeds back into h
  const Model m = small_model(p, {GrowthKind::Constant, 0.0});
  const double k = 2.0, amp = 0.1, T = 10.0;
  const double rate = m.phys.d_h * k * k;
  std::vector<double> dts, errs;
  for (double dt : {1.0, 0.5, 0.25}) {
    State s = quiet_state(m);
    s.h = sample(kT, [&](double x, double) { return 1.0 + amp * std::cos(k * x); });
    const int n = static_cast<int>(std::lround(T / dt));
    for (int i = 0; i < n; ++i) {
      s = imex_step(m, s, Forcing{}, dt).first;
      if (i == 0) {
        EXPECT_NEAR(mode_amplitude(s.h, 2), 0.5 * amp / (1.0 + dt * rate), 1e-13);
      }
    }
    EXPECT_NEAR(mode_amplitude(s.h, 2), 0.5 * amp * std::pow(1.0 + dt * rate, -n), 1e-12);
    dts.push_back(dt);
    errs.push_back(std::abs(mode_amplitude(s.h, 2) - 0.5 * amp * std::exp(-rate * T)));
  }
  EXPECT_NEAR(convergence_order(dts, errs).fitted_order, 1.0, 0.1);
}

TEST(ImexStep, MirrorSymmetry) {
  PhysParams p;
  p.theta_atm = 0.0;
  p.theta_ocn = 0.0;
  const Model m = small_model(p, {GrowthKind::DecayingExponential, 0.02, 1.0});
  std::mt19937_64 rng(6);
  const State s = random_state(m, rng);
  const State a = imex_step(m, remap(s, true), Forcing{}, 0.05).first;
  const State b = remap(imex_step(m, s, Forcing{}, 0.05).first, true);
  EXPECT_LT(max_abs_diff(a, b), 1e-10);
}

TEST(ImexStep, StepKeepsInvariants) {
  const Model m = small_model();
  std::mt19937_64 rng(7);
  const State s = random_state(m, rng);
  auto [x, rep] = imex_step(m, s, Forcing{}, 0.05);
  EXPECT_LE(rep.coupling_residual, 1e-8);
  EXPECT_LE(max_abs_diff(trace_hi(x.v_ocn), x.u_ice), 1e-8);
  EXPECT_LT(max_abs(divergence(kT, vertical_average(m.atm, x.v_atm))), 1e-9);
  EXPECT_LT(max_abs(divergence(kT, vertical_average(m.ocn, x.v_ocn))), 1e-9);
  EXPECT_NO_THROW(check_admissible(m.phys, x.h, x.a));
}

TEST(ImexStep, ConservesIceVolumeWithoutSources) {
  const Model m = small_model({}, {GrowthKind::Constant, 0.0});
  std::mt19937_64 rng(8);
  State s = random_state(m, rng, 0.02);
  const double v0 = integrate(kT, s.h);
  for (int i = 0; i < 5; ++i) {
    s = imex_step(m, s, Forcing{}, 0.05).first;
    EXPECT_NEAR(integrate(kT, s.h), v0, 1e-10 * (i + 1));
  }
}

TEST(Run, StrongMeltHitsLowerThicknessBound) {
  const Model m = small_model({}, {GrowthKind::Constant, -0.5});
  const RunResult r = run(m, calm_state(m), Forcing{}, 0.05, 10.0);
  EXPECT_EQ(r.cause, Termination::HitBoundary);
  EXPECT_EQ(r.message, "hit-boundary-of-V: h reached kappa1");
  EXPECT_LT(r.final_state.t, 10.0);
}

TEST(Run, CalmStateReachesEnd) {
  const Model m = small_model();
  int outputs = 0;
  const RunResult r = run(m, calm_state(m), Forcing{}, 0.1, 1.0, 3, [&](const State&, int) { ++outputs; });
  EXPECT_EQ(r.cause, Termination::ReachedEnd);
  EXPECT_EQ(r.steps, 10);
  EXPECT_NEAR(r.final_state.t, 1.0, 1e-12);
  EXPECT_EQ(outputs, 5);  // initial, steps 3, 6, 9 and the final step
  EXPECT_EQ(r.reports.size(), 10u);
}

TEST(Run, RejectsInitialStateOnBoundary) {
  const Model m = small_model();
  EXPECT_THROW(run(m, quiet_state(m, m.phys.kappa1, 0.5), Forcing{}, 0.1, 1.0), DomainError);
  EXPECT_THROW(run(m, quiet_state(m), Forcing{}, 0.0, 1.0), ArgumentError);
}

TEST(Run, StepHalvingIsFirstOrder) {
  // Viscous regime (large delta) with initial data compatible with the boundary and trace
  // conditions. Near the plastic limit the ice response is not smooth in time on lines of
  // vanishing strain and successive differences stall instead of halving.
  PhysParams p;
  p.delta_reg = 1e-2;
  const Model m = small_model(p, {GrowthKind::DecayingExponential, 0.02, 1.0});
  const double amp = 0.05;
  State s0 = quiet_state(m, 1.0, 0.9);
  s0.u_ice = VecField2D(sample(kT, [&](double, double y) { return amp * std::sin(y); }),
                        sample(kT, [&](double x, double) { return amp * std::cos(x); }));
  s0.v_ocn = dirichlet_extension(m.ocn, s0.u_ice);
  s0.v_atm = VecField3D(sample(m.atm, [&](double, double y, double z) {
                          return amp * std::cos(std::numbers::pi * (z - m.atm.z_lo) / m.atm.height()) * std::sin(y);
                        }),
                        Field3D(m.atm));
  const std::vector<double> dts{0.1, 0.05, 0.025, 0.0125};
  std::vector<State> finals;
  for (double dt : dts) finals.push_back(run(m, s0, Forcing{}, dt, 0.4).final_state);
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) diffs.push_back(max_abs_diff(finals[i], finals[i + 1]));
  EXPECT_NEAR(convergence_order(std::vector<double>(dts.begin(), dts.end() - 1), diffs).fitted_order, 1.0, 0.15);
}

TEST(Run, DeterministicAcrossThreadCounts) {
  const Model m = small_model({}, {GrowthKind::DecayingExponential, 0.02, 1.0});
  std::mt19937_64 rng(10);
  const State s0 = random_state(m, rng);
  set_num_threads(1);
  const State a = run(m, s0, Forcing{}, 0.05, 0.2).final_state;
  const State b = run(m, s0, Forcing{}, 0.05, 0.2).final_state;
  set_num_threads(4);
  const State c = run(m, s0, Forcing{}, 0.05, 0.2).final_state;
  set_num_threads(1);
  EXPECT_EQ(max_abs_diff(a, b), 0.0);
  EXPECT_LE(max_abs_diff(a, c), 1e-12);
}
