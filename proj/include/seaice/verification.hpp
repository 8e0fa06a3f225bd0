#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <random>
#include <sstream>

#include "seaice/stepper.hpp"

namespace seaice {

// ---------------------------------------------------------------------------
// Convergence fits

struct ConvergenceReport {
  std::vector<double> resolutions;  // step sizes (dz or dt)
  std::vector<double> errors;
  double fitted_order = 0.0;
  double r2_fit = 0.0;
  bool monotone = true;
};

/// Least-squares slope of log(error) against log(step).
inline ConvergenceReport convergence_order(std::vector<double> steps, std::vector<double> errors) {
  if (steps.size() != errors.size() || steps.size() < 3)
    throw ArgumentError("convergence fit needs at least three (step, error) pairs");
  ConvergenceReport r{std::move(steps), std::move(errors)};
  const std::size_t n = r.errors.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(r.errors[i] > 0.0) || !(r.resolutions[i] > 0.0))
      throw ArgumentError("convergence fit needs positive steps and errors");
    const double x = std::log(r.resolutions[i]), y = std::log(r.errors[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    if (i > 0 && (r.errors[i] - r.errors[i - 1]) * (r.resolutions[i] - r.resolutions[i - 1]) < 0.0)
      r.monotone = false;
  }
  const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  r.fitted_order = cxy / cxx;
  r.r2_fit = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
  return r;
}

/// Convenience: evaluate error_fn at each resolution and fit.
template <class Fn>
ConvergenceReport convergence_order(Fn&& error_fn, const std::vector<double>& steps) {
  std::vector<double> errs;
  for (double s : steps) errs.push_back(error_fn(s));
  return convergence_order(steps, errs);
}

// ---------------------------------------------------------------------------
// Random smooth data

/// Trigonometric polynomial with modes |m|, |n| <= kmax and coefficients in [-amp, amp].
inline Field2D random_smooth(const Torus& t, std::mt19937_64& rng, int kmax = 3, double amp = 1.0) {
  std::uniform_real_distribution<double> U(-amp, amp);
  Field2D f(t);
  const double ax = 2.0 * std::numbers::pi / t.lx, ay = 2.0 * std::numbers::pi / t.ly;
  for (int m = 0; m <= kmax; ++m)
    for (int n = -kmax; n <= kmax; ++n) {
      const double c = U(rng), s = U(rng);
      for (int j = 0; j < t.ny; ++j)
        for (int i = 0; i < t.nx; ++i) {
          const double arg = m * ax * t.x(i) + n * ay * t.y(j);
          f(i, j) += c * std::cos(arg) + s * std::sin(arg);
        }
    }
  return f;
}

/// Smooth layer field: products of random planar modes and low Chebyshev-like profiles in z.
inline Field3D random_smooth(const LayerGrid& g, std::mt19937_64& rng, int kmax = 3) {
  Field3D f(g);
  for (int p = 0; p < 3; ++p) {
    const Field2D c = random_smooth(g.plane, rng, kmax);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double a = U(rng), b = U(rng);
    for (int k = 0; k < g.nz; ++k) {
      const double s = (g.z(k) - g.z_lo) / g.height();
      const double prof = std::cos(std::numbers::pi * (p + 1) * s * (1.0 + 0.3 * a)) + b * s * s;
      const std::size_t ns = g.plane.size();
      for (std::size_t n = 0; n < ns; ++n) f[n + k * ns] += prof * c[n];
    }
  }
  return f;
}

inline VecField2D random_smooth_vec(const Torus& t, std::mt19937_64& rng, int kmax = 3,
                                    double amp = 1.0) {
  Field2D x = random_smooth(t, rng, kmax, amp);
  Field2D y = random_smooth(t, rng, kmax, amp);
  return {std::move(x), std::move(y)};
}
inline VecField3D random_smooth_vec(const LayerGrid& g, std::mt19937_64& rng, int kmax = 3) {
  Field3D x = random_smooth(g, rng, kmax);
  Field3D y = random_smooth(g, rng, kmax);
  return {std::move(x), std::move(y)};
}

/// Random grid values (all resolved modes excited).
inline Field2D random_grid(const Torus& t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field2D f(t);
  for (double& v : f.values()) v = U(rng);
  return f;
}
inline Field3D random_grid(const LayerGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field3D f(g);
  for (double& v : f.values()) v = U(rng);
  return f;
}

struct IceStateBounds {
  double h_lo = -1.0, h_hi = -1.0;  // negative: 5% inside [kappa1, kappa2]
  double a_lo = 0.05, a_hi = 0.95;
};

/// Admissible random ice state with h and a inside the given bounds.
inline std::tuple<VecField2D, Field2D, Field2D> random_ice_state(const PhysParams& p,
                                                                 const Torus& t,
                                                                 std::mt19937_64& rng,
                                                                 double u_amp = 0.05,
                                                                 IceStateBounds b = {}) {
  auto squash = [](Field2D f, double lo, double hi) {
    const double m = std::max(max_abs(f), 1e-300);
    for (double& v : f.values()) v = lo + (hi - lo) * 0.5 * (1.0 + v / m);
    return f;
  };
  const double span = p.kappa2 - p.kappa1;
  if (b.h_lo < 0.0) b.h_lo = p.kappa1 + 0.05 * span;
  if (b.h_hi < 0.0) b.h_hi = p.kappa2 - 0.05 * span;
  Field2D h = squash(random_smooth(t, rng, 2), b.h_lo, b.h_hi);
  Field2D a = squash(random_smooth(t, rng, 2), b.a_lo, b.a_hi);
  VecField2D u = random_smooth_vec(t, rng, 2, u_amp);
  return {std::move(u), std::move(h), std::move(a)};
}

// ---------------------------------------------------------------------------
// Manufactured solutions

/// Rejects a state whose layers violate the boundary or trace conditions by more than tol.
inline void check_manufactured_state(const Model& m, const State& s, double tol = 1e-12) {
  const double scale = std::max(1.0, max_abs(s));
  auto fail = [&](const std::string& what, double err) {
    if (err > tol * scale)
      throw DomainError("manufactured state violates " + what + " (" + format_sci(err) + ")");
  };
  fail("the ocean-ice trace condition", max_abs_diff(trace_hi(s.v_ocn), s.u_ice));
  fail("the ocean bottom condition", max_abs(trace_lo(s.v_ocn)));
  fail("the atmosphere bottom Neumann condition", max_abs(dz_lo(m.atm, s.v_atm)) * m.atm.dz());
  fail("the atmosphere top Neumann condition", max_abs(dz_hi(m.atm, s.v_atm)) * m.atm.dz());
}

/// Forcing that makes the trajectory exact(t) a solution of the semi-discrete system, built
/// by substituting exact(t) and its time derivative rate(t) into every model term through
/// the same discrete operators the stepper uses.
inline Forcing manufactured_forcing(const Model& model, std::function<State(double)> exact,
                                    std::function<State(double)> rate) {
  check_manufactured_state(model, exact(0.0));
  auto m = std::make_shared<const Model>(model);
  Forcing F;
  auto fluid = [m, exact, rate](bool atm) {
    return [m, exact, rate, atm](double t) {
      const LayerGrid& g = atm ? m->atm : m->ocn;
      const State s = exact(t);
      const VecField3D& v = atm ? s.v_atm : s.v_ocn;
      VecField3D f = atm ? rate(t).v_atm : rate(t).v_ocn;
      f -= discrete_laplacian(g, v);
      f += bilinearity(g, v, v);
      return f;
    };
  };
  F.f_atm = fluid(true);
  F.f_ocn = fluid(false);
  F.f_ice = [m, exact, rate](double t) {
    const Torus& tor = m->plane();
    const State s = exact(t);
    const LinearizedHibler L = linearize_hibler(m->phys, tor, s.u_ice, s.h, s.a);
    VecField2D f = rate(t).u_ice;
    f -= hibler_apply_linearized(L, s.u_ice);
    f -= lower_order_terms(L, s.h, s.a);
    f -= ocean_force_on_ice(*m, ocean_coupling_coefficient(*m, s.h), dz_hi(m->ocn, s.v_ocn));
    f += momentum_nonlin(tor, s.u_ice);
    const VecField2D drag = tau_atm(m->phys, trace_lo(s.v_atm));
    for (std::size_t n = 0; n < tor.size(); ++n) {
      const double im = 1.0 / (m->phys.rho_ice * s.h[n]);
      f.x[n] -= im * drag.x[n];
      f.y[n] -= im * drag.y[n];
    }
    return f;
  };
  auto scalar = [m, exact, rate](bool thickness) {
    return [m, exact, rate, thickness](double t) {
      const Torus& tor = m->plane();
      const State s = exact(t);
      const ThermoSources th = thermo_sources(m->phys, s.h, s.a, m->growth);
      const Field2D& q = thickness ? s.h : s.a;
      Field2D f = thickness ? rate(t).h : rate(t).a;
      axpy(-(thickness ? m->phys.d_h : m->phys.d_a), horiz_laplacian(tor, q), f);
      f -= thickness ? th.S_h : th.S_a;
      f += ice_advection(tor, s.u_ice, q);
      return f;
    };
  };
  F.f_h = scalar(true);
  F.f_a = scalar(false);
  return F;
}

/// Smooth exact trajectory of the full coupled system: every field is a fixed spatial
/// pattern times 1 + sin(t)/2 (h and a oscillate about constant means). Spatial parts are
/// low planar modes; vertical profiles satisfy the discrete boundary conditions exactly.
class ManufacturedSolution {
 public:
  explicit ManufacturedSolution(Model m) : d_(std::make_shared<Data>()) {
    d_->m = std::move(m);
    build();
  }

  const Model& model() const { return d_->m; }
  static double amplitude(double t) { return 1.0 + 0.5 * std::sin(t); }
  static double amplitude_rate(double t) { return 0.5 * std::cos(t); }

  State exact(double t) const { return pattern(amplitude(t), true, t); }
  State rate(double t) const { return pattern(amplitude_rate(t), false, t); }

  Forcing forcing() const {
    const ManufacturedSolution self = *this;
    return manufactured_forcing(d_->m, [self](double t) { return self.exact(t); },
                                [self](double t) { return self.rate(t); });
  }

 private:
  struct Data {
    Model m;
    VecField3D v_atm, v_ocn;
    VecField2D u_ice;
    Field2D h_mean, h_wave, a_mean, a_wave;
  };
  std::shared_ptr<Data> d_;

  State pattern(double c, bool with_mean, double t) const {
    const Data& d = *d_;
    State s;
    s.t = t;
    s.v_atm = c * d.v_atm;
    s.v_ocn = c * d.v_ocn;
    s.u_ice = c * d.u_ice;
    s.h = c * d.h_wave;
    s.a = c * d.a_wave;
    if (with_mean) {
      s.h += d.h_mean;
      s.a += d.a_mean;
    }
    return s;
  }

  void build() {
    Data& d = *d_;
    const Torus& t = d.m.plane();
    const LayerGrid& go = d.m.ocn;
    const LayerGrid& ga = d.m.atm;
    d.u_ice = VecField2D(sample(t, [](double x, double y) { return 0.1 * std::sin(x) + 0.05 * std::cos(y); }),
                         sample(t, [](double, double y) { return 0.1 * std::sin(y); }));
    d.h_mean = Field2D(t, 1.0);
    d.h_wave = sample(t, [](double x, double y) { return 0.2 * std::sin(x) * std::cos(y); });
    d.a_mean = Field2D(t, 0.8);
    d.a_wave = sample(t, [](double x, double) { return 0.1 * std::cos(x); });

    // ocean: lifted ice velocity plus a divergence-free shear mode vanishing at both ends
    const VecField2D curl_o(sample(t, [](double x, double y) { return 0.1 * std::sin(x + y); }),
                            sample(t, [](double x, double y) { return -0.1 * std::sin(x + y); }));
    d.v_ocn = dirichlet_extension(go, d.u_ice);
    for (int k = 1; k < go.nz - 1; ++k) {
      const double s = std::sin(std::numbers::pi * (go.z(k) - go.z_lo) / go.height());
      Field2D px = d.v_ocn.x.slice(k), py = d.v_ocn.y.slice(k);
      axpy(s, curl_o.x, px);
      axpy(s, curl_o.y, py);
      d.v_ocn.x.set_slice(k, px);
      d.v_ocn.y.set_slice(k, py);
    }
    // atmosphere: cosine profile whose end values satisfy the one-sided Neumann stencil
    std::vector<double> G(ga.nz);
    for (int k = 0; k < ga.nz; ++k) G[k] = std::cos(std::numbers::pi * (ga.z(k) - ga.z_lo) / ga.height());
    G[0] = (4.0 * G[1] - G[2]) / 3.0;
    G[ga.nz - 1] = (4.0 * G[ga.nz - 2] - G[ga.nz - 3]) / 3.0;
    const VecField2D curl_a(sample(t, [](double x, double y) { return 2.0 * std::sin(x) * std::sin(2.0 * y) + 1.0; }),
                            sample(t, [](double x, double y) { return std::cos(x) * std::cos(2.0 * y); }));
    d.v_atm = VecField3D(ga);
    for (int k = 0; k < ga.nz; ++k) {
      d.v_atm.x.set_slice(k, G[k] * curl_a.x);
      d.v_atm.y.set_slice(k, G[k] * curl_a.y);
    }
  }
};

/// Global max error at t_end of the manufactured trajectory for one time step.
inline double manufactured_time_error(const ManufacturedSolution& ms, double dt, double t_end) {
  State s = ms.exact(0.0);
  const Forcing F = ms.forcing();
  const int n = static_cast<int>(std::lround(t_end / dt));
  for (int i = 0; i < n; ++i) s = imex_step(ms.model(), s, F, dt).first;
  return max_abs_diff(s, ms.exact(s.t));
}

/// Stationary coupled ocean-ice solve against a continuous exact solution; returns the
/// max nodal error. Used for the vertical refinement study.
inline double vertical_coupled_error(const PhysParams& p, const Torus& plane, int nz, double dt) {
  const Model m = make_model(p, plane, 5, nz);
  const LayerGrid& g = m.ocn;
  const double H = g.height();
  const VecField2D u(sample(plane, [](double x, double y) { return 0.1 * std::sin(x) + 0.05 * std::cos(y); }),
                     sample(plane, [](double, double y) { return 0.1 * std::sin(y); }));
  const VecField2D curl(sample(plane, [](double x, double y) { return 0.1 * std::sin(x + y); }),
                        sample(plane, [](double x, double y) { return -0.1 * std::sin(x + y); }));
  const Field2D h0 = sample(plane, [](double x, double y) { return 1.0 + 0.2 * std::sin(x) * std::cos(y); });
  const Field2D a0 = sample(plane, [](double x, double) { return 0.8 + 0.1 * std::cos(x); });
  // v = r(z) u + q(z) curl with q = sin(pi (z - z_lo)/H) exp(z); all z-derivatives analytic
  auto q = [&](double z) { return std::sin(std::numbers::pi * (z - g.z_lo) / H) * std::exp(z); };
  auto q_z = [&](double z) {
    const double w = std::numbers::pi / H, s = w * (z - g.z_lo);
    return (w * std::cos(s) + std::sin(s)) * std::exp(z);
  };
  auto q_zz = [&](double z) {
    const double w = std::numbers::pi / H, s = w * (z - g.z_lo);
    return (2.0 * w * std::cos(s) + (1.0 - w * w) * std::sin(s)) * std::exp(z);
  };
  auto r = [&](double z) { const double s = (z - g.z_hi) / H; return 3.0 * s * s + 4.0 * s + 1.0; };
  const double r_zz = 6.0 / (H * H);
  const double r_z_top = 4.0 / H;

  VecField3D v(g), lap_z(g);
  const std::size_t ns = plane.size();
  for (int k = 0; k < g.nz; ++k) {
    const double z = g.z(k);
    for (std::size_t n = 0; n < ns; ++n) {
      v.x[n + k * ns] = r(z) * u.x[n] + q(z) * curl.x[n];
      v.y[n + k * ns] = r(z) * u.y[n] + q(z) * curl.y[n];
      lap_z.x[n + k * ns] = r_zz * u.x[n] + q_zz(z) * curl.x[n];
      lap_z.y[n + k * ns] = r_zz * u.y[n] + q_zz(z) * curl.y[n];
    }
  }
  VecField3D lap = VecField3D(horiz_laplacian(g, v.x), horiz_laplacian(g, v.y)) + lap_z;
  VecField3D b_ocn = v;
  axpy(-dt, lap, b_ocn);
  VecField2D shear = r_z_top * u;
  axpy(q_z(g.z_hi), curl, shear);

  IceImplicitOperator ice(linearize_hibler(p, plane, u, h0, a0), dt, m.ice_solver);
  VecField2D b_ice = ice.apply(u);
  axpy(-dt, ocean_force_on_ice(m, ocean_coupling_coefficient(m, h0), shear), b_ice);
  const OceanIceSolution sol = coupled_ocean_ice_solve(m, ice, h0, b_ocn, b_ice);
  return std::max(max_abs_diff(sol.v_ocn, v), max_abs_diff(sol.u_ice, u));
}

// ---------------------------------------------------------------------------
// Acceptance ledger

struct VerificationSetup {
  PhysParams phys;
  Torus plane;
  int nz_atm = 33;
  int nz_ocn = 33;
  std::uint64_t seed = 12345;
};

struct LedgerEntry {
  int id = 0;
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(double v) { return format_sci(v); }

inline LayerGrid ocean_grid(const VerificationSetup& s, int nz) {
  return LayerGrid{s.plane, nz, -s.phys.h_ocn, 0.0, Boundary::Dirichlet, Boundary::Dirichlet};
}

}  // namespace detail

inline LedgerEntry check_projection(const VerificationSetup& s) {
  LedgerEntry e{1, "projection", "hydrostatic projection: idempotence and gradient annihilation"};
  std::mt19937_64 rng(s.seed + 1);
  const LayerGrid g = detail::ocean_grid(s, s.nz_ocn);
  double idem = 0.0, annih = 0.0, div = 0.0;
  for (int i = 0; i < 100; ++i) {
    const VecField3D v(random_grid(g, rng), random_grid(g, rng));
    const VecField3D pv = hydrostatic_project(g, v);
    idem = std::max(idem, max_abs_diff(hydrostatic_project(g, pv), pv) / max_abs(pv));
    div = std::max(div, max_abs(divergence(g.plane, vertical_average(g, pv))));
    const VecField2D gp = gradient(g.plane, random_grid(g.plane, rng));
    annih = std::max(annih, max_abs(hydrostatic_project(g, broadcast(g, gp))) / max_abs(gp));
  }
  e.metrics = {{"idempotence", idem}, {"annihilation", annih}, {"mean_divergence", div}};
  e.passed = idem <= 1e-11 && annih <= 1e-11 && div <= 1e-11;
  e.detail = "idempotence " + detail::fmt(idem) + ", gradient " + detail::fmt(annih) +
             ", div mean " + detail::fmt(div) + " (tol 1e-11)";
  return e;
}

inline LedgerEntry check_extension(const VerificationSetup& s) {
  LedgerEntry e{2, "extension", "Dirichlet extension profile: end values and zero mean"};
  const LayerGrid g = detail::ocean_grid(s, 65);
  const double top = extension_profile(g, g.nz - 1), bot = extension_profile(g, 0);
  Field3D r(g);
  for (int k = 0; k < g.nz; ++k)
    for (std::size_t n = 0; n < g.plane.size(); ++n) r[n + k * g.plane.size()] = extension_profile(g, k);
  const double mean = max_abs(vertical_average(g, r));
  std::mt19937_64 rng(s.seed + 2);
  const VecField2D phi = random_smooth_vec(g.plane, rng);
  const VecField3D ext = dirichlet_extension(g, phi);
  const double ext_mean = max_abs(vertical_average(g, ext)) / max_abs(phi);
  e.metrics = {{"r_top", top}, {"r_bottom", bot}, {"mean_r", mean}, {"mean_extension", ext_mean}};
  e.passed = top == 1.0 && bot == 0.0 && mean <= 1e-12 && ext_mean <= 1e-12;
  e.detail = "r(top)=" + detail::fmt(top) + " r(bottom)=" + detail::fmt(bot) + " mean " +
             detail::fmt(mean) + " (nz=65, tol 1e-12)";
  return e;
}

inline LedgerEntry check_dirichlet_operator(const VerificationSetup& s, double mu = 1.0) {
  LedgerEntry e{3, "dirichlet", "Dirichlet operator: trace exactness and interior residual order"};
  std::mt19937_64 rng(s.seed + 3);
  const VecField2D phi = random_smooth_vec(s.plane, rng);
  double trace = 0.0;
  std::vector<double> dzs, res;
  for (int nz : {33, 65, 129}) {
    const LayerGrid g = detail::ocean_grid(s, nz);
    const StokesSolve sol = dirichlet_operator(g, mu, phi);
    trace = std::max(trace, max_abs_diff(trace_hi(sol.v), phi));
    dzs.push_back(g.dz());
    res.push_back(dirichlet_interior_residual(g, mu, sol));
  }
  const auto fit = convergence_order(dzs, res);
  e.metrics = {{"trace_residual", trace}, {"order", fit.fitted_order}, {"r2", fit.r2_fit}};
  e.passed = trace <= 1e-10 && std::abs(fit.fitted_order - 2.0) <= 0.2 && fit.r2_fit >= 0.98;
  e.detail = "trace " + detail::fmt(trace) + " (tol 1e-10), interior order " +
             std::to_string(fit.fitted_order) + " (2.0 +- 0.2)";
  return e;
}

inline LedgerEntry check_adjoint(const VerificationSetup& s, double mu = 1.0) {
  LedgerEntry e{4, "adjoint", "adjoint identity of the Dirichlet operator: refinement order"};
  std::mt19937_64 rng(s.seed + 4);
  const VecField2D phi = random_smooth_vec(s.plane, rng);
  // the same continuous k sampled on each grid
  std::vector<double> dzs, res;
  std::vector<Field2D> cx, cy;
  std::vector<double> pa, pb;
  for (int p = 0; p < 3; ++p) {
    cx.push_back(random_smooth(s.plane, rng));
    cy.push_back(random_smooth(s.plane, rng));
    pa.push_back(std::uniform_real_distribution<double>(0.5, 2.0)(rng));
    pb.push_back(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
  }
  for (int nz : {33, 65, 129}) {
    const LayerGrid g = detail::ocean_grid(s, nz);
    VecField3D k(g);
    const std::size_t ns = g.plane.size();
    for (int kk = 0; kk < g.nz; ++kk) {
      const double z = g.z(kk);
      for (int p = 0; p < 3; ++p) {
        const double prof = std::cos(pa[p] * (p + 1) * z) + pb[p] * z * z;
        for (std::size_t n = 0; n < ns; ++n) {
          k.x[n + kk * ns] += prof * cx[p][n];
          k.y[n + kk * ns] += prof * cy[p][n];
        }
      }
    }
    dzs.push_back(g.dz());
    res.push_back(adjoint_identity_check(g, mu, phi, hydrostatic_project(g, k)));
  }
  const auto fit = convergence_order(dzs, res);
  e.metrics = {{"residual_33", res[0]}, {"residual_65", res[1]}, {"residual_129", res[2]},
               {"order", fit.fitted_order}};
  e.passed = fit.fitted_order >= 1.8;
  e.detail = "residuals " + detail::fmt(res[0]) + ", " + detail::fmt(res[1]) + ", " +
             detail::fmt(res[2]) + "; order " + std::to_string(fit.fitted_order) + " (>= 1.8)";
  return e;
}

inline LedgerEntry check_dtn(const VerificationSetup& s, double mu = 1.0) {
  LedgerEntry e{5, "dtn", "Dirichlet-to-Neumann map: constant datum closed form"};
  const double c = 1.0;
  const double exact = -c * std::sqrt(mu) / std::tanh(std::sqrt(mu) * s.phys.h_ocn);
  std::vector<double> dzs, errs;
  for (int nz : {33, 65, 129}) {
    const LayerGrid g = detail::ocean_grid(s, nz);
    const VecField2D n = dtn_operator(g, mu, VecField2D(g.plane, c));
    Field2D ex(g.plane, exact);
    dzs.push_back(g.dz());
    errs.push_back(std::max(max_abs_diff(n.x, ex), max_abs_diff(n.y, ex)));
  }
  const auto fit = convergence_order(dzs, errs);
  const double C = errs.back() / (dzs.back() * dzs.back());
  e.metrics = {{"error_129", errs.back()}, {"order", fit.fitted_order}, {"constant", C}};
  e.passed = std::abs(fit.fitted_order - 2.0) <= 0.2 && fit.r2_fit >= 0.98;
  e.detail = "error at nz=129 " + detail::fmt(errs.back()) + " = " + detail::fmt(C) +
             " dz^2; order " + std::to_string(fit.fitted_order) + " (2.0 +- 0.2)";
  return e;
}

inline LedgerEntry check_ellipticity(const VerificationSetup& s) {
  LedgerEntry e{6, "ellipticity", "ellipticity certificate: analytic minimum and random states"};
  const PhysParams& p = s.phys;
  const Torus& t = s.plane;
  const double h0 = 1.0, a0 = 0.9;
  const LinearizedHibler L =
      linearize_hibler(p, t, VecField2D(t), Field2D(t, h0), Field2D(t, a0));
  const double P0 = p.p_star * h0 * std::exp(-p.c_star * (1.0 - a0));
  const double analytic = P0 / (2.0 * p.rho_ice * h0 * std::sqrt(p.delta_reg)) / (p.e_ratio * p.e_ratio);
  const double cmin = ellipticity_certificate(L, 64, 64).c_min;
  const double rel = std::abs(cmin - analytic) / analytic;
  std::mt19937_64 rng(s.seed + 6);
  double worst = std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int i = 0; i < 20; ++i) {
    auto [u, h, a] = random_ice_state(p, t, rng, 0.05);
    try {
      worst = std::min(worst, ellipticity_certificate(linearize_hibler(p, t, u, h, a), 64, 64).c_min);
    } catch (const CertificateError&) {
      ++failures;
    }
  }
  e.metrics = {{"relative_error", rel}, {"min_random_cmin", worst}, {"failures", double(failures)}};
  e.passed = rel <= 1e-6 && failures == 0 && worst > 0.0;
  e.detail = "constant state rel. error " + detail::fmt(rel) + " (tol 1e-6); min c_min over 20 random states " +
             detail::fmt(worst);
  return e;
}

inline LedgerEntry check_linearization(const VerificationSetup& s) {
  LedgerEntry e{7, "linearization", "linearized Hibler operator vs central differences"};
  const PhysParams& p = s.phys;
  const Torus& t = s.plane;
  std::mt19937_64 rng(s.seed + 7);
  // frozen velocity zero (Delta_delta = sqrt(delta)); thickness and compactness vary
  const VecField2D u0(t);
  auto [unused, h0, a0] = random_ice_state(p, t, rng, 0.0);
  const LinearizedHibler L = linearize_hibler(p, t, u0, h0, a0);
  double worst_rel = 0.0, worst_order = 2.0;
  for (int dir = 0; dir < 5; ++dir) {
    VecField2D d = random_smooth_vec(t, rng, 3);
    const TensorField2D eps = deformation(t, d);
    double q = 0.0;
    for (std::size_t n = 0; n < t.size(); ++n)
      q = std::max(q, delta_squared(eps.xx[n], eps.xy[n], eps.yy[n], p.e_ratio));
    d *= 1.0 / std::sqrt(q);
    const VecField2D lin = hibler_apply_linearized(L, d);
    std::vector<double> steps, errs;
    for (int k = 0; k < 4; ++k) {
      const double st = std::sqrt(p.delta_reg) * 2e-3 * std::ldexp(1.0, -k);
      VecField2D up = u0, um = u0;
      axpy(st, d, up);
      axpy(-st, d, um);
      VecField2D fd = hibler_div(p, t, up, h0, a0) - hibler_div(p, t, um, h0, a0);
      fd *= 1.0 / (2.0 * st);
      steps.push_back(st);
      errs.push_back(max_abs_diff(fd, lin) / max_abs(lin));
    }
    worst_rel = std::max(worst_rel, errs.front());
    const double order = convergence_order(steps, errs).fitted_order;
    if (std::abs(order - 2.0) > std::abs(worst_order - 2.0)) worst_order = order;
  }
  e.metrics = {{"max_relative_error", worst_rel}, {"worst_order", worst_order}};
  e.passed = worst_rel <= 1e-5 && std::abs(worst_order - 2.0) <= 0.2;
  e.detail = "max rel. error " + detail::fmt(worst_rel) + " (tol 1e-5), step order " +
             std::to_string(worst_order) + " (2.0 +- 0.2), 5 directions";
  return e;
}

inline LedgerEntry check_thermodynamics(const VerificationSetup& s) {
  LedgerEntry e{8, "thermodynamics", "thermodynamic sources: constant rate and melt case"};
  const PhysParams& p = s.phys;
  std::mt19937_64 rng(s.seed + 8);
  auto [u, h, a] = random_ice_state(p, s.plane, rng);
  GrowthRate c{GrowthKind::Constant, 0.1};
  const ThermoSources th = thermo_sources(p, h, a, c);
  const double dev = max_abs_diff(th.S_h, Field2D(s.plane, 0.1));
  // f(0) < 0 with S_h > 0: table rate negative at 0, strongly positive for thick ice
  GrowthRate t{GrowthKind::Table, 0.0, 1.0, {{0.0, -0.01}, {0.3, 1.0}}};
  const Field2D hh(s.plane, 1.0);
  const ThermoSources th2 = thermo_sources(p, hh, a, t);
  double sa = 0.0;
  int cases = 0;
  for (std::size_t n = 0; n < hh.size(); ++n)
    if (th2.S_h[n] > 0.0) {
      ++cases;
      sa = std::max(sa, std::abs(th2.S_a[n]));
    }
  e.metrics = {{"S_h_deviation", dev}, {"S_a_in_melt_case", sa}, {"points", double(cases)}};
  e.passed = dev <= 1e-13 && cases > 0 && sa == 0.0;
  e.detail = "S_h - f0 " + detail::fmt(dev) + " (tol 1e-13); max |S_a| where f(0)<0, S_h>0: " +
             detail::fmt(sa) + " over " + std::to_string(cases) + " points";
  return e;
}

inline LedgerEntry check_conservation(const VerificationSetup& s, int steps = 200) {
  LedgerEntry e{9, "conservation", "ice volume conservation without thermodynamic source"};
  const Model m = make_model(s.phys, s.plane, s.nz_atm, s.nz_ocn);  // f0 = 0: S_h = 0
  std::mt19937_64 rng(s.seed + 9);
  auto [u, h, a] = random_ice_state(s.phys, s.plane, rng, 0.02, {0.7, 1.3, 0.6, 0.8});
  State st = State::zeros(m);
  st.u_ice = u;
  st.h = h;
  st.a = a;
  st.v_ocn = dirichlet_extension(m.ocn, u);
  double worst = 0.0;
  double vol = integrate(s.plane, st.h);
  for (int i = 0; i < steps; ++i) {
    st = imex_step(m, st, Forcing{}, 0.01).first;
    const double nv = integrate(s.plane, st.h);
    worst = std::max(worst, std::abs(nv - vol) / std::abs(vol));
    vol = nv;
  }
  e.metrics = {{"max_relative_change_per_step", worst}};
  e.passed = worst <= 1e-10;
  e.detail = "max relative change of ice volume per step " + detail::fmt(worst) + " over " +
             std::to_string(steps) + " steps (tol 1e-10)";
  return e;
}

inline LedgerEntry check_coupling(const VerificationSetup& s, int steps = 20) {
  LedgerEntry e{10, "coupling", "interface velocity equality after every step"};
  const ManufacturedSolution ms(make_model(s.phys, s.plane, s.nz_atm, s.nz_ocn,
                                           GrowthRate{GrowthKind::DecayingExponential, 0.02, 1.0}));
  const Forcing F = ms.forcing();
  State st = ms.exact(0.0);
  double worst = 0.0, div = 0.0;
  for (int i = 0; i < steps; ++i) {
    auto [next, rep] = imex_step(ms.model(), st, F, 0.01);
    st = std::move(next);
    worst = std::max(worst, max_abs_diff(trace_hi(st.v_ocn), st.u_ice));
    div = std::max({div, max_abs(divergence(s.plane, vertical_average(ms.model().ocn, st.v_ocn))),
                    max_abs(divergence(s.plane, vertical_average(ms.model().atm, st.v_atm)))});
  }
  e.metrics = {{"max_trace_mismatch", worst}, {"max_mean_divergence", div}};
  e.passed = worst <= 1e-8 && div <= 1e-9;
  e.detail = "max |tr v_ocn - u_ice| " + detail::fmt(worst) + " (tol 1e-8), max |div mean| " +
             detail::fmt(div) + " over " + std::to_string(steps) + " steps";
  return e;
}

inline ConvergenceReport temporal_convergence(const VerificationSetup& s) {
  const ManufacturedSolution ms(make_model(s.phys, s.plane, s.nz_atm, s.nz_ocn,
                                           GrowthRate{GrowthKind::DecayingExponential, 0.02, 1.0}));
  std::vector<double> dts = {0.04, 0.02, 0.01, 0.005, 0.0025};
  return convergence_order([&](double dt) { return manufactured_time_error(ms, dt, 0.2); }, dts);
}

inline ConvergenceReport vertical_convergence(const VerificationSetup& s) {
  std::vector<double> dzs, errs;
  for (int nz : {17, 33, 65, 129}) {
    dzs.push_back(s.phys.h_ocn / (nz - 1));
    errs.push_back(vertical_coupled_error(s.phys, s.plane, nz, 0.1));
  }
  return convergence_order(dzs, errs);
}

inline LedgerEntry check_convergence(const VerificationSetup& s) {
  LedgerEntry e{11, "convergence", "temporal (manufactured) and vertical convergence orders"};
  const auto tc = temporal_convergence(s);
  const auto vc = vertical_convergence(s);
  e.metrics = {{"temporal_order", tc.fitted_order}, {"temporal_r2", tc.r2_fit},
               {"vertical_order", vc.fitted_order}, {"vertical_r2", vc.r2_fit}};
  e.passed = std::abs(tc.fitted_order - 1.0) <= 0.15 && std::abs(vc.fitted_order - 2.0) <= 0.2 &&
             tc.r2_fit >= 0.98 && vc.r2_fit >= 0.98;
  e.detail = "time order " + std::to_string(tc.fitted_order) + " (1.0 +- 0.15), vertical order " +
             std::to_string(vc.fitted_order) + " (2.0 +- 0.2)";
  return e;
}

/// Calm and strong-melt scenarios used by the termination check.
inline State calm_state(const Model& m) {
  State s = State::zeros(m);
  s.h = Field2D(m.plane(), 1.0);
  s.a = Field2D(m.plane(), 1.0);
  return s;
}

inline LedgerEntry check_termination(const VerificationSetup& s) {
  LedgerEntry e{12, "termination", "termination alternatives: strong melt and calm"};
  const Model melt = make_model(s.phys, s.plane, s.nz_atm, s.nz_ocn,
                                GrowthRate{GrowthKind::Constant, -0.5, 1.0});
  const RunResult r1 = run(melt, calm_state(melt), Forcing{}, 0.05, 10.0);
  const Model calm = make_model(s.phys, s.plane, s.nz_atm, s.nz_ocn);
  const RunResult r2 = run(calm, calm_state(calm), Forcing{}, 0.1, 1.0);
  e.passed = r1.cause == Termination::HitBoundary &&
             r1.message == "hit-boundary-of-V: h reached kappa1" &&
             r2.cause == Termination::ReachedEnd;
  e.metrics = {{"melt_end_time", r1.final_state.t}, {"calm_end_time", r2.final_state.t}};
  e.detail = "strong melt: '" + r1.message + "' at t=" + detail::fmt(r1.final_state.t) +
             "; calm: '" + r2.message + "'";
  return e;
}

inline LedgerEntry check_decoupling(const VerificationSetup& s) {
  LedgerEntry e{13, "decoupling", "Picard coupling vs similarity-transform reconstruction"};
  const Model m = make_model(s.phys, s.plane, s.nz_atm, s.nz_ocn);
  std::mt19937_64 rng(s.seed + 13);
  auto [u, h, a] = random_ice_state(s.phys, s.plane, rng, 0.1, {0.7, 1.3, 0.8, 0.95});
  const double dt = 0.05;
  IceImplicitOperator ice(linearize_hibler(s.phys, s.plane, u, h, a), dt, m.ice_solver);
  const VecField3D b_ocn = random_smooth_vec(m.ocn, rng);
  const VecField2D b_ice = random_smooth_vec(s.plane, rng);
  const OceanIceSolution pic = coupled_ocean_ice_solve(m, ice, h, b_ocn, b_ice);
  const OceanIceSolution sim = similarity_transform_solve(m, ice, h, b_ocn, b_ice);
  const double du = max_abs_diff(pic.u_ice, sim.u_ice), dv = max_abs_diff(pic.v_ocn, sim.v_ocn);
  e.metrics = {{"u_difference", du}, {"v_difference", dv}, {"picard_iterations", double(pic.picard_iters)}};
  e.passed = std::max(du, dv) <= 1e-7;
  e.detail = "max difference u " + detail::fmt(du) + ", v " + detail::fmt(dv) + " (tol 1e-7), " +
             std::to_string(pic.picard_iters) + " Picard iterations";
  return e;
}

using Check = LedgerEntry (*)(const VerificationSetup&);

inline const std::vector<std::pair<std::string, Check>>& checks() {
  static const std::vector<std::pair<std::string, Check>> all = {
      {"projection", [](const VerificationSetup& s) { return check_projection(s); }},
      {"extension", [](const VerificationSetup& s) { return check_extension(s); }},
      {"dirichlet", [](const VerificationSetup& s) { return check_dirichlet_operator(s); }},
      {"adjoint", [](const VerificationSetup& s) { return check_adjoint(s); }},
      {"dtn", [](const VerificationSetup& s) { return check_dtn(s); }},
      {"ellipticity", [](const VerificationSetup& s) { return check_ellipticity(s); }},
      {"linearization", [](const VerificationSetup& s) { return check_linearization(s); }},
      {"thermodynamics", [](const VerificationSetup& s) { return check_thermodynamics(s); }},
      {"conservation", [](const VerificationSetup& s) { return check_conservation(s); }},
      {"coupling", [](const VerificationSetup& s) { return check_coupling(s); }},
      {"convergence", [](const VerificationSetup& s) { return check_convergence(s); }},
      {"termination", [](const VerificationSetup& s) { return check_termination(s); }},
      {"decoupling", [](const VerificationSetup& s) { return check_decoupling(s); }},
  };
  return all;
}

/// Runs one named check, or all of them when suite is "all". Exceptions become failed entries.
inline std::vector<LedgerEntry> suite_all(const VerificationSetup& s, const std::string& suite = "all") {
  std::vector<LedgerEntry> out;
  int id = 0;
  for (const auto& [name, fn] : checks()) {
    ++id;
    if (suite != "all" && suite != name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    LedgerEntry e;
    try {
      e = fn(s);
    } catch (const std::exception& ex) {
      e = LedgerEntry{id, name, name, false, std::string("exception: ") + ex.what()};
    }
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(e));
  }
  if (out.empty()) throw ArgumentError("unknown verification suite '" + suite + "'");
  return out;
}

}  // namespace seaice
