#pragma once

#include <functional>
#include <optional>

#include "seaice/ice_dynamics.hpp"
#include "seaice/krylov.hpp"
#include "seaice/stokes.hpp"

namespace seaice {

/// Discretised coupled problem: parameters, grids and solver settings.
struct Model {
  PhysParams phys;
  LayerGrid atm;  // T^2 x (kappa2, h_atm), Neumann at both ends
  LayerGrid ocn;  // T^2 x (-h_ocn, 0), Dirichlet at both ends
  GrowthRate growth;
  double ocean_stress_sign = -1.0;  // sign of the ocean shear term in the ice momentum row
  double couple_tol = 1e-8;
  int couple_max_iter = 50;
  GmresOptions ice_solver{};

  const Torus& plane() const { return ocn.plane; }
};

inline Model make_model(const PhysParams& p, const Torus& plane, int nz_atm, int nz_ocn,
                        const GrowthRate& growth = {}) {
  p.validate();
  Model m;
  m.phys = p;
  m.growth = growth;
  m.atm = LayerGrid{plane, nz_atm, p.kappa2, p.h_atm, Boundary::Neumann, Boundary::Neumann};
  m.ocn = LayerGrid{plane, nz_ocn, -p.h_ocn, 0.0, Boundary::Dirichlet, Boundary::Dirichlet};
  m.atm.validate();
  m.ocn.validate();
  return m;
}

/// Principal variable (v_atm, v_ocn, u_ice, h, a) at time t. Also used for tendencies.
struct State {
  VecField3D v_atm, v_ocn;
  VecField2D u_ice;
  Field2D h, a;
  double t = 0.0;

  static State zeros(const Model& m) {
    return {VecField3D(m.atm), VecField3D(m.ocn), VecField2D(m.plane()), Field2D(m.plane()),
            Field2D(m.plane()), 0.0};
  }
};

inline State& operator+=(State& a, const State& b) {
  a.v_atm += b.v_atm; a.v_ocn += b.v_ocn; a.u_ice += b.u_ice; a.h += b.h; a.a += b.a;
  return a;
}
inline State& operator*=(State& a, double s) {
  a.v_atm *= s; a.v_ocn *= s; a.u_ice *= s; a.h *= s; a.a *= s;
  return a;
}

inline double max_abs(const State& s) {
  return std::max({max_abs(s.v_atm), max_abs(s.v_ocn), max_abs(s.u_ice), max_abs(s.h),
                   max_abs(s.a)});
}
inline bool all_finite(const State& s) {
  return all_finite(s.v_atm) && all_finite(s.v_ocn) && all_finite(s.u_ice) && all_finite(s.h) &&
         all_finite(s.a);
}
inline double max_abs_diff(const State& a, const State& b) {
  return std::max({max_abs_diff(a.v_atm, b.v_atm), max_abs_diff(a.v_ocn, b.v_ocn),
                   max_abs_diff(a.u_ice, b.u_ice), max_abs_diff(a.h, b.h), max_abs_diff(a.a, b.a)});
}

/// External forcing. Empty closures contribute zero. f_ice, f_h, f_a are additional
/// sources on the ice rows (used by manufactured solutions).
struct Forcing {
  std::function<VecField3D(double)> f_atm, f_ocn;
  std::function<Field2D(double)> H_height;
  std::function<VecField2D(double)> f_ice;
  std::function<Field2D(double)> f_h, f_a;
};

/// Distance of (h, a) to the boundary of the admissible set (negative when outside).
inline double constraint_margin(const PhysParams& p, const Field2D& h, const Field2D& a) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < h.size(); ++n)
    m = std::min({m, h[n] - p.kappa1, p.kappa2 - h[n], a[n], 1.0 - a[n]});
  return m;
}

/// f - F(s): explicit part of the step.
inline State explicit_rhs(const Model& m, const State& s, const Forcing& F) {
  const Torus& t = m.plane();
  const PhysParams& p = m.phys;
  check_admissible(p, s.h, s.a);
  State r;
  r.t = s.t;
  r.v_atm = -1.0 * bilinearity(m.atm, s.v_atm, s.v_atm);
  if (F.f_atm) r.v_atm += hydrostatic_project(m.atm, F.f_atm(s.t));
  r.v_ocn = -1.0 * bilinearity(m.ocn, s.v_ocn, s.v_ocn);
  if (F.f_ocn) r.v_ocn += hydrostatic_project(m.ocn, F.f_ocn(s.t));

  r.u_ice = -1.0 * momentum_nonlin(t, s.u_ice);
  VecField2D drag = tau_atm(p, trace_lo(s.v_atm));
  for (std::size_t n = 0; n < t.size(); ++n) {
    const double im = 1.0 / (p.rho_ice * s.h[n]);
    r.u_ice.x[n] += im * drag.x[n];
    r.u_ice.y[n] += im * drag.y[n];
  }
  if (F.H_height) axpy(-p.g_grav, gradient(t, F.H_height(s.t)), r.u_ice);
  if (F.f_ice) r.u_ice += F.f_ice(s.t);

  const ThermoSources th = thermo_sources(p, s.h, s.a, m.growth);
  r.h = th.S_h - ice_advection(t, s.u_ice, s.h);
  r.a = th.S_a - ice_advection(t, s.u_ice, s.a);
  if (F.f_h) r.h += F.f_h(s.t);
  if (F.f_a) r.a += F.f_a(s.t);
  return r;
}

struct StepReport {
  int picard_iters = 0;
  double coupling_residual = 0.0;  // max |tr v_ocn - u_ice|
  double constraint_margin = 0.0;
  std::vector<double> solver_residuals;  // atmosphere, last ice GMRES, last Picard update
};

/// (1 + dt d |k|^2)^{-1} applied mode by mode.
inline Field2D implicit_diffusion(const Torus& t, const Field2D& b, double dt, double d) {
  const Wavenumbers k(t);
  return apply_multiplier(b, [&](int m, int n) {
    return Complex(1.0 / (1.0 - dt * d * k.laplacian_symbol(m, n)), 0.0);
  });
}

namespace detail {

inline std::vector<double> flatten(const VecField2D& u) {
  std::vector<double> v(u.x.values().begin(), u.x.values().end());
  v.insert(v.end(), u.y.values().begin(), u.y.values().end());
  return v;
}

inline VecField2D unflatten(const Torus& t, const std::vector<double>& v) {
  VecField2D u(t);
  std::copy_n(v.begin(), t.size(), u.x.values().begin());
  std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(t.size()), t.size(), u.y.values().begin());
  return u;
}

}  // namespace detail

/// Solver for (I - dt A^H(s0)) u = b: right-preconditioned GMRES, with the
/// preconditioner I - dt Abar built from horizontally averaged coefficients.
class IceImplicitOperator {
 public:
  IceImplicitOperator(LinearizedHibler lin, double dt, GmresOptions opt)
      : lin_(std::move(lin)), dt_(dt), opt_(opt) {
    const Torus& t = lin_.grid;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) abar_[i][j][k][l] = sum(lin_.coeff(i, j, k, l)) / t.size();
  }

  const LinearizedHibler& linearization() const { return lin_; }
  double dt() const { return dt_; }

  VecField2D apply(const VecField2D& u) const {
    VecField2D out = u;
    axpy(-dt_, hibler_apply_linearized(lin_, u), out);
    return out;
  }

  VecField2D precondition(const VecField2D& r) const {
    const Torus& t = lin_.grid;
    const Wavenumbers kn(t);
    SpectralField X = spectral_forward(r.x), Y = spectral_forward(r.y);
    for (int n = 0; n < t.ny; ++n)
      for (int m = 0; m < t.nx; ++m) {
        const double kv[2] = {kn.kx[m], kn.ky[n]};
        double M[2][2];
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int k = 0; k < 2; ++k)
              for (int l = 0; l < 2; ++l) s += abar_[i][j][k][l] * kv[k] * kv[l];
            M[i][j] = (i == j ? 1.0 : 0.0) - dt_ * s;
          }
        const double det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
        const Complex x = X(m, n), y = Y(m, n);
        X(m, n) = (M[1][1] * x - M[0][1] * y) / det;
        Y(m, n) = (-M[1][0] * x + M[0][0] * y) / det;
      }
    return {spectral_inverse(X), spectral_inverse(Y)};
  }

  /// Solves apply(u) = b, optionally with an extra linear term added to the operator.
  GmresResult solve(const VecField2D& b,
                    const std::function<VecField2D(const VecField2D&)>& extra = {},
                    const VecField2D* guess = nullptr) const {
    const Torus& t = lin_.grid;
    auto A = [&](const std::vector<double>& v) {
      const VecField2D u = detail::unflatten(t, v);
      VecField2D r = apply(u);
      if (extra) r += extra(u);
      return detail::flatten(r);
    };
    auto M = [&](const std::vector<double>& v) {
      return detail::flatten(precondition(detail::unflatten(t, v)));
    };
    return gmres(A, M, detail::flatten(b), guess ? detail::flatten(*guess) : std::vector<double>{},
                 opt_);
  }

 private:
  LinearizedHibler lin_;
  double dt_;
  GmresOptions opt_;
  double abar_[2][2][2][2] = {};
};

struct OceanIceSolution {
  VecField3D v_ocn;
  VecField2D u_ice;
  int picard_iters = 0;
  double coupling_residual = 0.0;
  double last_update = 0.0;
  double ice_residual = 0.0;
};

/// Factor sign / (rho_ice h0) applied to tau_ocn in the ice momentum row.
inline Field2D ocean_coupling_coefficient(const Model& m, const Field2D& h0) {
  Field2D c(m.plane());
  for (std::size_t n = 0; n < c.size(); ++n)
    c[n] = m.ocean_stress_sign / (m.phys.rho_ice * h0[n]);
  return c;
}

inline VecField2D ocean_force_on_ice(const Model& m, const Field2D& coeff, const VecField2D& shear) {
  VecField2D f = tau_ocn(m.phys, shear);
  f.x = hadamard(f.x, coeff);
  f.y = hadamard(f.y, coeff);
  return f;
}

/// Ocean and ice momentum rows of (I - dt A) x = b:
///   (I - dt A_m) v = b_ocn,  tr_top v = u,
///   (I - dt A^H) u - dt c tau_ocn(d_z v|top) = b_ice,
/// decoupled by Picard iteration on u, with v = w + L_{1/dt} u and w = R_0(1/dt)(b_ocn/dt).
inline OceanIceSolution coupled_ocean_ice_solve(const Model& m, const IceImplicitOperator& ice,
                                                const Field2D& h0, const VecField3D& b_ocn,
                                                const VecField2D& b_ice) {
  const double dt = ice.dt();
  const double mu = 1.0 / dt;
  const Torus& t = m.plane();
  const VecField3D w = stokes_resolvent(m.ocn, mu, (1.0 / dt) * b_ocn, false).v;
  const VecField2D dzw = dz_hi(m.ocn, w);
  const Field2D coeff = ocean_coupling_coefficient(m, h0);

  OceanIceSolution out;
  VecField2D u(t);
  VecField2D dzv = dzw;
  for (int it = 1;; ++it) {
    VecField2D rhs = b_ice;
    axpy(dt, ocean_force_on_ice(m, coeff, dzv), rhs);
    GmresResult g = ice.solve(rhs, {}, &u);
    VecField2D u_new = detail::unflatten(t, g.x);
    out.last_update = max_abs_diff(u_new, u);
    out.ice_residual = g.relative_residual;
    u = std::move(u_new);
    out.picard_iters = it;
    if (out.last_update <= m.couple_tol) break;
    if (it >= m.couple_max_iter)
      throw SolverError("ocean-ice Picard iteration did not converge: last update " +
                        format_sci(out.last_update));
    dzv = dzw + dz_hi(m.ocn, dirichlet_operator(m.ocn, mu, u, false).v);
  }
  out.v_ocn = w + dirichlet_operator(m.ocn, mu, u, false).v;
  out.u_ice = std::move(u);
  out.coupling_residual = max_abs_diff(trace_hi(out.v_ocn), out.u_ice);
  return out;
}

/// Same system solved through the substitution v = w + L u: one GMRES solve for u with
/// the shear of L u folded into the operator, then v reconstructed.
inline OceanIceSolution similarity_transform_solve(const Model& m, const IceImplicitOperator& ice,
                                                   const Field2D& h0, const VecField3D& b_ocn,
                                                   const VecField2D& b_ice) {
  const double dt = ice.dt();
  const double mu = 1.0 / dt;
  const VecField3D w = stokes_resolvent(m.ocn, mu, (1.0 / dt) * b_ocn, false).v;
  const Field2D coeff = ocean_coupling_coefficient(m, h0);
  VecField2D rhs = b_ice;
  axpy(dt, ocean_force_on_ice(m, coeff, dz_hi(m.ocn, w)), rhs);
  auto coupling = [&](const VecField2D& u) {
    VecField2D f = ocean_force_on_ice(m, coeff, dz_hi(m.ocn, dirichlet_operator(m.ocn, mu, u, false).v));
    f *= -dt;
    return f;
  };
  GmresResult g = ice.solve(rhs, coupling);
  OceanIceSolution out;
  out.u_ice = detail::unflatten(m.plane(), g.x);
  out.v_ocn = w + dirichlet_operator(m.ocn, mu, out.u_ice, false).v;
  out.coupling_residual = max_abs_diff(trace_hi(out.v_ocn), out.u_ice);
  out.ice_residual = g.relative_residual;
  return out;
}

/// Solves (I - dt A(s_frozen)) x = b block by block.
inline State implicit_block_solve(const Model& m, const State& s_frozen, const State& b, double dt,
                                  StepReport* report = nullptr) {
  if (!(dt > 0.0)) throw ArgumentError("time step must be > 0");
  const Torus& t = m.plane();
  const PhysParams& p = m.phys;
  State x;
  x.t = b.t;
  StokesSolve atm = stokes_resolvent(m.atm, 1.0 / dt, (1.0 / dt) * b.v_atm, report != nullptr);
  x.v_atm = std::move(atm.v);
  x.h = implicit_diffusion(t, b.h, dt, p.d_h);
  x.a = implicit_diffusion(t, b.a, dt, p.d_a);

  IceImplicitOperator ice(linearize_hibler(p, t, s_frozen.u_ice, s_frozen.h, s_frozen.a), dt,
                          m.ice_solver);
  VecField2D b_ice = b.u_ice;
  axpy(dt, lower_order_terms(ice.linearization(), x.h, x.a), b_ice);
  OceanIceSolution oi = coupled_ocean_ice_solve(m, ice, s_frozen.h, b.v_ocn, b_ice);
  x.v_ocn = std::move(oi.v_ocn);
  x.u_ice = std::move(oi.u_ice);
  if (report) {
    report->picard_iters = oi.picard_iters;
    report->coupling_residual = oi.coupling_residual;
    report->solver_residuals = {atm.residual_norm, oi.ice_residual, oi.last_update};
  }
  return x;
}

/// One backward-Euler IMEX step: s_{n+1} = s_n + dt (A(s_n) s_{n+1} + f(t_n) - F(s_n)).
inline std::pair<State, StepReport> imex_step(const Model& m, const State& s, const Forcing& F,
                                              double dt) {
  State b = explicit_rhs(m, s, F);
  b *= dt;
  b += s;
  StepReport rep;
  State x = implicit_block_solve(m, s, b, dt, &rep);
  x.t = s.t + dt;
  rep.constraint_margin = constraint_margin(m.phys, x.h, x.a);
  return {std::move(x), rep};
}

enum class Termination { ReachedEnd, HitBoundary, BlowUp };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedEnd: return "reached-t_end";
    case Termination::HitBoundary: return "hit-boundary-of-V";
    case Termination::BlowUp: return "blow-up";
  }
  return "";
}

struct RunResult {
  State final_state;
  Termination cause = Termination::ReachedEnd;
  std::string message;
  int steps = 0;
  std::vector<StepReport> reports;
};

inline constexpr double kOverflowGuard = 1e12;

/// Margin used to realise the open admissible set: h must stay in (kappa1 + eps, kappa2 - eps).
inline double boundary_margin(const PhysParams& p) { return 1e-3 * p.kappa1; }

/// Which alternative (if any) the state triggers; empty when still admissible.
inline std::optional<std::pair<Termination, std::string>> classify(const PhysParams& p,
                                                                   const State& s) {
  if (!all_finite(s) || max_abs(s) > kOverflowGuard)
    return std::pair{Termination::BlowUp, std::string("blow-up: state norm exceeded guard")};
  const double eps = boundary_margin(p);
  double hmin = std::numeric_limits<double>::infinity(), hmax = -hmin, amin = hmin, amax = -hmin;
  for (std::size_t n = 0; n < s.h.size(); ++n) {
    hmin = std::min(hmin, s.h[n]); hmax = std::max(hmax, s.h[n]);
    amin = std::min(amin, s.a[n]); amax = std::max(amax, s.a[n]);
  }
  if (hmin <= p.kappa1 + eps)
    return std::pair{Termination::HitBoundary, std::string("hit-boundary-of-V: h reached kappa1")};
  if (hmax >= p.kappa2 - eps)
    return std::pair{Termination::HitBoundary, std::string("hit-boundary-of-V: h reached kappa2")};
  if (amin < 0.0 || amax > 1.0)
    return std::pair{Termination::HitBoundary, std::string("hit-boundary-of-V: a left [0,1]")};
  return std::nullopt;
}

/// Integrates to t_end. Physical terminations are reported in the result, not thrown.
/// on_output(state, step) is called for the initial state, every n_out steps and at the end.
inline RunResult run(const Model& m, const State& s0, const Forcing& F, double dt, double t_end,
                     int n_out = 0,
                     const std::function<void(const State&, int)>& on_output = {}) {
  if (!(dt > 0.0)) throw ArgumentError("time step must be > 0");
  if (auto c = classify(m.phys, s0))
    throw DomainError("initial state is not strictly inside the admissible set: " + c->second);
  RunResult res;
  res.final_state = s0;
  State& s = res.final_state;
  if (on_output) on_output(s, 0);
  while (s.t < t_end - 1e-9 * dt) {
    const double h = std::min(dt, t_end - s.t);
    State next;
    StepReport rep;
    try {
      std::tie(next, rep) = imex_step(m, s, F, h);
    } catch (const SolverError&) {
      try {
        auto [mid, r1] = imex_step(m, s, F, 0.5 * h);
        std::tie(next, rep) = imex_step(m, mid, F, 0.5 * h);
        rep.picard_iters += r1.picard_iters;
      } catch (const SolverError& e) {
        res.cause = Termination::BlowUp;
        res.message = std::string("blow-up: inner solver failed persistently: ") + e.what();
        return res;
      } catch (const DomainError& e) {
        res.cause = Termination::HitBoundary;
        res.message = std::string("hit-boundary-of-V: ") + e.what();
        return res;
      }
    } catch (const DomainError& e) {
      res.cause = Termination::HitBoundary;
      res.message = std::string("hit-boundary-of-V: ") + e.what();
      return res;
    }
    ++res.steps;
    res.reports.push_back(rep);
    if (auto c = classify(m.phys, next)) {
      s = std::move(next);
      res.cause = c->first;
      res.message = c->second;
      if (on_output) on_output(s, res.steps);
      return res;
    }
    s = std::move(next);
    if (on_output && n_out > 0 && res.steps % n_out == 0) on_output(s, res.steps);
  }
  if (on_output && (n_out <= 0 || res.steps % n_out != 0)) on_output(s, res.steps);
  res.cause = Termination::ReachedEnd;
  res.message = "reached-t_end";
  return res;
}

}  // namespace seaice
