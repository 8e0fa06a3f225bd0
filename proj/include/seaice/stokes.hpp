#pragma once

#include "seaice/hydrostatic.hpp"
#include "seaice/parallel.hpp"
#include "seaice/tridiagonal.hpp"

namespace seaice {

/// Solution of a hydrostatic Stokes problem on one layer.
struct StokesSolve {
  VecField3D v;
  VecField2D grad_pi;
  double residual_norm = 0.0;  // interior momentum residual, relative to the forcing
};

namespace detail {

inline std::vector<SpectralField> forward_slices(const Field3D& f) {
  std::vector<SpectralField> out(f.nz());
  for (int k = 0; k < f.nz(); ++k) out[k] = spectral_forward(f.slice(k));
  return out;
}

inline Field3D inverse_slices(const LayerGrid& g, const std::vector<SpectralField>& F) {
  Field3D out(g);
  for (int k = 0; k < g.nz; ++k) out.set_slice(k, spectral_inverse(F[k]));
  return out;
}

/// Column matrix of (lambda - d_zz) on the interior with boundary rows for the
/// grid's tags. Neumann rows use the one-sided derivative stencil, reduced to
/// tridiagonal form by eliminating the third node with the adjacent interior row.
inline Tridiagonal column_operator(const LayerGrid& g, double lambda) {
  const int n = g.nz;
  const double s = 1.0 / (g.dz() * g.dz());
  std::vector<double> lo(n, -s), di(n, lambda + 2.0 * s), up(n, -s);
  if (g.bc_lo == Boundary::Dirichlet) {
    di[0] = 1.0; up[0] = 0.0;
  } else {
    di[0] = -2.0; up[0] = 2.0 - lambda / s;
  }
  if (g.bc_hi == Boundary::Dirichlet) {
    di[n - 1] = 1.0; lo[n - 1] = 0.0;
  } else {
    di[n - 1] = 2.0; lo[n - 1] = lambda / s - 2.0;
  }
  lo[0] = 0.0;
  up[n - 1] = 0.0;
  return Tridiagonal(std::move(lo), std::move(di), std::move(up));
}

/// Replaces the boundary entries of a nodal forcing column by the matching
/// right-hand sides of column_operator's boundary rows (homogeneous conditions).
inline void boundary_rows(const LayerGrid& g, std::span<Complex> col) {
  const int n = g.nz;
  const double dz2 = g.dz() * g.dz();
  col[0] = g.bc_lo == Boundary::Dirichlet ? Complex(0.0) : -col[1] * dz2;
  col[n - 1] = g.bc_hi == Boundary::Dirichlet ? Complex(0.0) : col[n - 2] * dz2;
}

inline void require_shift(double mu) {
  if (!(mu > 0.0)) throw ArgumentError("resolvent shift mu must be > 0");
}

}  // namespace detail

/// Maximum interior momentum residual of mu v - Delta v + grad pi - f, relative to f.
inline double stokes_residual(const LayerGrid& g, double mu, const VecField3D& v,
                              const VecField2D& grad_pi, const VecField3D& f) {
  VecField3D r = mu * v - discrete_laplacian(g, v) + broadcast(g, grad_pi) - f;
  const std::size_t ns = g.plane.size();
  double m = 0.0;
  for (std::size_t n = ns; n < ns * (g.nz - 1); ++n)
    m = std::max({m, std::abs(r.x[n]), std::abs(r.y[n])});
  const double scale = max_abs(f);
  return scale > 0.0 ? m / scale : m;
}

/// Solves (mu - Delta) v + grad_H pi = f, div_H mean(v) = 0, homogeneous boundary
/// conditions from the grid tags, mode by mode in the horizontal.
inline StokesSolve stokes_resolvent(const LayerGrid& g, double mu, const VecField3D& f,
                                    bool with_residual = true) {
  detail::require_shift(mu);
  g.validate();
  if (!f.x.matches(g) || !f.y.matches(g)) throw DimensionError("forcing does not match layer grid");

  auto FX = detail::forward_slices(f.x);
  auto FY = detail::forward_slices(f.y);
  SpectralField PI(g.plane.nx, g.plane.ny);
  const Wavenumbers kn(g.plane);
  const auto w = vertical_weights(g);
  const double inv_h = 1.0 / g.height();
  const int nz = g.nz;
  const std::size_t nx = g.plane.nx;

  parallel_for(g.plane.size(), [&](std::size_t idx) {
    const int m = static_cast<int>(idx % nx);
    const int n = static_cast<int>(idx / nx);
    const double lambda = mu + kn.kx2[m] + kn.ky2[n];
    const Tridiagonal T = detail::column_operator(g, lambda);
    std::vector<Complex> ux(nz), uy(nz), up(nz, Complex(1.0));
    for (int k = 0; k < nz; ++k) {
      ux[k] = FX[k](m, n);
      uy[k] = FY[k](m, n);
    }
    for (auto* col : {&ux, &uy, &up}) {
      detail::boundary_rows(g, *col);
      T.solve_in_place(std::span<Complex>(*col));
    }
    const double kx = kn.kx[m], ky = kn.ky[n];
    const double k2 = kx * kx + ky * ky;
    Complex pi(0.0);
    if (k2 > 0.0) {
      Complex mx(0.0), my(0.0), mp(0.0);
      for (int k = 0; k < nz; ++k) {
        mx += w[k] * ux[k];
        my += w[k] * uy[k];
        mp += w[k] * up[k];
      }
      mx *= inv_h; my *= inv_h; mp *= inv_h;
      if (std::abs(mp) < 1e-14) throw SolverError("degenerate pressure constraint");
      pi = -Complex(0.0, 1.0) * (kx * mx + ky * my) / (k2 * mp);
    }
    const Complex ikx(0.0, kx), iky(0.0, ky);
    for (int k = 0; k < nz; ++k) {
      FX[k](m, n) = ux[k] - ikx * pi * up[k];
      FY[k](m, n) = uy[k] - iky * pi * up[k];
    }
    PI(m, n) = pi;
  });

  StokesSolve out;
  out.v = VecField3D(detail::inverse_slices(g, FX), detail::inverse_slices(g, FY));
  SpectralField GX(g.plane.nx, g.plane.ny), GY(g.plane.nx, g.plane.ny);
  for (int n = 0; n < g.plane.ny; ++n)
    for (int m = 0; m < g.plane.nx; ++m) {
      GX(m, n) = Complex(0.0, kn.kx[m]) * PI(m, n);
      GY(m, n) = Complex(0.0, kn.ky[n]) * PI(m, n);
    }
  out.grad_pi = VecField2D(spectral_inverse(GX), spectral_inverse(GY));
  if (with_residual) out.residual_norm = stokes_residual(g, mu, out.v, out.grad_pi, f);
  return out;
}

/// Quadratic lifting profile r(s) = 3 s^2 + 4 s + 1, s = (z - z_hi)/H:
/// r = 1 at the top, 0 at the bottom, zero vertical mean.
inline double extension_profile(const LayerGrid& g, int k) {
  if (k == g.nz - 1) return 1.0;
  if (k == 0) return 0.0;
  const double s = (g.z(k) - g.z_hi) / g.height();
  return 3.0 * s * s + 4.0 * s + 1.0;
}

/// g(x, y, z) = r(z) phi(x, y).
inline VecField3D dirichlet_extension(const LayerGrid& g, const VecField2D& phi) {
  VecField3D out(g);
  const std::size_t ns = g.plane.size();
  for (int k = 0; k < g.nz; ++k) {
    const double r = extension_profile(g, k);
    for (std::size_t n = 0; n < ns; ++n) {
      out.x[n + k * ns] = r * phi.x[n];
      out.y[n + k * ns] = r * phi.y[n];
    }
  }
  return out;
}

inline void require_dirichlet_pair(const LayerGrid& g) {
  if (g.bc_lo != Boundary::Dirichlet || g.bc_hi != Boundary::Dirichlet)
    throw ArgumentError("operator requires Dirichlet conditions at both ends of the layer");
}

/// Hydrostatic Dirichlet operator: v solves (mu - A)v = 0 with v = phi at the top,
/// v = 0 at the bottom. Built as v = g + R_0(mu)[Delta g - mu g].
inline StokesSolve dirichlet_operator(const LayerGrid& g, double mu, const VecField2D& phi,
                                      bool with_residual = true) {
  detail::require_shift(mu);
  require_dirichlet_pair(g);
  const VecField3D ext = dirichlet_extension(g, phi);
  VecField3D rhs = discrete_laplacian(g, ext) - mu * ext;
  StokesSolve s = stokes_resolvent(g, mu, rhs, with_residual);
  s.v += ext;
  return s;
}

/// Dirichlet-to-Neumann map N_mu phi = -d_z (L_mu phi) at the top (upward normal).
inline VecField2D dtn_operator(const LayerGrid& g, double mu, const VecField2D& phi) {
  VecField2D out = dz_hi(g, dirichlet_operator(g, mu, phi, false).v);
  out *= -1.0;
  return out;
}

/// Interior residual of (mu - Delta) v + grad pi measured with a fourth-order
/// vertical stencil on nodes 2..nz-3; tends to zero at the discretisation order.
inline double dirichlet_interior_residual(const LayerGrid& g, double mu, const StokesSolve& s) {
  const double inv = 1.0 / (12.0 * g.dz() * g.dz());
  const std::size_t ns = g.plane.size();
  const VecField3D hl(horiz_laplacian(g, s.v.x), horiz_laplacian(g, s.v.y));
  double m = 0.0;
  auto check = [&](const Field3D& v, const Field3D& lap_h, const Field2D& gp) {
    for (int k = 2; k < g.nz - 2; ++k)
      for (std::size_t n = 0; n < ns; ++n) {
        const std::size_t i = n + k * ns;
        const double d4 = (-v[i - 2 * ns] + 16.0 * v[i - ns] - 30.0 * v[i] + 16.0 * v[i + ns] -
                           v[i + 2 * ns]) * inv;
        m = std::max(m, std::abs(mu * v[i] - lap_h[i] - d4 + gp[n]));
      }
  };
  check(s.v.x, hl.x, s.grad_pi.x);
  check(s.v.y, hl.y, s.grad_pi.y);
  return m;
}

/// Defect of the duality relation <L_mu phi, k> = -<phi, d_z R_0(mu) k |top>,
/// relative to the larger of the two Cauchy-Schwarz bounds of the pairings.
inline double adjoint_identity_check(const LayerGrid& g, double mu, const VecField2D& phi,
                                     const VecField3D& k) {
  const VecField3D lphi = dirichlet_operator(g, mu, phi, false).v;
  const VecField2D drk = dz_hi(g, stokes_resolvent(g, mu, k, false).v);
  const double lhs = inner_product(g, lphi, k);
  const double rhs = inner_product(g.plane, phi, drk);
  const double scale =
      std::max(std::sqrt(inner_product(g, lphi, lphi) * inner_product(g, k, k)),
               std::sqrt(inner_product(g.plane, phi, phi) * inner_product(g.plane, drk, drk)));
  return scale > 0.0 ? std::abs(lhs + rhs) / scale : 0.0;
}

}  // namespace seaice
