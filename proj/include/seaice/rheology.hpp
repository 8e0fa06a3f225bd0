#pragma once

#include <array>
#include <limits>
#include <sstream>

#include "seaice/params.hpp"
#include "seaice/spectral.hpp"

namespace seaice {

/// Ellipticity certificate could not establish a positive lower bound.
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// Rejects (h, a) outside kappa1 <= h <= kappa2, 0 <= a <= 1, naming field and grid point.
inline void check_admissible(const PhysParams& p, const Field2D& h, const Field2D& a) {
  if (!h.same_shape(a)) throw DimensionError("h and a have different shapes");
  for (int j = 0; j < h.ny(); ++j)
    for (int i = 0; i < h.nx(); ++i) {
      auto where = [&] { return " at (" + std::to_string(i) + ", " + std::to_string(j) + ")"; };
      const double hv = h(i, j), av = a(i, j);
      if (!(hv >= p.kappa1)) throw DomainError("h below kappa1" + where());
      if (!(hv <= p.kappa2)) throw DomainError("h above kappa2" + where());
      if (!(av >= 0.0)) throw DomainError("a below 0" + where());
      if (!(av <= 1.0)) throw DomainError("a above 1" + where());
    }
}

/// Symmetric part of the horizontal velocity gradient.
inline TensorField2D deformation(const Torus& t, const VecField2D& u) {
  TensorField2D e;
  e.xx = horiz_derivative(t, u.x, Axis::X);
  e.yy = horiz_derivative(t, u.y, Axis::Y);
  e.xy = horiz_derivative(t, u.x, Axis::Y) + horiz_derivative(t, u.y, Axis::X);
  e.xy *= 0.5;
  return e;
}

/// The linear map S of the elliptical yield curve.
inline TensorField2D s_map(const TensorField2D& eps, double e_ratio) {
  const double ie2 = 1.0 / (e_ratio * e_ratio);
  TensorField2D s;
  s.xx = (1.0 + ie2) * eps.xx + (1.0 - ie2) * eps.yy;
  s.yy = (1.0 - ie2) * eps.xx + (1.0 + ie2) * eps.yy;
  s.xy = (2.0 * ie2) * eps.xy;
  return s;
}

/// Delta^2 = eps : S eps at one point.
inline double delta_squared(double exx, double exy, double eyy, double e_ratio) {
  const double ie2 = 1.0 / (e_ratio * e_ratio);
  return (exx * exx + eyy * eyy) * (1.0 + ie2) + 4.0 * ie2 * exy * exy +
         2.0 * exx * eyy * (1.0 - ie2);
}

/// Regularised Delta_delta = sqrt(delta + Delta^2).
inline Field2D triangle_delta(const TensorField2D& eps, double delta, double e_ratio) {
  if (!(delta > 0.0)) throw ArgumentError("regularisation delta must be > 0");
  Field2D d(eps.xx.nx(), eps.xx.ny());
  for (std::size_t n = 0; n < d.size(); ++n)
    d[n] = std::sqrt(delta + delta_squared(eps.xx[n], eps.xy[n], eps.yy[n], e_ratio));
  return d;
}

/// P = p* h exp(-c (1 - a)).
inline Field2D ice_pressure(const PhysParams& p, const Field2D& h, const Field2D& a) {
  if (!h.same_shape(a)) throw DimensionError("h and a have different shapes");
  Field2D out(h.nx(), h.ny());
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (!(h[n] > 0.0)) throw DomainError("ice pressure needs h > 0 (index " + std::to_string(n) + ")");
    if (!(a[n] >= 0.0 && a[n] <= 1.0))
      throw DomainError("ice pressure needs 0 <= a <= 1 (index " + std::to_string(n) + ")");
    out[n] = p.p_star * h[n] * std::exp(-p.c_star * (1.0 - a[n]));
  }
  return out;
}

/// sigma_delta = (1/e^2)(P/D) eps + (1 - 1/e^2)(P/(2D)) tr(eps) I - (P/2) I.
inline TensorField2D stress(const TensorField2D& eps, const Field2D& P, double delta,
                            double e_ratio) {
  const Field2D D = triangle_delta(eps, delta, e_ratio);
  const double ie2 = 1.0 / (e_ratio * e_ratio);
  TensorField2D s = eps;
  for (std::size_t n = 0; n < P.size(); ++n) {
    const double q = P[n] / D[n];
    const double iso = (1.0 - ie2) * 0.5 * q * (eps.xx[n] + eps.yy[n]) - 0.5 * P[n];
    s.xx[n] = ie2 * q * eps.xx[n] + iso;
    s.yy[n] = ie2 * q * eps.yy[n] + iso;
    s.xy[n] = ie2 * q * eps.xy[n];
  }
  return s;
}

inline VecField2D tensor_divergence(const Torus& t, const TensorField2D& s) {
  return {horiz_derivative(t, s.xx, Axis::X) + horiz_derivative(t, s.xy, Axis::Y),
          horiz_derivative(t, s.xy, Axis::X) + horiz_derivative(t, s.yy, Axis::Y)};
}

/// Internal ice force per unit mass, (1/(rho_ice h)) div sigma_delta.
inline VecField2D hibler_div(const PhysParams& p, const Torus& t, const VecField2D& u,
                             const Field2D& h, const Field2D& a) {
  check_admissible(p, h, a);
  const TensorField2D eps = deformation(t, u);
  VecField2D f = tensor_divergence(t, stress(eps, ice_pressure(p, h, a), p.delta_reg, p.e_ratio));
  for (std::size_t n = 0; n < f.x.size(); ++n) {
    const double m = 1.0 / (p.rho_ice * h[n]);
    f.x[n] *= m;
    f.y[n] *= m;
  }
  return f;
}

/// Components S_ij^kl of the map S (index 0 = x, 1 = y).
inline double s_tensor(int i, int j, int k, int l, double e_ratio) {
  const double ie2 = 1.0 / (e_ratio * e_ratio);
  if (i == j && k == l) return i == k ? 1.0 + ie2 : 1.0 - ie2;
  if (i != j && k != l) return ie2;
  return 0.0;
}

/// Frozen principal coefficients a_ij^kl (symmetrised in k, l).
struct CoefficientTensor {
  std::array<Field2D, 16> a;
  Field2D& operator()(int i, int j, int k, int l) { return a[((i * 2 + j) * 2 + k) * 2 + l]; }
  const Field2D& operator()(int i, int j, int k, int l) const {
    return a[((i * 2 + j) * 2 + k) * 2 + l];
  }
};

/// Hibler operator frozen at (u0, h0, a0), with its lower-order companions.
struct LinearizedHibler {
  Torus grid;
  double e_ratio = 2.0;
  CoefficientTensor coeff;
  Field2D visc;              // P0 / (2 Delta_delta(eps0))
  Field2D inv_mass;          // 1 / (rho_ice h0)
  TensorField2D s0;          // S eps0 / Delta_delta(eps0)
  Field2D b_h, b_a;          // -d_h P(h0,a0) / (2 rho_ice h0), -d_a P(h0,a0) / (2 rho_ice h0)
};

inline LinearizedHibler linearize_hibler(const PhysParams& p, const Torus& t, const VecField2D& u0,
                                         const Field2D& h0, const Field2D& a0) {
  check_admissible(p, h0, a0);
  LinearizedHibler L;
  L.grid = t;
  L.e_ratio = p.e_ratio;
  const TensorField2D eps = deformation(t, u0);
  const TensorField2D se = s_map(eps, p.e_ratio);
  const Field2D D = triangle_delta(eps, p.delta_reg, p.e_ratio);
  const Field2D P = ice_pressure(p, h0, a0);
  for (auto& f : L.coeff.a) f = Field2D(t);
  L.visc = Field2D(t);
  L.inv_mass = Field2D(t);
  L.s0 = se;
  L.b_h = Field2D(t);
  L.b_a = Field2D(t);
  for (std::size_t n = 0; n < t.size(); ++n) {
    const double sm[2][2] = {{se.xx[n], se.xy[n]}, {se.xy[n], se.yy[n]}};
    const double d = D[n];
    const double pre = -P[n] / (2.0 * p.rho_ice * h0[n] * d);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            const double spr =
                0.5 * (s_tensor(i, k, l, j, p.e_ratio) + s_tensor(i, l, k, j, p.e_ratio));
            const double rank1 = 0.5 * (sm[i][k] * sm[j][l] + sm[i][l] * sm[j][k]);
            L.coeff(i, j, k, l)[n] = pre * (spr - rank1 / (d * d));
          }
    L.visc[n] = P[n] / (2.0 * d);
    L.inv_mass[n] = 1.0 / (p.rho_ice * h0[n]);
    L.s0.xx[n] /= d;
    L.s0.xy[n] /= d;
    L.s0.yy[n] /= d;
    const double dPdh = p.p_star * std::exp(-p.c_star * (1.0 - a0[n]));
    L.b_h[n] = -dPdh / (2.0 * p.rho_ice * h0[n]);
    L.b_a[n] = -p.c_star * P[n] / (2.0 * p.rho_ice * h0[n]);
  }
  return L;
}

inline CoefficientTensor linearized_coeffs(const PhysParams& p, const Torus& t,
                                           const VecField2D& u0, const Field2D& h0,
                                           const Field2D& a0) {
  return linearize_hibler(p, t, u0, h0, a0).coeff;
}

/// Derivative of the internal force at the frozen state, applied in divergence form:
/// (1/(rho h0)) div( P0/(2 D0) (S eps(u) - s0 (s0 : eps(u))) ).
/// Its principal part is -sum a_ij^kl d_k d_l u_j with the coefficients above.
inline VecField2D hibler_apply_linearized(const LinearizedHibler& L, const VecField2D& u) {
  const Torus& t = L.grid;
  const TensorField2D eps = deformation(t, u);
  TensorField2D s = s_map(eps, L.e_ratio);
  for (std::size_t n = 0; n < t.size(); ++n) {
    const double c = L.s0.xx[n] * eps.xx[n] + 2.0 * L.s0.xy[n] * eps.xy[n] + L.s0.yy[n] * eps.yy[n];
    s.xx[n] = L.visc[n] * (s.xx[n] - c * L.s0.xx[n]);
    s.xy[n] = L.visc[n] * (s.xy[n] - c * L.s0.xy[n]);
    s.yy[n] = L.visc[n] * (s.yy[n] - c * L.s0.yy[n]);
  }
  VecField2D out = tensor_divergence(t, s);
  for (std::size_t n = 0; n < t.size(); ++n) {
    out.x[n] *= L.inv_mass[n];
    out.y[n] *= L.inv_mass[n];
  }
  return out;
}

/// B_h h + B_a a at the frozen state.
inline VecField2D lower_order_terms(const LinearizedHibler& L, const Field2D& h, const Field2D& a) {
  const VecField2D gh = gradient(L.grid, h), ga = gradient(L.grid, a);
  VecField2D out(L.grid);
  for (std::size_t n = 0; n < out.x.size(); ++n) {
    out.x[n] = L.b_h[n] * gh.x[n] + L.b_a[n] * ga.x[n];
    out.y[n] = L.b_h[n] * gh.y[n] + L.b_a[n] * ga.y[n];
  }
  return out;
}

inline VecField2D lower_order_terms(const PhysParams& p, const Torus& t, const Field2D& h0,
                                    const Field2D& a0, const Field2D& h, const Field2D& a) {
  return lower_order_terms(linearize_hibler(p, t, VecField2D(t), h0, a0), h, a);
}

/// Location and direction where the sampled symbol attains its minimum.
struct EllipticityWitness {
  int i = 0, j = 0;
  double xi_angle = 0.0, alpha = 0.0, beta = 0.0;
};

struct EllipticityResult {
  double c_min = 0.0;
  EllipticityWitness witness;
};

/// Minimum over grid points, unit xi and unit eta = (cos alpha, e^{i beta} sin alpha) of
/// Re(-sum a_ij^kl xi_k xi_l eta_j conj(eta_i)). n_eta is split into
/// round(sqrt(n_eta)) values of alpha in [0, pi/2] and as many of beta in [0, 2 pi).
inline EllipticityResult ellipticity_certificate(const LinearizedHibler& L, int n_xi, int n_eta) {
  if (n_xi < 1 || n_eta < 1) throw ArgumentError("sample counts must be positive");
  const int na = std::max(2, static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_eta)))));
  const int nb = na;
  EllipticityResult best;
  best.c_min = std::numeric_limits<double>::infinity();
  const Torus& t = L.grid;
  for (int jj = 0; jj < t.ny; ++jj)
    for (int ii = 0; ii < t.nx; ++ii) {
      const std::size_t n = ii + static_cast<std::size_t>(t.nx) * jj;
      for (int q = 0; q < n_xi; ++q) {
        const double th = std::numbers::pi * q / n_xi;
        const double xi[2] = {std::cos(th), std::sin(th)};
        double M[2][2];
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int k = 0; k < 2; ++k)
              for (int l = 0; l < 2; ++l) s -= L.coeff(i, j, k, l)[n] * xi[k] * xi[l];
            M[i][j] = s;
          }
        for (int ia = 0; ia < na; ++ia) {
          const double al = 0.5 * std::numbers::pi * ia / (na - 1);
          const double c = std::cos(al), s = std::sin(al);
          for (int ib = 0; ib < nb; ++ib) {
            const double be = 2.0 * std::numbers::pi * ib / nb;
            const double val = M[0][0] * c * c + M[1][1] * s * s + (M[0][1] + M[1][0]) * c * s * std::cos(be);
            if (val < best.c_min) best = {val, {ii, jj, th, al, be}};
          }
        }
      }
    }
  if (!(best.c_min > 0.0)) {
    std::ostringstream os;
    os << "ellipticity certificate failed: c_min = " << best.c_min << " at (" << best.witness.i
       << ", " << best.witness.j << "), xi angle " << best.witness.xi_angle << ", alpha "
       << best.witness.alpha << ", beta " << best.witness.beta;
    throw CertificateError(os.str());
  }
  return best;
}

}  // namespace seaice
