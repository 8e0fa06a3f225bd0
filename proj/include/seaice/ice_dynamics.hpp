#pragma once

#include <utility>

#include "seaice/rheology.hpp"

namespace seaice {

enum class GrowthKind { Constant, DecayingExponential, Table };

/// Thermodynamic growth rate f(x) of ice of thickness x.
struct GrowthRate {
  GrowthKind kind = GrowthKind::DecayingExponential;
  double f0 = 0.0;
  double h_ref = 1.0;
  /// Table kind: (x, f) breakpoints with increasing x; linear in between, flat outside.
  std::vector<std::pair<double, double>> table;

  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (kind == GrowthKind::DecayingExponential && !(h_ref > 0.0))
      v.push_back("growth.h_ref: must be > 0");
    if (kind == GrowthKind::Table) {
      if (table.empty()) v.push_back("growth.table: needs at least one breakpoint");
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].first < 0.0) v.push_back("growth.table: abscissae must be >= 0");
        if (i > 0 && !(table[i].first > table[i - 1].first))
          v.push_back("growth.table: abscissae must increase");
      }
    }
    return v;
  }
};

inline double growth_rate(const GrowthRate& f, double x) {
  if (x < 0.0) throw ArgumentError("growth rate evaluated at negative thickness");
  switch (f.kind) {
    case GrowthKind::Constant:
      return f.f0;
    case GrowthKind::DecayingExponential:
      return f.f0 * std::exp(-x / f.h_ref);
    case GrowthKind::Table: {
      const auto& t = f.table;
      if (x <= t.front().first) return t.front().second;
      if (x >= t.back().first) return t.back().second;
      auto it = std::upper_bound(t.begin(), t.end(), x,
                                 [](double v, const auto& p) { return v < p.first; });
      const auto& [x1, y1] = *it;
      const auto& [x0, y0] = *(it - 1);
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return 0.0;
}

/// Compactness below which h/a is evaluated as h/a_floor.
inline constexpr double kCompactnessFloor = 1e-6;

struct ThermoSources {
  Field2D S_h, S_a;
};

/// S_h = f(h/a) a + (1 - a) f(0);
/// S_a = (f(0)/kappa1)(1 - a) if f(0) > 0, plus (a/(2h)) S_h where S_h < 0.
inline ThermoSources thermo_sources(const PhysParams& p, const Field2D& h, const Field2D& a,
                                    const GrowthRate& f) {
  check_admissible(p, h, a);
  ThermoSources s{Field2D(h.nx(), h.ny()), Field2D(h.nx(), h.ny())};
  const double f_zero = growth_rate(f, 0.0);
  for (std::size_t n = 0; n < h.size(); ++n) {
    const double sh = growth_rate(f, h[n] / std::max(a[n], kCompactnessFloor)) * a[n] +
                      (1.0 - a[n]) * f_zero;
    double sa = f_zero > 0.0 ? (f_zero / p.kappa1) * (1.0 - a[n]) : 0.0;
    if (sh < 0.0) sa += a[n] / (2.0 * h[n]) * sh;
    s.S_h[n] = sh;
    s.S_a[n] = sa;
  }
  return s;
}

/// div_H(u phi), spectral.
inline Field2D ice_advection(const Torus& t, const VecField2D& u, const Field2D& phi) {
  return divergence(t, VecField2D(hadamard(u.x, phi), hadamard(u.y, phi)));
}

/// (u . grad_H) u.
inline VecField2D momentum_nonlin(const Torus& t, const VecField2D& u) {
  auto adv = [&](const Field2D& c) {
    return hadamard(u.x, horiz_derivative(t, c, Axis::X)) +
           hadamard(u.y, horiz_derivative(t, c, Axis::Y));
  };
  return {adv(u.x), adv(u.y)};
}

/// Counter-clockwise rotation of a planar vector field by theta.
inline VecField2D rotate(const VecField2D& v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  VecField2D out = v;
  for (std::size_t n = 0; n < v.x.size(); ++n) {
    out.x[n] = c * v.x[n] - s * v.y[n];
    out.y[n] = s * v.x[n] + c * v.y[n];
  }
  return out;
}

/// Quadratic air drag rho_atm C_atm |w| R_atm w.
inline VecField2D tau_atm(const PhysParams& p, const VecField2D& wind) {
  VecField2D out = rotate(wind, p.theta_atm);
  for (std::size_t n = 0; n < out.x.size(); ++n) {
    const double m = p.rho_atm * p.C_atm * std::hypot(wind.x[n], wind.y[n]);
    out.x[n] *= m;
    out.y[n] *= m;
  }
  return out;
}

/// Ocean shear stress rho_ocn C_ocn R_ocn d_nu v_ocn (nu pointing up at the interface).
inline VecField2D tau_ocn(const PhysParams& p, const VecField2D& shear) {
  VecField2D out = rotate(shear, p.theta_ocn);
  out *= p.rho_ocn * p.C_ocn;
  return out;
}

}  // namespace seaice
