#pragma once

#include "seaice/vertical.hpp"

namespace seaice {

/// v = mean + fluct with the vertical average of fluct equal to zero.
struct HydrostaticDecomposition {
  VecField2D mean;
  VecField3D fluct;
};

inline HydrostaticDecomposition decompose(const LayerGrid& g, const VecField3D& v) {
  HydrostaticDecomposition d;
  d.mean = vertical_average(g, v);
  d.fluct = v - broadcast(g, d.mean);
  return d;
}

/// P v = P_H(mean) + fluct. Removes z-independent horizontal gradients.
inline VecField3D hydrostatic_project(const LayerGrid& g, const VecField3D& v) {
  auto d = decompose(g, v);
  return d.fluct + broadcast(g, helmholtz_2d(g.plane, d.mean));
}

/// Vertical velocity from incompressibility: w(z) = -int_{z_lo}^z div_H v.
inline Field3D recover_w(const LayerGrid& g, const VecField3D& v) {
  Field3D w = vert_antiderivative(g, divergence(g, v));
  w *= -1.0;
  return w;
}

/// Advection (v . grad_H) v2 + w(v) d_z v2 without projection.
inline VecField3D advection(const LayerGrid& g, const VecField3D& v, const VecField3D& v2) {
  const Field3D w = recover_w(g, v);
  auto component = [&](const Field3D& c) {
    Field3D out = hadamard(v.x, horiz_derivative(g, c, Axis::X));
    out += hadamard(v.y, horiz_derivative(g, c, Axis::Y));
    out += hadamard(w, vert_derivative(g, c));
    return out;
  };
  return {component(v2.x), component(v2.y)};
}

/// Primitive-equation bilinearity F(v, v2) = P((v . grad_H) v2 + w(v) d_z v2).
inline VecField3D bilinearity(const LayerGrid& g, const VecField3D& v, const VecField3D& v2) {
  return hydrostatic_project(g, advection(g, v, v2));
}

/// Surface-pressure gradient of a stationary solution:
/// grad pi = (1 - P_H) mean(f) - B v,  B v = (1/H)(1 - P_H)(d_z v|lo - d_z v|hi).
inline VecField2D recover_pressure_gradient(const LayerGrid& g, const VecField3D& v,
                                            const VecField3D& f) {
  VecField2D jump = dz_lo(g, v) - dz_hi(g, v);
  jump *= 1.0 / g.height();
  return gradient_part(g.plane, vertical_average(g, f)) - gradient_part(g.plane, jump);
}

}  // namespace seaice
