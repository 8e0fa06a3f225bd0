#pragma once

#include "seaice/spectral.hpp"

namespace seaice {

// Vertical calculus on a uniform grid: second-order differences, quadratic-exact
// quadrature. The cumulative integral and the average share one rule, so
// antiderivative(f)(z_hi) == height * average(f) up to round-off.

/// Quadrature weights w_k with sum_k w_k f_k ~ integral of f over (z_lo, z_hi).
inline std::vector<double> vertical_weights(const LayerGrid& g) {
  const int n = g.nz - 1;  // number of intervals
  const double dz = g.dz();
  std::vector<double> w(g.nz, 0.0);
  auto add = [&](int k, double c) { w[k] += c * dz / 12.0; };
  for (int i = 0; i < n; ++i) {
    if (i % 2 == 0 && i + 2 <= n) {
      add(i, 5.0); add(i + 1, 8.0); add(i + 2, -1.0);
    } else {
      add(i - 1, -1.0); add(i, 8.0); add(i + 1, 5.0);
    }
  }
  return w;
}

/// Integral over the single interval [z_i, z_{i+1}] from a local quadratic fit.
inline double interval_integral(std::span<const double> f, int i, double dz) {
  const int n = static_cast<int>(f.size()) - 1;
  if (i % 2 == 0 && i + 2 <= n) return dz * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]) / 12.0;
  return dz * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]) / 12.0;
}

namespace detail {
template <class Op>
Field3D column_map(const LayerGrid& g, const Field3D& f, Op&& op) {
  if (!f.matches(g)) throw DimensionError("field does not match layer grid");
  Field3D out(g);
  std::vector<double> col(g.nz), res(g.nz);
  for (int j = 0; j < g.plane.ny; ++j)
    for (int i = 0; i < g.plane.nx; ++i) {
      for (int k = 0; k < g.nz; ++k) col[k] = f(i, j, k);
      op(std::span<const double>(col), std::span<double>(res));
      for (int k = 0; k < g.nz; ++k) out(i, j, k) = res[k];
    }
  return out;
}
}  // namespace detail

/// d/dz of one column: centred interior, one-sided second order at both ends.
inline void column_derivative(std::span<const double> f, double dz, std::span<double> out) {
  const std::size_t n = f.size();
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dz);
  for (std::size_t k = 1; k + 1 < n; ++k) out[k] = (f[k + 1] - f[k - 1]) / (2.0 * dz);
  out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dz);
}

/// d2/dz2 of one column: three-point interior, four-point one-sided at the ends (exact on cubics).
inline void column_second_derivative(std::span<const double> f, double dz, std::span<double> out) {
  const std::size_t n = f.size();
  const double s = 1.0 / (dz * dz);
  out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * s;
  for (std::size_t k = 1; k + 1 < n; ++k) out[k] = (f[k - 1] - 2.0 * f[k] + f[k + 1]) * s;
  out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * s;
}

inline Field3D vert_derivative(const LayerGrid& g, const Field3D& f) {
  if (g.nz < 3) throw DimensionError("vert_derivative needs nz >= 3");
  const double dz = g.dz();
  return detail::column_map(g, f, [dz](auto in, auto out) { column_derivative(in, dz, out); });
}

inline Field3D vert_second_derivative(const LayerGrid& g, const Field3D& f) {
  const double dz = g.dz();
  return detail::column_map(g, f,
                            [dz](auto in, auto out) { column_second_derivative(in, dz, out); });
}

/// Vertical average (1/height) * integral dz.
inline Field2D vertical_average(const LayerGrid& g, const Field3D& f) {
  if (!f.matches(g)) throw DimensionError("vertical_average: field does not match grid");
  const auto w = vertical_weights(g);
  const double inv_h = 1.0 / g.height();
  Field2D out(g.plane);
  const std::size_t ns = f.slice_size();
  for (int k = 0; k < g.nz; ++k)
    for (std::size_t n = 0; n < ns; ++n) out[n] += w[k] * inv_h * f[n + k * ns];
  return out;
}

inline VecField2D vertical_average(const LayerGrid& g, const VecField3D& v) {
  return {vertical_average(g, v.x), vertical_average(g, v.y)};
}

/// Cumulative integral from z_lo; zero at the bottom node.
inline Field3D vert_antiderivative(const LayerGrid& g, const Field3D& f) {
  const double dz = g.dz();
  return detail::column_map(g, f, [dz](std::span<const double> in, std::span<double> out) {
    out[0] = 0.0;
    for (std::size_t i = 0; i + 1 < in.size(); ++i)
      out[i + 1] = out[i] + interval_integral(in, static_cast<int>(i), dz);
  });
}

/// z-independent extension of a planar field.
inline Field3D broadcast(const LayerGrid& g, const Field2D& f) {
  Field3D out(g);
  for (int k = 0; k < g.nz; ++k) out.set_slice(k, f);
  return out;
}
inline VecField3D broadcast(const LayerGrid& g, const VecField2D& f) {
  return {broadcast(g, f.x), broadcast(g, f.y)};
}

/// Values at the bottom (z_lo) and top (z_hi) nodes.
inline Field2D trace_lo(const Field3D& f) { return f.slice(0); }
inline Field2D trace_hi(const Field3D& f) { return f.slice(f.nz() - 1); }
inline VecField2D trace_lo(const VecField3D& v) { return {trace_lo(v.x), trace_lo(v.y)}; }
inline VecField2D trace_hi(const VecField3D& v) { return {trace_hi(v.x), trace_hi(v.y)}; }

/// d/dz at the bottom / top node via the one-sided second-order stencils.
inline Field2D dz_lo(const LayerGrid& g, const Field3D& f) {
  const double dz = g.dz();
  Field2D out(g.plane);
  const std::size_t ns = f.slice_size();
  for (std::size_t n = 0; n < ns; ++n)
    out[n] = (-3.0 * f[n] + 4.0 * f[n + ns] - f[n + 2 * ns]) / (2.0 * dz);
  return out;
}
inline Field2D dz_hi(const LayerGrid& g, const Field3D& f) {
  const double dz = g.dz();
  Field2D out(g.plane);
  const std::size_t ns = f.slice_size();
  const std::size_t top = static_cast<std::size_t>(g.nz - 1) * ns;
  for (std::size_t n = 0; n < ns; ++n)
    out[n] = (3.0 * f[top + n] - 4.0 * f[top + n - ns] + f[top + n - 2 * ns]) / (2.0 * dz);
  return out;
}
inline VecField2D dz_lo(const LayerGrid& g, const VecField3D& v) {
  return {dz_lo(g, v.x), dz_lo(g, v.y)};
}
inline VecField2D dz_hi(const LayerGrid& g, const VecField3D& v) {
  return {dz_hi(g, v.x), dz_hi(g, v.y)};
}

/// Discrete Laplacian: spectral horizontal part plus vertical differences.
inline Field3D discrete_laplacian(const LayerGrid& g, const Field3D& f) {
  return horiz_laplacian(g, f) + vert_second_derivative(g, f);
}
inline VecField3D discrete_laplacian(const LayerGrid& g, const VecField3D& v) {
  return {discrete_laplacian(g, v.x), discrete_laplacian(g, v.y)};
}

/// Grid inner product over the layer: quadrature in z, rectangle rule horizontally.
inline double inner_product(const LayerGrid& g, const VecField3D& a, const VecField3D& b) {
  const auto w = vertical_weights(g);
  const std::size_t ns = a.x.slice_size();
  double s = 0.0;
  for (int k = 0; k < g.nz; ++k) {
    double sk = 0.0;
    for (std::size_t n = 0; n < ns; ++n) {
      const std::size_t idx = n + k * ns;
      sk += a.x[idx] * b.x[idx] + a.y[idx] * b.y[idx];
    }
    s += w[k] * sk;
  }
  return s * g.plane.cell_area();
}

inline double inner_product(const Torus& t, const VecField2D& a, const VecField2D& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.x.size(); ++n) s += a.x[n] * b.x[n] + a.y[n] * b.y[n];
  return s * t.cell_area();
}

}  // namespace seaice
