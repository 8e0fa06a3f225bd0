#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seaice/error.hpp"

namespace seaice {

using Complex = std::complex<double>;

/// Periodic horizontal plane [0,lx) x [0,ly) sampled on an nx x ny grid.
struct Torus {
  int nx = 32;
  int ny = 32;
  double lx = 2.0 * std::numbers::pi;
  double ly = 2.0 * std::numbers::pi;

  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * ny; }
  double dx() const noexcept { return lx / nx; }
  double dy() const noexcept { return ly / ny; }
  double x(int i) const noexcept { return i * dx(); }
  double y(int j) const noexcept { return j * dy(); }
  double cell_area() const noexcept { return dx() * dy(); }

  void validate() const {
    if (nx < 4 || ny < 4) throw DimensionError("horizontal mode counts must be >= 4");
    if (!(lx > 0.0) || !(ly > 0.0)) throw DimensionError("period lengths must be positive");
  }
  friend bool operator==(const Torus&, const Torus&) = default;
};

enum class Boundary { Dirichlet, Neumann };

inline const char* to_string(Boundary b) {
  return b == Boundary::Dirichlet ? "dirichlet" : "neumann";
}

/// Layer T^2 x (z_lo, z_hi) with a uniform vertical grid of nz nodes including both ends.
struct LayerGrid {
  Torus plane;
  int nz = 33;
  double z_lo = -1.0;
  double z_hi = 0.0;
  Boundary bc_lo = Boundary::Dirichlet;
  Boundary bc_hi = Boundary::Dirichlet;

  double height() const noexcept { return z_hi - z_lo; }
  double dz() const noexcept { return height() / (nz - 1); }
  /// Node coordinate; the last node is pinned to z_hi exactly.
  double z(int k) const noexcept { return k == nz - 1 ? z_hi : z_lo + k * dz(); }
  std::size_t size() const noexcept { return plane.size() * static_cast<std::size_t>(nz); }

  void validate() const {
    plane.validate();
    if (nz < 4) throw DimensionError("vertical grid count must be >= 4");
    if (!(z_lo < z_hi)) throw DimensionError("layer requires z_lo < z_hi");
  }
  friend bool operator==(const LayerGrid&, const LayerGrid&) = default;
};

/// Scalar samples on the horizontal grid, x fastest.
class Field2D {
 public:
  Field2D() = default;
  Field2D(int nx, int ny, double value = 0.0)
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, value) {}
  explicit Field2D(const Torus& t, double value = 0.0) : Field2D(t.nx, t.ny, value) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int i, int j) noexcept { return data_[i + static_cast<std::size_t>(nx_) * j]; }
  double operator()(int i, int j) const noexcept {
    return data_[i + static_cast<std::size_t>(nx_) * j];
  }
  double& operator[](std::size_t n) noexcept { return data_[n]; }
  double operator[](std::size_t n) const noexcept { return data_[n]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Field2D& o) const noexcept { return nx_ == o.nx_ && ny_ == o.ny_; }
  bool matches(const Torus& t) const noexcept { return nx_ == t.nx && ny_ == t.ny; }

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

/// Scalar samples on the layer grid: x fastest, then y, then z.
class Field3D {
 public:
  Field3D() = default;
  Field3D(int nx, int ny, int nz, double value = 0.0)
      : nx_(nx), ny_(ny), nz_(nz), data_(static_cast<std::size_t>(nx) * ny * nz, value) {}
  explicit Field3D(const LayerGrid& g, double value = 0.0)
      : Field3D(g.plane.nx, g.plane.ny, g.nz, value) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int nz() const noexcept { return nz_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t slice_size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

  double& operator()(int i, int j, int k) noexcept { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const noexcept { return data_[index(i, j, k)]; }
  double& operator[](std::size_t n) noexcept { return data_[n]; }
  double operator[](std::size_t n) const noexcept { return data_[n]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Field2D slice(int k) const {
    Field2D out(nx_, ny_);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(k * slice_size()), slice_size(),
                out.values().begin());
    return out;
  }
  void set_slice(int k, const Field2D& f) {
    std::copy(f.values().begin(), f.values().end(),
              data_.begin() + static_cast<std::ptrdiff_t>(k * slice_size()));
  }

  bool same_shape(const Field3D& o) const noexcept {
    return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_;
  }
  bool matches(const LayerGrid& g) const noexcept {
    return nx_ == g.plane.nx && ny_ == g.plane.ny && nz_ == g.nz;
  }

 private:
  std::size_t index(int i, int j, int k) const noexcept {
    return i + static_cast<std::size_t>(nx_) * (j + static_cast<std::size_t>(ny_) * k);
  }
  int nx_ = 0;
  int ny_ = 0;
  int nz_ = 0;
  std::vector<double> data_;
};

/// Two horizontal components of a planar vector field.
struct VecField2D {
  Field2D x, y;
  VecField2D() = default;
  explicit VecField2D(const Torus& t, double value = 0.0) : x(t, value), y(t, value) {}
  VecField2D(Field2D fx, Field2D fy) : x(std::move(fx)), y(std::move(fy)) {}
};

/// Horizontal velocity (two components) on a layer.
struct VecField3D {
  Field3D x, y;
  VecField3D() = default;
  explicit VecField3D(const LayerGrid& g, double value = 0.0) : x(g, value), y(g, value) {}
  VecField3D(Field3D fx, Field3D fy) : x(std::move(fx)), y(std::move(fy)) {}
};

/// Symmetric 2x2 tensor field on the plane.
struct TensorField2D {
  Field2D xx, xy, yy;
  TensorField2D() = default;
  explicit TensorField2D(const Torus& t, double value = 0.0) : xx(t, value), xy(t, value), yy(t, value) {}
};

// ---------------------------------------------------------------------------
// Elementwise arithmetic shared by the scalar field types.

template <class F>
concept ScalarField = std::same_as<F, Field2D> || std::same_as<F, Field3D>;

template <ScalarField F>
void require_same_shape(const F& a, const F& b) {
  if (!a.same_shape(b)) throw DimensionError("field shape mismatch");
}

template <ScalarField F>
F& operator+=(F& a, const F& b) {
  require_same_shape(a, b);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < av.size(); ++n) av[n] += bv[n];
  return a;
}
template <ScalarField F>
F& operator-=(F& a, const F& b) {
  require_same_shape(a, b);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < av.size(); ++n) av[n] -= bv[n];
  return a;
}
template <ScalarField F>
F& operator*=(F& a, double s) {
  for (double& v : a.values()) v *= s;
  return a;
}
template <ScalarField F>
F operator+(F a, const F& b) { return a += b; }
template <ScalarField F>
F operator-(F a, const F& b) { return a -= b; }
template <ScalarField F>
F operator*(double s, F a) { return a *= s; }
template <ScalarField F>
F operator*(F a, double s) { return a *= s; }

/// Pointwise product.
template <ScalarField F>
F hadamard(F a, const F& b) {
  require_same_shape(a, b);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < av.size(); ++n) av[n] *= bv[n];
  return a;
}

/// a += s * b
template <ScalarField F>
void axpy(double s, const F& b, F& a) {
  require_same_shape(a, b);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < av.size(); ++n) av[n] += s * bv[n];
}

template <ScalarField F>
double max_abs(const F& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}
template <ScalarField F>
double max_abs_diff(const F& a, const F& b) {
  require_same_shape(a, b);
  double m = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < av.size(); ++n) m = std::max(m, std::abs(av[n] - bv[n]));
  return m;
}
template <ScalarField F>
bool all_finite(const F& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}
template <ScalarField F>
double sum(const F& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s;
}

// Vector fields ---------------------------------------------------------------

template <class V>
concept VectorField = std::same_as<V, VecField2D> || std::same_as<V, VecField3D>;

template <VectorField V>
V& operator+=(V& a, const V& b) { a.x += b.x; a.y += b.y; return a; }
template <VectorField V>
V& operator-=(V& a, const V& b) { a.x -= b.x; a.y -= b.y; return a; }
template <VectorField V>
V& operator*=(V& a, double s) { a.x *= s; a.y *= s; return a; }
template <VectorField V>
V operator+(V a, const V& b) { return a += b; }
template <VectorField V>
V operator-(V a, const V& b) { return a -= b; }
template <VectorField V>
V operator*(double s, V a) { return a *= s; }
template <VectorField V>
void axpy(double s, const V& b, V& a) { axpy(s, b.x, a.x); axpy(s, b.y, a.y); }
template <VectorField V>
double max_abs(const V& v) { return std::max(max_abs(v.x), max_abs(v.y)); }
template <VectorField V>
double max_abs_diff(const V& a, const V& b) {
  return std::max(max_abs_diff(a.x, b.x), max_abs_diff(a.y, b.y));
}
template <VectorField V>
bool all_finite(const V& v) { return all_finite(v.x) && all_finite(v.y); }

// Sampling helpers ------------------------------------------------------------

template <class Fn>
Field2D sample(const Torus& t, Fn&& fn) {
  Field2D f(t);
  for (int j = 0; j < t.ny; ++j)
    for (int i = 0; i < t.nx; ++i) f(i, j) = fn(t.x(i), t.y(j));
  return f;
}

template <class Fn>
Field3D sample(const LayerGrid& g, Fn&& fn) {
  Field3D f(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.plane.ny; ++j)
      for (int i = 0; i < g.plane.nx; ++i) f(i, j, k) = fn(g.plane.x(i), g.plane.y(j), g.z(k));
  return f;
}

}  // namespace seaice
