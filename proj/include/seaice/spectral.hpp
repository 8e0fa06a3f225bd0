#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "seaice/grid.hpp"

namespace seaice {

/// Fourier coefficients on the torus, stored for every (m, n) with m fastest.
/// Normalised so that a constant field c has coefficient c at k = 0.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int nx, int ny) : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return data_.size(); }
  Complex& operator()(int m, int n) noexcept { return data_[m + static_cast<std::size_t>(nx_) * n]; }
  Complex operator()(int m, int n) const noexcept {
    return data_[m + static_cast<std::size_t>(nx_) * n];
  }
  Complex& operator[](std::size_t n) noexcept { return data_[n]; }
  Complex operator[](std::size_t n) const noexcept { return data_[n]; }
  Complex* data() noexcept { return data_.data(); }
  const Complex* data() const noexcept { return data_.data(); }

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<Complex> data_;
};

namespace detail {

// FFTW plan creation is not thread-safe; execution with the new-array interface is.
struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~FftPlans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

inline const FftPlans& plans_for(int nx, int ny) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<FftPlans>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{nx, ny}];
  if (!slot) {
    slot = std::make_unique<FftPlans>();
    std::vector<Complex> a(static_cast<std::size_t>(nx) * ny), b(a.size());
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    // FFTW is row-major: the slow index (y) comes first.
    slot->forward = fftw_plan_dft_2d(ny, nx, in, out, FFTW_FORWARD, flags);
    slot->backward = fftw_plan_dft_2d(ny, nx, in, out, FFTW_BACKWARD, flags);
  }
  return *slot;
}

/// Signed integer mode for storage index m of an n-point transform.
inline int signed_mode(int m, int n) noexcept { return m <= n / 2 ? m : m - n; }

}  // namespace detail

inline SpectralField spectral_forward(const Field2D& f) {
  if (f.nx() < 1 || f.ny() < 1) throw DimensionError("empty field");
  const auto& p = detail::plans_for(f.nx(), f.ny());
  std::vector<Complex> in(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) in[n] = f[n];
  SpectralField out(f.nx(), f.ny());
  fftw_execute_dft(p.forward, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(f.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] *= scale;
  return out;
}

/// Inverse transform; the imaginary part (round-off for Hermitian input) is dropped.
inline Field2D spectral_inverse(const SpectralField& F) {
  const auto& p = detail::plans_for(F.nx(), F.ny());
  std::vector<Complex> in(F.data(), F.data() + F.size()), out(F.size());
  fftw_execute_dft(p.backward, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  Field2D f(F.nx(), F.ny());
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = out[n].real();
  return f;
}

/// Wavenumber tables of a torus.
///
/// `kx`, `ky` are the first-derivative symbols; the Nyquist entry is zeroed so odd
/// derivatives of real fields stay real. `kx2`, `ky2` are the true squared
/// wavenumbers used by Laplacians.
struct Wavenumbers {
  std::vector<double> kx, ky, kx2, ky2;

  explicit Wavenumbers(const Torus& t) : kx(t.nx), ky(t.ny), kx2(t.nx), ky2(t.ny) {
    const double two_pi = 2.0 * std::numbers::pi;
    for (int m = 0; m < t.nx; ++m) {
      const double k = two_pi * detail::signed_mode(m, t.nx) / t.lx;
      kx2[m] = k * k;
      kx[m] = (t.nx % 2 == 0 && m == t.nx / 2) ? 0.0 : k;
    }
    for (int n = 0; n < t.ny; ++n) {
      const double k = two_pi * detail::signed_mode(n, t.ny) / t.ly;
      ky2[n] = k * k;
      ky[n] = (t.ny % 2 == 0 && n == t.ny / 2) ? 0.0 : k;
    }
  }
  double laplacian_symbol(int m, int n) const noexcept { return -(kx2[m] + ky2[n]); }
};

enum class Axis { X, Y };

/// Multiplies every coefficient by symbol(m, n).
template <class Symbol>
Field2D apply_multiplier(const Field2D& f, Symbol&& symbol) {
  SpectralField F = spectral_forward(f);
  for (int n = 0; n < F.ny(); ++n)
    for (int m = 0; m < F.nx(); ++m) F(m, n) *= symbol(m, n);
  return spectral_inverse(F);
}

inline Field2D horiz_derivative(const Torus& t, const Field2D& f, Axis axis) {
  if (!f.matches(t)) throw DimensionError("horiz_derivative: field does not match grid");
  const Wavenumbers k(t);
  const Complex I(0.0, 1.0);
  if (axis == Axis::X) return apply_multiplier(f, [&](int m, int) { return I * k.kx[m]; });
  return apply_multiplier(f, [&](int, int n) { return I * k.ky[n]; });
}

inline Field3D horiz_derivative(const LayerGrid& g, const Field3D& f, Axis axis) {
  if (!f.matches(g)) throw DimensionError("horiz_derivative: field does not match grid");
  Field3D out(g);
  for (int k = 0; k < g.nz; ++k) out.set_slice(k, horiz_derivative(g.plane, f.slice(k), axis));
  return out;
}

/// Mixed second derivative built from the first-derivative symbols.
inline Field2D horiz_second_derivative(const Torus& t, const Field2D& f, Axis a, Axis b) {
  const Wavenumbers k(t);
  return apply_multiplier(f, [&](int m, int n) {
    const double ka = a == Axis::X ? k.kx[m] : k.ky[n];
    const double kb = b == Axis::X ? k.kx[m] : k.ky[n];
    return Complex(-ka * kb, 0.0);
  });
}

inline Field2D horiz_laplacian(const Torus& t, const Field2D& f) {
  const Wavenumbers k(t);
  return apply_multiplier(f, [&](int m, int n) { return Complex(k.laplacian_symbol(m, n), 0.0); });
}

inline Field3D horiz_laplacian(const LayerGrid& g, const Field3D& f) {
  Field3D out(g);
  for (int k = 0; k < g.nz; ++k) out.set_slice(k, horiz_laplacian(g.plane, f.slice(k)));
  return out;
}

inline VecField2D gradient(const Torus& t, const Field2D& f) {
  VecField2D g;
  g.x = horiz_derivative(t, f, Axis::X);
  g.y = horiz_derivative(t, f, Axis::Y);
  return g;
}

inline Field2D divergence(const Torus& t, const VecField2D& v) {
  return horiz_derivative(t, v.x, Axis::X) + horiz_derivative(t, v.y, Axis::Y);
}

inline Field3D divergence(const LayerGrid& g, const VecField3D& v) {
  return horiz_derivative(g, v.x, Axis::X) + horiz_derivative(g, v.y, Axis::Y);
}

/// Classical Helmholtz projection on the torus: I - k k^T / |k|^2, identity at k = 0.
inline VecField2D helmholtz_2d(const Torus& t, const VecField2D& f) {
  const Wavenumbers k(t);
  SpectralField X = spectral_forward(f.x);
  SpectralField Y = spectral_forward(f.y);
  for (int n = 0; n < t.ny; ++n) {
    for (int m = 0; m < t.nx; ++m) {
      const double kx = k.kx[m], ky = k.ky[n];
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const Complex dot = kx * X(m, n) + ky * Y(m, n);
      X(m, n) -= kx * dot / k2;
      Y(m, n) -= ky * dot / k2;
    }
  }
  return {spectral_inverse(X), spectral_inverse(Y)};
}

/// Gradient part (1 - P_H) f.
inline VecField2D gradient_part(const Torus& t, const VecField2D& f) {
  VecField2D p = helmholtz_2d(t, f);
  return f - p;
}

/// Integral over the torus by the rectangle rule (exact for resolved trigonometric data).
inline double integrate(const Torus& t, const Field2D& f) { return sum(f) * t.cell_area(); }

}  // namespace seaice
