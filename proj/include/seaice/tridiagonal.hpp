#pragma once

#include <span>
#include <vector>

#include "seaice/grid.hpp"

namespace seaice {

/// Real tridiagonal matrix factored once (Thomas algorithm, no pivoting) and
/// applied to any number of real or complex right-hand sides.
class Tridiagonal {
 public:
  /// lower[0] and upper[n-1] are ignored.
  Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
      : lo_(std::move(lower)), up_(std::move(upper)), cp_(diag.size()), inv_(diag.size()) {
    const std::size_t n = diag.size();
    if (lo_.size() != n || up_.size() != n || n == 0)
      throw DimensionError("tridiagonal bands must share one length");
    double denom = diag[0];
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) denom = diag[k] - lo_[k] * cp_[k - 1];
      if (std::abs(denom) < 1e-300) throw SolverError("singular tridiagonal pivot");
      inv_[k] = 1.0 / denom;
      cp_[k] = up_[k] * inv_[k];
    }
  }

  std::size_t size() const noexcept { return inv_.size(); }

  template <class T>
  void solve_in_place(std::span<T> x) const {
    const std::size_t n = size();
    x[0] *= inv_[0];
    for (std::size_t k = 1; k < n; ++k) x[k] = (x[k] - lo_[k] * x[k - 1]) * inv_[k];
    for (std::size_t k = n - 1; k-- > 0;) x[k] -= cp_[k] * x[k + 1];
  }

 private:
  std::vector<double> lo_, up_, cp_, inv_;
};

}  // namespace seaice
