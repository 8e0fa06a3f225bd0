#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "seaice/error.hpp"

namespace seaice {

struct GmresOptions {
  double tol = 1e-10;  // on ||b - A x|| / ||b||
  int restart = 100;
  int max_iter = 1000;  // total inner iterations
};

struct GmresResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Restarted GMRES with right preconditioning: solves A x = b through A M^{-1} y = b.
/// Throws SolverError (carrying the residual history) if the tolerance is not met.
inline GmresResult gmres(const std::function<std::vector<double>(const std::vector<double>&)>& A,
                         const std::function<std::vector<double>(const std::vector<double>&)>& Minv,
                         const std::vector<double>& b, std::vector<double> x0,
                         const GmresOptions& opt = {}) {
  const std::size_t n = b.size();
  auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
  };
  auto norm = [&](const std::vector<double>& u) { return std::sqrt(dot(u, u)); };

  GmresResult res;
  res.x = x0.empty() ? std::vector<double>(n, 0.0) : std::move(x0);
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    return res;
  }
  auto residual = [&] {
    std::vector<double> r = A(res.x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return r;
  };

  std::vector<double> r = residual();
  double beta = norm(r);
  res.history.push_back(beta / bnorm);
  while (res.iterations < opt.max_iter && beta / bnorm > opt.tol) {
    const int m = opt.restart;
    std::vector<std::vector<double>> V(1, r);
    for (double& v : V[0]) v /= beta;
    std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    g[0] = beta;
    std::vector<std::vector<double>> Z;
    int k = 0;
    for (; k < m && res.iterations < opt.max_iter; ++k) {
      Z.push_back(Minv(V[k]));
      std::vector<double> w = A(Z[k]);
      for (int i = 0; i <= k; ++i) {  // modified Gram-Schmidt
        H[i][k] = dot(w, V[i]);
        for (std::size_t j = 0; j < n; ++j) w[j] -= H[i][k] * V[i][j];
      }
      H[k + 1][k] = norm(w);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
        H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
        H[i][k] = t;
      }
      const double rho = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = rho > 0.0 ? H[k][k] / rho : 1.0;
      sn[k] = rho > 0.0 ? H[k + 1][k] / rho : 0.0;
      H[k][k] = rho;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++res.iterations;
      res.history.push_back(std::abs(g[k + 1]) / bnorm);
      const double hk = norm(w);
      if (std::abs(g[k + 1]) / bnorm <= opt.tol || hk == 0.0) {
        ++k;
        break;
      }
      for (double& v : w) v /= hk;
      V.push_back(std::move(w));
    }
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = s / H[i][i];
    }
    for (int i = 0; i < k; ++i)
      for (std::size_t j = 0; j < n; ++j) res.x[j] += y[i] * Z[i][j];
    r = residual();
    beta = norm(r);
  }
  res.relative_residual = beta / bnorm;
  if (res.relative_residual > opt.tol)
    throw SolverError("GMRES did not converge: relative residual " +
                          format_sci(res.relative_residual),
                      res.history);
  return res;
}

}  // namespace seaice
