#pragma once

#include <cmath>
#include <vector>

#include "mrfv/csr.hpp"
#include "mrfv/ilut.hpp"

namespace mrfv {

struct GmresOptions {
  int restart = 30;
  int max_iter = 400;
  /// Convergence when ||b - A x|| <= rel_tol * ||b||.
  double rel_tol = 1e-6;
};

struct GmresResult {
  int iterations = 0;
  double rel_residual = 0.0;
};

namespace detail {
inline double nrm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
}  // namespace detail

/// Restarted GMRES with modified Gram-Schmidt and optional right
/// preconditioning (pass nullptr to run unpreconditioned).  The initial
/// guess in `x` is used and overwritten with the solution.  Throws
/// StagnationError with the best iterate if max_iter is exhausted.
inline GmresResult gmres(const CsrMatrix& a, const std::vector<double>& b,
                         std::vector<double>& x, const IlutPreconditioner* precond,
                         const GmresOptions& opt) {
  const std::int32_t n = a.n;
  x.resize(n, 0.0);
  const double bnorm = detail::nrm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {0, 0.0};
  }
  const double tol_abs = opt.rel_tol * bnorm;
  const int kr = opt.restart;

  std::vector<std::vector<double>> v(kr + 1, std::vector<double>(n));
  std::vector<double> h((kr + 1) * kr, 0.0);
  std::vector<double> cs(kr), sn(kr), g(kr + 1), y(kr);
  std::vector<double> r(n), t(n), t2(n);

  auto residual = [&](const std::vector<double>& xx, std::vector<double>& rr) {
    a.multiply(xx.data(), rr.data());
    for (std::int32_t i = 0; i < n; ++i) rr[i] = b[i] - rr[i];
    return detail::nrm2(rr);
  };

  int iters = 0;
  double beta = residual(x, r);
  std::vector<double> best_x = x;
  double best_res = beta;

  while (true) {
    if (beta <= tol_abs) return {iters, beta / bnorm};
    if (iters >= opt.max_iter)
      throw StagnationError("gmres: no convergence in " + std::to_string(opt.max_iter) +
                                " iterations",
                            best_x, best_res / bnorm);

    for (std::int32_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (int j = 0; j < kr && iters < opt.max_iter; ++j) {
      ++iters;
      const std::vector<double>* src = &v[j];
      if (precond) {
        precond->apply(v[j].data(), t.data());
        src = &t;
      }
      a.multiply(src->data(), t2.data());
      for (int i = 0; i <= j; ++i) {
        double dot = 0.0;
        for (std::int32_t q = 0; q < n; ++q) dot += t2[q] * v[i][q];
        h[i * kr + j] = dot;
        for (std::int32_t q = 0; q < n; ++q) t2[q] -= dot * v[i][q];
      }
      const double hj1 = detail::nrm2(t2);
      h[(j + 1) * kr + j] = hj1;
      if (hj1 > 0.0)
        for (std::int32_t q = 0; q < n; ++q) v[j + 1][q] = t2[q] / hj1;

      for (int i = 0; i < j; ++i) {
        const double tmp = cs[i] * h[i * kr + j] + sn[i] * h[(i + 1) * kr + j];
        h[(i + 1) * kr + j] = -sn[i] * h[i * kr + j] + cs[i] * h[(i + 1) * kr + j];
        h[i * kr + j] = tmp;
      }
      const double denom = std::hypot(h[j * kr + j], h[(j + 1) * kr + j]);
      cs[j] = denom == 0.0 ? 1.0 : h[j * kr + j] / denom;
      sn[j] = denom == 0.0 ? 0.0 : h[(j + 1) * kr + j] / denom;
      h[j * kr + j] = denom;
      h[(j + 1) * kr + j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      k = j + 1;
      if (std::abs(g[k]) <= tol_abs || hj1 == 0.0) break;
    }

    // y = H^{-1} g, then x += M^{-1} (V y).
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h[i * kr + j] * y[j];
      y[i] = s / h[i * kr + i];
    }
    std::fill(t2.begin(), t2.end(), 0.0);
    for (int j = 0; j < k; ++j)
      for (std::int32_t q = 0; q < n; ++q) t2[q] += y[j] * v[j][q];
    if (precond) {
      precond->apply(t2.data(), t.data());
      for (std::int32_t q = 0; q < n; ++q) x[q] += t[q];
    } else {
      for (std::int32_t q = 0; q < n; ++q) x[q] += t2[q];
    }

    beta = residual(x, r);
    if (beta < best_res) {
      best_res = beta;
      best_x = x;
    }
  }
}

}  // namespace mrfv
