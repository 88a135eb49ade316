#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrfv {

inline constexpr int kMaxDim = 2;
inline constexpr int kMaxComp = 4;

/// Structural violations: malformed trees, bad tableau requests, index abuse.
struct StructuralError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Numerical breakdowns: singular pivots, non-finite model output.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Newton/step failure after the halving budget is exhausted.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Linear solver stagnation past the iteration cap.
struct StagnationError : std::runtime_error {
  StagnationError(const std::string& what, std::vector<double> iterate, double residual)
      : std::runtime_error(what), best_iterate(std::move(iterate)), best_residual(residual) {}
  std::vector<double> best_iterate;
  double best_residual = 0.0;
};

/// File and parse problems surfaced by io/config.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

inline double sq(double x) { return x * x; }

/// Solves the dense system A x = b in place by partial-pivot elimination.
/// Meant for tiny systems (Butcher algebra); throws on a vanishing pivot.
inline void dense_solve(std::vector<double>& a, std::vector<double>& x, int n) {
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (std::abs(a[piv * n + k]) < 1e-300)
      throw SingularityError("dense_solve: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(x[k], x[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      for (int j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      x[i] -= f * x[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
}

}  // namespace mrfv
