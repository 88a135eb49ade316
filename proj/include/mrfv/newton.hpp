#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mrfv/core.hpp"

namespace mrfv {

struct NewtonOptions {
  double eta = 1e-5;
  int k_max = 30;
  /// Linear-iteration count beyond which a Jacobian refresh is requested.
  int k_ls_j = 30;
};

enum class NewtonOutcome { converged, halve_timestep, diverged };

struct NewtonReport {
  std::vector<double> increments;
  std::vector<double> thetas;
  std::vector<int> lin_iters;
  int iterations = 0;
  int jacobian_refreshes = 0;
  NewtonOutcome outcome = NewtonOutcome::converged;
};

/// Convergence bookkeeping for one simplified-Newton solve.  Feed the norm of
/// each increment after applying it; the verdict implements the stopping and
/// timestep-halving rules:
///   - stop once ||dZ^k|| <= eta,
///   - halve when Theta_k >= 1,
///   - halve when Theta_k^(k_max-k-1) ||dZ^k|| >= eta (anticipated miss),
///   - halve when k_max iterations are exhausted.
/// Theta_0 compares the first increment against 2 max|U_0|.
class NewtonMonitor {
 public:
  enum class Verdict { proceed, converged, halve };

  NewtonMonitor(const NewtonOptions& opt, double u0_max_abs)
      : opt_(opt), u0_scale_(std::max(2.0 * u0_max_abs, 1e-10)) {}

  Verdict observe(double delta_norm) {
    const int k = static_cast<int>(increments.size());
    const double theta = k == 0 ? delta_norm / u0_scale_
                                : (prev_ > 0.0 ? delta_norm / prev_ : 0.0);
    prev_ = delta_norm;
    increments.push_back(delta_norm);
    thetas.push_back(theta);
    if (delta_norm <= opt_.eta) return Verdict::converged;
    if (theta >= 1.0) return Verdict::halve;
    if (std::pow(theta, opt_.k_max - k - 1) * delta_norm >= opt_.eta) return Verdict::halve;
    if (k + 1 >= opt_.k_max) return Verdict::halve;
    return Verdict::proceed;
  }

  std::vector<double> increments;
  std::vector<double> thetas;

 private:
  NewtonOptions opt_;
  double u0_scale_;
  double prev_ = 0.0;
};

}  // namespace mrfv
