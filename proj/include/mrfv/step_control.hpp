#pragma once

#include <algorithm>
#include <cmath>

namespace mrfv {

struct ControlOptions {
  double eta_rk = 1e-4;    ///< local error target
  double nu = 0.9;         ///< base safety factor
  double alpha = 1.5;      ///< growth cap per step
  int k_newt_max = 30;     ///< Newton iteration cap, enters the safety factor
  int embedded_order = 3;  ///< order of the embedded error estimate
};

/// Safety factor tightened by the work the last step required: many Newton or
/// linear iterations shrink the next step proposal.
inline double safety_factor(const ControlOptions& opt, int newton_iters, int lin_iters) {
  const double kmax = static_cast<double>(opt.k_newt_max);
  const double work = std::max(static_cast<double>(newton_iters), 0.5 * lin_iters);
  return opt.nu * (2.0 * kmax + 1.0) / (2.0 * kmax + work);
}

struct StepProposal {
  bool accept = false;
  double dt_next = 0.0;
};

/// Classic error-per-step controller: accept when the estimate meets the
/// target, propose dt * (eta/err)^(1/(p_hat+1)) scaled by the safety factor
/// and capped at alpha growth.  Rejections always shrink the step.
inline StepProposal propose_step(const ControlOptions& opt, double dt, double err,
                                 int newton_iters, int lin_iters) {
  const double nu_k = safety_factor(opt, newton_iters, lin_iters);
  const double expo = 1.0 / (opt.embedded_order + 1.0);
  const double dt_new = dt * std::pow(opt.eta_rk / std::max(err, 1e-300), expo);
  StepProposal p;
  if (err <= opt.eta_rk) {
    p.accept = true;
    p.dt_next = std::min(nu_k * dt_new, opt.alpha * dt);
  } else {
    p.accept = false;
    p.dt_next = nu_k * dt_new;
  }
  return p;
}

/// Ramp-up law for constant-step runs: grow gently toward the target step.
inline double constant_mode_next(const ControlOptions& opt, double dt_used, double dt_target,
                                 int newton_iters, int lin_iters) {
  const double nu_k = safety_factor(opt, newton_iters, lin_iters);
  return std::min(opt.alpha * nu_k * dt_used, dt_target);
}

}  // namespace mrfv
