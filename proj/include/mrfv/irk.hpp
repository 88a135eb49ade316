#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "mrfv/butcher.hpp"
#include "mrfv/gmres.hpp"
#include "mrfv/ilut.hpp"
#include "mrfv/newton.hpp"
#include "mrfv/stage_matrix.hpp"

namespace mrfv {

/// Semi-discrete system U' = F(t, U) with a frozen-Jacobian provider and the
/// norm used for Newton control and error estimates.
struct OdeSystem {
  std::int32_t n = 0;
  std::function<void(double t, const double* u, double* f)> rhs;
  std::function<CsrMatrix(double t, const double* u)> jacobian;
  std::function<double(const double* v)> norm;
};

struct StepOptions {
  double eta_newt = 1e-5;
  double eta_ls = 1e-6;
  int k_newt_max = 30;
  int k_ls_j = 30;
  int max_halvings = 8;
  IlutOptions ilut{};
  int gmres_restart = 30;
  int gmres_max_iter = 400;
};

struct StepStats {
  int newton_iters = 0;  // max per stage (SDIRK) / total (fully implicit)
  int lin_iters_max = 0;
  int jacobian_refreshes = 0;
  int halvings = 0;
  int rhs_evals = 0;
  int factorizations = 0;
  NewtonOutcome outcome = NewtonOutcome::converged;
};

struct StepResult {
  bool ok = false;
  std::vector<double> u1;
  std::vector<std::vector<double>> z;  // converged stage increments
  double dt = 0.0;                     // dt actually used (after halvings)
  StepStats stats;
  NewtonReport newton;                 // last Newton solve performed
};

namespace detail {

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct LinearSolve {
  bool ok = false;
  int iters = 0;
};

inline LinearSolve solve(const CsrMatrix& m, const std::vector<double>& rhs,
                         std::vector<double>& x, const IlutPreconditioner& p,
                         const StepOptions& opt) {
  GmresOptions go;
  go.restart = opt.gmres_restart;
  go.max_iter = opt.gmres_max_iter;
  go.rel_tol = opt.eta_ls;
  std::fill(x.begin(), x.end(), 0.0);
  try {
    const GmresResult r = gmres(m, rhs, x, &p, go);
    return {true, r.iterations};
  } catch (const StagnationError&) {
    return {false, opt.gmres_max_iter};
  }
}

}  // namespace detail

/// One step of a stiffly-solved SDIRK scheme: stages are solved in sequence
/// with the shared operator (1/(dt gamma)) I - J0.  A Newton failure halves
/// dt and restarts the whole step; `j0` is re-evaluated in place when GMRES
/// labors past k_ls_j iterations.
inline StepResult step_sdirk(const OdeSystem& sys, const ButcherTableau& tab, double t0,
                             const std::vector<double>& u0, double dt_in, CsrMatrix& j0,
                             const StepOptions& opt) {
  const std::int32_t n = sys.n;
  const int s = tab.s;
  const double g = tab.gamma;
  StepResult res;
  res.z.assign(s, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> f(s, std::vector<double>(n, 0.0));
  std::vector<double> utmp(n), ftmp(n), rhs(n), dz(n);
  const double u0_max = detail::max_abs(u0);

  double dt = dt_in;
  CsrMatrix m = sdirk_stage_matrix(j0, dt, g);
  IlutPreconditioner precond;
  factor_with_fallback(precond, m, opt.ilut);
  res.stats.factorizations++;

  for (int attempt = 0;; ++attempt) {
    bool restart = false;
    for (int i = 0; i < s && !restart; ++i) {
      std::vector<double>& zi = res.z[i];
      if (i == 0)
        std::fill(zi.begin(), zi.end(), 0.0);
      else
        zi = res.z[i - 1];

      std::vector<double> acc(n, 0.0);
      for (int j = 0; j < i; ++j) {
        const double w = tab.a[i][j] / g;
        for (std::int32_t q = 0; q < n; ++q) acc[q] += w * f[j][q];
      }

      NewtonMonitor monitor({opt.eta_newt, opt.k_newt_max, opt.k_ls_j}, u0_max);
      NewtonReport report;
      const double ti = t0 + tab.c[i] * dt;
      const double dg_inv = 1.0 / (dt * g);
      while (true) {
        for (std::int32_t q = 0; q < n; ++q) utmp[q] = u0[q] + zi[q];
        sys.rhs(ti, utmp.data(), ftmp.data());
        res.stats.rhs_evals++;
        for (std::int32_t q = 0; q < n; ++q)
          rhs[q] = -dg_inv * zi[q] + ftmp[q] + acc[q];

        const detail::LinearSolve ls = detail::solve(m, rhs, dz, precond, opt);
        report.lin_iters.push_back(ls.iters);
        res.stats.lin_iters_max = std::max(res.stats.lin_iters_max, ls.iters);
        if (!ls.ok) {
          restart = true;
          break;
        }
        for (std::int32_t q = 0; q < n; ++q) zi[q] += dz[q];

        const auto verdict = monitor.observe(sys.norm(dz.data()));
        report.iterations = static_cast<int>(monitor.increments.size());
        res.stats.newton_iters = std::max(res.stats.newton_iters, report.iterations);
        if (verdict == NewtonMonitor::Verdict::converged) break;
        if (verdict == NewtonMonitor::Verdict::halve) {
          restart = true;
          break;
        }
        if (ls.iters > opt.k_ls_j) {
          j0 = sys.jacobian(ti, utmp.data());
          m = sdirk_stage_matrix(j0, dt, g);
          factor_with_fallback(precond, m, opt.ilut);
          res.stats.factorizations++;
          res.stats.jacobian_refreshes++;
        }
      }
      report.increments = monitor.increments;
      report.thetas = monitor.thetas;
      res.newton = std::move(report);

      if (!restart) {
        for (std::int32_t q = 0; q < n; ++q) utmp[q] = u0[q] + zi[q];
        sys.rhs(ti, utmp.data(), f[i].data());
        res.stats.rhs_evals++;
      }
    }

    if (!restart) {
      res.ok = true;
      res.dt = dt;
      res.stats.outcome = NewtonOutcome::converged;
      res.newton.outcome = NewtonOutcome::converged;
      res.u1 = u0;
      for (int i = 0; i < s; ++i)
        if (tab.d[i] != 0.0)
          for (std::int32_t q = 0; q < n; ++q) res.u1[q] += tab.d[i] * res.z[i][q];
      return res;
    }
    if (attempt >= opt.max_halvings) {
      res.ok = false;
      res.dt = dt;
      res.stats.outcome = NewtonOutcome::diverged;
      res.newton.outcome = NewtonOutcome::diverged;
      return res;
    }
    const double dg_old = 1.0 / (dt * g);
    dt *= 0.5;
    res.stats.halvings++;
    res.stats.outcome = NewtonOutcome::halve_timestep;
    rescale_stage_matrix(m, dg_old, 1.0 / (dt * g));
    factor_with_fallback(precond, m, opt.ilut);
    res.stats.factorizations++;
  }
}

/// One step of a fully implicit scheme (RadauIIA): the coupled s-stage system
/// is solved by simplified Newton on (dt^{-1} I - A (x) J0) dZ = -dt^{-1} Z + A F(Z).
inline StepResult step_fully_implicit(const OdeSystem& sys, const ButcherTableau& tab,
                                      double t0, const std::vector<double>& u0, double dt_in,
                                      CsrMatrix& j0, const StepOptions& opt) {
  const std::int32_t n = sys.n;
  const int s = tab.s;
  const std::int32_t nn = s * n;
  StepResult res;
  std::vector<double> z(nn, 0.0), dz(nn), rhs(nn), utmp(n), block(n);
  std::vector<std::vector<double>> f(s, std::vector<double>(n));
  const double u0_max = detail::max_abs(u0);

  double dt = dt_in;
  CsrMatrix m = full_stage_matrix(tab, j0, dt);
  IlutPreconditioner precond;
  factor_with_fallback(precond, m, opt.ilut);
  res.stats.factorizations++;

  for (int attempt = 0;; ++attempt) {
    std::fill(z.begin(), z.end(), 0.0);
    NewtonMonitor monitor({opt.eta_newt, opt.k_newt_max, opt.k_ls_j}, u0_max);
    NewtonReport report;
    const double inv_dt = 1.0 / dt;
    bool failed = false;
    bool converged = false;

    while (!converged && !failed) {
      for (int i = 0; i < s; ++i) {
        const double* zi = z.data() + static_cast<std::size_t>(i) * n;
        for (std::int32_t q = 0; q < n; ++q) utmp[q] = u0[q] + zi[q];
        sys.rhs(t0 + tab.c[i] * dt, utmp.data(), f[i].data());
        res.stats.rhs_evals++;
      }
      for (int i = 0; i < s; ++i) {
        double* out = rhs.data() + static_cast<std::size_t>(i) * n;
        const double* zi = z.data() + static_cast<std::size_t>(i) * n;
        for (std::int32_t q = 0; q < n; ++q) out[q] = -inv_dt * zi[q];
        for (int j = 0; j < s; ++j) {
          const double aij = tab.a[i][j];
          const double* fj = f[j].data();
          for (std::int32_t q = 0; q < n; ++q) out[q] += aij * fj[q];
        }
      }

      const detail::LinearSolve ls = detail::solve(m, rhs, dz, precond, opt);
      report.lin_iters.push_back(ls.iters);
      res.stats.lin_iters_max = std::max(res.stats.lin_iters_max, ls.iters);
      if (!ls.ok) {
        failed = true;
        break;
      }
      for (std::int32_t q = 0; q < nn; ++q) z[q] += dz[q];

      double dn = 0.0;
      for (int i = 0; i < s; ++i)
        dn += sq(sys.norm(dz.data() + static_cast<std::size_t>(i) * n));
      const auto verdict = monitor.observe(std::sqrt(dn));
      report.iterations = static_cast<int>(monitor.increments.size());
      res.stats.newton_iters = std::max(res.stats.newton_iters, report.iterations);
      if (verdict == NewtonMonitor::Verdict::converged) {
        converged = true;
      } else if (verdict == NewtonMonitor::Verdict::halve) {
        failed = true;
      } else if (ls.iters > opt.k_ls_j) {
        const double* zl = z.data() + static_cast<std::size_t>(s - 1) * n;
        for (std::int32_t q = 0; q < n; ++q) utmp[q] = u0[q] + zl[q];
        j0 = sys.jacobian(t0 + tab.c[s - 1] * dt, utmp.data());
        m = full_stage_matrix(tab, j0, dt);
        factor_with_fallback(precond, m, opt.ilut);
        res.stats.factorizations++;
        res.stats.jacobian_refreshes++;
      }
    }
    report.increments = monitor.increments;
    report.thetas = monitor.thetas;
    res.newton = std::move(report);

    if (converged) {
      res.ok = true;
      res.dt = dt;
      res.stats.outcome = NewtonOutcome::converged;
      res.newton.outcome = NewtonOutcome::converged;
      res.u1 = u0;
      res.z.assign(s, std::vector<double>(n));
      for (int i = 0; i < s; ++i) {
        const double* zi = z.data() + static_cast<std::size_t>(i) * n;
        std::copy(zi, zi + n, res.z[i].begin());
        if (tab.d[i] != 0.0)
          for (std::int32_t q = 0; q < n; ++q) res.u1[q] += tab.d[i] * zi[q];
      }
      return res;
    }
    if (attempt >= opt.max_halvings) {
      res.ok = false;
      res.dt = dt;
      res.stats.outcome = NewtonOutcome::diverged;
      res.newton.outcome = NewtonOutcome::diverged;
      return res;
    }
    dt *= 0.5;
    res.stats.halvings++;
    res.stats.outcome = NewtonOutcome::halve_timestep;
    rescale_stage_matrix(m, inv_dt, 2.0 * inv_dt);
    factor_with_fallback(precond, m, opt.ilut);
    res.stats.factorizations++;
  }
}

inline StepResult irk_step(const OdeSystem& sys, const ButcherTableau& tab, double t0,
                           const std::vector<double>& u0, double dt, CsrMatrix& j0,
                           const StepOptions& opt) {
  return tab.diagonally_implicit ? step_sdirk(sys, tab, t0, u0, dt, j0, opt)
                                 : step_fully_implicit(sys, tab, t0, u0, dt, j0, opt);
}

/// Embedded local-error estimate err = || e0 dt F(t0,U0) + sum_i e_i z_i ||.
/// `f0` may be null when the tableau's e0 vanishes.
inline double estimate_error(const OdeSystem& sys, const ButcherTableau& tab, double dt,
                             const double* f0, const std::vector<std::vector<double>>& z) {
  if (!tab.has_embedded) throw StructuralError("estimate_error: no embedded scheme");
  const std::int32_t n = sys.n;
  std::vector<double> v(n, 0.0);
  if (tab.e0 != 0.0) {
    if (!f0) throw StructuralError("estimate_error: F(t0,U0) required");
    for (std::int32_t q = 0; q < n; ++q) v[q] = tab.e0 * dt * f0[q];
  }
  for (int i = 0; i < tab.s; ++i) {
    const double ei = tab.e[i];
    if (ei == 0.0) continue;
    for (std::int32_t q = 0; q < n; ++q) v[q] += ei * z[i][q];
  }
  return sys.norm(v.data());
}

}  // namespace mrfv
