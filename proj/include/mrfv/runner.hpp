#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mrfv/discretization.hpp"
#include "mrfv/io.hpp"
#include "mrfv/irk.hpp"
#include "mrfv/jacobian.hpp"
#include "mrfv/model.hpp"
#include "mrfv/multiresolution.hpp"
#include "mrfv/step_control.hpp"
#include "mrfv/tree.hpp"

namespace mrfv {

/// Frozen-velocity evaluation time at t = 0 for models whose velocity field
/// is singular there; small enough that the analytic t -> 0+ limit is exact
/// in double precision.
inline constexpr double kVelocityTimeFloor = 1e-30;

struct ModelCase {
  Model model;
  Domain domain;
};

/// The built-in problem setups.
inline ModelCase named_case(const std::string& name) {
  Domain d;
  d.roots = {1, 1};
  if (name == "bz1d") {
    d.dim = 1;
    d.lo = {0.0, 0.0};
    d.hi = {1.0, 1.0};
    return {make_bz_1d(), d};
  }
  if (name == "bz2d") {
    d.dim = 2;
    d.lo = {0.0, 0.0};
    d.hi = {1.0, 1.0};
    return {make_bz_2d(), d};
  }
  if (name == "ignition" || name == "ignition_novortex") {
    d.dim = 2;
    d.lo = {-1.0, -1.0};
    d.hi = {1.0, 1.0};
    return {make_ignition({}, name == "ignition"), d};
  }
  throw StructuralError("unknown model case '" + name + "'");
}

struct RunSettings {
  Scheme scheme = Scheme::radau5;
  double t_begin = 0.0;
  double t_end = 1.0;
  double dt0 = 1e-4;
  bool adaptive_dt = true;
  /// Constant-step target; the ramp-up law grows dt0 toward it.  Zero means
  /// dt0 is already the target.
  double dt_target = 0.0;
  double eta_rk = 1e-4;
  /// Tolerance cascade eta_newt = kappa eta_rk, eta_ls = kappa eta_newt;
  /// the explicit values below win when positive.
  double kappa = 1e-1;
  double eta_newt = 0.0;
  double eta_ls = 0.0;
  double eta_mr = 1e-3;
  double alpha = 1.5;
  double nu = 0.9;
  int k_newt_max = 30;
  int k_ls_j = 30;
  int max_halvings = 8;
  IlutOptions ilut{};
  int gmres_restart = 30;
  int gmres_max_iter = 400;
  std::int64_t max_steps = 1000000;
};

struct RunSummary {
  std::int64_t n_accepted = 0;
  std::int64_t n_rejected = 0;
  double max_dt = 0.0;
  int max_newton = 0;
  int max_lin = 0;
  int jacobian_refreshes = 0;
  double final_time = 0.0;
  double final_compression = 100.0;
  double cpu_seconds = 0.0;
  std::vector<double> accepted_dt;
};

struct RunResult {
  Grid grid;
  RunSummary summary;
};

/// Uniform initial grid at the finest level, filled from the model's initial
/// condition, then adapted when eta_mr > 0.
inline Grid initial_grid(const Model& model, const Domain& dom, int max_level, double eta_mr) {
  Grid g(dom, max_level, model.ncomp);
  const std::int64_t nx = dom.cells_along(0, max_level);
  const std::int64_t ny = dom.dim == 2 ? dom.cells_along(1, max_level) : 1;
  for (std::int64_t jy = 0; jy < ny; ++jy)
    for (std::int64_t jx = 0; jx < nx; ++jx)
      g.require(CellId{max_level, {static_cast<std::int32_t>(jx), static_cast<std::int32_t>(jy)}});

  const double h = dom.width(0, max_level);
  double u[kMaxComp];
  for (const CellId& id : g.leaves()) {
    model.initial(dom.center(id), h, u);
    CellData& c = g.cell(id);
    for (int k = 0; k < model.ncomp; ++k) c.avg[k] = u[k];
  }
  g.project_internal();
  if (eta_mr > 0.0) return adapt(g, AdaptOptions{eta_mr});
  return g;
}

/// Binds the spatial discretization of one grid into the integrator-facing
/// system.  The plan, model and workspace must outlive the returned object.
inline OdeSystem make_system(const FluxPlan& plan, const Model& model, RhsWorkspace& ws) {
  OdeSystem sys;
  sys.n = plan.n_state();
  sys.rhs = [&plan, &model, &ws](double t, const double* u, double* f) {
    eval_rhs(plan, model, t, u, f, ws);
  };
  sys.jacobian = [&plan, &model, &ws](double t, const double* u) {
    return assemble_jacobian(plan, model, t, u, ws);
  };
  sys.norm = [&plan](const double* v) { return weighted_norm(plan, v); };
  return sys;
}

inline StepOptions step_options(const RunSettings& st) {
  StepOptions opt;
  opt.eta_newt = st.eta_newt > 0.0 ? st.eta_newt : st.kappa * st.eta_rk;
  opt.eta_ls = st.eta_ls > 0.0 ? st.eta_ls : st.kappa * opt.eta_newt;
  opt.k_newt_max = st.k_newt_max;
  opt.k_ls_j = st.k_ls_j;
  opt.max_halvings = st.max_halvings;
  opt.ilut = st.ilut;
  opt.gmres_restart = st.gmres_restart;
  opt.gmres_max_iter = st.gmres_max_iter;
  return opt;
}

/// Advances `g` from t_begin to t_end.  Each step rebuilds the flux plan on
/// the current grid, freezes velocity and Jacobian at (t_n, U_n), takes one
/// implicit step, and on acceptance re-adapts the grid.  Step size follows
/// the embedded-error controller in adaptive mode or the ramp-up law in
/// constant mode.
inline RunResult run(Grid g, const Model& model, const RunSettings& st, StatsLog log = {}) {
  const ButcherTableau tab = tableau(st.scheme);
  const StepOptions sopt = step_options(st);
  ControlOptions ctl;
  ctl.eta_rk = st.eta_rk;
  ctl.nu = st.nu;
  ctl.alpha = st.alpha;
  ctl.k_newt_max = st.k_newt_max;
  ctl.embedded_order = tab.has_embedded ? tab.embedded_order : std::max(tab.order - 1, 1);
  const bool control = st.adaptive_dt && tab.has_embedded;
  const double dt_target = st.dt_target > 0.0 ? st.dt_target : st.dt0;

  const double span = st.t_end - st.t_begin;
  if (span <= 0.0) throw StructuralError("run: t_end must exceed t_begin");
  const double dt_floor = 1e-14 * span;
  const double t_close = st.t_end - 1e-12 * span;

  RunSummary sum;
  const auto wall0 = std::chrono::steady_clock::now();
  double t = st.t_begin;
  double dt = st.dt0;
  std::vector<double> u, f0;

  for (std::int64_t step = 0; t < t_close; ++step) {
    if (step >= st.max_steps)
      throw DivergenceError("run: step budget exhausted at t = " + std::to_string(t));

    FluxPlan plan = build_flux_plan(g);
    RhsWorkspace ws;
    refresh_face_velocity(plan, model, std::max(t, kVelocityTimeFloor));
    OdeSystem sys = make_system(plan, model, ws);
    g.gather(u);
    CsrMatrix j0 = sys.jacobian(t, u.data());

    const bool need_f0 = control && tab.e0 != 0.0;
    if (need_f0) {
      f0.resize(sys.n);
      sys.rhs(t, u.data(), f0.data());
    }

    for (;;) {
      const double dt_try = std::min(dt, st.t_end - t);
      StepResult res = irk_step(sys, tab, t, u, dt_try, j0, sopt);
      if (!res.ok)
        throw DivergenceError("run: Newton diverged at t = " + std::to_string(t) +
                              ", dt = " + std::to_string(dt_try));
      sum.max_newton = std::max(sum.max_newton, res.stats.newton_iters);
      sum.max_lin = std::max(sum.max_lin, res.stats.lin_iters_max);
      sum.jacobian_refreshes += res.stats.jacobian_refreshes;

      const bool finite = all_finite(res.u1.data(), res.u1.size());
      if (!finite) {
        sum.n_rejected++;
        if (log.active())
          log.record(step, t, res.dt, false, std::numeric_limits<double>::quiet_NaN(),
                     res.stats.newton_iters, res.stats.lin_iters_max,
                     res.stats.jacobian_refreshes, res.stats.halvings, g.n_leaves(),
                     compression_percent(g));
        dt = 0.5 * res.dt;
        if (dt < dt_floor) throw DivergenceError("run: time step underflow at t = " + std::to_string(t));
        continue;
      }

      double err = 0.0;
      double dt_next;
      bool accept = true;
      if (control) {
        err = estimate_error(sys, tab, res.dt, need_f0 ? f0.data() : nullptr, res.z);
        const StepProposal p =
            propose_step(ctl, res.dt, err, res.stats.newton_iters, res.stats.lin_iters_max);
        accept = p.accept;
        dt_next = p.dt_next;
      } else {
        dt_next = constant_mode_next(ctl, res.dt, dt_target, res.stats.newton_iters,
                                     res.stats.lin_iters_max);
      }

      if (log.active())
        log.record(step, t, res.dt, accept, err, res.stats.newton_iters,
                   res.stats.lin_iters_max, res.stats.jacobian_refreshes, res.stats.halvings,
                   g.n_leaves(), compression_percent(g));

      if (!accept) {
        sum.n_rejected++;
        dt = dt_next;
        if (dt < dt_floor) throw DivergenceError("run: time step underflow at t = " + std::to_string(t));
        continue;
      }

      t += res.dt;
      sum.n_accepted++;
      sum.max_dt = std::max(sum.max_dt, res.dt);
      sum.accepted_dt.push_back(res.dt);
      g.scatter(res.u1);
      if (st.eta_mr > 0.0) g = adapt(g, AdaptOptions{st.eta_mr});
      dt = dt_next;
      break;
    }
  }

  sum.final_time = t;
  sum.final_compression = compression_percent(g);
  sum.cpu_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return RunResult{std::move(g), sum};
}

}  // namespace mrfv
