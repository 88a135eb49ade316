#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mrfv/runner.hpp"

namespace mrfv {

/// Least-squares slope of log(err) against log(dt), skipping points at or
/// below the round-off floor.  Throws when fewer than `min_points` survive.
inline double fit_loglog_slope(const std::vector<double>& dt, const std::vector<double>& err,
                               double floor = 1e-13, int min_points = 3) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (!(err[i] > floor) || !std::isfinite(err[i])) continue;
    const double x = std::log(dt[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < min_points)
    throw StructuralError("fit_loglog_slope: only " + std::to_string(n) + " usable points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// High-accuracy states at t0 + dt for every requested dt, from a single
/// radau5 trajectory on a fixed grid with forced landings at each endpoint.
inline std::vector<std::vector<double>> reference_states(const FluxPlan& plan, const Model& model,
                                                         const std::vector<double>& u0, double t0,
                                                         const std::vector<double>& dts,
                                                         double eta = 1e-14) {
  RhsWorkspace ws;
  OdeSystem sys = make_system(plan, model, ws);
  const ButcherTableau tab = tableau(Scheme::radau5);
  StepOptions sopt;
  sopt.eta_newt = eta;
  sopt.eta_ls = eta;
  ControlOptions ctl;
  ctl.eta_rk = eta;
  ctl.embedded_order = tab.embedded_order;

  std::vector<std::size_t> order(dts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dts[a] < dts[b]; });

  std::vector<std::vector<double>> out(dts.size());
  std::vector<double> u = u0, f0(sys.n);
  double t = t0;
  double dt = dts[order[0]] / 8.0;

  for (std::size_t oi : order) {
    const double stop = t0 + dts[oi];
    const double slack = 1e-12 * std::max(std::abs(stop), 1.0);
    while (t < stop - slack) {
      CsrMatrix j0 = sys.jacobian(t, u.data());
      sys.rhs(t, u.data(), f0.data());
      for (;;) {
        const double dt_try = std::min(dt, stop - t);
        StepResult res = irk_step(sys, tab, t, u, dt_try, j0, sopt);
        if (!res.ok) throw DivergenceError("reference_states: Newton diverged");
        const double err = estimate_error(sys, tab, res.dt, f0.data(), res.z);
        const StepProposal p =
            propose_step(ctl, res.dt, err, res.stats.newton_iters, res.stats.lin_iters_max);
        if (!p.accept) {
          dt = p.dt_next;
          continue;
        }
        t += res.dt;
        u = res.u1;
        dt = p.dt_next;
        break;
      }
    }
    t = stop;
    out[oi] = u;
  }
  return out;
}

struct OrderPoint {
  double dt = 0.0;
  bool ok = false;
  std::array<double, kMaxComp> err{};  ///< per-component error of one step vs reference
  double err_total = 0.0;
  double est = -1.0;  ///< embedded estimate; negative when the scheme has none
};

/// One constant step of `scheme` per dt from the shared state, compared with
/// the reference states.  Newton runs at the reference tolerances and may not
/// halve: a failed point is reported with ok = false.
inline std::vector<OrderPoint> local_order_points(const FluxPlan& plan, const Model& model,
                                                  Scheme scheme, const std::vector<double>& u0,
                                                  double t0, const std::vector<double>& dts,
                                                  const std::vector<std::vector<double>>& u_ref,
                                                  double eta = 1e-14) {
  RhsWorkspace ws;
  OdeSystem sys = make_system(plan, model, ws);
  const ButcherTableau tab = tableau(scheme);
  StepOptions sopt;
  sopt.eta_newt = eta;
  sopt.eta_ls = eta;
  sopt.max_halvings = 0;

  std::vector<double> f0(sys.n);
  const bool need_f0 = tab.has_embedded && tab.e0 != 0.0;
  if (need_f0) sys.rhs(t0, u0.data(), f0.data());

  std::vector<OrderPoint> out;
  std::vector<double> diff(sys.n);
  for (double dt : dts) {
    OrderPoint pt;
    pt.dt = dt;
    CsrMatrix j0 = sys.jacobian(t0, u0.data());
    try {
      StepResult res = irk_step(sys, tab, t0, u0, dt, j0, sopt);
      if (res.ok && all_finite(res.u1.data(), res.u1.size())) {
        const std::vector<double>& ref = u_ref[out.size()];
        for (std::int32_t q = 0; q < sys.n; ++q) diff[q] = res.u1[q] - ref[q];
        for (int c = 0; c < plan.ncomp; ++c)
          pt.err[c] = weighted_norm_component(plan, diff.data(), c);
        pt.err_total = weighted_norm(plan, diff.data());
        if (tab.has_embedded)
          pt.est = estimate_error(sys, tab, dt, need_f0 ? f0.data() : nullptr, res.z);
        pt.ok = true;
      }
    } catch (const SingularityError&) {
    } catch (const DivergenceError&) {
    } catch (const StagnationError&) {
    }
    out.push_back(pt);
  }
  return out;
}

struct PerfRow {
  Scheme scheme = Scheme::radau5;
  double eta_rk = 0.0;
  std::int64_t n_accepted = 0;
  std::int64_t n_rejected = 0;
  double max_dt = 0.0;
  int max_newton = 0;
  int max_lin = 0;
  double cpu_seconds = 0.0;
  double final_compression = 100.0;
};

/// One adaptive run per (scheme, eta_rk) pair from a shared starting grid.
inline std::vector<PerfRow> perf_table(const Grid& start, const Model& model,
                                       const RunSettings& base, const std::vector<Scheme>& schemes,
                                       const std::vector<double>& etas, StatsLog log = {}) {
  std::vector<PerfRow> rows;
  for (Scheme sch : schemes) {
    for (double eta : etas) {
      RunSettings st = base;
      st.scheme = sch;
      st.eta_rk = eta;
      st.eta_newt = 0.0;
      st.eta_ls = 0.0;
      const RunResult r = run(start, model, st, log);
      PerfRow row;
      row.scheme = sch;
      row.eta_rk = eta;
      row.n_accepted = r.summary.n_accepted;
      row.n_rejected = r.summary.n_rejected;
      row.max_dt = r.summary.max_dt;
      row.max_newton = r.summary.max_newton;
      row.max_lin = r.summary.max_lin;
      row.cpu_seconds = r.summary.cpu_seconds;
      row.final_compression = r.summary.final_compression;
      rows.push_back(row);
    }
  }
  return rows;
}

/// Peak temperature over the leaves of an ignition-model grid.
inline double max_temperature(const Grid& g, const IgnitionParams& p = {}) {
  double best = -std::numeric_limits<double>::infinity();
  for (const CellId& id : g.leaves())
    best = std::max(best, ignition_temperature(g.cell(id).avg[1], p));
  return best;
}

}  // namespace mrfv
