#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrfv/mrfv.hpp"

namespace {

constexpr int kExitIo = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitNumerics = 5;

mrfv::Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  mrfv::Config cfg;
  if (!path.empty()) cfg = mrfv::Config::load_file(path);
  for (const auto& o : overrides) cfg.apply_override(o);
  return cfg;
}

mrfv::RunSettings settings_from(const mrfv::Config& cfg) {
  mrfv::RunSettings st;
  st.scheme = mrfv::scheme_by_name(cfg.get_string("time.scheme", "radau5"));
  st.t_begin = cfg.get_double("time.t_begin", 0.0);
  st.t_end = cfg.get_double("time.t_end", 1.0);
  st.dt0 = cfg.get_double("time.dt0", 1e-4);
  st.adaptive_dt = cfg.get_bool("time.adaptive", true);
  st.dt_target = cfg.get_double("time.dt_target", 0.0);
  st.eta_rk = cfg.get_double("time.eta_rk", 1e-4);
  st.kappa = cfg.get_double("time.kappa", 1e-1);
  st.eta_newt = cfg.get_double("time.eta_newt", 0.0);
  st.eta_ls = cfg.get_double("time.eta_ls", 0.0);
  st.eta_mr = cfg.get_double("grid.eta_mr", 1e-3);
  st.alpha = cfg.get_double("time.alpha", 1.5);
  st.nu = cfg.get_double("time.nu", 0.9);
  st.k_newt_max = cfg.get_int("time.k_newt_max", 30);
  st.k_ls_j = cfg.get_int("time.k_ls_j", 30);
  st.max_halvings = cfg.get_int("time.max_halvings", 8);
  st.ilut.fill = cfg.get_int("linear.ilut_fill", 10);
  st.ilut.drop = cfg.get_double("linear.ilut_drop", 1e-3);
  st.gmres_restart = cfg.get_int("linear.gmres_restart", 30);
  st.gmres_max_iter = cfg.get_int("linear.gmres_max_iter", 400);
  st.max_steps = cfg.get_int("time.max_steps", 1000000);
  return st;
}

mrfv::Grid starting_grid(const mrfv::Config& cfg, const mrfv::ModelCase& mc, int max_level,
                         double eta_mr) {
  const std::string snap = cfg.get_string("init.snapshot", "");
  if (snap.empty()) return mrfv::initial_grid(mc.model, mc.domain, max_level, eta_mr);
  mrfv::LoadedGrid lg = mrfv::load_grid(snap);
  if (lg.grid.ncomp() != mc.model.ncomp)
    throw mrfv::IoError("snapshot '" + snap + "' has " + std::to_string(lg.grid.ncomp()) +
                        " components, model needs " + std::to_string(mc.model.ncomp));
  return std::move(lg.grid);
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
  const mrfv::Config cfg = load_config(config_path, overrides);
  const mrfv::ModelCase mc = mrfv::named_case(cfg.require_string("model.name"));
  const int max_level = cfg.get_int("grid.max_level", 8);
  const mrfv::RunSettings st = settings_from(cfg);

  mrfv::Grid g0 = starting_grid(cfg, mc, max_level, st.eta_mr);

  mrfv::StatsLog log;
  const std::string stats_path = cfg.get_string("output.stats", "");
  if (!stats_path.empty()) log = mrfv::StatsLog(stats_path);

  mrfv::RunResult r = mrfv::run(std::move(g0), mc.model, st, log);

  const std::string grid_path = cfg.get_string("output.grid", "");
  if (!grid_path.empty()) mrfv::save_grid(grid_path, r.grid, r.summary.final_time);
  const std::string uni_path = cfg.get_string("output.uniform", "");
  if (!uni_path.empty())
    mrfv::save_uniform(uni_path, r.grid, cfg.get_int("output.uniform_level", max_level),
                       r.summary.final_time);

  std::printf("steps_accepted=%lld steps_rejected=%lld max_dt=%.6g max_newton=%d max_lin=%d "
              "compression=%.3f%% cpu=%.2fs\n",
              static_cast<long long>(r.summary.n_accepted),
              static_cast<long long>(r.summary.n_rejected), r.summary.max_dt,
              r.summary.max_newton, r.summary.max_lin, r.summary.final_compression,
              r.summary.cpu_seconds);
  return 0;
}

int cmd_order_sweep(const std::string& snapshot, const std::vector<std::string>& scheme_names,
                    double dt_max, int n_points, const std::string& out_path) {
  const mrfv::ModelCase mc = mrfv::named_case("bz1d");
  mrfv::LoadedGrid lg = mrfv::load_grid(snapshot);
  const double t0 = lg.time;

  mrfv::FluxPlan plan = mrfv::build_flux_plan(lg.grid);
  std::vector<double> u0;
  lg.grid.gather(u0);

  std::vector<double> dts(n_points);
  for (int k = 0; k < n_points; ++k) dts[k] = dt_max * std::exp2(-k);

  std::fprintf(stderr, "computing reference trajectory (%d endpoints)...\n", n_points);
  const auto refs = mrfv::reference_states(plan, mc.model, u0, t0, dts);

  std::ofstream out(out_path);
  if (!out) throw mrfv::IoError("cannot open '" + out_path + "'");
  out << "scheme,dt,ok,err_a,err_b,err_c,err_total,est\n";
  for (const std::string& name : scheme_names) {
    const mrfv::Scheme sch = mrfv::scheme_by_name(name);
    const auto pts = mrfv::local_order_points(plan, mc.model, sch, u0, t0, dts, refs);
    std::vector<double> okdt, okerr;
    for (const auto& p : pts) {
      out << name << "," << p.dt << "," << (p.ok ? 1 : 0);
      for (int c = 0; c < 3; ++c) out << "," << (p.ok ? p.err[c] : 0.0);
      out << "," << (p.ok ? p.err_total : 0.0) << "," << p.est << "\n";
      if (p.ok) {
        okdt.push_back(p.dt);
        okerr.push_back(p.err[2]);
      }
    }
    try {
      std::printf("%s: slope(c) = %.3f over %zu points\n", name.c_str(),
                  mrfv::fit_loglog_slope(okdt, okerr), okdt.size());
    } catch (const mrfv::StructuralError&) {
      std::printf("%s: too few converged points for a slope\n", name.c_str());
    }
  }
  return 0;
}

int cmd_perf_table(const std::string& snapshot, const std::vector<std::string>& scheme_names,
                   const std::vector<double>& etas, double t_end, double dt0,
                   const std::string& out_path) {
  const mrfv::ModelCase mc = mrfv::named_case("bz2d");
  mrfv::LoadedGrid lg = mrfv::load_grid(snapshot);

  mrfv::RunSettings base;
  base.t_begin = lg.time;
  base.t_end = t_end;
  base.dt0 = dt0;
  base.adaptive_dt = true;
  base.eta_mr = 1e-3;
  base.kappa = 1e-1;

  std::vector<mrfv::Scheme> schemes;
  for (const auto& n : scheme_names) schemes.push_back(mrfv::scheme_by_name(n));

  const auto rows = mrfv::perf_table(lg.grid, mc.model, base, schemes, etas);

  std::ofstream out(out_path);
  if (!out) throw mrfv::IoError("cannot open '" + out_path + "'");
  out << "scheme,eta_rk,n_accepted,n_rejected,max_dt,max_newton,max_lin,cpu_seconds,compression\n";
  for (const auto& r : rows) {
    out << mrfv::scheme_name(r.scheme) << "," << r.eta_rk << "," << r.n_accepted << ","
        << r.n_rejected << "," << r.max_dt << "," << r.max_newton << "," << r.max_lin << ","
        << r.cpu_seconds << "," << r.final_compression << "\n";
    std::printf("%-8s eta=%.0e n=%lld max_dt=%.3e max_k=%d max_kls=%d cpu=%.2fs\n",
                mrfv::scheme_name(r.scheme), r.eta_rk, static_cast<long long>(r.n_accepted),
                r.max_dt, r.max_newton, r.max_lin, r.cpu_seconds);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiresolution finite-volume solver for stiff reaction-diffusion systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "integrate a configured case");
  run->add_option("-c,--config", config_path, "INI config file");
  run->add_option("-s,--set", overrides, "override: section.key=value");

  std::string snapshot, out_path = "order_sweep.csv";
  std::vector<std::string> schemes{"euler", "sdirk2", "sdirk3", "sdirk4", "radau3", "radau5"};
  double dt_max = 1e-2;
  int n_points = 8;
  auto* sweep = app.add_subcommand("order-sweep", "one-step local order study on a 1D snapshot");
  sweep->add_option("--snapshot", snapshot, "starting state (mrfv-grid csv)")->required();
  sweep->add_option("--scheme", schemes, "schemes to test");
  sweep->add_option("--dt-max", dt_max, "largest step; halved n-1 times");
  sweep->add_option("--points", n_points, "number of step sizes");
  sweep->add_option("-o,--out", out_path, "output csv");

  std::string psnapshot, pout = "perf_table.csv";
  std::vector<std::string> pschemes{"sdirk4", "radau5"};
  std::vector<double> etas{1e-3, 1e-4, 1e-5, 1e-6};
  double pt_end = 2.01, pdt0 = 1e-4;
  auto* perf = app.add_subcommand("perf-table", "time-adaptivity comparison on a 2D snapshot");
  perf->add_option("--snapshot", psnapshot, "starting state (mrfv-grid csv)")->required();
  perf->add_option("--scheme", pschemes, "schemes to compare");
  perf->add_option("--eta", etas, "error tolerances");
  perf->add_option("--t-end", pt_end, "end time");
  perf->add_option("--dt0", pdt0, "initial step");
  perf->add_option("-o,--out", pout, "output csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, overrides);
    if (sweep->parsed()) return cmd_order_sweep(snapshot, schemes, dt_max, n_points, out_path);
    if (perf->parsed()) return cmd_perf_table(psnapshot, pschemes, etas, pt_end, pdt0, pout);
  } catch (const mrfv::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const mrfv::DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerics;
  }
  return 0;
}
