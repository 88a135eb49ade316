#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mrfv/irk.hpp"

using namespace mrfv;

namespace {

/// u' = lambda u as a one-unknown system with analytic Jacobian.
OdeSystem dahlquist(double lambda) {
  OdeSystem sys;
  sys.n = 1;
  sys.rhs = [lambda](double, const double* u, double* f) { f[0] = lambda * u[0]; };
  sys.jacobian = [lambda](double, const double*) {
    return CsrMatrix::from_triplets(1, {{0, 0, lambda}});
  };
  sys.norm = [](const double* v) { return std::abs(v[0]); };
  return sys;
}

double one_step(Scheme sc, double lambda, double u0, double dt) {
  const OdeSystem sys = dahlquist(lambda);
  const ButcherTableau tab = tableau(sc);
  StepOptions opt;
  opt.eta_newt = 1e-13;
  opt.eta_ls = 1e-14;
  CsrMatrix j0 = sys.jacobian(0.0, &u0);
  const StepResult res = irk_step(sys, tab, 0.0, {u0}, dt, j0, opt);
  REQUIRE(res.ok);
  REQUIRE(res.dt == dt);
  return res.u1[0];
}

}  // namespace

TEST_CASE("one linear step reproduces the stability function") {
  struct Row {
    Scheme sc;
    double expect;  // R(-0.5)
  };
  const Row rows[] = {{Scheme::euler, 0.6666666666666667},
                      {Scheme::sdirk2, 0.6032634801055627},
                      {Scheme::sdirk3, 0.6042863032815421},
                      {Scheme::sdirk4, 0.6065471049467390},
                      {Scheme::radau3, 0.6060606060606060},
                      {Scheme::radau5, 0.6065318818040435}};
  for (const Row& r : rows) {
    INFO(scheme_name(r.sc));
    CHECK_THAT(one_step(r.sc, -2.0, 1.0, 0.25), Catch::Matchers::WithinAbs(r.expect, 1e-11));
  }
}

TEST_CASE("local error on the Dahlquist problem decays at order p+1") {
  for (Scheme sc : {Scheme::euler, Scheme::sdirk2, Scheme::sdirk3, Scheme::sdirk4,
                    Scheme::radau3, Scheme::radau5}) {
    const ButcherTableau tab = tableau(sc);
    std::vector<double> dts, errs;
    for (int k = 4; k <= 10; ++k) {
      const double dt = std::exp2(-k);
      const double err = std::abs(one_step(sc, -2.0, 1.0, dt) - std::exp(-2.0 * dt));
      if (err > 1e-13) {
        dts.push_back(dt);
        errs.push_back(err);
      }
    }
    REQUIRE(dts.size() >= 3);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
      const double x = std::log(dts[i]), y = std::log(errs[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(dts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    INFO(tab.name << " slope " << slope);
    CHECK_THAT(slope, Catch::Matchers::WithinAbs(tab.order + 1.0, 0.3));
  }
}

TEST_CASE("a zero right-hand side converges in one iteration") {
  OdeSystem sys;
  sys.n = 2;
  sys.rhs = [](double, const double*, double* f) { f[0] = f[1] = 0.0; };
  sys.jacobian = [](double, const double*) {
    return CsrMatrix::from_triplets(2, {{0, 0, 0.0}, {1, 1, 0.0}});
  };
  sys.norm = [](const double* v) { return std::hypot(v[0], v[1]); };
  CsrMatrix j0 = sys.jacobian(0.0, nullptr);
  const StepResult res = irk_step(sys, tableau(Scheme::radau5), 0.0, {1.0, -2.0}, 0.5, j0, {});
  REQUIRE(res.ok);
  CHECK(res.stats.newton_iters <= 1);
  CHECK(res.u1[0] == 1.0);
  CHECK(res.u1[1] == -2.0);
}

TEST_CASE("Newton monitor rules") {
  NewtonOptions opt;
  opt.eta = 1e-8;
  opt.k_max = 10;

  SECTION("immediate convergence") {
    NewtonMonitor m(opt, 0.5);
    CHECK(m.observe(1e-9) == NewtonMonitor::Verdict::converged);
  }

  SECTION("divergence halves") {
    NewtonMonitor m(opt, 0.5);
    CHECK(m.observe(1e-3) == NewtonMonitor::Verdict::proceed);
    CHECK(m.observe(1.2e-3) == NewtonMonitor::Verdict::halve);  // theta = 1.2
  }

  SECTION("slow contraction is projected to miss the budget") {
    NewtonMonitor m(opt, 0.5);
    CHECK(m.observe(1e-3) == NewtonMonitor::Verdict::proceed);
    // theta = 0.9 at k = 1: 0.9^(10-1-1) * 9e-4 = 3.9e-4 >= 1e-8
    CHECK(m.observe(9e-4) == NewtonMonitor::Verdict::halve);
  }

  SECTION("fast contraction runs to convergence") {
    NewtonMonitor m(opt, 0.5);
    double d = 1e-3;
    NewtonMonitor::Verdict v = m.observe(d);
    for (int k = 0; k < 8 && v == NewtonMonitor::Verdict::proceed; ++k) {
      d *= 0.1;
      v = m.observe(d);
    }
    CHECK(v == NewtonMonitor::Verdict::converged);
  }

  SECTION("theta0 uses the initial-state scale") {
    // theta0 = delta0 / (2 max|u0|) = 2e-3/(2*1e-3) = 1 >= 1 -> halve at once
    NewtonMonitor m(opt, 1e-3);
    CHECK(m.observe(2e-3) == NewtonMonitor::Verdict::halve);
  }

  SECTION("the projection rule closes out the budget") {
    // at k = k_max - 1 the projection exponent is zero, so any unconverged
    // increment forces a halving
    NewtonOptions o2;
    o2.eta = 1e-12;
    o2.k_max = 2;
    NewtonMonitor m(o2, 1e30);  // huge scale keeps theta_0 harmless
    CHECK(m.observe(1e-3) == NewtonMonitor::Verdict::proceed);
    CHECK(m.observe(1e-7) == NewtonMonitor::Verdict::halve);
  }
}

TEST_CASE("nonlinear stiff step survives by halving") {
  // u' = -u^3 scaled hard; the first Newton iterations at a large dt oscillate
  OdeSystem sys;
  sys.n = 1;
  const double c = 1e6;
  sys.rhs = [c](double, const double* u, double* f) { f[0] = -c * u[0] * u[0] * u[0]; };
  sys.jacobian = [c](double, const double* u) {
    return CsrMatrix::from_triplets(1, {{0, 0, -3.0 * c * u[0] * u[0]}});
  };
  sys.norm = [](const double* v) { return std::abs(v[0]); };

  double u0 = 1.0;
  CsrMatrix j0 = sys.jacobian(0.0, &u0);
  StepOptions opt;
  opt.eta_newt = 1e-10;
  opt.max_halvings = 16;
  const StepResult res = irk_step(sys, tableau(Scheme::sdirk2), 0.0, {u0}, 1e-3, j0, opt);
  REQUIRE(res.ok);
  CHECK(res.stats.halvings > 0);
  CHECK(res.dt < 1e-3);
  CHECK(res.u1[0] > 0.0);
  CHECK(res.u1[0] < 1.0);
}

TEST_CASE("embedded error estimate formula") {
  OdeSystem sys;
  sys.n = 1;
  sys.norm = [](const double* v) { return std::abs(v[0]); };

  const ButcherTableau t4 = tableau(Scheme::sdirk4);
  std::vector<std::vector<double>> z(5, std::vector<double>(1));
  for (int i = 0; i < 5; ++i) z[i][0] = 0.1 * (i + 1);
  double expect = 0.0;
  for (int i = 0; i < 5; ++i) expect += t4.e[i] * z[i][0];
  CHECK_THAT(estimate_error(sys, t4, 0.3, nullptr, z),
             Catch::Matchers::WithinRel(std::abs(expect), 1e-14));

  const ButcherTableau t5 = tableau(Scheme::radau5);
  std::vector<std::vector<double>> z5(3, std::vector<double>(1, 0.2));
  const double f0 = 1.5;
  double e5 = t5.e0 * 0.3 * f0;
  for (int i = 0; i < 3; ++i) e5 += t5.e[i] * 0.2;
  CHECK_THAT(estimate_error(sys, t5, 0.3, &f0, z5),
             Catch::Matchers::WithinRel(std::abs(e5), 1e-14));

  CHECK_THROWS_AS(estimate_error(sys, t5, 0.3, nullptr, z5), StructuralError);
  CHECK_THROWS_AS(estimate_error(sys, tableau(Scheme::euler), 0.1, nullptr, z5),
                  StructuralError);
}
