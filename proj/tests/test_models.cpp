#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mrfv/model.hpp"

using namespace mrfv;

TEST_CASE("BZ reaction rates") {
  const BzParams p;
  double s[3];
  bz_source(1.0, 1.0, 1.0, p, s);
  CHECK_THAT(s[0], Catch::Matchers::WithinRel(59800.0, 1e-12));
  CHECK_THAT(s[1], Catch::Matchers::WithinRel(-99.8, 1e-12));
  CHECK_THAT(s[2], Catch::Matchers::WithinAbs(0.0, 1e-15));

  // rest state a = b = c = 0 is stationary
  bz_source(0.0, 0.0, 0.0, p, s);
  CHECK(s[0] == 0.0);
  CHECK(s[1] == 0.0);
  CHECK(s[2] == 0.0);
}

TEST_CASE("BZ model wiring") {
  const Model m = make_bz_1d();
  CHECK(m.ncomp == 3);
  CHECK(m.diffusion[0] == 2.5e-3);
  CHECK(m.diffusion[1] == 2.5e-3);
  CHECK(m.diffusion[2] == 1.5e-3);
  CHECK_FALSE(m.velocity);

  double u[3];
  m.initial({0.01, 0.0}, 1e-3, u);
  CHECK(u[0] == 0.0);
  CHECK(u[1] == 1.0);
  CHECK(u[2] == 0.0);
  m.initial({0.5, 0.0}, 1e-3, u);
  CHECK(u[1] == 0.0);
}

TEST_CASE("ignition rate endpoints and a frozen interior value") {
  const IgnitionParams p;
  CHECK(ignition_rate(0.0, 0.0, p) == 0.0);
  CHECK(ignition_rate(1.0, 1.0, p) == 0.0);
  CHECK_THAT(ignition_rate(0.5, 0.0, p), Catch::Matchers::WithinRel(-11500.030289441273, 1e-10));
  CHECK_THAT(ignition_rate(0.3, -0.5, p), Catch::Matchers::WithinRel(-64871.56562339182, 1e-10));
  CHECK_THROWS_AS(ignition_rate(0.5, 1.0 / 0.7, p), SingularityError);
}

TEST_CASE("temperature mapping") {
  const IgnitionParams p;
  CHECK(ignition_temperature(0.0, p) == 1000.0);
  CHECK(ignition_temperature(1.0, p) == 300.0);
  // hot products sit below theta = 0
  CHECK(ignition_temperature(-1.79, p) > 2200.0);
}

TEST_CASE("vortex velocity field") {
  const IgnitionParams p;

  // frozen value: r = 0.5, far past the core at t = 1e-3
  const auto v = vortex_velocity(0.3, 0.4, 1e-3, p);
  CHECK_THAT(v[0], Catch::Matchers::WithinRel(1600.0, 1e-12));
  CHECK_THAT(v[1], Catch::Matchers::WithinRel(-1200.0, 1e-12));

  // tangential: v . x = 0
  const auto w = vortex_velocity(0.2, -0.7, 0.05, p);
  CHECK_THAT(w[0] * 0.2 + w[1] * (-0.7), Catch::Matchers::WithinAbs(0.0, 1e-10));

  // t -> 0+ limit is the ideal vortex Re Sc / r
  const auto early = vortex_velocity(0.5, 0.0, 1e-30, p);
  CHECK_THAT(early[1], Catch::Matchers::WithinRel(-1000.0 / 0.5, 1e-12));
  CHECK_THAT(early[0], Catch::Matchers::WithinAbs(0.0, 1e-12));

  // center is regular
  const auto c = vortex_velocity(0.0, 0.0, 0.1, p);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 0.0);

  CHECK_THROWS_AS(vortex_velocity(0.1, 0.1, 0.0, p), StructuralError);

  // swirl decays with radius outside the core
  double prev = 1e300;
  for (double r : {0.4, 0.8, 1.2}) {
    const auto vr = vortex_velocity(r, 0.0, 1e-3, p);
    const double mag = std::hypot(vr[0], vr[1]);
    CHECK(mag < prev);
    prev = mag;
  }
}

TEST_CASE("ignition initial data is a smoothed split") {
  const Model m = make_ignition();
  CHECK(m.ncomp == 2);
  REQUIRE(m.velocity);
  double u[2];
  m.initial({0.0, 0.9}, 1e-2, u);
  CHECK_THAT(u[0], Catch::Matchers::WithinAbs(1.0, 1e-10));
  CHECK_THAT(u[1], Catch::Matchers::WithinAbs(1.0, 1e-10));
  m.initial({0.0, -0.9}, 1e-2, u);
  CHECK_THAT(u[0], Catch::Matchers::WithinAbs(0.0, 1e-10));
  m.initial({0.0, 0.0}, 1e-2, u);
  CHECK_THAT(u[0], Catch::Matchers::WithinAbs(0.5, 1e-12));

  const Model still = make_ignition({}, false);
  CHECK_FALSE(still.velocity);
}

TEST_CASE("2D BZ seed is a phase pinwheel around the domain center") {
  const BzParams p;
  const Model m = make_bz_2d(p);
  CHECK(m.ncomp == 3);

  // Angle zero holds the spike crest; a quarter turn on, the wake has
  // hardened (b collapsed, inhibitor a high); just below the cut the medium
  // has nearly recovered (a decayed by an order of magnitude).
  double crest[3], wake[3], old_sector[3];
  m.initial({0.9, 0.5 + 1e-6}, 1e-2, crest);     // phi ~ 0+
  m.initial({0.5, 0.9}, 1e-2, wake);             // phi ~ 1/4
  m.initial({0.9, 0.5 - 1e-3}, 1e-2, old_sector);  // phi ~ 1-
  CHECK(crest[1] > 0.9);
  CHECK(wake[1] < 0.01);
  CHECK(wake[0] > 10.0);
  CHECK(old_sector[1] < 0.01);
  CHECK(old_sector[0] < 0.25 * wake[0]);
  CHECK(old_sector[2] < wake[2]);

  // Every seeded state lies on the kinetics' own trajectory, so no component
  // is ever negative and b stays within the physical range.
  for (double xx : {0.05, 0.3, 0.62, 0.97})
    for (double yy : {0.03, 0.41, 0.77, 0.99}) {
      double u[3];
      m.initial({xx, yy}, 1e-2, u);
      CHECK(u[0] > 0.0);
      CHECK(u[1] > 0.0);
      CHECK(u[2] > 0.0);
      CHECK(u[1] < 1.0);
    }

  // The equilibrium b = c solves the kinetics exactly and is positive.
  double s[3];
  const double b = bz_rest_b(p);
  CHECK(b > 0.0);
  const double a = p.f * b / (p.q + b);
  bz_source(a, b, b, p, s);
  CHECK(std::abs(s[0]) < 1e-9);
  CHECK(std::abs(s[1]) < 1e-9);
  CHECK(std::abs(s[2]) < 1e-12);
}

TEST_CASE("BZ limit cycle sampler tracks the relaxation oscillation") {
  const BzParams p;
  const BzCycle cyc(p, 2.0, 512);
  CHECK(cyc.span() == 2.0);

  // Spike crest at tau = 0, hardened wake by tau ~ 0.5, monotone recovery of
  // the inhibitor a and of c along the crawl.
  const auto s0 = cyc.state(0.0);
  CHECK(s0[1] > 0.9);
  const auto s05 = cyc.state(0.5);
  CHECK(s05[1] < 0.01);
  CHECK(s05[0] > 30.0);
  const auto s1 = cyc.state(1.0);
  const auto s2 = cyc.state(2.0);
  CHECK(s1[0] < s05[0]);
  CHECK(s2[0] < s1[0]);
  CHECK(s1[2] < s05[2]);
  CHECK(s2[2] < s1[2]);

  // Clamped outside the recorded window.
  const auto far = cyc.state(10.0);
  CHECK(far[0] == s2[0]);

  // The sampled states satisfy the ODE to leading order: finite-difference
  // the table against the source at the midpoint (smooth crawl region).
  const double dtau = 2.0 / 511;
  const auto ua = cyc.state(1.0);
  const auto ub = cyc.state(1.0 + 2.0 * dtau);
  const auto um = cyc.state(1.0 + dtau);
  double rate[3];
  bz_source(um[0], um[1], um[2], p, rate);
  for (int i = 0; i < 3; ++i) {
    const double fd = (ub[i] - ua[i]) / (2.0 * dtau);
    CHECK(std::abs(fd - rate[i]) < 0.05 * (std::abs(rate[i]) + 1.0));
  }
}
