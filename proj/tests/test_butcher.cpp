#include <catch2/catch_amalgamated.hpp>

#include "mrfv/butcher.hpp"

using namespace mrfv;

namespace {
const Scheme kAll[] = {Scheme::euler,      Scheme::sdirk2, Scheme::sdirk2_alt,
                       Scheme::sdirk3,     Scheme::sdirk3_alt, Scheme::sdirk4,
                       Scheme::radau3,     Scheme::radau5};
}

TEST_CASE("every tableau passes structural validation") {
  for (Scheme sc : kAll) {
    const ButcherTableau t = tableau(sc);
    INFO(t.name);
    REQUIRE_NOTHROW(validate_tableau(t));
  }
}

TEST_CASE("orders and flags") {
  CHECK(tableau(Scheme::euler).order == 1);
  CHECK(tableau(Scheme::sdirk2).order == 2);
  CHECK(tableau(Scheme::sdirk3).order == 3);
  CHECK(tableau(Scheme::sdirk4).order == 4);
  CHECK(tableau(Scheme::radau3).order == 3);
  CHECK(tableau(Scheme::radau5).order == 5);

  CHECK(tableau(Scheme::radau3).stage_order == 2);
  CHECK(tableau(Scheme::radau5).stage_order == 3);
  for (Scheme sc : {Scheme::euler, Scheme::sdirk2, Scheme::sdirk3, Scheme::sdirk4})
    CHECK(tableau(sc).stage_order == 1);

  CHECK(tableau(Scheme::euler).stiffly_accurate);
  CHECK(tableau(Scheme::sdirk4).stiffly_accurate);
  CHECK(tableau(Scheme::radau3).stiffly_accurate);
  CHECK(tableau(Scheme::radau5).stiffly_accurate);
  CHECK_FALSE(tableau(Scheme::sdirk2).stiffly_accurate);
  CHECK_FALSE(tableau(Scheme::sdirk3).stiffly_accurate);

  CHECK(tableau(Scheme::sdirk3).l_stable == false);
  CHECK(tableau(Scheme::sdirk4).l_stable);
  CHECK(tableau(Scheme::radau5).l_stable);
}

TEST_CASE("update vector solves A^T d = b") {
  const ButcherTableau t2 = tableau(Scheme::sdirk2);
  CHECK_THAT(t2.d[0], Catch::Matchers::WithinAbs(-0.7071067811865476, 1e-13));
  CHECK_THAT(t2.d[1], Catch::Matchers::WithinAbs(1.7071067811865475, 1e-13));

  const ButcherTableau t3 = tableau(Scheme::sdirk3);
  CHECK_THAT(t3.d[0], Catch::Matchers::WithinAbs(1.0980762113533160, 1e-12));
  CHECK_THAT(t3.d[1], Catch::Matchers::WithinAbs(0.6339745962155614, 1e-12));

  for (Scheme sc : {Scheme::euler, Scheme::sdirk4, Scheme::radau3, Scheme::radau5}) {
    const ButcherTableau t = tableau(sc);
    for (int i = 0; i < t.s - 1; ++i) CHECK_THAT(t.d[i], Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(t.d[t.s - 1], Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("stability function matches rational-form values") {
  struct Row {
    Scheme sc;
    double r_half;  // R(-0.5)
  };
  const Row rows[] = {{Scheme::euler, 0.6666666666666667},
                      {Scheme::sdirk2, 0.6032634801055627},
                      {Scheme::sdirk3, 0.6042863032815421},
                      {Scheme::sdirk4, 0.6065471049467390},
                      {Scheme::radau3, 0.6060606060606060},
                      {Scheme::radau5, 0.6065318818040435}};
  for (const Row& r : rows) {
    const ButcherTableau t = tableau(r.sc);
    INFO(t.name);
    CHECK_THAT(stability_function(t, -0.5), Catch::Matchers::WithinAbs(r.r_half, 1e-12));
    CHECK_THAT(stability_function(t, 0.0), Catch::Matchers::WithinAbs(1.0, 1e-14));
  }
}

TEST_CASE("L-stable schemes damp the far stiff limit") {
  for (Scheme sc : {Scheme::euler, Scheme::sdirk2, Scheme::sdirk4, Scheme::radau3, Scheme::radau5}) {
    const ButcherTableau t = tableau(sc);
    INFO(t.name);
    CHECK(std::abs(stability_function(t, -1e8)) < 1e-6);
  }
  CHECK_THAT(stability_function(tableau(Scheme::sdirk3), -1e8),
             Catch::Matchers::WithinAbs(-0.7320508075688772, 1e-6));
}

TEST_CASE("embedded data") {
  const ButcherTableau t4 = tableau(Scheme::sdirk4);
  REQUIRE(t4.has_embedded);
  CHECK(t4.embedded_order == 3);
  CHECK(t4.e0 == 0.0);
  CHECK_THAT(t4.e[0], Catch::Matchers::WithinRel(23.0 / 6.0, 1e-15));
  CHECK_THAT(t4.e[2], Catch::Matchers::WithinRel(-125.0 / 4.0, 1e-15));

  const ButcherTableau t5 = tableau(Scheme::radau5);
  REQUIRE(t5.has_embedded);
  CHECK(t5.embedded_order == 3);
  CHECK_THAT(t5.e0, Catch::Matchers::WithinRel(0.1, 1e-15));
  const double s6 = std::sqrt(6.0);
  CHECK_THAT(t5.e[0], Catch::Matchers::WithinRel(0.1 * (-13.0 - 7.0 * s6) / 3.0, 1e-14));
  CHECK_THAT(t5.e[1], Catch::Matchers::WithinRel(0.1 * (-13.0 + 7.0 * s6) / 3.0, 1e-14));
  CHECK_THAT(t5.e[2], Catch::Matchers::WithinRel(-0.1 / 3.0, 1e-14));

  CHECK_FALSE(tableau(Scheme::euler).has_embedded);
  CHECK_FALSE(tableau(Scheme::sdirk2).has_embedded);
  CHECK_FALSE(tableau(Scheme::radau3).has_embedded);
}

TEST_CASE("embedded companions satisfy the third-order quadrature conditions") {
  // bhat = b + A^T e is the weight vector of the embedded method over the
  // augmented node set (0, c); e0 is the weight of the explicit node.
  for (Scheme sc : {Scheme::sdirk4, Scheme::radau5}) {
    const ButcherTableau t = tableau(sc);
    std::vector<double> bhat(t.s, 0.0);
    for (int j = 0; j < t.s; ++j) {
      bhat[j] = t.b[j];
      for (int i = 0; i < t.s; ++i) bhat[j] += t.a[i][j] * t.e[i];
    }
    double m0 = t.e0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
    for (int j = 0; j < t.s; ++j) {
      m0 += bhat[j];
      m1 += bhat[j] * t.c[j];
      m2 += bhat[j] * t.c[j] * t.c[j];
      m3 += bhat[j] * t.c[j] * t.c[j] * t.c[j];
    }
    CHECK_THAT(m0, Catch::Matchers::WithinAbs(1.0, 1e-13));
    CHECK_THAT(m1, Catch::Matchers::WithinAbs(0.5, 1e-13));
    CHECK_THAT(m2, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-13));
    CHECK(std::abs(m3 - 0.25) > 1e-3);  // genuinely third order, not fourth
  }
}

TEST_CASE("name round trip and failure") {
  for (Scheme sc : kAll) CHECK(scheme_by_name(scheme_name(sc)) == sc);
  CHECK_THROWS_AS(tableau_by_name("rk4"), StructuralError);
}
