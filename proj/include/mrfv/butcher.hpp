#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mrfv/core.hpp"

namespace mrfv {

enum class Scheme { euler, sdirk2, sdirk2_alt, sdirk3, sdirk3_alt, sdirk4, radau3, radau5 };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::euler: return "euler";
    case Scheme::sdirk2: return "sdirk2";
    case Scheme::sdirk2_alt: return "sdirk2_alt";
    case Scheme::sdirk3: return "sdirk3";
    case Scheme::sdirk3_alt: return "sdirk3_alt";
    case Scheme::sdirk4: return "sdirk4";
    case Scheme::radau3: return "radau3";
    case Scheme::radau5: return "radau5";
  }
  return "?";
}

/// Runge-Kutta coefficients plus the update vector d^T = b^T A^{-1} and the
/// embedded-error data (e0, e) where available.
struct ButcherTableau {
  std::string name;
  int s = 1;
  int order = 1;       // classical order p
  int stage_order = 1; // q
  bool stiffly_accurate = false;
  bool l_stable = false;
  bool diagonally_implicit = false;
  double gamma = 0.0;  // SDIRK diagonal
  std::array<std::array<double, 5>, 5> a{};
  std::array<double, 5> b{};
  std::array<double, 5> c{};
  std::array<double, 5> d{};
  bool has_embedded = false;
  int embedded_order = 0;  // p_hat
  double e0 = 0.0;         // weight of dt * F(t0, U0) in the error difference
  std::array<double, 5> e{};
};

namespace detail {
/// d = A^{-T} b for the s x s principal block.
inline void compute_update_vector(ButcherTableau& t) {
  std::vector<double> at(t.s * t.s);
  std::vector<double> d(t.b.begin(), t.b.begin() + t.s);
  for (int i = 0; i < t.s; ++i)
    for (int j = 0; j < t.s; ++j) at[i * t.s + j] = t.a[j][i];
  dense_solve(at, d, t.s);
  for (int i = 0; i < t.s; ++i) t.d[i] = d[i];
}
}  // namespace detail

inline ButcherTableau tableau(Scheme sc) {
  ButcherTableau t;
  t.name = scheme_name(sc);
  switch (sc) {
    case Scheme::euler: {
      t.s = 1;
      t.order = 1;
      t.stage_order = 1;
      t.stiffly_accurate = true;
      t.l_stable = true;
      t.diagonally_implicit = true;
      t.gamma = 1.0;
      t.a[0][0] = 1.0;
      t.b[0] = 1.0;
      t.c[0] = 1.0;
      break;
    }
    case Scheme::sdirk2:
    case Scheme::sdirk2_alt: {
      const double g = sc == Scheme::sdirk2 ? (2.0 - std::sqrt(2.0)) / 2.0
                                            : (2.0 + std::sqrt(2.0)) / 2.0;
      t.s = 2;
      t.order = 2;
      t.stage_order = 1;
      t.l_stable = true;
      t.diagonally_implicit = true;
      t.gamma = g;
      t.a[0][0] = g;
      t.a[1][0] = 1.0 - 2.0 * g;
      t.a[1][1] = g;
      t.b = {0.5, 0.5};
      t.c = {g, 1.0 - g};
      break;
    }
    case Scheme::sdirk3:
    case Scheme::sdirk3_alt: {
      const double g = sc == Scheme::sdirk3 ? (3.0 + std::sqrt(3.0)) / 6.0
                                            : (3.0 - std::sqrt(3.0)) / 6.0;
      t.s = 2;
      t.order = 3;
      t.stage_order = 1;
      t.l_stable = false;  // A-stable only
      t.diagonally_implicit = true;
      t.gamma = g;
      t.a[0][0] = g;
      t.a[1][0] = 1.0 - 2.0 * g;
      t.a[1][1] = g;
      t.b = {0.5, 0.5};
      t.c = {g, 1.0 - g};
      break;
    }
    case Scheme::sdirk4: {
      t.s = 5;
      t.order = 4;
      t.stage_order = 1;
      t.stiffly_accurate = true;
      t.l_stable = true;
      t.diagonally_implicit = true;
      t.gamma = 0.25;
      const double rows[5][5] = {
          {0.25, 0, 0, 0, 0},
          {0.5, 0.25, 0, 0, 0},
          {17.0 / 50.0, -1.0 / 25.0, 0.25, 0, 0},
          {371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0},
          {25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25}};
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) t.a[i][j] = rows[i][j];
      t.b = {25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25};
      t.c = {0.25, 0.75, 11.0 / 20.0, 0.5, 1.0};
      t.has_embedded = true;
      t.embedded_order = 3;
      t.e0 = 0.0;
      t.e = {23.0 / 6.0, 17.0 / 12.0, -125.0 / 4.0, 85.0 / 3.0, 1.0};
      break;
    }
    case Scheme::radau3: {
      t.s = 2;
      t.order = 3;
      t.stage_order = 2;
      t.stiffly_accurate = true;
      t.l_stable = true;
      t.a[0][0] = 5.0 / 12.0;
      t.a[0][1] = -1.0 / 12.0;
      t.a[1][0] = 0.75;
      t.a[1][1] = 0.25;
      t.b = {0.75, 0.25};
      t.c = {1.0 / 3.0, 1.0};
      break;
    }
    case Scheme::radau5: {
      const double r6 = std::sqrt(6.0);
      t.s = 3;
      t.order = 5;
      t.stage_order = 3;
      t.stiffly_accurate = true;
      t.l_stable = true;
      t.a[0][0] = (88.0 - 7.0 * r6) / 360.0;
      t.a[0][1] = (296.0 - 169.0 * r6) / 1800.0;
      t.a[0][2] = (-2.0 + 3.0 * r6) / 225.0;
      t.a[1][0] = (296.0 + 169.0 * r6) / 1800.0;
      t.a[1][1] = (88.0 + 7.0 * r6) / 360.0;
      t.a[1][2] = (-2.0 - 3.0 * r6) / 225.0;
      t.a[2][0] = (16.0 - r6) / 36.0;
      t.a[2][1] = (16.0 + r6) / 36.0;
      t.a[2][2] = 1.0 / 9.0;
      t.b = {(16.0 - r6) / 36.0, (16.0 + r6) / 36.0, 1.0 / 9.0};
      t.c = {(4.0 - r6) / 10.0, (4.0 + r6) / 10.0, 1.0};
      t.has_embedded = true;
      t.embedded_order = 3;
      // e solves A^T e = bhat - b for the third-order companion quadrature
      // over nodes (0, c1, c2, c3) with weight e0 on the explicit node; the
      // dt^1 terms cancel: e0 + e.c = 0.
      const double k = 0.1;
      t.e0 = k;
      t.e = {k * (-13.0 - 7.0 * r6) / 3.0, k * (-13.0 + 7.0 * r6) / 3.0, -k / 3.0};
      break;
    }
  }
  detail::compute_update_vector(t);
  return t;
}

inline Scheme scheme_by_name(const std::string& name) {
  for (Scheme sc : {Scheme::euler, Scheme::sdirk2, Scheme::sdirk2_alt, Scheme::sdirk3,
                    Scheme::sdirk3_alt, Scheme::sdirk4, Scheme::radau3, Scheme::radau5})
    if (name == scheme_name(sc)) return sc;
  throw StructuralError("unknown scheme '" + name + "'");
}

inline ButcherTableau tableau_by_name(const std::string& name) {
  return tableau(scheme_by_name(name));
}

/// R(z) = 1 + z b^T (I - z A)^{-1} 1.
inline double stability_function(const ButcherTableau& t, double z) {
  std::vector<double> m(t.s * t.s, 0.0), y(t.s, 1.0);
  for (int i = 0; i < t.s; ++i)
    for (int j = 0; j < t.s; ++j) m[i * t.s + j] = (i == j ? 1.0 : 0.0) - z * t.a[i][j];
  dense_solve(m, y, t.s);
  double r = 1.0;
  for (int i = 0; i < t.s; ++i) r += z * t.b[i] * y[i];
  return r;
}

/// Order conditions, structural flags and the d = b^T A^{-1} relation,
/// all to `tol`.  Throws StructuralError naming the first failed check.
inline void validate_tableau(const ButcherTableau& t, double tol = 1e-12) {
  auto fail = [&](const std::string& what) {
    throw StructuralError("tableau " + t.name + ": " + what);
  };
  auto check = [&](double got, double want, const std::string& what) {
    if (std::abs(got - want) > tol) fail(what);
  };

  for (int i = 0; i < t.s; ++i) {
    double rs = 0.0;
    for (int j = 0; j < t.s; ++j) rs += t.a[i][j];
    check(rs, t.c[i], "row-sum consistency");
  }

  double s1 = 0.0;
  for (int i = 0; i < t.s; ++i) s1 += t.b[i];
  check(s1, 1.0, "sum b = 1");
  for (int k = 2; k <= t.order; ++k) {
    double q = 0.0;
    for (int i = 0; i < t.s; ++i) q += t.b[i] * std::pow(t.c[i], k - 1);
    check(q, 1.0 / k, "quadrature condition order " + std::to_string(k));
  }
  if (t.order >= 3) {
    double bac = 0.0;
    for (int i = 0; i < t.s; ++i)
      for (int j = 0; j < t.s; ++j) bac += t.b[i] * t.a[i][j] * t.c[j];
    check(bac, 1.0 / 6.0, "condition b A c = 1/6");
  }
  if (t.order >= 4) {
    double bcac = 0.0, bacc = 0.0, baac = 0.0;
    for (int i = 0; i < t.s; ++i)
      for (int j = 0; j < t.s; ++j) {
        bcac += t.b[i] * t.c[i] * t.a[i][j] * t.c[j];
        bacc += t.b[i] * t.a[i][j] * t.c[j] * t.c[j];
        for (int k = 0; k < t.s; ++k) baac += t.b[i] * t.a[i][j] * t.a[j][k] * t.c[k];
      }
    check(bcac, 1.0 / 8.0, "condition b c A c = 1/8");
    check(bacc, 1.0 / 12.0, "condition b A c^2 = 1/12");
    check(baac, 1.0 / 24.0, "condition b A A c = 1/24");
  }

  // Stage-order simplifying conditions C(q).
  for (int k = 1; k <= t.stage_order; ++k) {
    for (int i = 0; i < t.s; ++i) {
      double s = 0.0;
      for (int j = 0; j < t.s; ++j) s += t.a[i][j] * std::pow(t.c[j], k - 1);
      check(s, std::pow(t.c[i], k) / k, "stage-order condition C(" + std::to_string(k) + ")");
    }
  }

  if (t.stiffly_accurate) {
    for (int j = 0; j < t.s; ++j) check(t.a[t.s - 1][j], t.b[j], "stiffly accurate row");
    for (int i = 0; i < t.s - 1; ++i) check(t.d[i], 0.0, "d = (0,...,0,1)");
    check(t.d[t.s - 1], 1.0, "d = (0,...,0,1)");
  }
  if (t.diagonally_implicit) {
    for (int i = 0; i < t.s; ++i) {
      check(t.a[i][i], t.gamma, "SDIRK diagonal");
      for (int j = i + 1; j < t.s; ++j) check(t.a[i][j], 0.0, "SDIRK upper triangle");
    }
  }

  // d^T A = b^T reproduces b.
  for (int j = 0; j < t.s; ++j) {
    double s = 0.0;
    for (int i = 0; i < t.s; ++i) s += t.d[i] * t.a[i][j];
    check(s, t.b[j], "d = b A^{-1}");
  }
}

}  // namespace mrfv
