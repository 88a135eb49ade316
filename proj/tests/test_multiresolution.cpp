#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mrfv/multiresolution.hpp"
#include "mrfv/tree.hpp"

using namespace mrfv;

namespace {

Domain unit_interval() {
  Domain d;
  d.dim = 1;
  d.roots = {1, 1};
  d.lo = {0.0, 0.0};
  d.hi = {1.0, 1.0};
  return d;
}

Domain unit_square() {
  Domain d = unit_interval();
  d.dim = 2;
  return d;
}

Grid uniform_grid(const Domain& dom, int level, int ncomp) {
  Grid g(dom, level, ncomp);
  const std::int64_t nx = dom.cells_along(0, level);
  const std::int64_t ny = dom.dim == 2 ? dom.cells_along(1, level) : 1;
  for (std::int64_t jy = 0; jy < ny; ++jy)
    for (std::int64_t jx = 0; jx < nx; ++jx)
      g.require(CellId{level, {static_cast<std::int32_t>(jx), static_cast<std::int32_t>(jy)}});
  return g;
}

void fill_with(Grid& g, double (*f)(double, double)) {
  for (const CellId& id : g.leaves()) {
    const auto x = g.domain().center(id);
    g.cell(id).avg[0] = f(x[0], x[1]);
  }
  g.project_internal();
}

double gauss(double x, double y) { return std::exp(-100.0 * (sq(x - 0.3) + sq(y - 0.4))); }
double smooth(double x, double y) { return std::sin(3.0 * x) * std::cos(2.0 * y) + 0.2 * x; }

}  // namespace

TEST_CASE("projection is the exact volume-weighted child mean") {
  {
    const double vals[2] = {2.0, 4.0};
    const double vols[2] = {0.5, 0.5};
    CHECK(project(vals, vols, 2) == 3.0);
  }
  {
    const double vals[4] = {0.0, 1.0, 2.0, 3.0};
    const double vols[4] = {0.25, 0.25, 0.25, 0.25};
    CHECK(project(vals, vols, 4) == 1.5);
  }
}

TEST_CASE("1D prediction weights reproduce the centered cubic-mean rule") {
  CHECK(predict_weight_1d(0, -1) == 0.125);
  CHECK(predict_weight_1d(0, 0) == 1.0);
  CHECK(predict_weight_1d(0, 1) == -0.125);
  CHECK(predict_weight_1d(1, -1) == -0.125);
  CHECK(predict_weight_1d(1, 1) == 0.125);

  // parent means 0.5, 1.5, 2.5 around the refined cell
  Domain dom = unit_interval();
  Grid g(dom, 3, 1);
  const CellId mid{2, {1, 0}};
  g.require(mid.child(0));
  g.cell(CellId{2, {0, 0}}).avg[0] = 0.5;
  g.cell(CellId{2, {1, 0}}).avg[0] = 1.5;
  g.cell(CellId{2, {2, 0}}).avg[0] = 2.5;
  g.cell(CellId{2, {3, 0}}).avg[0] = 3.5;
  CHECK_THAT(predict_value(g, mid.child(0), 0), Catch::Matchers::WithinAbs(1.25, 1e-15));
  CHECK_THAT(predict_value(g, mid.child(1), 0), Catch::Matchers::WithinAbs(1.75, 1e-15));
}

TEST_CASE("prediction is exact on quadratics") {
  Domain dom = unit_interval();
  Grid g = uniform_grid(dom, 4, 1);
  // cell means of x^2 on a uniform mesh: (x_c^2 + h^2/12)
  auto mean_x2 = [&](const CellId& id) {
    const double h = dom.width(0, id.level);
    const auto x = dom.center(id);
    return x[0] * x[0] + h * h / 12.0;
  };
  for (const CellId& id : g.leaves()) g.cell(id).avg[0] = mean_x2(id);
  g.project_internal();
  for (const CellId& id : g.levels()[4]) {
    if (id.pos[0] < 2 || id.pos[0] >= 14) continue;  // interior stencils only
    CHECK_THAT(predict_value(g, id, 0), Catch::Matchers::WithinAbs(mean_x2(id), 1e-14));
  }
}

TEST_CASE("level thresholds") {
  const double eta = 1e-3;
  CHECK_THAT(level_threshold(10, 10, 2, eta), Catch::Matchers::WithinRel(eta, 1e-15));
  CHECK_THAT(level_threshold(8, 10, 2, eta), Catch::Matchers::WithinRel(eta / 4.0, 1e-15));
  CHECK_THAT(level_threshold(9, 10, 1, eta),
             Catch::Matchers::WithinRel(eta / std::sqrt(2.0), 1e-15));
}

TEST_CASE("details of a sibling group sum to zero") {
  for (int dim = 1; dim <= 2; ++dim) {
    Domain dom = dim == 1 ? unit_interval() : unit_square();
    Grid g = uniform_grid(dom, 4, 1);
    fill_with(g, gauss);
    encode(g);
    for (int j = 1; j <= 4; ++j) {
      for (const CellId& id : g.levels()[j]) {
        if (id.pos[0] % 2 != 0 || (dim == 2 && id.pos[1] % 2 != 0)) continue;
        double s = 0.0;
        for (int t = 0; t < g.n_children(); ++t) {
          const CellId sib = id.parent().child(t);
          s += g.cell(sib).detail[0];
        }
        CHECK_THAT(s, Catch::Matchers::WithinAbs(0.0, 1e-14));
      }
    }
  }
}

TEST_CASE("decode inverts encode") {
  Grid g = uniform_grid(unit_square(), 4, 2);
  for (const CellId& id : g.leaves()) {
    const auto x = g.domain().center(id);
    g.cell(id).avg[0] = gauss(x[0], x[1]);
    g.cell(id).avg[1] = smooth(x[0], x[1]);
  }
  g.project_internal();
  std::vector<double> before;
  g.gather(before);
  encode(g);
  decode(g);
  std::vector<double> after;
  g.gather(after);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK_THAT(after[i], Catch::Matchers::WithinAbs(before[i], 1e-13));
}

TEST_CASE("leaf ordering is a bijection") {
  Grid g = uniform_grid(unit_interval(), 3, 1);
  fill_with(g, gauss);
  Grid a = adapt(g, AdaptOptions{1e-2});
  const auto& ls = a.leaves();
  for (std::size_t i = 0; i < ls.size(); ++i)
    CHECK(a.leaf_ordinal(ls[i]) == static_cast<std::int32_t>(i));
}

TEST_CASE("adapted grids are graded and complete") {
  Grid g = uniform_grid(unit_square(), 5, 1);
  fill_with(g, gauss);
  Grid a = adapt(g, AdaptOptions{1e-3});
  REQUIRE(a.n_leaves() < g.n_leaves());

  for (int j = 1; j < static_cast<int>(a.levels().size()); ++j) {
    for (const CellId& id : a.levels()[j]) {
      // complete sibling groups
      for (int t = 0; t < a.n_children(); ++t) CHECK(a.present(id.parent().child(t)));
      // prediction stencil of every present cell exists one level up
      bool ok = a.present(id.parent());
      for_prediction_terms(a.domain(), id, [&](const CellId& src, double) {
        ok = ok && a.present(src);
      });
      CHECK(ok);
    }
  }
}

TEST_CASE("eta_mr = 0 keeps the grid unchanged") {
  Grid g = uniform_grid(unit_interval(), 5, 1);
  fill_with(g, gauss);
  const std::size_t n0 = g.n_leaves();
  Grid a = adapt(g, AdaptOptions{0.0});
  CHECK(a.n_leaves() == n0);
}

TEST_CASE("adaptation conserves mass exactly") {
  Grid g = uniform_grid(unit_square(), 5, 1);
  fill_with(g, gauss);
  const double m0 = g.mean(0);
  Grid a = adapt(g, AdaptOptions{1e-3});
  CHECK_THAT(a.mean(0), Catch::Matchers::WithinRel(m0, 1e-14));
}

TEST_CASE("multiresolution error tracks the threshold") {
  Grid g = uniform_grid(unit_interval(), 10, 1);
  fill_with(g, gauss);
  std::vector<double> full = decode_to_level(g, 0, 10);

  double prev_ratio = 0.0;
  for (double eta : {1e-2, 1e-3, 1e-4, 1e-5}) {
    Grid src = g;  // adapt encodes in place; work on a copy
    Grid a = adapt(src, AdaptOptions{eta});
    std::vector<double> approx = decode_to_level(a, 0, 10);
    double err2 = 0.0;
    const double w = 1.0 / static_cast<double>(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) err2 += w * sq(full[i] - approx[i]);
    const double ratio = std::sqrt(err2) / eta;
    CHECK(ratio < 10.0);
    if (prev_ratio > 0.0) {
      CHECK(ratio < prev_ratio * 10.0);
      CHECK(ratio > prev_ratio / 10.0);
    }
    prev_ratio = ratio;
  }
}

TEST_CASE("compression percentage definition") {
  Grid g = uniform_grid(unit_square(), 3, 1);
  fill_with(g, gauss);
  CHECK_THAT(compression_percent(g), Catch::Matchers::WithinRel(100.0, 1e-12));
  Grid a = adapt(g, AdaptOptions{1e-2});
  CHECK_THAT(compression_percent(a),
             Catch::Matchers::WithinRel(100.0 * a.n_leaves() / 64.0, 1e-12));
}
