#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "mrfv/tree.hpp"

namespace mrfv {

/// Polynomial prediction order parameter: centered 3-point stencil per axis
/// (beta = 2r + 1 = 3), exact for polynomials of degree <= 2.
inline constexpr int kPredictR = 1;
inline constexpr int kPredictBeta = 2 * kPredictR + 1;

/// Volume-weighted average of child values (exact projection).
inline double project(const double* child_vals, const double* child_vols, int n) {
  double s = 0.0, v = 0.0;
  for (int i = 0; i < n; ++i) {
    s += child_vals[i] * child_vols[i];
    v += child_vols[i];
  }
  return s / v;
}

/// 1D prediction weights: child offset t in {0,1}, stencil shift s in {-1,0,1}.
inline double predict_weight_1d(int t, int s) {
  static constexpr double w[2][3] = {{0.125, 1.0, -0.125}, {-0.125, 1.0, 0.125}};
  return w[t][s + 1];
}

/// Enumerates (parent-level cell, weight) pairs predicting cell `id` from
/// level |id|-1, with out-of-domain stencil members mirrored at the walls.
/// Mirrored shifts may revisit a cell; consumers accumulate weights.
template <typename Fn>
void for_prediction_terms(const Domain& dom, const CellId& id, Fn&& fn) {
  const CellId p = id.parent();
  const int tx = id.pos[0] & 1;
  const int ty = id.pos[1] & 1;
  const int ylo = dom.dim > 1 ? -1 : 0;
  const int yhi = dom.dim > 1 ? 1 : 0;
  for (int sy = ylo; sy <= yhi; ++sy) {
    const double wy = dom.dim > 1 ? predict_weight_1d(ty, sy) : 1.0;
    for (int sx = -1; sx <= 1; ++sx) {
      const double w = predict_weight_1d(tx, sx) * wy;
      CellId q{p.level,
               {dom.mirror(0, p.level, p.pos[0] + sx),
                dom.dim > 1 ? dom.mirror(1, p.level, p.pos[1] + sy) : 0}};
      fn(q, w);
    }
  }
}

/// Predicted value of cell `id` from stored parent-level averages.
inline double predict_value(const Grid& g, const CellId& id, int comp) {
  double v = 0.0;
  for_prediction_terms(g.domain(), id, [&](const CellId& q, double w) {
    v += w * g.cell(q).avg[comp];
  });
  return v;
}

/// Level-dependent threshold eps_j = 2^{dim (j - J) / 2} * eta.
inline double level_threshold(int level, int max_level, int dim, double eta) {
  return eta * std::exp2(0.5 * dim * (level - max_level));
}

/// Multiresolution transform: re-projects internal averages bottom-up, then
/// stores details d = avg - prediction on every non-root cell.
inline void encode(Grid& g) {
  g.project_internal();
  const auto& levels = g.levels();
  for (int j = 1; j < static_cast<int>(levels.size()); ++j) {
    for (const CellId& id : levels[j]) {
      CellData& c = g.cell(id);
      for (int k = 0; k < g.ncomp(); ++k)
        c.detail[k] = c.avg[k] - predict_value(g, id, k);
    }
  }
}

/// Inverse transform: rebuilds non-root averages top-down from details.
inline void decode(Grid& g) {
  const auto& levels = g.levels();
  for (int j = 1; j < static_cast<int>(levels.size()); ++j) {
    for (const CellId& id : levels[j]) {
      CellData& c = g.cell(id);
      for (int k = 0; k < g.ncomp(); ++k)
        c.avg[k] = c.detail[k] + predict_value(g, id, k);
    }
  }
}

/// Samples one component on the full uniform mesh of `level`: cells present
/// in the tree keep their stored average, absent cells are predicted from
/// the level above.  Works on raw (non-encoded) grids.
inline std::vector<double> decode_to_level(const Grid& g, int comp, int level) {
  const Domain& dom = g.domain();
  const int dim = dom.dim;
  std::vector<double> prev(static_cast<std::size_t>(dom.cells_along(0, 0)) *
                           (dim > 1 ? dom.cells_along(1, 0) : 1));
  for (std::int32_t y = 0; y < (dim > 1 ? dom.cells_along(1, 0) : 1); ++y)
    for (std::int32_t x = 0; x < dom.cells_along(0, 0); ++x)
      prev[x + static_cast<std::size_t>(dom.cells_along(0, 0)) * y] =
          g.cell(CellId{0, {x, y}}).avg[comp];

  for (int j = 1; j <= level; ++j) {
    const std::int32_t nx = dom.cells_along(0, j);
    const std::int32_t ny = dim > 1 ? dom.cells_along(1, j) : 1;
    const std::int32_t pnx = dom.cells_along(0, j - 1);
    std::vector<double> cur(static_cast<std::size_t>(nx) * ny);
    for (std::int32_t y = 0; y < ny; ++y) {
      for (std::int32_t x = 0; x < nx; ++x) {
        const CellId id{j, {x, y}};
        double v;
        if (const CellData* c = g.find(id)) {
          v = c->avg[comp];
        } else {
          v = 0.0;
          for_prediction_terms(dom, id, [&](const CellId& q, double w) {
            v += w * prev[q.pos[0] + static_cast<std::size_t>(pnx) * q.pos[1]];
          });
        }
        cur[x + static_cast<std::size_t>(nx) * y] = v;
      }
    }
    prev = std::move(cur);
  }
  return prev;
}

/// Assigns `dst` cell values from the multiresolution content of `src`:
/// cells present in `src` copy their average, new cells are predicted
/// (zero detail) from the already-filled coarser level of `dst`.
/// Projection consistency of `src` internals is assumed (run encode first).
inline void fill_from(Grid& dst, const Grid& src) {
  const auto& levels = dst.levels();
  for (int j = 0; j < static_cast<int>(levels.size()); ++j) {
    for (const CellId& id : levels[j]) {
      CellData& c = dst.cell(id);
      if (const CellData* s = src.find(id)) {
        c.avg = s->avg;
      } else {
        for (int k = 0; k < dst.ncomp(); ++k) {
          double v = 0.0;
          for_prediction_terms(dst.domain(), id, [&](const CellId& q, double w) {
            v += w * dst.cell(q).avg[k];
          });
          c.avg[k] = v;
        }
      }
    }
  }
}

struct AdaptOptions {
  double eta_mr = 1e-3;
  /// Floor for the per-component normalization scale (max |leaf value|).
  double scale_floor = 1e-14;
};

/// Harten-style grid adaptation.  Encodes `g`, keeps cells whose normalized
/// detail reaches the level threshold plus a refinement margin (same-level
/// face neighbors; children when the detail exceeds 2^{(beta+dim)/2} eps_j),
/// closes the result under grading and fills it from `g`.
/// eta_mr = 0 keeps everything: the input grid is returned unchanged.
inline Grid adapt(Grid& g, const AdaptOptions& opt) {
  encode(g);
  if (opt.eta_mr <= 0.0) return g;

  const int dim = g.dim();
  const int J = g.max_level();
  auto scale = g.max_abs_leaf();
  for (int k = 0; k < g.ncomp(); ++k) scale[k] = std::max(scale[k], opt.scale_floor);

  const double child_factor = std::exp2(0.5 * (kPredictBeta + dim));
  Grid out(g.domain(), J, g.ncomp());

  const auto& levels = g.levels();
  for (int j = 1; j < static_cast<int>(levels.size()); ++j) {
    const double eps = level_threshold(j, J, dim, opt.eta_mr);
    for (const CellId& id : levels[j]) {
      const CellData& c = g.cell(id);
      double dmax = 0.0;
      for (int k = 0; k < g.ncomp(); ++k)
        dmax = std::max(dmax, std::abs(c.detail[k]) / scale[k]);
      if (dmax < eps) continue;
      out.require(id);
      for (int a = 0; a < dim; ++a) {
        for (int step : {-1, 1}) {
          const CellId n = id.neighbor(a, step);
          if (g.domain().contains(n)) out.require(n);
        }
      }
      if (dmax >= child_factor * eps && j < J)
        for (int t = 0; t < g.n_children(); ++t) out.require(id.child(t));
    }
  }

  fill_from(out, g);
  return out;
}

/// Leaf count as a percentage of the finest uniform mesh.
inline double compression_percent(const Grid& g) {
  const double full = static_cast<double>(g.domain().n_roots()) *
                      std::exp2(static_cast<double>(g.dim() * g.max_level()));
  return 100.0 * static_cast<double>(g.n_leaves()) / full;
}

}  // namespace mrfv
