#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mrfv/model.hpp"
#include "mrfv/multiresolution.hpp"
#include "mrfv/tree.hpp"

namespace mrfv {

/// Frozen evaluation schedule for the finite-volume right-hand side on one
/// adapted grid: scratch slots for every present cell plus synthesized
/// ghosts, the projection sweep order, ghost prediction forms expanded to
/// present-cell slots, and the unique face list with ownership resolved
/// (fine side owns level interfaces, left cell owns same-level faces).
/// Rebuild after every adaptation.
struct FluxPlan {
  struct Projection {
    std::int32_t parent;
    std::array<std::int32_t, 1 << kMaxDim> child;
  };
  struct GhostTerm {
    std::int32_t slot;
    double w;
  };
  struct Face {
    std::int32_t slot_l, slot_r;
    std::int32_t row_l, row_r;  // leaf ordinals, -1 past a wall
    std::int32_t col_l, col_r;  // leaves controlling each side for the Jacobian
    double aov_l, aov_r;        // |face| / |row cell| per side
    double inv_h;               // inverse center distance
    std::array<double, kMaxDim> mid;
    std::int8_t axis;
    bool boundary;
  };

  int ncomp = 0;
  std::int32_t n_cells = 0;
  std::int32_t n_ghosts = 0;
  std::int32_t n_leaves = 0;
  std::vector<std::int32_t> leaf_of_slot;        // leaf ordinal or -1
  std::vector<std::int32_t> leaf_slot;           // slot per leaf ordinal
  std::vector<Projection> projections;           // deepest parents first
  std::vector<GhostTerm> ghost_terms;
  std::vector<std::int32_t> ghost_offsets;       // n_ghosts + 1 entries
  std::vector<Face> faces;
  std::vector<double> face_vel;                  // frozen normal velocities
  std::vector<std::array<double, kMaxDim>> leaf_center;
  std::vector<double> leaf_weight;               // |cell| / |domain|
  std::vector<CellId> leaf_id;

  std::int32_t n_state() const { return n_leaves * ncomp; }
  std::size_t scratch_size() const {
    return static_cast<std::size_t>(n_cells + n_ghosts) * ncomp;
  }
};

namespace detail {

/// Symbolic expansion of the prediction of an absent cell onto present-cell
/// slots; memoized across the recursion (roots terminate it).
class GhostExpander {
 public:
  GhostExpander(const Grid& g, const std::unordered_map<CellId, std::int32_t, CellIdHash>& slot)
      : grid_(g), slot_(slot) {}

  const std::unordered_map<std::int32_t, double>& expand(const CellId& id) {
    auto hit = memo_.find(id);
    if (hit != memo_.end()) return hit->second;
    std::unordered_map<std::int32_t, double> form;
    for_prediction_terms(grid_.domain(), id, [&](const CellId& q, double w) {
      if (grid_.present(q)) {
        form[slot_.at(q)] += w;
      } else {
        for (const auto& [s, c] : expand(q)) form[s] += w * c;
      }
    });
    return memo_.emplace(id, std::move(form)).first->second;
  }

 private:
  const Grid& grid_;
  const std::unordered_map<CellId, std::int32_t, CellIdHash>& slot_;
  std::unordered_map<CellId, std::unordered_map<std::int32_t, double>, CellIdHash> memo_;
};

}  // namespace detail

inline FluxPlan build_flux_plan(const Grid& g) {
  FluxPlan plan;
  const Domain& dom = g.domain();
  const int dim = dom.dim;
  plan.ncomp = g.ncomp();
  plan.n_leaves = static_cast<std::int32_t>(g.n_leaves());

  std::unordered_map<CellId, std::int32_t, CellIdHash> slot;
  slot.reserve(g.n_cells());
  const auto& levels = g.levels();
  for (const auto& bucket : levels)
    for (const CellId& id : bucket) {
      const auto s = static_cast<std::int32_t>(slot.size());
      slot.emplace(id, s);
      plan.leaf_of_slot.push_back(g.leaf_ordinal(id));
    }
  plan.n_cells = static_cast<std::int32_t>(slot.size());

  plan.leaf_slot.resize(plan.n_leaves);
  plan.leaf_center.resize(plan.n_leaves);
  plan.leaf_weight.resize(plan.n_leaves);
  plan.leaf_id.resize(plan.n_leaves);
  for (std::int32_t i = 0; i < plan.n_cells; ++i) {
    const std::int32_t lo = plan.leaf_of_slot[i];
    if (lo >= 0) plan.leaf_slot[lo] = i;
  }
  for (std::int32_t lo = 0; lo < plan.n_leaves; ++lo) {
    const CellId id = g.leaves()[lo];
    plan.leaf_id[lo] = id;
    plan.leaf_center[lo] = dom.center(id);
    plan.leaf_weight[lo] = g.volume_fraction(id.level);
  }

  // Projection sweep, deepest parents first, so children are always final.
  for (int j = g.deepest_level() - 1; j >= 0; --j) {
    for (const CellId& id : levels[j]) {
      if (g.is_leaf(id)) continue;
      FluxPlan::Projection pr;
      pr.parent = slot.at(id);
      pr.child.fill(-1);
      for (int t = 0; t < g.n_children(); ++t) pr.child[t] = slot.at(id.child(t));
      plan.projections.push_back(pr);
    }
  }

  detail::GhostExpander expander(g, slot);
  std::unordered_map<CellId, std::int32_t, CellIdHash> ghost_slot;
  plan.ghost_offsets.push_back(0);
  auto ghost_for = [&](const CellId& id) {
    auto hit = ghost_slot.find(id);
    if (hit != ghost_slot.end()) return hit->second;
    const auto& form = expander.expand(id);
    for (const auto& [s, w] : form) plan.ghost_terms.push_back({s, w});
    plan.ghost_offsets.push_back(static_cast<std::int32_t>(plan.ghost_terms.size()));
    const std::int32_t gs = plan.n_cells + plan.n_ghosts;
    plan.n_ghosts++;
    ghost_slot.emplace(id, gs);
    return gs;
  };

  for (std::int32_t lo = 0; lo < plan.n_leaves; ++lo) {
    const CellId id = plan.leaf_id[lo];
    const int j = id.level;
    const double vol = dom.cell_volume(j);
    for (int a = 0; a < dim; ++a) {
      const double area = dim == 1 ? 1.0 : dom.width(1 - a, j);
      const double inv_h = 1.0 / dom.width(a, j);
      for (int dir : {-1, 1}) {
        const CellId nb = id.neighbor(a, dir);
        FluxPlan::Face face;
        face.axis = static_cast<std::int8_t>(a);
        face.boundary = false;
        face.inv_h = inv_h;
        face.mid = dom.center(id);
        face.mid[a] += 0.5 * dir * dom.width(a, j);

        if (!dom.contains(nb)) {
          face.boundary = true;
          const std::int32_t s = plan.leaf_slot[lo];
          face.slot_l = face.slot_r = s;
          face.row_l = lo;
          face.row_r = -1;
          face.col_l = lo;
          face.col_r = -1;
          face.aov_l = dir * area / vol;  // signed: +face adds, -face subtracts
          face.aov_r = 0.0;
          plan.faces.push_back(face);
          continue;
        }
        if (const CellData* nc = g.find(nb)) {
          if (!nc->leaf) continue;        // finer side owns the interface
          if (dir < 0) continue;          // left cell owns same-level faces
          const std::int32_t no = g.leaf_ordinal(nb);
          face.slot_l = plan.leaf_slot[lo];
          face.slot_r = plan.leaf_slot[no];
          face.row_l = lo;
          face.row_r = no;
          face.col_l = lo;
          face.col_r = no;
          face.aov_l = area / vol;
          face.aov_r = area / vol;
          plan.faces.push_back(face);
          continue;
        }
        // Absent in-domain neighbor: the face borders a coarser leaf.
        const CellId up = nb.parent();
        const std::int32_t uo = g.leaf_ordinal(up);
        if (uo < 0)
          throw StructuralError("build_flux_plan: grading violated at " + id.str());
        const std::int32_t gs = ghost_for(nb);
        const double aov_coarse = area / dom.cell_volume(up.level);
        if (dir > 0) {
          face.slot_l = plan.leaf_slot[lo];
          face.slot_r = gs;
          face.row_l = lo;
          face.row_r = uo;
          face.col_l = lo;
          face.col_r = uo;
          face.aov_l = area / vol;
          face.aov_r = aov_coarse;
        } else {
          face.slot_l = gs;
          face.slot_r = plan.leaf_slot[lo];
          face.row_l = uo;
          face.row_r = lo;
          face.col_l = uo;
          face.col_r = lo;
          face.aov_l = aov_coarse;
          face.aov_r = area / vol;
        }
        plan.faces.push_back(face);
      }
    }
  }
  plan.face_vel.assign(plan.faces.size(), 0.0);
  return plan;
}

/// Freezes face-normal velocities at the face midpoints at time t.
inline void refresh_face_velocity(FluxPlan& plan, const Model& model, double t) {
  if (!model.velocity) return;
  double v[kMaxDim] = {0.0, 0.0};
  for (std::size_t f = 0; f < plan.faces.size(); ++f) {
    model.velocity(t, plan.faces[f].mid, v);
    plan.face_vel[f] = v[plan.faces[f].axis];
  }
}

struct RhsWorkspace {
  std::vector<double> scratch;
};

/// Loads leaf values, runs the projection sweep and synthesizes ghosts.
inline void fill_scratch(const FluxPlan& plan, const double* u, RhsWorkspace& ws) {
  const int m = plan.ncomp;
  ws.scratch.resize(plan.scratch_size());
  double* sc = ws.scratch.data();
  for (std::int32_t lo = 0; lo < plan.n_leaves; ++lo) {
    const std::int32_t s = plan.leaf_slot[lo];
    for (int k = 0; k < m; ++k) sc[s * m + k] = u[lo * m + k];
  }
  for (const auto& pr : plan.projections) {
    double acc[kMaxComp] = {0.0, 0.0, 0.0, 0.0};
    int nc = 0;
    for (std::int32_t t = 0; t < (1 << kMaxDim); ++t) {
      const std::int32_t ch = pr.child[t];
      if (ch < 0) continue;
      ++nc;
      for (int k = 0; k < m; ++k) acc[k] += sc[ch * m + k];
    }
    for (int k = 0; k < m; ++k) sc[pr.parent * m + k] = acc[k] / nc;
  }
  for (std::int32_t gi = 0; gi < plan.n_ghosts; ++gi) {
    const std::int32_t gs = plan.n_cells + gi;
    for (int k = 0; k < m; ++k) sc[gs * m + k] = 0.0;
    for (std::int32_t p = plan.ghost_offsets[gi]; p < plan.ghost_offsets[gi + 1]; ++p) {
      const auto& term = plan.ghost_terms[p];
      for (int k = 0; k < m; ++k) sc[gs * m + k] += term.w * sc[term.slot * m + k];
    }
  }
}

/// Two-point fluxes per unit face area, oriented from left to right slot.
inline double face_flux(double d_coef, double inv_h, double vn, double ul, double ur) {
  double phi = d_coef * (ur - ul) * inv_h;
  if (vn != 0.0) phi -= vn * (vn > 0.0 ? ul : ur);
  return phi;
}

/// Finite-volume right-hand side F(t, U) on the adapted grid.
inline void eval_rhs(const FluxPlan& plan, const Model& model, double t, const double* u,
                     double* f, RhsWorkspace& ws) {
  const int m = plan.ncomp;
  fill_scratch(plan, u, ws);
  const double* sc = ws.scratch.data();
  std::fill(f, f + plan.n_state(), 0.0);

  for (std::size_t fi = 0; fi < plan.faces.size(); ++fi) {
    const auto& face = plan.faces[fi];
    const double vn = plan.face_vel[fi];
    for (int k = 0; k < m; ++k) {
      const double phi = face_flux(model.diffusion[k], face.inv_h, vn,
                                   sc[face.slot_l * m + k], sc[face.slot_r * m + k]);
      f[face.row_l * m + k] += face.aov_l * phi;
      if (face.row_r >= 0) f[face.row_r * m + k] -= face.aov_r * phi;
    }
  }

  if (model.source) {
    double s[kMaxComp];
    for (std::int32_t lo = 0; lo < plan.n_leaves; ++lo) {
      model.source(t, plan.leaf_center[lo], u + static_cast<std::size_t>(lo) * m, s);
      for (int k = 0; k < m; ++k) {
        if (!std::isfinite(s[k]))
          throw SingularityError("eval_rhs: non-finite source, component " +
                                 std::to_string(k) + " at leaf " + plan.leaf_id[lo].str());
        f[lo * m + k] += s[k];
      }
    }
  }
}

/// || v ||_2 with leaf-volume weights: sqrt(sum_l w_l sum_k v_{l,k}^2).
inline double weighted_norm(const FluxPlan& plan, const double* v) {
  const int m = plan.ncomp;
  double s = 0.0;
  for (std::int32_t lo = 0; lo < plan.n_leaves; ++lo) {
    double cell = 0.0;
    for (int k = 0; k < m; ++k) cell += sq(v[lo * m + k]);
    s += plan.leaf_weight[lo] * cell;
  }
  return std::sqrt(s);
}

/// Same norm restricted to one component.
inline double weighted_norm_component(const FluxPlan& plan, const double* v, int comp) {
  const int m = plan.ncomp;
  double s = 0.0;
  for (std::int32_t lo = 0; lo < plan.n_leaves; ++lo)
    s += plan.leaf_weight[lo] * sq(v[lo * m + comp]);
  return std::sqrt(s);
}

}  // namespace mrfv
