#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mrfv/csr.hpp"
#include "mrfv/discretization.hpp"

namespace mrfv {

/// Forward-difference perturbation, scaled to the unknown's magnitude.
inline double fd_delta(double u) {
  return std::sqrt(1e-16 * std::max(1e-5, std::abs(u)));
}

/// Numerical Jacobian of the finite-volume right-hand side by forward
/// differences.  The sparsity pattern is the leaf flux stencil: per-component
/// diagonal blocks between face-adjacent leaves plus a dense m x m diagonal
/// block for the source coupling.  Each perturbed face flux is computed once
/// and scattered to both adjacent rows with opposite signs (conservation),
/// ghost slots move 1:1 with the coarse leaf they are slaved to, and mirror
/// ghosts at walls move with their owner.
inline CsrMatrix assemble_jacobian(const FluxPlan& plan, const Model& model, double t,
                                   const double* u, RhsWorkspace& ws) {
  const int m = plan.ncomp;
  const std::int32_t nl = plan.n_leaves;
  const std::int32_t n = nl * m;

  std::vector<std::vector<std::int32_t>> adj(nl);
  for (std::int32_t i = 0; i < nl; ++i) adj[i].push_back(i);
  for (const auto& face : plan.faces) {
    if (face.row_r < 0) continue;
    adj[face.row_l].push_back(face.col_r);
    adj[face.row_r].push_back(face.col_l);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }

  CsrMatrix jac;
  jac.n = n;
  jac.row_ptr.reserve(n + 1);
  jac.row_ptr.push_back(0);
  for (std::int32_t i = 0; i < nl; ++i) {
    for (int c = 0; c < m; ++c) {
      for (std::int32_t mu : adj[i]) {
        if (mu == i)
          for (int cc = 0; cc < m; ++cc) jac.col.push_back(i * m + cc);
        else
          jac.col.push_back(mu * m + c);
      }
      jac.row_ptr.push_back(static_cast<std::int32_t>(jac.col.size()));
    }
  }
  jac.val.assign(jac.col.size(), 0.0);

  auto add = [&](std::int32_t row, std::int32_t colidx, double v) {
    const std::int32_t at = jac.find(row, colidx);
    if (at < 0)
      throw StructuralError("assemble_jacobian: entry (" + std::to_string(row) + "," +
                            std::to_string(colidx) + ") outside the stencil pattern");
    jac.val[at] += v;
  };

  fill_scratch(plan, u, ws);
  const double* sc = ws.scratch.data();

  for (std::size_t fi = 0; fi < plan.faces.size(); ++fi) {
    const auto& face = plan.faces[fi];
    const double vn = plan.face_vel[fi];
    for (int k = 0; k < m; ++k) {
      const double dk = model.diffusion[k];
      const double ul = sc[face.slot_l * m + k];
      const double ur = sc[face.slot_r * m + k];
      const double phi0 = face_flux(dk, face.inv_h, vn, ul, ur);
      if (face.boundary) {
        const double d = fd_delta(u[face.col_l * m + k]);
        const double dphi = (face_flux(dk, face.inv_h, vn, ul + d, ur + d) - phi0) / d;
        add(face.row_l * m + k, face.col_l * m + k, face.aov_l * dphi);
        continue;
      }
      const double dl = fd_delta(u[face.col_l * m + k]);
      const double dphi_l = (face_flux(dk, face.inv_h, vn, ul + dl, ur) - phi0) / dl;
      add(face.row_l * m + k, face.col_l * m + k, face.aov_l * dphi_l);
      add(face.row_r * m + k, face.col_l * m + k, -face.aov_r * dphi_l);

      const double dr = fd_delta(u[face.col_r * m + k]);
      const double dphi_r = (face_flux(dk, face.inv_h, vn, ul, ur + dr) - phi0) / dr;
      add(face.row_l * m + k, face.col_r * m + k, face.aov_l * dphi_r);
      add(face.row_r * m + k, face.col_r * m + k, -face.aov_r * dphi_r);
    }
  }

  if (model.source) {
    double s0[kMaxComp], sp[kMaxComp], up[kMaxComp];
    for (std::int32_t lo = 0; lo < nl; ++lo) {
      const double* ul = u + static_cast<std::size_t>(lo) * m;
      model.source(t, plan.leaf_center[lo], ul, s0);
      for (int c = 0; c < m; ++c) {
        std::copy(ul, ul + m, up);
        const double d = fd_delta(ul[c]);
        up[c] += d;
        model.source(t, plan.leaf_center[lo], up, sp);
        for (int cc = 0; cc < m; ++cc)
          add(lo * m + cc, lo * m + c, (sp[cc] - s0[cc]) / d);
      }
    }
  }

  jac.build_diag_pos();
  return jac;
}

}  // namespace mrfv
