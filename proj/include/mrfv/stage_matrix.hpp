#pragma once

#include "mrfv/butcher.hpp"
#include "mrfv/csr.hpp"

namespace mrfv {

/// (1/(dt gamma)) I - J0 on J0's pattern (SDIRK stage operator).
inline CsrMatrix sdirk_stage_matrix(const CsrMatrix& j0, double dt, double gamma) {
  CsrMatrix m = j0;
  for (double& v : m.val) v = -v;
  m.diag_pos.clear();
  m.shift_diagonal(1.0 / (dt * gamma));
  return m;
}

/// dt^{-1} I - A (x) J0 on the s x s block pattern (fully implicit operator).
/// Every J0 row must contain its diagonal entry.
inline CsrMatrix full_stage_matrix(const ButcherTableau& t, const CsrMatrix& j0, double dt) {
  const std::int32_t n = j0.n;
  const int s = t.s;
  const double inv_dt = 1.0 / dt;
  CsrMatrix m;
  m.n = s * n;
  m.row_ptr.reserve(static_cast<std::size_t>(m.n) + 1);
  m.row_ptr.push_back(0);
  m.col.reserve(static_cast<std::size_t>(s) * s * j0.nnz());
  m.val.reserve(static_cast<std::size_t>(s) * s * j0.nnz());
  m.diag_pos.assign(m.n, -1);

  for (int i = 0; i < s; ++i) {
    for (std::int32_t r = 0; r < n; ++r) {
      for (int j = 0; j < s; ++j) {
        const double aij = t.a[i][j];
        for (std::int32_t p = j0.row_ptr[r]; p < j0.row_ptr[r + 1]; ++p) {
          double v = -aij * j0.val[p];
          if (i == j && j0.col[p] == r) {
            v += inv_dt;
            m.diag_pos[i * n + r] = static_cast<std::int32_t>(m.col.size());
          }
          m.col.push_back(j * n + j0.col[p]);
          m.val.push_back(v);
        }
      }
      m.row_ptr.push_back(static_cast<std::int32_t>(m.col.size()));
    }
  }
  for (std::int32_t r = 0; r < m.n; ++r)
    if (m.diag_pos[r] < 0) throw StructuralError("full_stage_matrix: J0 row lacks diagonal");
  return m;
}

/// Moves an assembled stage operator from dt_old to dt_new by updating the
/// diagonal shift only (the off-diagonal -A (x) J0 part is dt-independent).
inline void rescale_stage_matrix(CsrMatrix& m, double shift_old, double shift_new) {
  m.shift_diagonal(shift_new - shift_old);
}

}  // namespace mrfv
