#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <tuple>
#include <vector>

#include "mrfv/core.hpp"

namespace mrfv {

/// Square sparse matrix, compressed row storage, columns sorted per row.
struct CsrMatrix {
  std::int32_t n = 0;
  std::vector<std::int32_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> val;
  std::vector<std::int32_t> diag_pos;

  std::size_t nnz() const { return col.size(); }

  static CsrMatrix from_triplets(std::int32_t n,
                                 std::vector<std::tuple<std::int32_t, std::int32_t, double>> t) {
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    CsrMatrix m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto& [i, j, v] = t[k];
      if (!m.col.empty() && k > 0 && std::get<0>(t[k - 1]) == i && std::get<1>(t[k - 1]) == j) {
        m.val.back() += v;
        continue;
      }
      m.row_ptr[i + 1]++;
      m.col.push_back(j);
      m.val.push_back(v);
    }
    for (std::int32_t i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
  }

  /// y = A x
  void multiply(const double* x, double* y) const {
    for (std::int32_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::int32_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += val[p] * x[col[p]];
      y[i] = s;
    }
  }

  /// Index of (i, j) in val, or -1.
  std::int32_t find(std::int32_t i, std::int32_t j) const {
    const auto first = col.begin() + row_ptr[i];
    const auto last = col.begin() + row_ptr[i + 1];
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return -1;
    return static_cast<std::int32_t>(it - col.begin());
  }

  double& at(std::int32_t i, std::int32_t j) {
    const std::int32_t p = find(i, j);
    if (p < 0) throw StructuralError("CsrMatrix: entry outside pattern");
    return val[p];
  }

  double at(std::int32_t i, std::int32_t j) const {
    const std::int32_t p = find(i, j);
    if (p < 0) throw StructuralError("CsrMatrix: entry outside pattern");
    return val[p];
  }

  void build_diag_pos() {
    diag_pos.assign(n, -1);
    for (std::int32_t i = 0; i < n; ++i) diag_pos[i] = find(i, i);
  }

  /// Adds `delta` to every diagonal entry; diagonal must be in the pattern.
  void shift_diagonal(double delta) {
    if (diag_pos.empty()) build_diag_pos();
    for (std::int32_t i = 0; i < n; ++i) {
      if (diag_pos[i] < 0) throw StructuralError("CsrMatrix: missing diagonal entry");
      val[diag_pos[i]] += delta;
    }
  }
};

inline void write_matrix_market(const CsrMatrix& m, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.n << " " << m.n << " " << m.nnz() << "\n";
  os.precision(17);
  for (std::int32_t i = 0; i < m.n; ++i)
    for (std::int32_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p)
      os << i + 1 << " " << m.col[p] + 1 << " " << m.val[p] << "\n";
}

}  // namespace mrfv
