#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mrfv/csr.hpp"

namespace mrfv {

struct IlutOptions {
  /// Entries kept per row in each factor beyond the row's original count.
  int fill = 10;
  /// Relative drop tolerance (scaled by the 2-norm of the source row).
  double drop = 1e-3;
};

/// Incomplete LU with dual thresholding (Saad's ILUT); unit lower factor.
class IlutPreconditioner {
 public:
  void factor(const CsrMatrix& a, const IlutOptions& opt) {
    const std::int32_t n = a.n;
    l_.n = u_.n = n;
    l_.row_ptr.assign(1, 0);
    u_.row_ptr.assign(1, 0);
    l_.col.clear(); l_.val.clear();
    u_.col.clear(); u_.val.clear();

    std::vector<double> w(n, 0.0);
    std::vector<std::int32_t> jw;
    std::vector<char> in_row(n, 0);

    for (std::int32_t i = 0; i < n; ++i) {
      jw.clear();
      double row_norm = 0.0;
      std::int32_t nl = 0, nu = 0;
      for (std::int32_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
        const std::int32_t j = a.col[p];
        w[j] = a.val[p];
        in_row[j] = 1;
        jw.push_back(j);
        row_norm += sq(a.val[p]);
        (j < i ? nl : nu)++;
      }
      row_norm = std::sqrt(row_norm);
      const double tau = opt.drop * row_norm;
      const std::int32_t cap_l = nl + opt.fill;
      const std::int32_t cap_u = nu + opt.fill;

      // Eliminate L-part entries in ascending column order; fill-in from
      // combined U rows lands back in jw and is picked up by the scan.
      for (std::size_t done = 0;; ++done) {
        std::int32_t k = -1;
        for (std::int32_t j : jw)
          if (j < i && in_row[j] == 1 && (k < 0 || j < k)) k = j;
        if (k < 0) break;
        in_row[k] = 2;  // processed
        const std::int32_t dk = u_.row_ptr[k];  // U rows start at the diagonal
        w[k] /= u_.val[dk];
        if (std::abs(w[k]) < tau) {
          w[k] = 0.0;
          continue;
        }
        for (std::int32_t p = dk + 1; p < u_.row_ptr[k + 1]; ++p) {
          const std::int32_t j = u_.col[p];
          if (!in_row[j]) {
            in_row[j] = 1;
            jw.push_back(j);
            w[j] = 0.0;
          }
          w[j] -= w[k] * u_.val[p];
        }
      }

      // Split, drop small entries, keep the largest within the caps.
      scratch_l_.clear();
      scratch_u_.clear();
      double diag = 0.0;
      for (std::int32_t j : jw) {
        const double v = w[j];
        w[j] = 0.0;
        in_row[j] = 0;
        if (j == i) {
          diag = v;
        } else if (v != 0.0 && std::abs(v) >= tau) {
          (j < i ? scratch_l_ : scratch_u_).push_back({j, v});
        }
      }
      keep_largest(scratch_l_, cap_l);
      keep_largest(scratch_u_, cap_u);
      if (std::abs(diag) < 1e-300)
        throw SingularityError("ilut: zero pivot in row " + std::to_string(i));

      std::sort(scratch_l_.begin(), scratch_l_.end());
      std::sort(scratch_u_.begin(), scratch_u_.end());
      for (const auto& e : scratch_l_) {
        l_.col.push_back(e.j);
        l_.val.push_back(e.v);
      }
      l_.row_ptr.push_back(static_cast<std::int32_t>(l_.col.size()));
      u_.col.push_back(i);
      u_.val.push_back(diag);
      for (const auto& e : scratch_u_) {
        u_.col.push_back(e.j);
        u_.val.push_back(e.v);
      }
      u_.row_ptr.push_back(static_cast<std::int32_t>(u_.col.size()));
    }
    ready_ = true;
  }

  /// z = U^{-1} L^{-1} r
  void apply(const double* r, double* z) const {
    const std::int32_t n = l_.n;
    for (std::int32_t i = 0; i < n; ++i) {
      double s = r[i];
      for (std::int32_t p = l_.row_ptr[i]; p < l_.row_ptr[i + 1]; ++p)
        s -= l_.val[p] * z[l_.col[p]];
      z[i] = s;
    }
    for (std::int32_t i = n - 1; i >= 0; --i) {
      double s = z[i];
      const std::int32_t d = u_.row_ptr[i];
      for (std::int32_t p = d + 1; p < u_.row_ptr[i + 1]; ++p)
        s -= u_.val[p] * z[u_.col[p]];
      z[i] = s / u_.val[d];
    }
  }

  bool ready() const { return ready_; }
  const CsrMatrix& lower() const { return l_; }
  const CsrMatrix& upper() const { return u_; }

 private:
  struct Entry {
    std::int32_t j;
    double v;
    bool operator<(const Entry& o) const { return j < o.j; }
  };

  static void keep_largest(std::vector<Entry>& es, std::int32_t cap) {
    if (static_cast<std::int32_t>(es.size()) <= cap) return;
    std::nth_element(es.begin(), es.begin() + cap, es.end(),
                     [](const Entry& a, const Entry& b) { return std::abs(a.v) > std::abs(b.v); });
    es.resize(cap);
  }

  CsrMatrix l_, u_;
  std::vector<Entry> scratch_l_, scratch_u_;
  bool ready_ = false;
};

/// Factors with the configured drop tolerance, retrying a zero pivot with
/// drop * 0.1 at most twice before giving up.
inline void factor_with_fallback(IlutPreconditioner& m, const CsrMatrix& a, IlutOptions opt) {
  for (int attempt = 0;; ++attempt) {
    try {
      m.factor(a, opt);
      return;
    } catch (const SingularityError&) {
      if (attempt >= 2) throw;
      opt.drop *= 0.1;
    }
  }
}

}  // namespace mrfv
