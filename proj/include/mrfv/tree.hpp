#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mrfv/geometry.hpp"

namespace mrfv {

struct CellData {
  std::array<double, kMaxComp> avg{};
  std::array<double, kMaxComp> detail{};
  std::int32_t leaf_ordinal = -1;
  bool leaf = true;
};

/// Graded tree of nested finite-volume cells.
///
/// Invariants maintained by construction:
///  - sibling groups are complete (a parent has either 0 or 2^dim children),
///  - every present cell's prediction stencil (the 3^dim parent-level
///    neighborhood, mirrored at walls) is present,
///  - roots are always present.
///
/// Structural edits (`require`, `refine`) fill new cells with the parent
/// average as a placeholder; callers that need multiresolution-consistent
/// values run a fill pass afterwards (see multiresolution.hpp).
class Grid {
 public:
  Grid(const Domain& dom, int max_level, int ncomp)
      : dom_(dom), max_level_(max_level), ncomp_(ncomp) {
    if (dom.dim < 1 || dom.dim > kMaxDim) throw StructuralError("Grid: bad dim");
    if (ncomp < 1 || ncomp > kMaxComp) throw StructuralError("Grid: bad ncomp");
    const int ry = dom_.dim > 1 ? dom_.roots[1] : 1;
    for (int y = 0; y < ry; ++y)
      for (int x = 0; x < dom_.roots[0]; ++x)
        cells_.emplace(CellId{0, {x, y}}, CellData{});
    dirty_ = true;
  }

  const Domain& domain() const { return dom_; }
  int dim() const { return dom_.dim; }
  int ncomp() const { return ncomp_; }
  int max_level() const { return max_level_; }
  int n_children() const { return 1 << dom_.dim; }

  std::size_t n_cells() const { return cells_.size(); }
  std::size_t n_leaves() const {
    refresh();
    return leaves_.size();
  }

  bool present(const CellId& id) const { return cells_.count(id) != 0; }

  bool is_leaf(const CellId& id) const {
    auto it = cells_.find(id);
    return it != cells_.end() && it->second.leaf;
  }

  CellData& cell(const CellId& id) {
    auto it = cells_.find(id);
    if (it == cells_.end()) throw StructuralError("Grid: absent cell " + id.str());
    return it->second;
  }

  const CellData& cell(const CellId& id) const {
    return const_cast<Grid*>(this)->cell(id);
  }

  const CellData* find(const CellId& id) const {
    auto it = cells_.find(id);
    return it == cells_.end() ? nullptr : &it->second;
  }

  /// Splits a leaf into 2^dim children carrying the parent average.
  /// Prediction stencil closure is the caller's duty (`require` provides it).
  void refine(const CellId& id) {
    CellData& c = cell(id);
    if (!c.leaf) return;
    if (id.level >= max_level_) throw StructuralError("Grid: refine past max level");
    c.leaf = false;
    const auto avg = c.avg;
    for (int t = 0; t < n_children(); ++t) {
      CellData kid;
      kid.avg = avg;
      cells_.emplace(id.child(t), kid);
    }
    dirty_ = true;
  }

  /// Makes `id` present, inserting ancestors, completing sibling groups and
  /// closing the tree under the gradedness rule.
  void require(const CellId& id) {
    if (!dom_.contains(id)) throw StructuralError("Grid: require outside domain " + id.str());
    if (id.level > max_level_) throw StructuralError("Grid: require past max level");
    if (present(id)) return;
    const CellId p = id.parent();
    require(p);
    for_stencil(p, [&](const CellId& s) {
      if (!present(s)) require(s);
    });
    if (is_leaf(p)) refine(p);
  }

  /// Leaves ordered by (level, pos); position in this list is h_n.
  const std::vector<CellId>& leaves() const {
    refresh();
    return leaves_;
  }

  std::int32_t leaf_ordinal(const CellId& id) const {
    refresh();
    const CellData* c = find(id);
    return (c && c->leaf) ? c->leaf_ordinal : -1;
  }

  /// Present cells bucketed by level, each bucket sorted.
  const std::vector<std::vector<CellId>>& levels() const {
    refresh();
    return by_level_;
  }

  int deepest_level() const {
    refresh();
    return static_cast<int>(by_level_.size()) - 1;
  }

  /// Recomputes internal averages bottom-up as equal-weight child means
  /// (cells of one sibling group are congruent).
  void project_internal() {
    refresh();
    for (int j = deepest_level() - 1; j >= 0; --j) {
      for (const CellId& id : by_level_[j]) {
        CellData& c = cell(id);
        if (c.leaf) continue;
        std::array<double, kMaxComp> s{};
        for (int t = 0; t < n_children(); ++t) {
          const CellData& kid = cell(id.child(t));
          for (int k = 0; k < ncomp_; ++k) s[k] += kid.avg[k];
        }
        const double w = 1.0 / n_children();
        for (int k = 0; k < ncomp_; ++k) c.avg[k] = s[k] * w;
      }
    }
  }

  /// Copies leaf averages into the flat state layout u[h_n * ncomp + comp].
  void gather(std::vector<double>& u) const {
    refresh();
    u.resize(leaves_.size() * ncomp_);
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
      const CellData& c = cell(leaves_[i]);
      for (int k = 0; k < ncomp_; ++k) u[i * ncomp_ + k] = c.avg[k];
    }
  }

  void scatter(const std::vector<double>& u) {
    refresh();
    if (u.size() != leaves_.size() * static_cast<std::size_t>(ncomp_))
      throw StructuralError("Grid: scatter size mismatch");
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
      CellData& c = cell(leaves_[i]);
      for (int k = 0; k < ncomp_; ++k) c.avg[k] = u[i * ncomp_ + k];
    }
  }

  std::array<double, kMaxComp> max_abs_leaf() const {
    refresh();
    std::array<double, kMaxComp> m{};
    for (const CellId& id : leaves_) {
      const CellData& c = cell(id);
      for (int k = 0; k < ncomp_; ++k) m[k] = std::max(m[k], std::abs(c.avg[k]));
    }
    return m;
  }

  /// |cell| / |domain| for a cell at `level`; the norm and mass weight.
  double volume_fraction(int level) const {
    return dom_.cell_volume(level) / dom_.volume();
  }

  /// Volume-weighted mean of one component over the leaves (exact mass
  /// per unit domain volume; conserved by adaptation).
  double mean(int comp) const {
    refresh();
    double s = 0.0;
    for (const CellId& id : leaves_) s += volume_fraction(id.level) * cell(id).avg[comp];
    return s;
  }

  /// Applies `fn` to the 3^dim same-level neighborhood of `id` (id excluded),
  /// suppressing out-of-domain entries.
  template <typename Fn>
  void for_stencil(const CellId& id, Fn&& fn) const {
    const int ylo = dom_.dim > 1 ? -1 : 0;
    const int yhi = dom_.dim > 1 ? 1 : 0;
    for (int dy = ylo; dy <= yhi; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        CellId n{id.level, {id.pos[0] + dx, id.pos[1] + dy}};
        if (dom_.contains(n)) fn(n);
      }
    }
  }

  void touch() { dirty_ = true; }

 private:
  void refresh() const {
    if (!dirty_) return;
    by_level_.assign(1, {});
    leaves_.clear();
    for (const auto& [id, c] : cells_) {
      if (id.level >= static_cast<int>(by_level_.size()))
        by_level_.resize(id.level + 1);
      by_level_[id.level].push_back(id);
      if (c.leaf) leaves_.push_back(id);
    }
    for (auto& bucket : by_level_) std::sort(bucket.begin(), bucket.end(), CellIdLess{});
    std::sort(leaves_.begin(), leaves_.end(), CellIdLess{});
    for (std::size_t i = 0; i < leaves_.size(); ++i)
      const_cast<Grid*>(this)->cells_[leaves_[i]].leaf_ordinal = static_cast<std::int32_t>(i);
    dirty_ = false;
  }

  Domain dom_;
  int max_level_;
  int ncomp_;
  std::unordered_map<CellId, CellData, CellIdHash> cells_;
  mutable std::vector<CellId> leaves_;
  mutable std::vector<std::vector<CellId>> by_level_;
  mutable bool dirty_ = true;
};

}  // namespace mrfv
