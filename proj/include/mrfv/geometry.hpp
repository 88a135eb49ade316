#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "mrfv/core.hpp"

namespace mrfv {

/// Cell address in the nested dyadic hierarchy.
///
/// `pos[a]` is the global index along axis `a` at this cell's level, in
/// [0, roots[a] * 2^level).  The root column is recovered as pos >> level,
/// the index inside that root as pos & (2^level - 1).
struct CellId {
  std::int32_t level = 0;
  std::array<std::int32_t, kMaxDim> pos{0, 0};

  friend bool operator==(const CellId&, const CellId&) = default;

  CellId parent() const {
    return CellId{level - 1, {pos[0] >> 1, pos[1] >> 1}};
  }

  /// Child `t` with per-axis offsets t & 1 (axis 0) and (t >> 1) & 1 (axis 1).
  CellId child(int t) const {
    return CellId{level + 1, {2 * pos[0] + (t & 1), 2 * pos[1] + ((t >> 1) & 1)}};
  }

  /// Offset of this cell inside its sibling group, bit a = pos[a] & 1.
  int sibling_offset(int dim) const {
    int t = pos[0] & 1;
    if (dim > 1) t |= (pos[1] & 1) << 1;
    return t;
  }

  CellId neighbor(int axis, int step) const {
    CellId n = *this;
    n.pos[axis] += step;
    return n;
  }

  std::int32_t root_along(int axis) const { return pos[axis] >> level; }

  std::string str() const {
    return "(level " + std::to_string(level) + ", pos " + std::to_string(pos[0]) +
           "," + std::to_string(pos[1]) + ")";
  }
};

struct CellIdHash {
  std::size_t operator()(const CellId& id) const {
    std::uint64_t k = (static_cast<std::uint64_t>(id.level) << 52) ^
                      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(id.pos[1])) << 26) ^
                      static_cast<std::uint32_t>(id.pos[0]);
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

/// Orders by (level, pos[1], pos[0]); the leaf enumeration h_n uses it.
struct CellIdLess {
  bool operator()(const CellId& a, const CellId& b) const {
    if (a.level != b.level) return a.level < b.level;
    if (a.pos[1] != b.pos[1]) return a.pos[1] < b.pos[1];
    return a.pos[0] < b.pos[0];
  }
};

/// Rectangular domain tiled by congruent root cells.
struct Domain {
  int dim = 1;
  std::array<int, kMaxDim> roots{1, 1};
  std::array<double, kMaxDim> lo{0.0, 0.0};
  std::array<double, kMaxDim> hi{1.0, 1.0};

  int n_roots() const { return dim == 1 ? roots[0] : roots[0] * roots[1]; }

  std::int32_t cells_along(int axis, int level) const {
    return static_cast<std::int32_t>(roots[axis]) << level;
  }

  double width(int axis, int level) const {
    return (hi[axis] - lo[axis]) / cells_along(axis, level);
  }

  double cell_volume(int level) const {
    double v = width(0, level);
    if (dim > 1) v *= width(1, level);
    return v;
  }

  double volume() const {
    double v = hi[0] - lo[0];
    if (dim > 1) v *= hi[1] - lo[1];
    return v;
  }

  bool contains(const CellId& id) const {
    for (int a = 0; a < dim; ++a)
      if (id.pos[a] < 0 || id.pos[a] >= cells_along(a, id.level)) return false;
    return true;
  }

  std::array<double, kMaxDim> center(const CellId& id) const {
    std::array<double, kMaxDim> x{0.0, 0.0};
    for (int a = 0; a < dim; ++a)
      x[a] = lo[a] + (id.pos[a] + 0.5) * width(a, id.level);
    return x;
  }

  /// Reflects an out-of-range index across the nearest wall (mirror ghosts).
  std::int32_t mirror(int axis, int level, std::int32_t q) const {
    const std::int32_t n = cells_along(axis, level);
    while (q < 0 || q >= n) {
      if (q < 0) q = -q - 1;
      if (q >= n) q = 2 * n - q - 1;
    }
    return q;
  }
};

}  // namespace mrfv
