#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mrfv/core.hpp"
#include "mrfv/geometry.hpp"
#include "mrfv/multiresolution.hpp"
#include "mrfv/tree.hpp"

namespace mrfv {

namespace detail {

inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_num(const std::string& tok, const char* what) {
  char* end = nullptr;
  const double x = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str()) throw IoError(std::string("cannot parse ") + what + " from '" + tok + "'");
  return x;
}

}  // namespace detail

/// Writes the leaves of an adapted grid, one row per leaf, with enough
/// metadata in the header to rebuild the tree exactly.
inline void save_grid(std::ostream& out, const Grid& g, double time) {
  const Domain& dom = g.domain();
  out << "# mrfv-grid dim=" << dom.dim << " rootsx=" << dom.roots[0] << " rootsy=" << dom.roots[1]
      << " lox=" << detail::fmt_g17(dom.lo[0]) << " loy=" << detail::fmt_g17(dom.lo[1])
      << " hix=" << detail::fmt_g17(dom.hi[0]) << " hiy=" << detail::fmt_g17(dom.hi[1])
      << " max_level=" << g.max_level() << " ncomp=" << g.ncomp()
      << " time=" << detail::fmt_g17(time) << "\n";
  out << "level,pos0,pos1";
  for (int c = 0; c < g.ncomp(); ++c) out << ",u" << c;
  out << "\n";
  for (const CellId& id : g.leaves()) {
    const CellData& cd = g.cell(id);
    out << id.level << "," << id.pos[0] << "," << id.pos[1];
    for (int c = 0; c < g.ncomp(); ++c) out << "," << detail::fmt_g17(cd.avg[c]);
    out << "\n";
  }
}

inline void save_grid(const std::string& path, const Grid& g, double time) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_grid(out, g, time);
  if (!out) throw IoError("write to '" + path + "' failed");
}

struct LoadedGrid {
  Grid grid;
  double time = 0.0;
};

/// Rebuilds a grid from save_grid output.  Tree structure is recovered by
/// requiring every dumped leaf (the graded closure of the leaf set is the
/// original tree); internal averages are restored by projection.
inline LoadedGrid load_grid(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# mrfv-grid", 0) != 0)
    throw IoError("'" + name + "': missing mrfv-grid header");

  auto meta = [&](const std::string& key) {
    const std::string pat = " " + key + "=";
    const auto at = line.find(pat);
    if (at == std::string::npos) throw IoError("'" + name + "': header lacks " + key);
    const auto b = at + pat.size();
    const auto e = line.find(' ', b);
    return line.substr(b, e == std::string::npos ? e : e - b);
  };

  Domain dom;
  dom.dim = static_cast<int>(detail::parse_num(meta("dim"), "dim"));
  dom.roots[0] = static_cast<std::int32_t>(detail::parse_num(meta("rootsx"), "rootsx"));
  dom.roots[1] = static_cast<std::int32_t>(detail::parse_num(meta("rootsy"), "rootsy"));
  dom.lo[0] = detail::parse_num(meta("lox"), "lox");
  dom.lo[1] = detail::parse_num(meta("loy"), "loy");
  dom.hi[0] = detail::parse_num(meta("hix"), "hix");
  dom.hi[1] = detail::parse_num(meta("hiy"), "hiy");
  const int max_level = static_cast<int>(detail::parse_num(meta("max_level"), "max_level"));
  const int ncomp = static_cast<int>(detail::parse_num(meta("ncomp"), "ncomp"));
  const double time = detail::parse_num(meta("time"), "time");

  if (!std::getline(in, line) || line.rfind("level,", 0) != 0)
    throw IoError("'" + name + "': missing column header");

  std::vector<CellId> ids;
  std::vector<std::array<double, kMaxComp>> vals;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tok = detail::split_csv(line);
    if (static_cast<int>(tok.size()) != 3 + ncomp)
      throw IoError("'" + name + "': row has " + std::to_string(tok.size()) + " fields, expected " +
                    std::to_string(3 + ncomp));
    CellId id;
    id.level = static_cast<std::int32_t>(detail::parse_num(tok[0], "level"));
    id.pos[0] = static_cast<std::int32_t>(detail::parse_num(tok[1], "pos0"));
    id.pos[1] = static_cast<std::int32_t>(detail::parse_num(tok[2], "pos1"));
    std::array<double, kMaxComp> u{};
    for (int c = 0; c < ncomp; ++c) u[c] = detail::parse_num(tok[3 + c], "value");
    ids.push_back(id);
    vals.push_back(u);
  }
  if (ids.empty()) throw IoError("'" + name + "': no leaf rows");

  LoadedGrid lg{Grid(dom, max_level, ncomp), time};
  for (const CellId& id : ids) lg.grid.require(id);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!lg.grid.is_leaf(ids[i]))
      throw IoError("'" + name + "': dumped cell " + ids[i].str() + " is not a leaf after rebuild");
    lg.grid.cell(ids[i]).avg = vals[i];
  }
  if (lg.grid.leaves().size() != ids.size())
    throw IoError("'" + name + "': rebuilt tree has " + std::to_string(lg.grid.leaves().size()) +
                  " leaves, file has " + std::to_string(ids.size()));
  lg.grid.project_internal();
  return lg;
}

inline LoadedGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid file '" + path + "'");
  return load_grid(in, path);
}

/// Writes the solution resampled on the full uniform mesh of `level`, one row
/// per cell with cell-center coordinates first.
inline void save_uniform(const std::string& path, const Grid& g, int level, double time) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const Domain& dom = g.domain();
  const std::int64_t nx = dom.cells_along(0, level);
  const std::int64_t ny = dom.dim == 2 ? dom.cells_along(1, level) : 1;
  std::vector<std::vector<double>> fields(g.ncomp());
  for (int c = 0; c < g.ncomp(); ++c) fields[c] = decode_to_level(g, c, level);
  out << "# mrfv-uniform dim=" << dom.dim << " level=" << level << " nx=" << nx << " ny=" << ny
      << " ncomp=" << g.ncomp() << " time=" << detail::fmt_g17(time) << "\n";
  out << (dom.dim == 2 ? "x,y" : "x");
  for (int c = 0; c < g.ncomp(); ++c) out << ",u" << c;
  out << "\n";
  for (std::int64_t jy = 0; jy < ny; ++jy) {
    for (std::int64_t jx = 0; jx < nx; ++jx) {
      CellId id{level, {static_cast<std::int32_t>(jx), static_cast<std::int32_t>(jy)}};
      const auto x = dom.center(id);
      out << detail::fmt_g17(x[0]);
      if (dom.dim == 2) out << "," << detail::fmt_g17(x[1]);
      const std::size_t flat = static_cast<std::size_t>(jy) * nx + jx;
      for (int c = 0; c < g.ncomp(); ++c) out << "," << detail::fmt_g17(fields[c][flat]);
      out << "\n";
    }
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

/// Per-step run log in CSV form.
class StatsLog {
 public:
  StatsLog() = default;

  explicit StatsLog(const std::string& path) : out_(new std::ofstream(path)) {
    if (!*out_) throw IoError("cannot open stats log '" + path + "'");
    *out_ << "step,t,dt,accepted,err,newton_max,lin_max,jac_refresh,halvings,leaves,compression\n";
  }

  bool active() const { return out_ != nullptr; }

  void record(std::int64_t step, double t, double dt, bool accepted, double err, int newton_max,
              int lin_max, int refreshes, int halvings, std::size_t leaves, double compression) {
    if (!out_) return;
    *out_ << step << "," << detail::fmt_g17(t) << "," << detail::fmt_g17(dt) << ","
          << (accepted ? 1 : 0) << "," << detail::fmt_g17(err) << "," << newton_max << ","
          << lin_max << "," << refreshes << "," << halvings << "," << leaves << ","
          << detail::fmt_g17(compression) << "\n";
    out_->flush();
  }

 private:
  std::shared_ptr<std::ofstream> out_;
};

}  // namespace mrfv
