#pragma once

// Planar model of the Cantor fan: a point (c, y) with c in the middle-thirds
// Cantor set and y in [0,1] sits at (y * c, y); y = 0 is the apex. Nodes of
// an envelope level S_n get cells (Cantor cylinder) x (vertical interval)
// that nest along the bonds.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "lelek/core.hpp"
#include "lelek/sequence.hpp"
#include "lelek/structures.hpp"

namespace lelek {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw DomainMismatch("rational with zero denominator");
    if (den < 0) num = -num, den = -den;
    const auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) num /= g, den /= g;
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t l = std::lcm(a.den, b.den);
    return {a.num * (l / a.den) + b.num * (l / b.den), l};
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num, b.den); }
  friend Rational operator*(const Rational& a, const Rational& b) { return {a.num * b.num, a.den * b.den}; }
};

/// Digit substitution 0 -> 0, 2 -> 1 from ternary Cantor codes to binary.
inline std::string cantor_to_binary(std::string_view ternary) {
  std::string out(ternary.size(), '0');
  for (std::size_t i = 0; i < ternary.size(); ++i) {
    if (ternary[i] == '2') out[i] = '1';
    else if (ternary[i] != '0') throw DomainMismatch("cantor code digits must be 0 or 2");
  }
  return out;
}

namespace detail {
inline Rational digits_value(std::string_view digits, std::int64_t base, char one, std::int64_t one_value) {
  if (digits.size() > 38) throw DomainMismatch("code too long for an exact value");
  std::int64_t num = 0, den = 1;
  for (char d : digits) {
    num = num * base + (d == one ? one_value : 0);
    den *= base;
  }
  return {num, den};
}
}  // namespace detail

/// 0.d1 d2 ... in base 3 for a {0,2} code, exactly.
inline Rational cantor_value(std::string_view ternary) { return detail::digits_value(ternary, 3, '2', 2); }
inline Rational binary_value(std::string_view bits) { return detail::digits_value(bits, 2, '1', 1); }

inline double cantor_point(std::string_view code) {
  double v = 0, scale = 1;
  for (char d : code) {
    scale /= 3;
    if (d == '2') v += 2 * scale;
  }
  return v;
}

struct Point {
  double x = 0, y = 0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Convex hull of a cell: corners (lo*a, lo), (lo*b, lo), (hi*b, hi), (hi*a, hi)
/// where [a, b] is the span of the Cantor cylinder.
using Quad = std::array<Point, 4>;

namespace detail {

inline double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 == 0 ? 0 : ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

inline double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

}  // namespace detail

/// Distance from p to a convex quadrilateral (vertices in order, possibly
/// repeated).
inline double distance(Point p, const Quad& q) {
  bool pos = false, neg = false;
  for (int i = 0; i < 4; ++i) {
    const Point a = q[i], b = q[(i + 1) % 4];
    if (a.x == b.x && a.y == b.y) continue;
    const double c = detail::cross(a, b, p);
    if (c > 1e-15) pos = true;
    if (c < -1e-15) neg = true;
  }
  if (!(pos && neg)) {
    // on the inner side of every edge; still reject points off a segment
    // when the quad degenerates to a line
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) best = std::min(best, detail::segment_distance(p, q[i], q[(i + 1) % 4]));
    const double area = std::abs(detail::cross(q[0], q[1], q[2])) + std::abs(detail::cross(q[0], q[2], q[3]));
    if (area > 0 || best == 0) return 0;
    return best;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) best = std::min(best, detail::segment_distance(p, q[i], q[(i + 1) % 4]));
  return best;
}

/// sup over points of `from` of the distance to `to`; both convex, so the
/// sup is attained at a corner of `from`.
inline double directed_hausdorff(const Quad& from, const Quad& to) {
  double worst = 0;
  for (const Point& p : from) worst = std::max(worst, distance(p, to));
  return worst;
}

/// Cells of the nodes of one envelope level. A node's horizontal code is the
/// code of its branch; the root's code is empty and its cell is the cone
/// over the whole Cantor set up to height hi[root].
struct CellAssignment {
  NodeId level = 0;
  Spider shape;
  std::vector<std::string> branch_code;
  std::vector<double> lo, hi;

  const std::string& code(NodeId v) const {
    static const std::string empty;
    return v == shape.root() ? empty : branch_code[shape.branch(v)];
  }
  double y(NodeId v) const { return (lo[v] + hi[v]) / 2; }
  Point point(NodeId v) const {
    if (v == shape.root()) return {0, 0};
    const double yy = y(v);
    return {yy * cantor_point(code(v)), yy};
  }
  Quad cell(NodeId v) const {
    const std::string& c = code(v);
    const double a = cantor_point(c);
    const double b = a + std::pow(3.0, -static_cast<double>(c.size()));
    return {Point{lo[v] * a, lo[v]}, Point{lo[v] * b, lo[v]}, Point{hi[v] * b, hi[v]}, Point{hi[v] * a, hi[v]}};
  }
  double mesh() const {
    double m = 0;
    for (std::size_t v = 0; v < lo.size(); ++v) m = std::max(m, hi[v] - lo[v]);
    return m;
  }
};

namespace detail {

inline CellAssignment initial_cells(const Spider& s0) {
  CellAssignment c{0, s0, std::vector<std::string>(s0.width()), std::vector<double>(s0.size(), 0.0),
                   std::vector<double>(s0.size(), 1.0)};
  // a non-point S_0 (only from hand-made envelopes): split [0,1] evenly by depth
  if (s0.size() > 1) {
    c.hi[0] = 0.5;
    for (NodeId b = 0; b < s0.width(); ++b) {
      const NodeId len = s0.length(b);
      for (NodeId d = 1; d <= len; ++d) {
        c.lo[s0.node(b, d)] = 0.5 + 0.5 * (d - 1) / len;
        c.hi[s0.node(b, d)] = d == len ? 1.0 : 0.5 + 0.5 * d / len;
      }
    }
    for (NodeId b = 0; b < s0.width(); ++b) {
      std::string code;
      NodeId digits = 0;
      while ((NodeId{1} << digits) < s0.width()) ++digits;
      for (NodeId k = digits - 1; k >= 0; --k) code += (b >> k) & 1 ? '2' : '0';
      c.branch_code[b] = code;
    }
  }
  return c;
}

// Level n+1 from level n: the root keeps the lower half of its interval;
// each maximal run of a branch with a common image y splits y's interval
// (the part above the root's new interval when y is the root) into equal
// pieces in depth order. Branches onto the same branch of S_n extend its
// code by the binary index among those siblings, written in {0,2}.
inline CellAssignment next_cells(const CellAssignment& prev, const Spider& upper, const std::vector<NodeId>& g) {
  const Spider& lower = prev.shape;
  CellAssignment c{prev.level + 1, upper, std::vector<std::string>(upper.width()), std::vector<double>(upper.size()),
                   std::vector<double>(upper.size())};
  const double root_hi = prev.hi[0] / 2;
  c.lo[0] = 0;
  c.hi[0] = root_hi;

  std::vector<NodeId> onto(upper.width(), 0), sibling(upper.width(), 0), siblings(lower.width(), 0);
  for (NodeId b = 0; b < upper.width(); ++b) {
    const NodeId e = g[upper.endpoint(b)];
    onto[b] = e == lower.root() ? 0 : lower.branch(e);
    sibling[b] = siblings[onto[b]]++;
  }
  for (NodeId b = 0; b < upper.width(); ++b) {
    NodeId digits = 0;
    while ((NodeId{1} << digits) < siblings[onto[b]]) ++digits;
    std::string code = prev.branch_code[onto[b]];
    for (NodeId k = digits - 1; k >= 0; --k) code += (sibling[b] >> k) & 1 ? '2' : '0';
    c.branch_code[b] = std::move(code);
  }

  for (NodeId b = 0; b < upper.width(); ++b) {
    const NodeId len = upper.length(b);
    NodeId d = 1;
    while (d <= len) {
      const NodeId y = g[upper.node(b, d)];
      NodeId e = d;
      while (e + 1 <= len && g[upper.node(b, e + 1)] == y) ++e;
      const NodeId run = e - d + 1;
      const double base = y == lower.root() ? root_hi : prev.lo[y];
      const double top = prev.hi[y];
      for (NodeId k = 0; k < run; ++k) {
        const NodeId v = upper.node(b, d + k);
        c.lo[v] = k == 0 ? base : base + (top - base) * k / run;
        c.hi[v] = k + 1 == run ? top : base + (top - base) * (k + 1) / run;
      }
      d = e + 1;
    }
  }
  return c;
}

}  // namespace detail

/// Calls f(level, cells) for every level 0..n in order.
template <class F>
void for_each_cells(const Envelope& env, NodeId n, F&& f) {
  if (n < 0 || n > env.depth()) throw DomainMismatch("cells: level exceeds built depth");
  CellAssignment c = detail::initial_cells(env.levels[0]);
  f(NodeId{0}, static_cast<const CellAssignment&>(c));
  for (NodeId k = 0; k < n; ++k) {
    c = detail::next_cells(c, env.levels[k + 1], env.bonds[k]);
    f(k + 1, static_cast<const CellAssignment&>(c));
  }
}

inline CellAssignment cells(const Envelope& env, NodeId n) {
  CellAssignment out;
  for_each_cells(env, n, [&](NodeId k, const CellAssignment& c) {
    if (k == n) out = c;
  });
  return out;
}

struct CellReport {
  bool nesting = true;
  bool tiling = true;
  std::string witness;
};

inline void check_tiling(const CellAssignment& c, CellReport& r) {
  const Spider& s = c.shape;
  if (c.lo[0] != 0) r.tiling = false;
  for (NodeId b = 0; b < s.width() && r.tiling; ++b) {
    double at = c.hi[0];
    for (NodeId d = 1; d <= s.length(b); ++d) {
      const NodeId v = s.node(b, d);
      if (c.lo[v] != at || !(c.hi[v] > c.lo[v])) {
        r.tiling = false;
        r.witness = "gap or overlap at " + s.name(v);
        break;
      }
      at = c.hi[v];
    }
    if (r.tiling && s.length(b) > 0 && at != 1.0) {
      r.tiling = false;
      r.witness = "branch " + std::to_string(b + 1) + " stops below 1";
    }
  }
}

/// Exact nesting of every cell of `upper` in the cell of its image, and
/// tiling of [0,1] by the root and each branch in depth order.
inline CellReport check_cells(const CellAssignment& lower, const CellAssignment& upper, const std::vector<NodeId>& g) {
  CellReport r;
  const Spider& s = upper.shape;
  for (NodeId v = 0; v < s.size() && r.nesting; ++v) {
    const NodeId y = g[v];
    const std::string& cy = lower.code(y);
    const std::string& cv = upper.code(v);
    const bool code_ok = y == lower.shape.root() || cv.compare(0, cy.size(), cy) == 0;
    if (!code_ok || upper.lo[v] < lower.lo[y] || upper.hi[v] > lower.hi[y]) {
      r.nesting = false;
      r.witness = "cell of " + s.name(v) + " not inside cell of " + lower.shape.name(y);
    }
  }
  check_tiling(upper, r);
  return r;
}

namespace detail {
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}
}  // namespace detail

/// SVG of level n. The nodes of a branch all lie on the ray of its code, so
/// each branch is the polyline apex -> endpoint; endpoints are dotted.
inline std::string render(const CellAssignment& c) {
  const Spider& s = c.shape;
  const double stroke = 0.004 / (1 + c.level);
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1 0 2 1\" width=\"800\" height=\"400\">\n";
  out += "<g stroke=\"black\" stroke-width=\"" + detail::fmt(stroke) + "\" fill=\"none\">\n";
  std::string dots;
  const std::string r = detail::fmt(2.5 * stroke);
  if (s.size() == 1) dots += "<circle cx=\"0.000000\" cy=\"0.000000\" r=\"" + r + "\"/>\n";
  for (NodeId b = 0; b < s.width(); ++b) {
    if (s.length(b) == 0) continue;
    const Point p = c.point(s.endpoint(b));
    out += "<polyline points=\"0.000000,0.000000 " + detail::fmt(p.x) + "," + detail::fmt(p.y) + "\"/>\n";
    dots += "<circle cx=\"" + detail::fmt(p.x) + "\" cy=\"" + detail::fmt(p.y) + "\" r=\"" + r + "\"/>\n";
  }
  out += "</g>\n<g fill=\"black\">\n" + dots + "</g>\n</svg>\n";
  return out;
}

inline std::string render(const Envelope& env, NodeId n) { return render(cells(env, n)); }

/// Gap between the nodes of T_n and the leaves of T_m: for each node x of
/// T_n, the least directed Hausdorff distance from the cell of a leaf l of
/// T_m with f^m_n(l) >= x to the cell of x; the maximum over x.
inline double endpoint_gap(const Envelope& env, NodeId n, NodeId m) {
  if (n < 0 || n > m || m > env.depth()) throw DomainMismatch("endpoint_gap: need 0 <= n <= m <= depth");
  const Spider& sn = env.levels[n];
  const Spider& sm = env.levels[m];
  struct Leaf {
    NodeId image;
    Quad cell;
  };
  std::vector<std::vector<Leaf>> by_branch(sn.width());
  std::vector<Leaf> at_root;
  CellAssignment cn;
  for_each_cells(env, m, [&](NodeId k, const CellAssignment& c) {
    if (k == n) cn = c;
    if (k != m) return;
    for (NodeId b = 0; b < env.t_width[m]; ++b) {
      const NodeId leaf = sm.node(b, env.t_height[m]);
      NodeId y = leaf;
      for (NodeId j = m; j > n; --j) y = env.bonds[j - 1][y];
      Leaf l{y, c.cell(leaf)};
      if (y == sn.root()) at_root.push_back(l);
      else by_branch[sn.branch(y)].push_back(l);
    }
  });
  double gap = 0;
  auto consider = [&](NodeId x, const std::vector<Leaf>& leaves, double& best) {
    const Quad cx = cn.cell(x);
    for (const Leaf& l : leaves)
      if (x == sn.root() || sn.depth(l.image) >= sn.depth(x)) best = std::min(best, directed_hausdorff(l.cell, cx));
  };
  {
    double best = std::numeric_limits<double>::infinity();
    consider(sn.root(), at_root, best);
    for (const auto& leaves : by_branch) consider(sn.root(), leaves, best);
    gap = std::max(gap, best);
  }
  for (NodeId b = 0; b < env.t_width[n]; ++b)
    for (NodeId d = 1; d <= env.t_height[n]; ++d) {
      double best = std::numeric_limits<double>::infinity();
      consider(sn.node(b, d), by_branch[b], best);
      gap = std::max(gap, best);
    }
  return gap;
}

/// For each node x of S_m, the number of y != x such that some edge of S_n
/// projects onto the pair {x, y}; an edge at the root of S_m only counts
/// when it comes from the root of S_n.
inline std::vector<NodeId> pair_survival(const Envelope& env, NodeId m, NodeId n) {
  if (m < 0 || m > n || n > env.depth()) throw DomainMismatch("pair_survival: need 0 <= m <= n <= depth");
  const Spider& sm = env.levels[m];
  const Spider& sn = env.levels[n];
  const auto proj = env.project(n, m);
  // realized[v]: the edge (parent(v), v) of S_m is the image of an edge
  std::vector<char> realized(sm.size(), 0);
  for (NodeId v = 1; v < sn.size(); ++v) {
    const NodeId p = sn.parent(v);
    const NodeId a = proj[p], b = proj[v];
    if (a == b) continue;
    if (a == sm.root() && p != sn.root()) continue;
    realized[b] = 1;
  }
  std::vector<NodeId> count(sm.size(), 0);
  for (NodeId v = 1; v < sm.size(); ++v)
    if (realized[v]) {
      ++count[v];
      ++count[sm.parent(v)];
    }
  return count;
}

/// Open cover of the model Cantor fan indexed by the fan A of height n-1
/// and width m: node (branch j, depth i-1) of A owns V_j x O_i, the root
/// owns the apex region C x O_1.
struct CoverStructure {
  NodeId n = 0, m = 0;
  Fan a;
  std::vector<std::pair<Rational, Rational>> intervals;  // O_1..O_n, open in [0,1]
  std::vector<std::vector<std::string>> clopens;         // V_1..V_m as unions of cylinders
  NodeId cylinder_depth = 0;
  Rational eps;

  NodeId interval_of(NodeId v) const { return v == a.root() ? 1 : a.depth(v) + 1; }
  NodeId clopen_of(NodeId v) const { return v == a.root() ? 0 : a.branch(v) + 1; }
};

/// O_i = ((4i-5)/(4n), (4i+1)/(4n)) clipped to [0,1]; V_j are the first m-1
/// cylinders of depth ceil(log2 m) and V_m the rest.
inline CoverStructure cover_cantor(NodeId n, NodeId m) {
  if (n < 2 || m < 1) throw DomainMismatch("cover_cantor: need n >= 2 and m >= 1");
  CoverStructure c;
  c.n = n;
  c.m = m;
  c.a = Fan(n - 1, m);
  const std::int64_t q = 4 * static_cast<std::int64_t>(n);
  for (NodeId i = 1; i <= n; ++i) {
    const std::int64_t lo = std::max<std::int64_t>(4 * (i - 1) - 1, 0);
    const std::int64_t hi = std::min<std::int64_t>(4 * i + 1, q);
    c.intervals.emplace_back(Rational(lo, q), Rational(hi, q));
  }
  while ((NodeId{1} << c.cylinder_depth) < m) ++c.cylinder_depth;
  const NodeId cylinders = NodeId{1} << c.cylinder_depth;
  c.clopens.resize(m);
  for (NodeId k = 0; k < cylinders; ++k) {
    std::string code;
    for (NodeId d = c.cylinder_depth - 1; d >= 0; --d) code += (k >> d) & 1 ? '2' : '0';
    c.clopens[std::min(k, m - 1)].push_back(code);
  }
  Rational longest(0);
  for (const auto& [lo, hi] : c.intervals) longest = std::max(longest, hi - lo);
  std::int64_t pow3 = 1;
  for (NodeId d = 0; d < c.cylinder_depth; ++d) pow3 *= 3;
  Rational widest(0);
  for (const auto& v : c.clopens) {
    // a union of consecutive cylinders spans from the first left end to the
    // last right end
    widest = std::max(widest, cantor_value(v.back()) + Rational(1, pow3) - cantor_value(v.front()));
  }
  const Rational big = std::max(longest, widest);
  c.eps = Rational(3) * big;
  return c;
}

struct CoverReport {
  bool c1 = true, c2 = true, c3 = true, c4 = true;
  std::size_t samples = 0;
  std::string witness;
  bool ok() const { return c1 && c2 && c3 && c4; }
};

namespace detail {

struct Sample {
  std::string code;  // Cantor cylinder of depth cylinder_depth + 1
  NodeId k;          // y = k / (8n)
};

inline bool in_interval(const CoverStructure& c, NodeId i, NodeId k) {
  // O_i in units of 1/(8n) is (2*lo, 2*hi), closed at 0 and 1
  const auto& [lo, hi] = c.intervals[i - 1];
  const std::int64_t q = 8 * static_cast<std::int64_t>(c.n);
  const std::int64_t a = lo.num * (q / lo.den), b = hi.num * (q / hi.den);
  return (k > a || (a == 0 && k == 0)) && (k < b || (b == q && k == q));
}

inline bool in_cell(const CoverStructure& c, NodeId v, const Sample& s) {
  if (v == c.a.root()) return in_interval(c, 1, s.k);
  if (s.k == 0) return false;  // the apex is one point, owned by the root
  if (!in_interval(c, c.interval_of(v), s.k)) return false;
  for (const auto& cyl : c.clopens[c.clopen_of(v) - 1])
    if (s.code.compare(0, cyl.size(), cyl) == 0) return true;
  return false;
}

inline Point sample_point(const CoverStructure& c, const Sample& s, bool right_end) {
  const double y = static_cast<double>(s.k) / (8.0 * c.n);
  double x = cantor_point(s.code);
  if (right_end) x += std::pow(3.0, -static_cast<double>(s.code.size()));
  return {y * x, y};
}

}  // namespace detail

namespace detail {

inline std::vector<Sample> cover_samples(const CoverStructure& c) {
  std::vector<Sample> samples;
  const NodeId depth = c.cylinder_depth + 1;
  for (NodeId code = 0; code < (NodeId{1} << depth); ++code) {
    std::string s;
    for (NodeId d = depth - 1; d >= 0; --d) s += (code >> d) & 1 ? '2' : '0';
    for (NodeId k = 0; k <= 8 * c.n; ++k) samples.push_back({s, k});
  }
  return samples;
}

}  // namespace detail

/// Sample points of the cell of v on the check grid (both ends of each
/// Cantor cylinder).
inline std::vector<Point> cell_samples(const CoverStructure& c, NodeId v) {
  std::vector<Point> pts;
  for (const auto& s : detail::cover_samples(c))
    if (detail::in_cell(c, v, s)) {
      pts.push_back(detail::sample_point(c, s, false));
      pts.push_back(detail::sample_point(c, s, true));
    }
  return pts;
}

inline double diameter(const std::vector<Point>& pts) {
  double diam = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) diam = std::max(diam, distance(pts[i], pts[j]));
  return diam;
}

/// Checks (C1)-(C4) on the grid y = k/(8n) times the Cantor cylinders one
/// level finer than the clopens (both ends of each cylinder for diameters).
inline CoverReport check_cover(const CoverStructure& c) {
  CoverReport r;
  const auto samples = detail::cover_samples(c);
  r.samples = samples.size();
  const NodeId size = c.a.size();
  std::vector<std::vector<char>> member(samples.size(), std::vector<char>(size, 0));
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (NodeId v = 0; v < size; ++v) member[i][v] = detail::in_cell(c, v, samples[i]);

  auto fail = [&](bool& flag, std::string why) {
    if (flag) r.witness += why + "\n";
    flag = false;
  };
  // C1 (plus covering)
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (std::find(member[i].begin(), member[i].end(), 1) == member[i].end())
      fail(r.c1, "uncovered sample at y=" + std::to_string(samples[i].k) + "/" + std::to_string(8 * c.n));
  for (NodeId v = 0; v < size; ++v) {
    const double diam = diameter(cell_samples(c, v));
    if (!(diam < c.eps.value())) fail(r.c1, "cell " + c.a.name(v) + " has diameter " + std::to_string(diam));
  }
  // C2: intersecting cells have R_S-related indices
  auto rs = [&](NodeId a, NodeId b) { return c.a.related(a, b) || c.a.related(b, a); };
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (NodeId a = 0; a < size; ++a)
      for (NodeId b = a + 1; b < size; ++b)
        if (member[i][a] && member[i][b] && !rs(a, b)) fail(r.c2, c.a.name(a) + " meets " + c.a.name(b));
  // C3: y on the segment [apex, x], y in U_a, x in U_b, {x,y} not inside
  // U_a and U_b, a != b  =>  a <= b
  auto below_or_equal = [&](NodeId a, NodeId b) {
    if (a == c.a.root()) return true;
    return b != c.a.root() && c.a.branch(a) == c.a.branch(b) && c.a.depth(a) <= c.a.depth(b);
  };
  const std::size_t per_code = static_cast<std::size_t>(8 * c.n + 1);
  for (std::size_t base = 0; base < samples.size(); base += per_code)
    for (std::size_t xi = base; xi < base + per_code; ++xi)
      for (std::size_t yi = base; yi <= xi; ++yi)
        for (NodeId a = 0; a < size; ++a) {
          if (!member[yi][a]) continue;
          for (NodeId b = 0; b < size; ++b) {
            if (!member[xi][b] || a == b) continue;
            const bool both = member[xi][a] && member[yi][b];
            if (!both && !below_or_equal(a, b))
              fail(r.c3, "y in " + c.a.name(a) + ", x in " + c.a.name(b));
          }
        }
  // C4: a private point per cell
  for (NodeId v = 0; v < size; ++v) {
    bool found = false;
    for (std::size_t i = 0; i < samples.size() && !found; ++i)
      found = member[i][v] && std::count(member[i].begin(), member[i].end(), 1) == 1;
    if (!found) fail(r.c4, "cell " + c.a.name(v) + " has no private point");
  }
  return r;
}

}  // namespace lelek
