#pragma once

// Fans augmented with a binary relation s, the class F+ of such pairs
// that are shadows of automorphisms of the limit, and its joint projection.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lelek/core.hpp"
#include "lelek/fraisse.hpp"
#include "lelek/morphisms.hpp"
#include "lelek/structures.hpp"

namespace lelek {

using NodePair = std::pair<NodeId, NodeId>;

struct SRelation {
  Fan t;
  std::set<NodePair> pairs;

  bool contains(NodeId x, NodeId y) const { return pairs.count({x, y}) != 0; }
  friend bool operator==(const SRelation&, const SRelation&) = default;
};

inline SRelation graph_of(const FanMap& f) {
  if (!(f.source == f.target)) throw DomainMismatch("graph_of: map is not an endomorphism");
  SRelation r{f.source, {}};
  for (NodeId x = 0; x < f.source.size(); ++x) r.pairs.insert({x, f.map[x]});
  return r;
}

inline bool is_surjective_rel(const SRelation& rel) {
  std::vector<char> out(rel.t.size(), 0), in(rel.t.size(), 0);
  for (const auto& [x, y] : rel.pairs) {
    if (x < 0 || y < 0 || x >= rel.t.size() || y >= rel.t.size()) return false;
    out[x] = 1;
    in[y] = 1;
  }
  return std::find(out.begin(), out.end(), 0) == out.end() && std::find(in.begin(), in.end(), 0) == in.end();
}

namespace detail {

// Pairs s-adjacent to (x, y), in lexicographic order.
inline std::vector<NodePair> s_neighbours(const SRelation& rel, NodePair p) {
  std::vector<NodeId> xs{p.first}, ys{p.second};
  rel.t.for_each_child(p.first, [&](NodeId c) { xs.push_back(c); });
  rel.t.for_each_child(p.second, [&](NodeId c) { ys.push_back(c); });
  std::vector<NodePair> out;
  for (NodeId a : xs)
    for (NodeId b : ys)
      if (NodePair{a, b} != p && rel.contains(a, b)) out.emplace_back(a, b);
  std::sort(out.begin(), out.end());
  return out;
}

// BFS tree from (r, r); empty when (r, r) is not in s.
inline std::map<NodePair, NodePair> s_bfs(const SRelation& rel) {
  std::map<NodePair, NodePair> pred;
  const NodePair root{rel.t.root(), rel.t.root()};
  if (!rel.contains(root.first, root.second)) return pred;
  pred[root] = root;
  std::deque<NodePair> queue{root};
  while (!queue.empty()) {
    const NodePair p = queue.front();
    queue.pop_front();
    for (const NodePair& q : s_neighbours(rel, p))
      if (pred.emplace(q, p).second) queue.push_back(q);
  }
  return pred;
}

}  // namespace detail

/// Pairs of s that are s-connected to (r, r).
inline std::set<NodePair> s_connected(const SRelation& rel) {
  std::set<NodePair> out;
  for (const auto& [p, _] : detail::s_bfs(rel)) out.insert(p);
  return out;
}

/// Reason `rel` is not in F+, or nullopt if it is.
inline std::optional<std::string> fplus_refutation(const SRelation& rel) {
  const Fan& t = rel.t;
  if (!rel.contains(t.root(), t.root())) return "(r,r) is not in s";
  for (const auto& [x, y] : rel.pairs)
    if (x < 0 || y < 0 || x >= t.size() || y >= t.size()) return "pair outside the fan";
  if (!is_surjective_rel(rel)) {
    std::vector<char> out(t.size(), 0), in(t.size(), 0);
    for (const auto& [x, y] : rel.pairs) out[x] = in[y] = 1;
    for (NodeId v = 0; v < t.size(); ++v) {
      if (!out[v]) return "no pair (" + t.name(v) + ",_) in s";
      if (!in[v]) return "no pair (_," + t.name(v) + ") in s";
    }
  }
  const auto reach = s_connected(rel);
  for (const auto& p : rel.pairs)
    if (!reach.count(p)) return "(" + t.name(p.first) + "," + t.name(p.second) + ") is not s-connected to (r,r)";
  return std::nullopt;
}

inline bool in_fplus(const SRelation& rel) { return !fplus_refutation(rel).has_value(); }

struct FPlusWitness {
  Fan s;
  FanMap p1, p2;
};

/// One chain of length 2k+2 per pair of s, following the BFS path from
/// (r, r) and then standing still.
inline FPlusWitness fplus_witness(const SRelation& rel) {
  if (auto why = fplus_refutation(rel)) throw NotInFPlus("fplus_witness: " + *why);
  const Fan& t = rel.t;
  const NodeId len = 2 * t.height() + 2;
  const Fan s(len, static_cast<NodeId>(rel.pairs.size()));
  const auto pred = detail::s_bfs(rel);
  std::vector<NodeId> m1(s.size(), 0), m2(s.size(), 0);
  NodeId b = 0;
  for (const NodePair& target : rel.pairs) {
    std::vector<NodePair> path{target};
    while (path.back() != pred.at(path.back())) path.push_back(pred.at(path.back()));
    std::reverse(path.begin(), path.end());
    for (NodeId i = 1; i <= len; ++i) {
      const NodePair& p = path[std::min<std::size_t>(i, path.size() - 1)];
      m1[s.node(b, i)] = p.first;
      m2[s.node(b, i)] = p.second;
    }
    ++b;
  }
  return {s, {s, t, std::move(m1)}, {s, t, std::move(m2)}};
}

/// {(p1(z), p2(z)) : z in S}.
inline std::set<NodePair> realized(const FanMap& p1, const FanMap& p2) {
  std::set<NodePair> out;
  for (NodeId z = 0; z < p1.source.size(); ++z) out.insert({p1.map[z], p2.map[z]});
  return out;
}

/// Search for S in the family and epimorphisms p1, p2: S -> T realizing s
/// exactly, over fans with at most 1 + (2k+2)|s| nodes.
///
/// A pair (p1, p2) on a fan of height h is one walk of length h per branch
/// in T x T, each coordinate an R-homomorphic image of a chain, started at
/// (r, r) since both maps are onto. Walks are enumerated by the definition
/// and kept only while they stay inside s. For each height the visited sets
/// of all walks are merged, a realizing S picks one walk per pair, and the
/// candidate is rebuilt and checked directly.
inline std::optional<FPlusWitness> fplus_oracle_witness(const SRelation& rel) {
  const Fan& t = rel.t;
  const std::size_t n = rel.pairs.size();
  if (n == 0) return std::nullopt;
  const std::size_t bound = 1 + (2 * static_cast<std::size_t>(t.height()) + 2) * n;
  const NodeId root = t.root();

  auto check_candidate = [&](const Fan& s, std::vector<NodeId> m1, std::vector<NodeId> m2) -> std::optional<FPlusWitness> {
    FanMap p1{s, t, std::move(m1)}, p2{s, t, std::move(m2)};
    if (!is_epimorphism(p1) || !is_epimorphism(p2) || realized(p1, p2) != rel.pairs) return std::nullopt;
    return FPlusWitness{s, std::move(p1), std::move(p2)};
  };

  if (auto w = check_candidate(Fan::point(), {root}, {root})) return w;
  // a walk changes position at most 2k times, so heights past 2k+1 only
  // lose width
  const std::size_t last = std::min(bound - 1, 2 * static_cast<std::size_t>(t.height()) + 1);
  for (std::size_t h = 1; h <= last; ++h) {
    const std::size_t width = (bound - 1) / h;
    // walk covering each pair: first one found by depth-first enumeration
    std::map<NodePair, std::vector<NodePair>> cover;
    if (!rel.contains(root, root)) return std::nullopt;
    std::vector<NodePair> walk{{root, root}};
    auto dfs = [&](auto&& self) -> void {
      for (const NodePair& p : walk) cover.emplace(p, walk);
      if (walk.size() == h + 1 || cover.size() == n) return;
      const auto [x, y] = walk.back();
      for (NodeId a = 0; a < t.size(); ++a)
        for (NodeId b = 0; b < t.size(); ++b) {
          if (!t.related(x, a) || !t.related(y, b) || !rel.contains(a, b)) continue;
          if (a == x && b == y) continue;  // standing still adds nothing until padding
          walk.push_back({a, b});
          self(self);
          walk.pop_back();
        }
    };
    dfs(dfs);
    if (cover.size() != n || n > width) continue;
    const Fan s(static_cast<NodeId>(h), static_cast<NodeId>(width));
    std::vector<NodeId> m1(s.size(), root), m2(s.size(), root);
    NodeId b = 0;
    auto place = [&](const std::vector<NodePair>& w) {
      for (std::size_t i = 1; i <= h; ++i) {
        const NodePair& p = w[std::min(i, w.size() - 1)];
        m1[s.node(b, static_cast<NodeId>(i))] = p.first;
        m2[s.node(b, static_cast<NodeId>(i))] = p.second;
      }
      ++b;
    };
    for (const auto& [p, w] : cover) place(w);
    while (b < s.width()) place(cover.begin()->second);
    if (auto w = check_candidate(s, std::move(m1), std::move(m2))) return w;
  }
  return std::nullopt;
}

inline bool fplus_oracle(const SRelation& rel) { return fplus_oracle_witness(rel).has_value(); }

/// Image of s under a fan map; equality with the target relation makes f
/// an epimorphism of the augmented structures (given f is an epimorphism).
inline bool is_rel_epimorphism(const FanMap& f, const SRelation& src, const SRelation& dst) {
  if (!(f.source == src.t) || !(f.target == dst.t) || !is_epimorphism(f)) return false;
  std::set<NodePair> image;
  for (const auto& [x, y] : src.pairs) image.insert({f.map[x], f.map[y]});
  return image == dst.pairs;
}

struct FPlusJoint {
  SRelation joint;
  FanMap first;   // joint -> T1
  FanMap second;  // joint -> T2
};

/// Root-identified union; on each part s is the preimage of s_i under the
/// padded projection, which is s_i itself when no padding is needed.
inline FPlusJoint fplus_jpp(const SRelation& r1, const SRelation& r2) {
  if (auto why = fplus_refutation(r1)) throw NotInFPlus("fplus_jpp: first input: " + *why);
  if (auto why = fplus_refutation(r2)) throw NotInFPlus("fplus_jpp: second input: " + *why);
  auto j = jpp(r1.t, r2.t);
  const Fan& t = j.joint;
  const NodeId w1 = r1.t.is_point() ? 0 : r1.t.width();
  SRelation s{t, {}};
  auto part = [&](NodeId v, int which) {
    if (v == t.root()) return true;
    return (t.branch(v) < w1) == (which == 1);
  };
  for (NodeId x = 0; x < t.size(); ++x)
    for (NodeId y = 0; y < t.size(); ++y) {
      if (part(x, 1) && part(y, 1) && r1.contains(j.first.map[x], j.first.map[y])) s.pairs.insert({x, y});
      if (part(x, 2) && part(y, 2) && r2.contains(j.second.map[x], j.second.map[y])) s.pairs.insert({x, y});
    }
  return {std::move(s), std::move(j.first), std::move(j.second)};
}

}  // namespace lelek
