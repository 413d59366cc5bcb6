#pragma once

// Factorization of a pair of epimorphisms beta0, beta: T -> S into a chain
// beta0 = b_0, b_1, ..., b_n = beta of epimorphisms in which consecutive
// maps differ by at most one R-step at every point.
//
// Star condition for beta0, with k = |B(S)|: every branch of S is the image
// of at least k+1 branches of T.

#include <algorithm>
#include <string>
#include <vector>

#include "lelek/core.hpp"
#include "lelek/geometry.hpp"
#include "lelek/morphisms.hpp"
#include "lelek/structures.hpp"

namespace lelek {

struct FactorChain {
  Fan base;     // S
  Fan carrier;  // T
  std::vector<std::vector<NodeId>> steps;
  std::vector<NodeId> order;  // branch enumeration d_1, ..., d_l of T

  std::size_t length() const { return steps.empty() ? 0 : steps.size() - 1; }
  FanMap step(std::size_t i) const { return {carrier, base, steps.at(i)}; }
};

/// True iff at every point the two maps are R^S-related in one direction.
inline bool adjacent(const FanMap& a, const FanMap& b) {
  if (!(a.source == b.source) || !(a.target == b.target) || a.map.size() != b.map.size())
    throw DomainMismatch("adjacent: maps have different domains or codomains");
  for (std::size_t t = 0; t < a.map.size(); ++t)
    if (!a.target.related(a.map[t], b.map[t]) && !a.target.related(b.map[t], a.map[t])) return false;
  return true;
}

/// Branches of `t` whose image is a whole branch of `s`, per branch of `s`.
inline std::vector<std::vector<NodeId>> branches_onto(const FanMap& f) {
  const Fan& t = f.source;
  const Fan& s = f.target;
  std::vector<std::vector<NodeId>> onto(s.width());
  if (s.is_point()) {
    for (NodeId b = 0; b < t.width(); ++b) onto[0].push_back(b);
    return onto;
  }
  for (NodeId b = 0; b < t.width(); ++b) {
    if (t.is_point()) break;
    const NodeId e = f.map[t.endpoint(b)];
    if (e != s.root() && s.depth(e) == s.height()) onto[s.branch(e)].push_back(b);
  }
  return onto;
}

/// True iff every branch of S is the image of at least k+1 branches of T.
inline bool satisfies_star(const FanMap& beta0, NodeId k) {
  for (const auto& list : branches_onto(beta0))
    if (static_cast<NodeId>(list.size()) < k + 1) return false;
  return true;
}

struct StarLift {
  Fan carrier;  // T'
  FanMap lift;  // T' -> T
  FanMap beta0; // beta0 . lift
};

/// Copies every branch of T that maps onto a branch c of S
/// ceil((k+1)/count(c)) times so that beta0 . lift satisfies the star condition.
inline StarLift ensure_star(const FanMap& beta0, NodeId k) {
  if (!is_epimorphism(beta0)) throw NotEpi("ensure_star: beta0 is not an epimorphism");
  const Fan& t = beta0.source;
  if (t.is_point() || satisfies_star(beta0, k)) return {t, identity(t), beta0};
  const auto onto = branches_onto(beta0);
  std::vector<NodeId> copies(t.width(), 1);
  for (const auto& list : onto)
    for (NodeId b : list) {
      const auto cnt = static_cast<NodeId>(list.size());
      copies[b] = std::max(copies[b], (k + 1 + cnt - 1) / cnt);
    }
  NodeId width = 0;
  for (NodeId c : copies) width += c;
  const Fan tp(t.height(), width);
  std::vector<NodeId> lift(tp.size(), 0);
  NodeId next = 0;
  for (NodeId b = 0; b < t.width(); ++b)
    for (NodeId c = 0; c < copies[b]; ++c, ++next)
      for (NodeId j = 1; j <= t.height(); ++j) lift[tp.node(next, j)] = t.node(b, j);
  FanMap l{tp, t, std::move(lift)};
  FanMap b0{tp, beta0.target, compose_maps(beta0.map, l.map)};
  return {tp, std::move(l), std::move(b0)};
}

namespace detail {

// Lexicographically first injective choice d_i in onto[i], i = 1..k.
inline bool first_assignment(const std::vector<std::vector<NodeId>>& onto, NodeId t_width, std::vector<NodeId>& out) {
  const std::size_t k = onto.size();
  out.assign(k, kNoNode);
  std::vector<char> used(t_width, 0);
  // feasibility of rows i..k-1 given `used`, by augmenting paths
  auto feasible = [&](std::size_t from) {
    std::vector<NodeId> owner(t_width, -1);
    for (std::size_t i = from; i < k; ++i) {
      std::vector<char> seen(t_width, 0);
      auto augment = [&](auto&& self, std::size_t row) -> bool {
        for (NodeId b : onto[row]) {
          if (used[b] || seen[b]) continue;
          seen[b] = 1;
          if (owner[b] < 0 || self(self, static_cast<std::size_t>(owner[b]))) {
            owner[b] = static_cast<NodeId>(row);
            return true;
          }
        }
        return false;
      };
      if (!augment(augment, i)) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < k; ++i) {
    bool placed = false;
    for (NodeId b : onto[i]) {
      if (used[b]) continue;
      used[b] = 1;
      if (feasible(i + 1)) {
        out[i] = b;
        placed = true;
        break;
      }
      used[b] = 0;
    }
    if (!placed) return false;
  }
  return true;
}

}  // namespace detail

/// Down-then-up sweep over the branches d_1, ..., d_l: d_i (i <= k) is the
/// lexicographically first choice with beta onto c_i, the remaining
/// branches follow in index order. Requires the star condition for beta0.
inline FactorChain factorize(const FanMap& beta0, const FanMap& beta) {
  if (!(beta0.source == beta.source) || !(beta0.target == beta.target))
    throw DomainMismatch("factorize: maps have different domains or codomains");
  if (!is_epimorphism(beta0) || !is_epimorphism(beta)) throw NotEpi("factorize: inputs must be epimorphisms");
  const Fan& t = beta0.source;
  const Fan& s = beta0.target;
  FactorChain chain{s, t, {beta0.map}, {}};
  if (s.is_point()) {
    for (NodeId b = 0; b < t.width(); ++b) chain.order.push_back(b);
    return chain;
  }
  const NodeId k = s.width();
  if (!satisfies_star(beta0, k)) throw NotOnto("factorize: beta0 fails the star condition; apply ensure_star first");
  std::vector<NodeId> first;
  if (!detail::first_assignment(branches_onto(beta), t.width(), first))
    throw NotOnto("factorize: no branch enumeration with beta onto c_i for every i");
  std::vector<char> taken(t.width(), 0);
  for (NodeId b : first) {
    chain.order.push_back(b);
    taken[b] = 1;
  }
  for (NodeId b = 0; b < t.width(); ++b)
    if (!taken[b]) chain.order.push_back(b);

  std::vector<NodeId> cur = beta0.map;
  for (NodeId d : chain.order) {
    // down: current image (c(0), ..., c(m1)) of d collapses one step per stage
    const NodeId top = cur[t.endpoint(d)];
    const NodeId m1 = top == s.root() ? 0 : s.depth(top);
    const NodeId c = top == s.root() ? 0 : s.branch(top);
    for (NodeId i = 1; i <= m1; ++i) {
      const NodeId from = s.node(c, m1 - i + 1), to = s.node(c, m1 - i);
      for (NodeId j = 1; j <= t.height(); ++j)
        if (cur[t.node(d, j)] == from) cur[t.node(d, j)] = to;
      chain.steps.push_back(cur);
    }
    // up: climb beta's image (c1(0), ..., c1(m2))
    const NodeId goal = beta.map[t.endpoint(d)];
    const NodeId m2 = goal == s.root() ? 0 : s.depth(goal);
    const NodeId c1 = goal == s.root() ? 0 : s.branch(goal);
    for (NodeId i = 1; i <= m2; ++i) {
      for (NodeId j = 1; j <= t.height(); ++j) {
        const NodeId want = beta.map[t.node(d, j)];
        if (want != s.root() && s.depth(want) >= i) cur[t.node(d, j)] = s.node(c1, i);
      }
      chain.steps.push_back(cur);
    }
  }
  return chain;
}

struct ChainReport {
  bool endpoints = true;
  bool epimorphisms = true;
  bool adjacency = true;
  bool length_bound = true;
  std::string witness;
  bool ok() const { return endpoints && epimorphisms && adjacency && length_bound; }
};

inline ChainReport check_chain(const FactorChain& chain, const FanMap& beta0, const FanMap& beta) {
  ChainReport r;
  if (chain.steps.empty() || chain.steps.front() != beta0.map || chain.steps.back() != beta.map) {
    r.endpoints = false;
    r.witness = "chain does not run from beta0 to beta";
  }
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    if (!check(chain.step(i)).epimorphism) {
      r.epimorphisms = false;
      r.witness = "stage " + std::to_string(i) + " is not an epimorphism";
    }
    if (i > 0 && !adjacent(chain.step(i - 1), chain.step(i))) {
      r.adjacency = false;
      r.witness = "stages " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not adjacent";
    }
  }
  const std::size_t bound = 2 * static_cast<std::size_t>(chain.base.height()) * chain.carrier.width();
  if (chain.length() > bound) {
    r.length_bound = false;
    r.witness = "chain length " + std::to_string(chain.length()) + " exceeds " + std::to_string(bound);
  }
  return r;
}

struct LinkReport {
  double max_cell = 0;      // largest cell diameter of the cover
  double displacement = 0;  // largest diam(U_{b_i(t)} u U_{b_{i+1}(t)})
  bool ok() const { return displacement < 2 * max_cell; }
};

/// Cell displacement of a chain whose base is the cover fan of `cover`.
inline LinkReport link_displacement(const FactorChain& chain, const CoverStructure& cover) {
  if (!(chain.base == cover.a)) throw DomainMismatch("link_displacement: chain base is not the cover fan");
  const NodeId size = cover.a.size();
  std::vector<std::vector<Point>> pts(size);
  LinkReport r;
  for (NodeId v = 0; v < size; ++v) {
    pts[v] = cell_samples(cover, v);
    r.max_cell = std::max(r.max_cell, diameter(pts[v]));
  }
  std::vector<std::vector<double>> joint(size, std::vector<double>(size, -1));
  for (std::size_t i = 1; i < chain.steps.size(); ++i)
    for (std::size_t t = 0; t < chain.steps[i].size(); ++t) {
      const NodeId a = chain.steps[i - 1][t], b = chain.steps[i][t];
      if (joint[a][b] < 0) {
        auto u = pts[a];
        u.insert(u.end(), pts[b].begin(), pts[b].end());
        joint[a][b] = diameter(u);
      }
      r.displacement = std::max(r.displacement, joint[a][b]);
    }
  return r;
}

}  // namespace lelek
