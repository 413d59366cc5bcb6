#pragma once

// Constructive witnesses for the axioms of the family of finite fans: the
// joint projection property (jpp), amalgamation (amalgamate) and the
// finite-depth extension property (lift_through / extend).

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lelek/core.hpp"
#include "lelek/morphisms.hpp"
#include "lelek/structures.hpp"

namespace lelek {

struct JointProjection {
  Fan joint;
  FanMap first;   // joint -> S1
  FanMap second;  // joint -> S2
};

/// Root-identified union of two fans. Branches of the shorter fan are padded
/// to the common height by repeating their endpoint. A single-point operand
/// contributes no branch (it is absorbed by the root).
inline JointProjection jpp(const Fan& s1, const Fan& s2) {
  if (s1.is_point() && s2.is_point()) return {Fan::point(), identity(s1), identity(s2)};
  const NodeId w1 = s1.is_point() ? 0 : s1.width();
  const NodeId w2 = s2.is_point() ? 0 : s2.width();
  const Fan t(std::max(s1.height(), s2.height()), w1 + w2);
  std::vector<NodeId> m1(t.size(), 0), m2(t.size(), 0);
  for (NodeId i = 0; i < t.width(); ++i) {
    for (NodeId d = 1; d <= t.height(); ++d) {
      const NodeId v = t.node(i, d);
      if (i < w1)
        m1[v] = s1.node(i, std::min(d, s1.height()));
      else
        m2[v] = s2.node(i - w1, std::min(d, s2.height()));
    }
  }
  return {t, {t, s1, std::move(m1)}, {t, s2, std::move(m2)}};
}

/// One chain of the amalgam: a monotone walk through positions
/// (depth on a branch of Q, depth on a branch of S) whose two images in P
/// agree at every step.
struct ProductWalk {
  enum class Side { Q, S };
  Side traced = Side::Q;  // the side whose branch the walk covers completely
  NodeId q_branch = 0;
  NodeId s_branch = 0;
  std::vector<std::pair<NodeId, NodeId>> positions;

  NodeId length() const { return static_cast<NodeId>(positions.size()) - 1; }
};

struct AmalgamWitness {
  Fan joint;
  FanMap to_q;  // joint -> Q
  FanMap to_s;  // joint -> S
  std::vector<ProductWalk> walks;
};

namespace detail {

// e1 <=_P e2 on a fan.
inline bool fan_below_or_equal(const Fan& p, NodeId e1, NodeId e2) {
  if (e1 == 0) return true;
  if (e2 == 0) return false;
  return p.branch(e1) == p.branch(e2) && p.depth(e1) <= p.depth(e2);
}

// Shortest walk from (0,0) until the traced side reaches its branch end.
// Moves are tried in the order q-advance, diagonal, s-advance; the first
// discovery of a position fixes its predecessor.
inline std::optional<ProductWalk> shortest_product_walk(const FanMap& phi1, NodeId qb, const FanMap& phi2, NodeId sb,
                                                        ProductWalk::Side traced) {
  const Fan& q = phi1.source;
  const Fan& s = phi2.source;
  const NodeId hq = q.height(), hs = s.height();
  auto compatible = [&](NodeId i, NodeId j) { return phi1(q.node(qb, i)) == phi2(s.node(sb, j)); };
  auto goal = [&](NodeId i, NodeId j) { return traced == ProductWalk::Side::Q ? i == hq : j == hs; };
  auto key = [&](NodeId i, NodeId j) { return static_cast<std::size_t>(i) * (hs + 1) + j; };

  std::vector<std::int64_t> pred((hq + 1) * static_cast<std::size_t>(hs + 1), -2);
  std::deque<std::pair<NodeId, NodeId>> queue;
  if (!compatible(0, 0)) return std::nullopt;
  pred[key(0, 0)] = -1;
  queue.emplace_back(0, 0);
  std::optional<std::pair<NodeId, NodeId>> found;
  if (goal(0, 0)) found = std::pair<NodeId, NodeId>{0, 0};
  while (!found && !queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    const std::pair<NodeId, NodeId> moves[] = {{i + 1, j}, {i + 1, j + 1}, {i, j + 1}};
    for (const auto& [ni, nj] : moves) {
      if (ni > hq || nj > hs || pred[key(ni, nj)] != -2 || !compatible(ni, nj)) continue;
      pred[key(ni, nj)] = static_cast<std::int64_t>(key(i, j));
      if (goal(ni, nj)) {
        found = std::pair<NodeId, NodeId>{ni, nj};
        break;
      }
      queue.emplace_back(ni, nj);
    }
  }
  if (!found) return std::nullopt;
  ProductWalk walk{traced, qb, sb, {}};
  for (std::int64_t k = static_cast<std::int64_t>(key(found->first, found->second)); k >= 0; k = pred[k]) {
    walk.positions.emplace_back(static_cast<NodeId>(k / (hs + 1)), static_cast<NodeId>(k % (hs + 1)));
  }
  std::reverse(walk.positions.begin(), walk.positions.end());
  return walk;
}

}  // namespace detail

/// Amalgamation of two epimorphisms phi1: Q -> P and phi2: S -> P over a
/// common fan P. Returns a fan T with epimorphisms psi1: T -> Q and
/// psi2: T -> S such that phi1 . psi1 == phi2 . psi2.
///
/// Each branch b of Q is paired with the first branch c of S whose image
/// contains phi1(b); the chain over b is the shortest compatible walk in
/// the product of b and c. Branches of S are handled symmetrically. All
/// chains are padded to a common length by repeating their last position.
inline AmalgamWitness amalgamate(const FanMap& phi1, const FanMap& phi2) {
  if (!(phi1.target == phi2.target)) throw DomainMismatch("amalgamate: epimorphisms have different targets");
  if (!is_epimorphism(phi1) || !is_epimorphism(phi2)) throw NotEpi("amalgamate: inputs must be epimorphisms");
  const Fan& q = phi1.source;
  const Fan& s = phi2.source;
  const Fan& p = phi1.target;

  std::vector<ProductWalk> walks;
  for (NodeId b = 0; b < q.width(); ++b) {
    const NodeId e1 = phi1(q.endpoint(b));
    NodeId partner = kNoNode;
    for (NodeId c = 0; c < s.width() && partner == kNoNode; ++c)
      if (detail::fan_below_or_equal(p, e1, phi2(s.endpoint(c)))) partner = c;
    auto walk = partner == kNoNode ? std::nullopt
                                   : detail::shortest_product_walk(phi1, b, phi2, partner, ProductWalk::Side::Q);
    if (!walk) throw NotEpi("amalgamate: no compatible branch (inputs are not epimorphisms)");
    walks.push_back(std::move(*walk));
  }
  for (NodeId c = 0; c < s.width(); ++c) {
    const NodeId e2 = phi2(s.endpoint(c));
    NodeId partner = kNoNode;
    for (NodeId b = 0; b < q.width() && partner == kNoNode; ++b)
      if (detail::fan_below_or_equal(p, e2, phi1(q.endpoint(b)))) partner = b;
    auto walk = partner == kNoNode ? std::nullopt
                                   : detail::shortest_product_walk(phi1, partner, phi2, c, ProductWalk::Side::S);
    if (!walk) throw NotEpi("amalgamate: no compatible branch (inputs are not epimorphisms)");
    walks.push_back(std::move(*walk));
  }

  NodeId height = 0;
  for (const auto& w : walks) height = std::max(height, w.length());
  const Fan t = height == 0 ? Fan::point() : Fan(height, static_cast<NodeId>(walks.size()));
  std::vector<NodeId> to_q(t.size(), 0), to_s(t.size(), 0);
  for (NodeId i = 0; height > 0 && i < t.width(); ++i) {
    const auto& w = walks[i];
    for (NodeId d = 1; d <= height; ++d) {
      const auto& [qi, sj] = w.positions[std::min<std::size_t>(d, w.positions.size() - 1)];
      to_q[t.node(i, d)] = q.node(w.q_branch, qi);
      to_s[t.node(i, d)] = s.node(w.s_branch, sj);
    }
  }
  return {t, {t, q, std::move(to_q)}, {t, s, std::move(to_s)}, std::move(walks)};
}

namespace detail {

// Lexicographically first walk on branch `tb` of T through B with
// phi1(image) == g at every depth, ending at a node accepted by `end_ok`.
template <class EndOk>
std::optional<std::vector<NodeId>> first_branch_lift(const FanMap& phi1, const Fan& t, const std::vector<NodeId>& g,
                                                     NodeId tb, EndOk&& end_ok) {
  const Fan& b = phi1.source;
  const NodeId k = t.height();
  const NodeId nb = b.size();
  std::vector<char> feasible(static_cast<std::size_t>(k + 1) * nb, 0);
  auto at = [&](NodeId j, NodeId x) -> char& { return feasible[static_cast<std::size_t>(j) * nb + x]; };
  for (NodeId x = 0; x < nb; ++x) at(k, x) = phi1(x) == g[t.node(tb, k)] && end_ok(x);
  for (NodeId j = k - 1; j >= 0; --j) {
    const NodeId want = g[t.node(tb, j)];
    for (NodeId x = 0; x < nb; ++x) {
      if (phi1(x) != want) continue;
      bool ok = at(j + 1, x);
      b.for_each_child(x, [&](NodeId y) { ok = ok || at(j + 1, y); });
      at(j, x) = ok;
    }
  }
  if (!at(0, 0)) return std::nullopt;
  std::vector<NodeId> walk{0};
  for (NodeId j = 1; j <= k; ++j) {
    NodeId best = walk.back();
    if (!at(j, best)) {
      best = kNoNode;
      b.for_each_child(walk.back(), [&](NodeId y) {
        if (at(j, y) && (best == kNoNode || y < best)) best = y;
      });
    }
    walk.push_back(best);
  }
  return walk;
}

// Can every branch in `need` be covered by a distinct branch in [from, end)?
inline bool coverable(const std::vector<std::vector<char>>& can_cover, NodeId from, const std::vector<NodeId>& need) {
  const NodeId branches = static_cast<NodeId>(can_cover.size());
  std::vector<NodeId> owner(branches, kNoNode);
  for (std::size_t n = 0; n < need.size(); ++n) {
    std::vector<char> seen(branches, 0);
    auto augment = [&](auto&& self, NodeId idx) -> bool {
      for (NodeId i = from; i < branches; ++i) {
        if (!can_cover[i][need[idx]] || seen[i]) continue;
        seen[i] = 1;
        if (owner[i] == kNoNode || self(self, owner[i])) {
          owner[i] = idx;
          return true;
        }
      }
      return false;
    };
    if (!augment(augment, static_cast<NodeId>(n))) return false;
  }
  return true;
}

}  // namespace detail

/// The lexicographically first epimorphism psi: T -> B with
/// phi1 . psi == g, where g: T -> A is given as a node map. nullopt when
/// no such epimorphism exists.
inline std::optional<FanMap> lift_through(const FanMap& phi1, const Fan& t, const std::vector<NodeId>& g) {
  const Fan& b = phi1.source;
  const Fan& a = phi1.target;
  require_total(t, a, g);
  if (g[0] != phi1(0)) return std::nullopt;
  std::vector<NodeId> psi(t.size(), 0);
  if (b.is_point()) {
    for (NodeId v = 0; v < t.size(); ++v)
      if (g[v] != phi1(0)) return std::nullopt;
    return FanMap{t, b, std::move(psi)};
  }
  if (t.is_point()) return std::nullopt;

  // which B-branches each T-branch can cover completely
  std::vector<std::vector<char>> can_cover(t.width(), std::vector<char>(b.width(), 0));
  for (NodeId i = 0; i < t.width(); ++i)
    for (NodeId c = 0; c < b.width(); ++c)
      can_cover[i][c] = detail::first_branch_lift(phi1, t, g, i, [&](NodeId x) { return x == b.endpoint(c); })
                            .has_value();

  std::vector<char> covered(b.width(), 0);
  auto uncovered = [&]() {
    std::vector<NodeId> out;
    for (NodeId c = 0; c < b.width(); ++c)
      if (!covered[c]) out.push_back(c);
    return out;
  };
  if (!detail::coverable(can_cover, 0, uncovered())) return std::nullopt;

  for (NodeId i = 0; i < t.width(); ++i) {
    const auto need = uncovered();
    std::optional<std::vector<NodeId>> best;
    NodeId best_covers = kNoNode;
    auto consider = [&](std::optional<std::vector<NodeId>> walk, NodeId covers) {
      if (!walk) return;
      std::vector<NodeId> rest;
      for (NodeId c : need)
        if (c != covers) rest.push_back(c);
      if (!detail::coverable(can_cover, i + 1, rest)) return;
      if (!best || *walk < *best) {
        best = std::move(walk);
        best_covers = covers;
      }
    };
    consider(detail::first_branch_lift(phi1, t, g, i,
                                       [&](NodeId x) {
                                         for (NodeId c : need)
                                           if (x == b.endpoint(c)) return false;
                                         return true;
                                       }),
             kNoNode);
    for (NodeId c : need)
      if (can_cover[i][c])
        consider(detail::first_branch_lift(phi1, t, g, i, [&](NodeId x) { return x == b.endpoint(c); }), c);
    if (!best) return std::nullopt;
    if (best_covers != kNoNode) covered[best_covers] = 1;
    for (NodeId d = 1; d <= t.height(); ++d) psi[t.node(i, d)] = (*best)[d];
  }
  return FanMap{t, b, std::move(psi)};
}

struct Extension {
  NodeId level = 0;
  FanMap lift;  // T_level -> B
};

/// Finite-depth extension property: given phi1: B -> A and an epimorphism
/// phi2: T_m -> A from level m of `seq`, find the least n >= m and the
/// lexicographically first epimorphism psi: T_n -> B with
/// phi1 . psi == phi2 . f^n_m. Throws DepthExhausted past the built depth.
///
/// Seq must provide level(n) -> const Fan& , depth() and
/// project(n, m) -> std::vector<NodeId> (the composite bond f^n_m).
template <class Seq>
Extension extend(const Seq& seq, const FanMap& phi1, NodeId m, const FanMap& phi2) {
  if (!(phi1.target == phi2.target)) throw DomainMismatch("extend: phi1 and phi2 have different targets");
  if (m < 0 || m > seq.depth() || !(phi2.source == seq.level(m)))
    throw DomainMismatch("extend: phi2 does not start at the given level");
  if (!is_epimorphism(phi1) || !is_epimorphism(phi2)) throw NotEpi("extend: inputs must be epimorphisms");
  for (NodeId n = m; n <= seq.depth(); ++n) {
    const auto g = compose_maps(phi2.map, seq.project(n, m));
    if (auto psi = lift_through(phi1, seq.level(n), g)) return {n, std::move(*psi)};
  }
  throw DepthExhausted("extend: no commuting epimorphism up to level " + std::to_string(seq.depth()));
}

struct FamilyReport {
  std::size_t jpp_cases = 0;
  std::size_t ap_cases = 0;
  std::size_t failures = 0;
  std::string witness;  // first failure
  bool ok() const { return failures == 0; }
};

/// jpp on every pair and amalgamate on every epimorphism pair over every
/// triple of fans with height <= max_h and width <= max_w (plus the point).
inline FamilyReport verify_family(NodeId max_h, NodeId max_w) {
  std::vector<Fan> fans{Fan::point()};
  for (NodeId h = 1; h <= max_h; ++h)
    for (NodeId w = 1; w <= max_w; ++w) fans.emplace_back(h, w);
  FamilyReport r;
  auto fail = [&](const std::string& why) {
    if (r.failures++ == 0) r.witness = why;
  };
  auto label = [](const Fan& f) { return "F(" + std::to_string(f.height()) + "," + std::to_string(f.width()) + ")"; };
  for (const Fan& a : fans)
    for (const Fan& b : fans) {
      ++r.jpp_cases;
      const auto j = jpp(a, b);
      if (!check(j.first).epimorphism || !check(j.second).epimorphism) fail("jpp " + label(a) + " " + label(b));
    }
  for (const Fan& p : fans)
    for (const Fan& q : fans)
      for (const Fan& s : fans) {
        const auto e1 = enumerate_epis(q, p), e2 = enumerate_epis(s, p);
        for (const auto& phi1 : e1)
          for (const auto& phi2 : e2) {
            ++r.ap_cases;
            const auto w = amalgamate(phi1, phi2);
            if (!check(w.to_q).epimorphism || !check(w.to_s).epimorphism ||
                compose_maps(phi1.map, w.to_q.map) != compose_maps(phi2.map, w.to_s.map))
              fail("amalgamate over " + label(p) + " from " + label(q) + " and " + label(s));
          }
      }
  return r;
}

}  // namespace lelek
