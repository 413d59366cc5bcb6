#pragma once

// Inverse sequences of fans (T_n, f_n) built to satisfy
//   (1) every fan is eventually hit by an epimorphism from some T_n,
//   (2) extension instances are eventually solved,
//   (3) every point of a branch of T_{n+1} shares its image with another
//       point of the same branch,
//   (4) every branch of T_n is the image of two distinct branches,
// together with the envelope (S_n, g_n) that contains (T_n, f_n) and also
// satisfies
//   (5) a branch of S_{n+1} mapped into a branch of S_n is mapped onto it.
//
// Properties (1) and (2) quantify over infinitely many instances; a finite
// build discharges a prefix of a fixed schedule and records a certificate
// for each discharged instance.

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lelek/core.hpp"
#include "lelek/fraisse.hpp"
#include "lelek/morphisms.hpp"
#include "lelek/structures.hpp"

namespace lelek {

/// i-th fan of the diagonal enumeration by height + width, then height:
/// (1,1), (1,2), (2,1), (1,3), (2,2), (3,1), ...
inline Fan diagonal_fan(std::size_t index) {
  NodeId sum = 2;
  while (index >= static_cast<std::size_t>(sum - 1)) {
    index -= sum - 1;
    ++sum;
  }
  const NodeId h = 1 + static_cast<NodeId>(index);
  return Fan(h, sum - h);
}

/// An extension instance: phi1: T_level -> A and phi2: B -> A. Discharging
/// it means finding n > level and psi: T_n -> B with
/// phi1 . f^n_level == phi2 . psi.
struct Demand {
  NodeId level = 0;
  FanMap phi1;
  FanMap phi2;
  NodeId leaf_depth = 0;  // > 0 for a leaf-extension slice
};

/// Leaf-extension slice at depth d of T_k: A = F(1, w), phi1 sends the part
/// of branch b at depth >= d onto the arc b of A and the rest to the root;
/// phi2 is the identity. Solving it yields, for every branch b, a branch of
/// a later level whose endpoint projects exactly onto node (b, d).
inline Demand leaf_extension(const Fan& t, NodeId level, NodeId d) {
  if (t.is_point() || d < 1 || d > t.height()) throw DomainMismatch("leaf_extension: no such depth");
  const Fan a(1, t.width());
  std::vector<NodeId> map(t.size(), 0);
  for (NodeId b = 0; b < t.width(); ++b)
    for (NodeId j = d; j <= t.height(); ++j) map[t.node(b, j)] = a.node(b, 1);
  return {level, FanMap{t, a, std::move(map)}, identity(a), d};
}

struct Certificate {
  enum class Kind { Universality, Extension };
  Kind kind = Kind::Universality;
  NodeId level = 0;            // witness starts at T_level
  Fan target;                  // universality: the fan hit; extension: B
  std::vector<NodeId> witness; // T_level -> target
  std::optional<Demand> demand;
};

/// Doubling cover D of a fan of height k and width w: a fan of height 2k+1
/// and width 2w in which branches 2i and 2i+1 run over branch i and depth j
/// goes to depth floor(j/2). Every fiber inside a branch has two points.
inline FanMap doubling_cover(const Fan& t) {
  const Fan d(2 * t.height() + 1, 2 * t.width());
  std::vector<NodeId> map(d.size(), 0);
  for (NodeId i = 0; i < d.width(); ++i)
    for (NodeId j = 1; j <= d.height(); ++j) map[d.node(i, j)] = t.node(i / 2, j / 2);
  return {d, t, std::move(map)};
}

/// Automorphism of a fan permuting its branches uniformly at random.
inline FanMap branch_permutation(const Fan& t, Rng& rng) {
  std::vector<NodeId> order(t.width());
  for (NodeId b = 0; b < t.width(); ++b) order[b] = b;
  rng.shuffle(order);
  std::vector<NodeId> map(t.size(), 0);
  for (NodeId b = 0; b < t.width(); ++b)
    for (NodeId j = 1; j <= t.height(); ++j) map[t.node(b, j)] = t.node(order[b], j);
  return {t, t, std::move(map)};
}

class InverseSequence {
 public:
  static constexpr std::size_t kDemandsPerLevel = 2;

  explicit InverseSequence(std::uint64_t seed = 1) : seed_(seed), rng_(seed), levels_{Fan::point()} {}

  std::uint64_t seed() const { return seed_; }
  NodeId depth() const { return static_cast<NodeId>(levels_.size()) - 1; }
  const Fan& level(NodeId n) const { return levels_.at(n); }
  const std::vector<Fan>& levels() const { return levels_; }
  const std::vector<NodeId>& bond_map(NodeId n) const { return bonds_.at(n); }
  FanMap bond(NodeId n) const { return {levels_.at(n + 1), levels_.at(n), bonds_.at(n)}; }
  const std::vector<Certificate>& certificates() const { return certificates_; }
  const std::deque<Demand>& pending() const { return pending_; }
  std::size_t fans_enumerated() const { return next_fan_; }

  /// f^n_m as a node map T_n -> T_m (identity when n == m).
  std::vector<NodeId> project(NodeId n, NodeId m) const {
    if (m > n || n > depth() || m < 0) throw DomainMismatch("project: need 0 <= m <= n <= depth");
    std::vector<NodeId> out(levels_[n].size());
    for (NodeId v = 0; v < levels_[n].size(); ++v) out[v] = v;
    for (NodeId k = n; k > m; --k) out = compose_maps(bonds_[k - 1], out);
    return out;
  }

  /// Queue an extension instance; it is discharged by a later grow().
  void push_demand(Demand d) {
    if (d.level < 0 || d.level > depth() || !(d.phi1.source == levels_[d.level]))
      throw DomainMismatch("demand does not start at a built level");
    if (!(d.phi1.target == d.phi2.target)) throw DomainMismatch("demand maps have different targets");
    if (!is_epimorphism(d.phi1) || !is_epimorphism(d.phi2)) throw NotEpi("demand maps must be epimorphisms");
    pending_.push_back(std::move(d));
  }

  /// Adds `steps` levels.
  void grow(NodeId steps) {
    for (NodeId i = 0; i < steps; ++i) step();
  }

  // Direct access for fault-injection tests and deserialization.
  std::vector<std::vector<NodeId>>& mutable_bonds() { return bonds_; }
  static InverseSequence from_parts(std::uint64_t seed, std::vector<Fan> levels, std::vector<std::vector<NodeId>> bonds,
                                    std::vector<Certificate> certificates) {
    InverseSequence s(seed);
    s.levels_ = std::move(levels);
    s.bonds_ = std::move(bonds);
    s.certificates_ = std::move(certificates);
    return s;
  }

 private:
  void step() {
    const NodeId n = depth();
    if (n >= 1) schedule_demands(n);
    if (n >= 1) schedule_leaf_extension();

    Fan cur = levels_[n];
    std::vector<NodeId> proj(cur.size());
    for (NodeId v = 0; v < cur.size(); ++v) proj[v] = v;
    std::vector<Certificate> fresh;

    auto advance = [&](const FanMap& to_prev) {
      proj = compose_maps(proj, to_prev.map);
      for (auto& c : fresh) c.witness = compose_maps(c.witness, to_prev.map);
      cur = to_prev.source;
    };

    // property (1): next fan of the diagonal enumeration
    const Fan target = diagonal_fan(next_fan_++);
    auto joint = jpp(cur, target);
    advance(joint.first);
    fresh.push_back({Certificate::Kind::Universality, 0, target, joint.second.map, std::nullopt});

    // property (2): every queued extension instance, oldest first
    while (!pending_.empty()) {
      Demand d = std::move(pending_.front());
      pending_.pop_front();
      // amalgamate pairs each branch of B with the first compatible branch
      // of cur; a random branch permutation spreads those choices out
      advance(branch_permutation(cur, rng_));
      const auto down = compose_maps(project(n, d.level), proj);
      const FanMap to_a{cur, d.phi1.target, compose_maps(d.phi1.map, down)};
      auto w = amalgamate(to_a, d.phi2);
      advance(w.to_q);
      fresh.push_back({Certificate::Kind::Extension, 0, d.phi2.source, std::move(w.to_s.map), std::move(d)});
    }

    // properties (3) and (4)
    advance(doubling_cover(cur));
    for (auto& c : fresh) {
      c.level = n + 1;
      certificates_.push_back(std::move(c));
    }
    levels_.push_back(cur);
    bonds_.push_back(std::move(proj));
  }

  // Extension instances for level m: (A, B, phi2) triples over fans already
  // enumerated for property (1), ordered by |A| + |B| then by shape and
  // epimorphism order, skipping A = point and identities; phi1: T_m -> A is
  // drawn from the seeded stream.
  void schedule_demands(NodeId m) {
    std::vector<Fan> known;
    for (std::size_t i = 0; i < next_fan_; ++i) known.push_back(diagonal_fan(i));
    using Key = std::tuple<NodeId, NodeId, NodeId, NodeId, NodeId, std::size_t>;
    std::vector<Key> candidates;
    for (const Fan& a : known)
      for (const Fan& b : known) {
        const auto epis = enumerate_epis(b, a);
        for (std::size_t e = 0; e < epis.size(); ++e) {
          if (a == b && epis[e].map == identity(a).map) continue;
          candidates.emplace_back(a.size() + b.size(), a.height(), a.width(), b.height(), b.width(), e);
        }
      }
    std::sort(candidates.begin(), candidates.end());
    std::size_t added = 0;
    for (const Key& key : candidates) {
      if (added == kDemandsPerLevel) break;
      if (used_.count(key)) continue;
      const auto& [total, ah, aw, bh, bw, e] = key;
      const Fan a(ah, aw), b(bh, bw);
      auto phi1 = random_epi(levels_[m], a, rng_);
      if (!phi1) continue;
      used_.insert(key);
      pending_.push_back({m, std::move(*phi1), enumerate_epis(b, a)[e]});
      ++added;
    }
  }

  // One slice per step, dovetailed over (level, depth): all depths of T_1,
  // then all depths of T_2, and so on.
  void schedule_leaf_extension() {
    if (leaf_level_ > depth()) return;
    pending_.push_back(leaf_extension(levels_[leaf_level_], leaf_level_, leaf_depth_));
    if (++leaf_depth_ > levels_[leaf_level_].height()) {
      ++leaf_level_;
      leaf_depth_ = 1;
    }
  }

  std::uint64_t seed_;
  Rng rng_;
  NodeId leaf_level_ = 1;
  NodeId leaf_depth_ = 1;
  std::vector<Fan> levels_;
  std::vector<std::vector<NodeId>> bonds_;
  std::vector<Certificate> certificates_;
  std::deque<Demand> pending_;
  std::size_t next_fan_ = 0;
  std::set<std::tuple<NodeId, NodeId, NodeId, NodeId, NodeId, std::size_t>> used_;
};

inline InverseSequence build(NodeId depth, std::uint64_t seed) {
  if (depth < 0) throw DomainMismatch("build: depth must be >= 0");
  InverseSequence seq(seed);
  seq.grow(depth);
  return seq;
}

struct Violation {
  NodeId level = 0;
  std::string condition;
  std::string witness;
};

struct Report {
  std::vector<Violation> violations;
  std::size_t checks = 0;

  bool ok() const { return violations.empty(); }
  std::size_t count(const std::string& condition) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [&](const Violation& v) { return v.condition == condition; }));
  }
};

namespace detail {

// Property (3) on one branch of a fan-or-spider: every node of the branch
// (root included) shares its image with another node of the branch.
template <Structure S>
std::optional<NodeId> lonely_point(const S& s, NodeId branch, NodeId length, const std::vector<NodeId>& map) {
  std::vector<std::pair<NodeId, NodeId>> imgs;
  imgs.reserve(length + 1);
  for (NodeId d = 0; d <= length; ++d) imgs.emplace_back(map[s.node(branch, d)], s.node(branch, d));
  std::sort(imgs.begin(), imgs.end());
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    const bool prev = i > 0 && imgs[i - 1].first == imgs[i].first;
    const bool next = i + 1 < imgs.size() && imgs[i + 1].first == imgs[i].first;
    if (!prev && !next) return imgs[i].second;
  }
  return std::nullopt;
}

// Image of a branch as a sorted set of target nodes.
template <Structure S>
std::vector<NodeId> branch_image_set(const S& s, NodeId branch, NodeId length, const std::vector<NodeId>& map) {
  std::vector<NodeId> out;
  for (NodeId d = 0; d <= length; ++d) out.push_back(map[s.node(branch, d)]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <Structure S>
std::vector<NodeId> branch_node_set(const S& s, NodeId branch, NodeId length) {
  std::vector<NodeId> out;
  for (NodeId d = 0; d <= length; ++d) out.push_back(s.node(branch, d));
  std::sort(out.begin(), out.end());
  return out;
}

inline NodeId branch_length(const Fan& f, NodeId) { return f.height(); }
inline NodeId branch_length(const Spider& s, NodeId b) { return s.length(b); }

// Checks (3) and (4) for one bond upper -> lower.
template <Structure S>
void check_doubling(const S& upper, const S& lower, const std::vector<NodeId>& map, NodeId level, Report& report) {
  for (NodeId b = 0; b < upper.width(); ++b) {
    ++report.checks;
    if (auto x = lonely_point(upper, b, branch_length(upper, b), map))
      report.violations.push_back({level, "property3", "branch " + std::to_string(b + 1) + " node " + upper.name(*x)});
  }
  std::vector<int> covers(lower.width(), 0);
  std::vector<std::vector<NodeId>> lower_sets;
  for (NodeId c = 0; c < lower.width(); ++c) lower_sets.push_back(branch_node_set(lower, c, branch_length(lower, c)));
  for (NodeId b = 0; b < upper.width(); ++b) {
    const auto img = branch_image_set(upper, b, branch_length(upper, b), map);
    // the image is onto branch c iff it equals c's node set; c is determined
    // by the deepest image node unless the lower structure is a point
    NodeId c = 0;
    if (img.back() != lower.root()) c = lower.branch(img.back());
    if (img == lower_sets[c]) ++covers[c];
  }
  for (NodeId c = 0; c < lower.width(); ++c) {
    ++report.checks;
    if (covers[c] < 2)
      report.violations.push_back({level, "property4", "branch " + std::to_string(c + 1) + " covered " +
                                                           std::to_string(covers[c]) + " time(s)"});
  }
}

}  // namespace detail

/// Checks every bond (epimorphism, properties (3) and (4)) and replays every
/// discharge certificate.
inline Report verify(const InverseSequence& seq) {
  Report report;
  for (NodeId n = 0; n < seq.depth(); ++n) {
    const Fan& upper = seq.level(n + 1);
    const Fan& lower = seq.level(n);
    const auto& map = seq.bond_map(n);
    ++report.checks;
    if (static_cast<NodeId>(map.size()) != upper.size()) {
      report.violations.push_back({n, "epimorphism", "bond has wrong size"});
      continue;
    }
    const FanMap f{upper, lower, map};
    const Status st = check(f);
    if (!st.homomorphism) report.violations.push_back({n, "epimorphism", "bond is not a homomorphism"});
    if (!is_surjective(lower, map)) {
      std::vector<char> hit(lower.size(), 0);
      for (NodeId x : map) hit[x] = 1;
      NodeId missed = 0;
      while (hit[missed]) ++missed;
      report.violations.push_back({n, "epimorphism", "node " + lower.name(missed) + " of T_" + std::to_string(n) +
                                                         " has no preimage"});
    }
    detail::check_doubling(upper, lower, map, n, report);
  }
  for (const auto& c : seq.certificates()) {
    ++report.checks;
    const FanMap w{seq.level(c.level), c.target, c.witness};
    if (!check(w).epimorphism) {
      report.violations.push_back({c.level, "certificate", "witness is not an epimorphism"});
      continue;
    }
    if (c.kind == Certificate::Kind::Extension) {
      const Demand& d = *c.demand;
      const auto lhs = compose_maps(d.phi2.map, c.witness);
      const auto rhs = compose_maps(d.phi1.map, seq.project(c.level, d.level));
      if (lhs != rhs || c.level <= d.level)
        report.violations.push_back({c.level, "certificate", "extension square does not commute"});
    }
  }
  return report;
}

/// (S_n, g_n) with inclusions iota_n: T_n -> S_n. The first t_width[n]
/// branches of S_n extend the branches of T_n (iota_n keeps branch and
/// depth); the rest carry no nodes of T_n.
struct Envelope {
  std::vector<Spider> levels;
  std::vector<std::vector<NodeId>> bonds;       // g_n: S_{n+1} -> S_n
  std::vector<std::vector<NodeId>> inclusions;  // iota_n: T_n -> S_n
  std::vector<NodeId> t_width;
  std::vector<NodeId> t_height;

  NodeId depth() const { return static_cast<NodeId>(levels.size()) - 1; }

  std::vector<NodeId> project(NodeId n, NodeId m) const {
    if (m > n || n > depth() || m < 0) throw DomainMismatch("envelope project: need 0 <= m <= n <= depth");
    std::vector<NodeId> out(levels[n].size());
    for (NodeId v = 0; v < levels[n].size(); ++v) out[v] = v;
    for (NodeId k = n; k > m; --k) out = compose_maps(bonds[k - 1], out);
    return out;
  }
};

struct EnvelopeStep {
  Spider upper;
  std::vector<NodeId> bond;
  std::vector<NodeId> inclusion;
  NodeId t_width = 0;
};

/// One envelope step. For each branch b of T_{n+1} with endpoint e, let
/// m = iota_n(f_n(e)) and b' the branch of S_n through m (the first one
/// when m is the root). The branch b is continued past e by a doubled copy
/// x1, x2 of every node x of b' beyond m, so it maps onto b'. Every branch
/// c of S_n that carries no node of T_n gets two doubled covering branches.
inline EnvelopeStep envelope_step(const Spider& lower, NodeId lower_t_width, const std::vector<NodeId>& lower_inclusion,
                                  const Fan& t_upper, const std::vector<NodeId>& f) {
  std::vector<NodeId> lengths;
  std::vector<std::pair<NodeId, NodeId>> attach;  // (branch of S_n, depth of m)
  for (NodeId b = 0; b < t_upper.width(); ++b) {
    const NodeId m = lower_inclusion[f[t_upper.endpoint(b)]];
    const NodeId target = m == 0 ? 0 : lower.branch(m);
    const NodeId mdepth = lower.depth(m);
    attach.emplace_back(target, mdepth);
    lengths.push_back(t_upper.height() + 2 * (lower.length(target) - mdepth));
  }
  for (NodeId c = lower_t_width; c < lower.width(); ++c) {
    lengths.push_back(2 * lower.length(c) + 1);
    lengths.push_back(2 * lower.length(c) + 1);
  }
  if (lengths.size() > 1) {
    // a lone zero-length branch only occurs for the point
    for (auto& l : lengths) l = std::max<NodeId>(l, 0);
  }
  Spider upper(lengths);
  std::vector<NodeId> g(upper.size(), 0);
  std::vector<NodeId> inclusion(t_upper.size(), 0);
  for (NodeId b = 0; b < t_upper.width(); ++b) {
    for (NodeId d = 1; d <= t_upper.height(); ++d) {
      const NodeId v = upper.node(b, d);
      inclusion[t_upper.node(b, d)] = v;
      g[v] = lower_inclusion[f[t_upper.node(b, d)]];
    }
    const auto [target, mdepth] = attach[b];
    for (NodeId x = mdepth + 1, d = t_upper.height() + 1; x <= lower.length(target); ++x, d += 2) {
      g[upper.node(b, d)] = lower.node(target, x);
      g[upper.node(b, d + 1)] = lower.node(target, x);
    }
  }
  NodeId next = t_upper.width();
  for (NodeId c = lower_t_width; c < lower.width(); ++c) {
    for (int copy = 0; copy < 2; ++copy, ++next)
      for (NodeId d = 1; d <= upper.length(next); ++d) g[upper.node(next, d)] = lower.node(c, d / 2);
  }
  return {std::move(upper), std::move(g), std::move(inclusion), t_upper.width()};
}

inline Envelope envelope(const InverseSequence& seq) {
  Envelope env;
  env.levels.push_back(Spider(seq.level(0)));
  env.inclusions.push_back(std::vector<NodeId>(seq.level(0).size()));
  for (NodeId v = 0; v < seq.level(0).size(); ++v) env.inclusions[0][v] = v;
  env.t_width.push_back(seq.level(0).width());
  env.t_height.push_back(seq.level(0).height());
  for (NodeId n = 0; n < seq.depth(); ++n) {
    auto st = envelope_step(env.levels[n], env.t_width[n], env.inclusions[n], seq.level(n + 1), seq.bond_map(n));
    env.levels.push_back(std::move(st.upper));
    env.bonds.push_back(std::move(st.bond));
    env.inclusions.push_back(std::move(st.inclusion));
    env.t_width.push_back(st.t_width);
    env.t_height.push_back(seq.level(n + 1).height());
  }
  return env;
}

/// Envelope invariants: g_n epimorphisms, iota_n injective homomorphisms,
/// g_n . iota_{n+1} == iota_n . f_n (which is the restriction identity
/// g_n|T_{n+1} = f_n), conditions (3), (4) and (5). Condition (5) is
/// checked on every pair of branches.
inline Report verify_envelope(const InverseSequence& seq, const Envelope& env) {
  Report report;
  for (NodeId n = 0; n <= env.depth(); ++n) {
    const Fan& t = seq.level(n);
    const Spider& s = env.levels[n];
    const auto& iota = env.inclusions[n];
    ++report.checks;
    std::vector<char> used(s.size(), 0);
    bool injective = true;
    for (NodeId x : iota) {
      if (used[x]) injective = false;
      used[x] = 1;
    }
    if (!injective) report.violations.push_back({n, "inclusion", "iota is not injective"});
    if (!is_homomorphism(t, s, iota)) report.violations.push_back({n, "inclusion", "iota is not a homomorphism"});
  }
  for (NodeId n = 0; n < env.depth(); ++n) {
    const Spider& upper = env.levels[n + 1];
    const Spider& lower = env.levels[n];
    const auto& g = env.bonds[n];
    ++report.checks;
    if (!is_homomorphism(upper, lower, g) || !is_surjective(lower, g))
      report.violations.push_back({n, "epimorphism", "g_n is not an epimorphism"});
    const auto& f = seq.bond_map(n);
    const auto& iu = env.inclusions[n + 1];
    const auto& il = env.inclusions[n];
    for (NodeId t = 0; t < seq.level(n + 1).size(); ++t) {
      ++report.checks;
      if (g[iu[t]] != il[f[t]]) {
        report.violations.push_back({n, "restriction", "g_n differs from f_n at " + seq.level(n + 1).name(t)});
        break;
      }
    }
    detail::check_doubling(upper, lower, g, n, report);
    for (NodeId bp = 0; bp < upper.width(); ++bp) {
      ++report.checks;
      // the only branch that can contain the image is the one through its
      // deepest node; an image at the root sits in every branch
      const auto img = detail::branch_image_set(upper, bp, upper.length(bp), g);
      const NodeId b = img.back() == lower.root() ? 0 : lower.branch(img.back());
      const auto nodes = detail::branch_node_set(lower, b, lower.length(b));
      const bool inside = std::includes(nodes.begin(), nodes.end(), img.begin(), img.end());
      if (inside && img != nodes)
        report.violations.push_back({n, "condition5", "branch " + std::to_string(bp + 1) + " of S_" +
                                                          std::to_string(n + 1) + " lands inside branch " +
                                                          std::to_string(b + 1) + " without covering it"});
    }
  }
  return report;
}

}  // namespace lelek
