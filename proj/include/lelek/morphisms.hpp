#pragma once

// Homomorphisms and epimorphisms between finite rooted trees. For the edge
// relation R a map is an epimorphism exactly when it is a surjective
// homomorphism, so that is what check() tests.

#include <algorithm>
#include <optional>
#include <vector>

#include "lelek/core.hpp"
#include "lelek/structures.hpp"

namespace lelek {

struct Status {
  bool homomorphism = false;
  bool epimorphism = false;

  friend bool operator==(const Status&, const Status&) = default;
};

template <Structure S, Structure T>
void require_total(const S& source, const T& target, const std::vector<NodeId>& map) {
  if (static_cast<NodeId>(map.size()) != source.size())
    throw DomainMismatch("map has " + std::to_string(map.size()) + " entries, source has " +
                         std::to_string(source.size()) + " nodes");
  for (NodeId img : map)
    if (img < 0 || img >= target.size()) throw DomainMismatch("image outside the target");
}

// R is reflexive and its strict part is the parent->child edge set, so it
// suffices to test every edge.
template <Structure S, Structure T>
bool is_homomorphism(const S& source, const T& target, const std::vector<NodeId>& map) {
  for (NodeId v = 0; v < source.size(); ++v) {
    const NodeId p = source.parent(v);
    if (p != kNoNode && !target.related(map[p], map[v])) return false;
  }
  return true;
}

template <Structure T>
bool is_surjective(const T& target, const std::vector<NodeId>& map) {
  std::vector<char> hit(target.size(), 0);
  NodeId count = 0;
  for (NodeId img : map)
    if (!hit[img]) {
      hit[img] = 1;
      ++count;
    }
  return count == target.size();
}

template <Structure S, Structure T>
Status check(const Morphism<S, T>& phi) {
  require_total(phi.source, phi.target, phi.map);
  Status st;
  st.homomorphism = is_homomorphism(phi.source, phi.target, phi.map);
  st.epimorphism = st.homomorphism && is_surjective(phi.target, phi.map);
  return st;
}

template <Structure S, Structure T>
bool is_epimorphism(const Morphism<S, T>& phi) {
  return check(phi).epimorphism;
}

// (outer . inner)(v) = outer[inner[v]]
inline std::vector<NodeId> compose_maps(const std::vector<NodeId>& outer, const std::vector<NodeId>& inner) {
  std::vector<NodeId> out(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) out[i] = outer[inner[i]];
  return out;
}

/// psi . phi for phi: A -> B and psi: B -> C.
template <Structure A, Structure B, Structure C>
Morphism<A, C> compose(const Morphism<B, C>& psi, const Morphism<A, B>& phi) {
  if (!(phi.target == psi.source)) throw DomainMismatch("compose: codomain of phi differs from domain of psi");
  return {phi.source, psi.target, compose_maps(psi.map, phi.map)};
}

namespace detail {

template <Structure S>
std::vector<NodeId> bfs_order(const S& s) {
  std::vector<NodeId> order{s.root()};
  for (std::size_t i = 0; i < order.size(); ++i) s.for_each_child(order[i], [&](NodeId c) { order.push_back(c); });
  return order;
}

template <Structure S, Structure T>
class EpiSearch {
 public:
  EpiSearch(const S& s, const T& t) : s_(s), t_(t), order_(bfs_order(s)), map_(s.size(), kNoNode), hits_(t.size(), 0) {}

  std::vector<std::vector<NodeId>> run() {
    if (s_.size() >= t_.size()) {
      for (NodeId c = 0; c < t_.size(); ++c) place(0, c);
    }
    std::sort(results_.begin(), results_.end());
    return std::move(results_);
  }

 private:
  void place(std::size_t pos, NodeId img) {
    const NodeId v = order_[pos];
    map_[v] = img;
    if (hits_[img]++ == 0) ++covered_;
    const auto remaining = static_cast<NodeId>(order_.size() - pos - 1);
    if (covered_ + remaining >= t_.size()) {
      if (pos + 1 == order_.size()) {
        results_.push_back(map_);
      } else {
        const NodeId next = order_[pos + 1];
        const NodeId base = map_[s_.parent(next)];
        place(pos + 1, base);
        t_.for_each_child(base, [&](NodeId c) { place(pos + 1, c); });
      }
    }
    if (--hits_[img] == 0) --covered_;
    map_[v] = kNoNode;
  }

  const S& s_;
  const T& t_;
  std::vector<NodeId> order_;
  std::vector<NodeId> map_;
  std::vector<NodeId> hits_;
  NodeId covered_ = 0;
  std::vector<std::vector<NodeId>> results_;
};

}  // namespace detail

/// All epimorphisms S -> T, sorted lexicographically on the image tuple in
/// source node order. Images are assigned root-outward; a child may only go
/// to its parent's image or one of that image's children, and a branch is
/// abandoned once the unassigned nodes cannot cover the unhit targets.
template <Structure S, Structure T>
std::vector<Morphism<S, T>> enumerate_epis(const S& source, const T& target) {
  std::vector<Morphism<S, T>> out;
  for (auto& m : detail::EpiSearch<S, T>(source, target).run()) out.push_back({source, target, std::move(m)});
  return out;
}

/// Random epimorphism between fans, or nullopt when none exists (the source
/// must be at least as tall and as wide as the target). Every target branch
/// is covered by a distinct source branch; the remaining source branches
/// climb a random target branch to a random depth.
inline std::optional<FanMap> random_epi(const Fan& source, const Fan& target, Rng& rng) {
  std::vector<NodeId> map(source.size(), 0);
  if (target.is_point()) return FanMap{source, target, std::move(map)};
  if (source.height() < target.height() || source.width() < target.width()) return std::nullopt;

  std::vector<NodeId> cover_order(source.width());
  for (NodeId i = 0; i < source.width(); ++i) cover_order[i] = i;
  rng.shuffle(cover_order);

  const NodeId k = source.height();
  for (NodeId slot = 0; slot < source.width(); ++slot) {
    const NodeId sb = cover_order[slot];
    const bool covering = slot < target.width();
    const NodeId tb = covering ? slot : static_cast<NodeId>(rng.below(target.width()));
    const NodeId reach = covering ? target.height() : static_cast<NodeId>(rng.below(target.height() + 1));
    // choose `reach` advancing steps among the k steps of the branch
    std::vector<char> advance(k, 0);
    std::vector<NodeId> steps(k);
    for (NodeId i = 0; i < k; ++i) steps[i] = i;
    rng.shuffle(steps);
    for (NodeId i = 0; i < reach; ++i) advance[steps[i]] = 1;
    NodeId d = 0;
    for (NodeId j = 1; j <= k; ++j) {
      d += advance[j - 1];
      map[source.node(sb, j)] = target.node(tb, d);
    }
  }
  return FanMap{source, target, std::move(map)};
}

/// Depth reached by the image of a fan branch and the target branch it
/// climbs (kNoNode when the whole branch collapses to the root).
struct BranchImage {
  NodeId target_branch = kNoNode;
  NodeId reach = 0;
};

template <Structure T>
BranchImage branch_image(const Fan& source, const T& target, const std::vector<NodeId>& map, NodeId b) {
  if (source.is_point()) return {};
  const NodeId end = map[source.endpoint(b)];
  if (end == target.root()) return {};
  return {target.branch(end), target.depth(end)};
}

}  // namespace lelek
