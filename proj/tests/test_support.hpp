#pragma once

// Test-only oracles and generators. Nothing here calls into the search or
// construction code it is used to check.

#include <algorithm>
#include <vector>

#include "lelek/morphisms.hpp"
#include "lelek/structures.hpp"

namespace lelek::testing {

// All fans with at most max_nodes nodes, in (height, width) order.
inline std::vector<Fan> all_small_fans(NodeId max_nodes) {
  std::vector<Fan> out{Fan::point()};
  for (NodeId h = 1; 1 + h <= max_nodes; ++h)
    for (NodeId w = 1; 1 + h * w <= max_nodes; ++w) out.emplace_back(h, w);
  return out;
}

// Fans with height <= max_h and width <= max_w (plus the point).
inline std::vector<Fan> fans_up_to(NodeId max_h, NodeId max_w) {
  std::vector<Fan> out{Fan::point()};
  for (NodeId h = 1; h <= max_h; ++h)
    for (NodeId w = 1; w <= max_w; ++w) out.emplace_back(h, w);
  return out;
}

// Brute force: every total map |T|^|S|, kept when it is a surjective
// homomorphism by the definition (all pairs, not just edges). Results come
// out in lexicographic order of the image tuple.
template <Structure S, Structure T>
std::vector<std::vector<NodeId>> naive_epis(const S& s, const T& t) {
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> m(s.size(), 0);
  while (true) {
    bool hom = true;
    for (NodeId a = 0; a < s.size() && hom; ++a)
      for (NodeId b = 0; b < s.size() && hom; ++b)
        if (s.related(a, b) && !t.related(m[a], m[b])) hom = false;
    if (hom) {
      std::vector<char> hit(t.size(), 0);
      for (NodeId x : m) hit[x] = 1;
      bool onto = true;
      for (char h : hit) onto = onto && h;
      if (onto) out.push_back(m);
    }
    NodeId i = s.size() - 1;
    while (i >= 0 && m[i] == t.size() - 1) m[i--] = 0;
    if (i < 0) break;
    ++m[i];
  }
  return out;
}

// Pointwise definition of commutation.
inline bool commutes(const std::vector<NodeId>& f, const std::vector<NodeId>& g, const std::vector<NodeId>& h,
                     const std::vector<NodeId>& k) {
  // f . g == h . k
  if (g.size() != k.size()) return false;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (f[g[i]] != h[k[i]]) return false;
  return true;
}

// Surjective homomorphism by the definition, all pairs.
template <Structure S, Structure T>
bool naive_is_epi(const S& s, const T& t, const std::vector<NodeId>& m) {
  if (m.size() != static_cast<std::size_t>(s.size())) return false;
  for (NodeId a = 0; a < s.size(); ++a)
    for (NodeId b = 0; b < s.size(); ++b)
      if (s.related(a, b) && !t.related(m[a], m[b])) return false;
  std::vector<char> hit(t.size(), 0);
  for (NodeId x : m) hit[x] = 1;
  return std::find(hit.begin(), hit.end(), 0) == hit.end();
}

}  // namespace lelek::testing
