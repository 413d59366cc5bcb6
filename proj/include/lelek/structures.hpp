#pragma once

// Finite rooted trees with the reflexive edge relation R: R(s, t) iff s == t
// or t is an immediate successor of s. Three concrete shapes share one
// interface (the Structure concept):
//
//   Fan        every branch has the same length; node ids are arithmetic.
//   Spider     only the root branches, branch lengths may differ.
//   RootedTree arbitrary finite rooted tree with user-supplied node names.
//
// Node names are "r" for the root and "i:j" (branch i, depth j, both
// 1-based) for fans and spiders.

#include <algorithm>
#include <concepts>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lelek/core.hpp"

namespace lelek {

template <class S>
concept Structure = requires(const S& s, NodeId v) {
  { s.size() } -> std::convertible_to<NodeId>;
  { s.root() } -> std::convertible_to<NodeId>;
  { s.parent(v) } -> std::convertible_to<NodeId>;
  { s.related(v, v) } -> std::same_as<bool>;
  { s.name(v) } -> std::convertible_to<std::string>;
};

namespace detail {

inline std::string branch_node_name(NodeId branch, NodeId depth) {
  return std::to_string(branch + 1) + ":" + std::to_string(depth);
}

// Parses "i:j" into zero-based branch and depth; nullopt on malformed input.
inline std::optional<std::pair<NodeId, NodeId>> parse_branch_node_name(std::string_view name) {
  const auto colon = name.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == name.size()) return std::nullopt;
  auto parse = [](std::string_view digits) -> std::optional<long> {
    if (digits.empty() || digits.size() > 9) return std::nullopt;
    long v = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  const auto i = parse(name.substr(0, colon));
  const auto j = parse(name.substr(colon + 1));
  if (!i || !j || *i < 1 || *j < 1) return std::nullopt;
  return std::pair<NodeId, NodeId>{static_cast<NodeId>(*i - 1), static_cast<NodeId>(*j)};
}

}  // namespace detail

/// A finite rooted reflexive fan of height k (nodes per branch minus one)
/// and width w (number of branches). The single-node fan has k = 0, w = 1.
///
/// Node layout: the root is 0 and node (branch b, depth d >= 1) is
/// 1 + b * k + (d - 1), so parents always precede children.
class Fan {
 public:
  Fan() = default;

  Fan(NodeId height, NodeId width) : height_(height), width_(width) {
    if (height < 0 || width < 1) throw InvalidStructure("fan needs height >= 0 and width >= 1");
    if (height == 0 && width != 1) throw InvalidStructure("a fan of height 0 is the single point");
  }

  static Fan point() { return Fan{}; }
  static Fan chain(NodeId height) { return height == 0 ? Fan{} : Fan{height, 1}; }

  NodeId height() const { return height_; }
  NodeId width() const { return width_; }
  NodeId size() const { return 1 + height_ * width_; }
  NodeId root() const { return 0; }
  bool is_point() const { return height_ == 0; }

  NodeId node(NodeId branch, NodeId depth) const {
    return depth == 0 ? 0 : 1 + branch * height_ + (depth - 1);
  }
  NodeId endpoint(NodeId branch) const { return node(branch, height_); }

  NodeId depth(NodeId v) const { return v == 0 ? 0 : (v - 1) % height_ + 1; }
  // Branch index of a non-root node; the root lies on every branch.
  NodeId branch(NodeId v) const { return v == 0 ? kNoNode : (v - 1) / height_; }

  NodeId parent(NodeId v) const {
    if (v == 0) return kNoNode;
    return depth(v) == 1 ? 0 : v - 1;
  }

  bool related(NodeId s, NodeId t) const { return s == t || parent(t) == s; }

  template <class F>
  void for_each_child(NodeId v, F&& f) const {
    if (height_ == 0) return;
    if (v == 0) {
      for (NodeId b = 0; b < width_; ++b) f(node(b, 1));
    } else if (depth(v) < height_) {
      f(v + 1);
    }
  }

  std::string name(NodeId v) const {
    return v == 0 ? std::string("r") : detail::branch_node_name(branch(v), depth(v));
  }

  NodeId find(std::string_view name) const {
    if (name == "r") return 0;
    const auto parsed = detail::parse_branch_node_name(name);
    if (!parsed || parsed->first >= width_ || parsed->second > height_) return kNoNode;
    return node(parsed->first, parsed->second);
  }

  friend bool operator==(const Fan&, const Fan&) = default;

 private:
  NodeId height_ = 0;
  NodeId width_ = 1;
};

/// A rooted tree in which only the root may branch. Branch lengths may
/// differ; a spider with all lengths equal is a fan.
class Spider {
 public:
  Spider() : Spider(std::vector<NodeId>{0}) {}

  explicit Spider(std::vector<NodeId> lengths) : lengths_(std::move(lengths)) {
    if (lengths_.empty()) throw InvalidStructure("spider needs at least one branch");
    offsets_.reserve(lengths_.size() + 1);
    offsets_.push_back(1);
    for (NodeId len : lengths_) {
      if (len < 0) throw InvalidStructure("negative branch length");
      if (len == 0 && lengths_.size() > 1) throw InvalidStructure("empty branch in a non-trivial spider");
      offsets_.push_back(offsets_.back() + len);
    }
  }

  explicit Spider(const Fan& fan) : Spider(std::vector<NodeId>(fan.width(), fan.height())) {}

  NodeId width() const { return static_cast<NodeId>(lengths_.size()); }
  NodeId height() const { return *std::max_element(lengths_.begin(), lengths_.end()); }
  NodeId length(NodeId branch) const { return lengths_[branch]; }
  const std::vector<NodeId>& lengths() const { return lengths_; }
  NodeId size() const { return offsets_.back(); }
  NodeId root() const { return 0; }

  NodeId node(NodeId branch, NodeId depth) const { return depth == 0 ? 0 : offsets_[branch] + depth - 1; }
  NodeId endpoint(NodeId branch) const { return node(branch, lengths_[branch]); }

  NodeId branch(NodeId v) const {
    if (v == 0) return kNoNode;
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), v);
    return static_cast<NodeId>(it - offsets_.begin()) - 1;
  }
  NodeId depth(NodeId v) const { return v == 0 ? 0 : v - offsets_[branch(v)] + 1; }

  NodeId parent(NodeId v) const {
    if (v == 0) return kNoNode;
    const NodeId b = branch(v);
    return v == offsets_[b] ? 0 : v - 1;
  }

  bool related(NodeId s, NodeId t) const { return s == t || parent(t) == s; }

  template <class F>
  void for_each_child(NodeId v, F&& f) const {
    if (v == 0) {
      for (NodeId b = 0; b < width(); ++b)
        if (lengths_[b] > 0) f(offsets_[b]);
      return;
    }
    const NodeId b = branch(v);
    if (v + 1 < offsets_[b + 1]) f(v + 1);
  }

  bool is_fan() const {
    return std::all_of(lengths_.begin(), lengths_.end(), [&](NodeId l) { return l == lengths_.front(); });
  }

  std::string name(NodeId v) const {
    return v == 0 ? std::string("r") : detail::branch_node_name(branch(v), depth(v));
  }

  NodeId find(std::string_view name) const {
    if (name == "r") return 0;
    const auto parsed = detail::parse_branch_node_name(name);
    if (!parsed || parsed->first >= width() || parsed->second > lengths_[parsed->first]) return kNoNode;
    return node(parsed->first, parsed->second);
  }

  friend bool operator==(const Spider& a, const Spider& b) { return a.lengths_ == b.lengths_; }

 private:
  std::vector<NodeId> lengths_;
  std::vector<NodeId> offsets_;
};

/// Raw description of a rooted tree as it arrives from a file or a test.
struct TreeSpec {
  std::vector<std::string> nodes;
  std::string root;
  std::map<std::string, std::string> parent;
};

enum class Shape { Tree, Fan, Invalid };

struct Classification {
  Shape shape = Shape::Invalid;
  std::string reason;  // empty unless Invalid
};

class RootedTree;
Classification validate(const TreeSpec& spec);

/// General finite rooted tree. Construction validates and throws
/// InvalidStructure on cycles, disconnection or dangling parents.
class RootedTree {
 public:
  explicit RootedTree(const TreeSpec& spec) {
    const Classification c = validate(spec);
    if (c.shape == Shape::Invalid) throw InvalidStructure(c.reason);
    assign(spec);
  }


  template <Structure S>
  static RootedTree from(const S& s) {
    TreeSpec spec;
    for (NodeId v = 0; v < s.size(); ++v) spec.nodes.push_back(s.name(v));
    spec.root = s.name(s.root());
    for (NodeId v = 0; v < s.size(); ++v)
      if (s.parent(v) != kNoNode) spec.parent[s.name(v)] = s.name(s.parent(v));
    return RootedTree(spec);
  }

  NodeId size() const { return static_cast<NodeId>(names_.size()); }
  NodeId root() const { return root_; }
  NodeId parent(NodeId v) const { return parent_[v]; }
  NodeId depth(NodeId v) const { return depth_[v]; }
  const std::vector<NodeId>& children(NodeId v) const { return children_[v]; }
  bool related(NodeId s, NodeId t) const { return s == t || parent_[t] == s; }
  std::string name(NodeId v) const { return names_[v]; }
  const std::vector<std::string>& names() const { return names_; }

  template <class F>
  void for_each_child(NodeId v, F&& f) const {
    for (NodeId c : children_[v]) f(c);
  }

  NodeId find(std::string_view name) const {
    for (NodeId i = 0; i < size(); ++i)
      if (names_[i] == name) return i;
    return kNoNode;
  }

  // s <=_T t: s lies on the path from t to the root.
  bool below_or_equal(NodeId s, NodeId t) const {
    while (t != kNoNode && depth_[t] >= depth_[s]) {
      if (t == s) return true;
      t = parent_[t];
    }
    return false;
  }

  bool is_fan() const {
    NodeId leaf_depth = -1;
    for (NodeId v = 0; v < size(); ++v) {
      if (v != root_ && children_[v].size() > 1) return false;
      if (children_[v].empty()) {
        if (leaf_depth >= 0 && depth_[v] != leaf_depth) return false;
        leaf_depth = depth_[v];
      }
    }
    return true;
  }

  friend bool operator==(const RootedTree& a, const RootedTree& b) {
    return a.names_ == b.names_ && a.parent_ == b.parent_ && a.root_ == b.root_;
  }

 private:
  friend Classification validate(const TreeSpec& spec);
  struct Unchecked {};
  RootedTree(const TreeSpec& spec, Unchecked) { assign(spec); }

  void assign(const TreeSpec& spec) {
    names_ = spec.nodes;
    std::map<std::string, NodeId> index;
    for (NodeId i = 0; i < static_cast<NodeId>(names_.size()); ++i) index[names_[i]] = i;
    root_ = index.at(spec.root);
    parent_.assign(names_.size(), kNoNode);
    for (const auto& [child, par] : spec.parent) parent_[index.at(child)] = index.at(par);
    build_index();
  }

  void build_index() {
    children_.assign(names_.size(), {});
    for (NodeId v = 0; v < size(); ++v)
      if (parent_[v] != kNoNode) children_[parent_[v]].push_back(v);
    for (auto& c : children_)
      std::sort(c.begin(), c.end(), [&](NodeId a, NodeId b) { return names_[a] < names_[b]; });
    depth_.assign(names_.size(), 0);
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (NodeId c : children_[v]) {
        depth_[c] = depth_[v] + 1;
        stack.push_back(c);
      }
    }
  }

  std::vector<std::string> names_;
  std::vector<NodeId> parent_;
  std::vector<NodeId> depth_;
  std::vector<std::vector<NodeId>> children_;
  NodeId root_ = 0;
};

inline Classification validate(const TreeSpec& spec) {
  auto invalid = [](std::string why) { return Classification{Shape::Invalid, std::move(why)}; };
  std::map<std::string, NodeId> index;
  for (NodeId i = 0; i < static_cast<NodeId>(spec.nodes.size()); ++i) {
    if (!index.emplace(spec.nodes[i], i).second) return invalid("duplicate node '" + spec.nodes[i] + "'");
  }
  if (!index.count(spec.root)) return invalid("root '" + spec.root + "' is not a node");
  if (spec.parent.count(spec.root)) return invalid("root '" + spec.root + "' has a parent (cycle)");
  for (const auto& [child, par] : spec.parent) {
    if (!index.count(child)) return invalid("parent entry for unknown node '" + child + "' (dangling)");
    if (!index.count(par)) return invalid("node '" + child + "' has dangling parent '" + par + "'");
  }
  for (const auto& n : spec.nodes) {
    if (n != spec.root && !spec.parent.count(n)) return invalid("node '" + n + "' has no parent (disconnected)");
  }
  // Every parent chain must reach the root without revisiting a node.
  std::map<std::string, int> state;  // 1 = on current chain, 2 = reaches root
  state[spec.root] = 2;
  for (const auto& start : spec.nodes) {
    std::vector<std::string> chain;
    std::string cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      cur = spec.parent.at(cur);
    }
    if (state[cur] == 1) return invalid("cycle through node '" + cur + "'");
    for (const auto& c : chain) state[c] = 2;
  }
  const RootedTree tree(spec, RootedTree::Unchecked{});
  return Classification{tree.is_fan() ? Shape::Fan : Shape::Tree, {}};
}

/// A branch as an ordered node list b(0) = root, ..., b(k).
using Branch = std::vector<NodeId>;

/// Maximal chains of a rooted tree, ordered lexicographically on the node
/// names along each chain. The single-node tree has the one branch (r).
inline std::vector<Branch> branches(const RootedTree& t) {
  std::vector<Branch> out;
  for (NodeId v = 0; v < t.size(); ++v) {
    if (!t.children(v).empty()) continue;
    Branch b;
    for (NodeId u = v; u != kNoNode; u = t.parent(u)) b.push_back(u);
    std::reverse(b.begin(), b.end());
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(), [&](const Branch& a, const Branch& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [&](NodeId x, NodeId y) { return t.name(x) < t.name(y); });
  });
  return out;
}

inline std::vector<Branch> branches(const Fan& f) {
  std::vector<Branch> out;
  for (NodeId b = 0; b < f.width(); ++b) {
    Branch br{0};
    for (NodeId d = 1; d <= f.height(); ++d) br.push_back(f.node(b, d));
    out.push_back(std::move(br));
  }
  return out;
}

/// A total node map between two structures. Status (homomorphism,
/// epimorphism) is always recomputed by check(); nothing is cached.
template <Structure Source, Structure Target>
struct Morphism {
  Source source;
  Target target;
  std::vector<NodeId> map;

  NodeId operator()(NodeId v) const { return map[v]; }

  friend bool operator==(const Morphism&, const Morphism&) = default;
};

using FanMap = Morphism<Fan, Fan>;

template <Structure S>
Morphism<S, S> identity(const S& s) {
  std::vector<NodeId> m(s.size());
  std::iota(m.begin(), m.end(), 0);
  return {s, s, std::move(m)};
}

/// A fan S covering T: one branch of S per branch of T, each padded to the
/// longest branch by repeating its endpoint.
inline Morphism<Fan, RootedTree> fan_cover(const RootedTree& t) {
  const auto bs = branches(t);
  NodeId height = 0;
  for (const auto& b : bs) height = std::max<NodeId>(height, static_cast<NodeId>(b.size()) - 1);
  const Fan s = height == 0 ? Fan::point() : Fan(height, static_cast<NodeId>(bs.size()));
  std::vector<NodeId> map(s.size(), t.root());
  for (NodeId i = 0; height > 0 && i < s.width(); ++i) {
    const auto& b = bs[i];
    for (NodeId d = 1; d <= height; ++d) map[s.node(i, d)] = b[std::min<std::size_t>(d, b.size() - 1)];
  }
  return {s, t, std::move(map)};
}

}  // namespace lelek
