#pragma once

// JSON forms of the library's values. Nodes are referred to by name
// ("r", "i:j"); every top-level document carries "schema_version".

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lelek/conjugacy.hpp"
#include "lelek/core.hpp"
#include "lelek/geometry.hpp"
#include "lelek/homeo.hpp"
#include "lelek/sequence.hpp"
#include "lelek/structures.hpp"

namespace lelek::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct ParseError : Error {
  using Error::Error;
};

template <Structure S>
json structure_json(const S& s) {
  json nodes = json::array(), parent = json::object();
  for (NodeId v = 0; v < s.size(); ++v) {
    nodes.push_back(s.name(v));
    if (s.parent(v) != kNoNode) parent[s.name(v)] = s.name(s.parent(v));
  }
  return {{"nodes", std::move(nodes)}, {"root", s.name(s.root())}, {"parent", std::move(parent)}};
}

inline TreeSpec tree_spec(const json& j) {
  TreeSpec spec;
  try {
    spec.nodes = j.at("nodes").get<std::vector<std::string>>();
    spec.root = j.at("root").get<std::string>();
    for (const auto& [k, v] : j.at("parent").items()) spec.parent[k] = v.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("structure: ") + e.what());
  }
  return spec;
}

inline json to_json(const Fan& f) {
  json j = {{"height", f.height()}, {"width", f.width()}};
  j.update(structure_json(f));
  return j;
}

/// Reads {"height","width"} and, when present, checks the node list and
/// parent table against the canonical fan of that shape. Without height
/// and width the tree must validate as a fan.
inline Fan fan_from_json(const json& j) {
  Fan f;
  if (j.contains("height") && j.contains("width")) {
    const auto h = j.at("height").get<NodeId>(), w = j.at("width").get<NodeId>();
    if (h < 0 || w < 1 || (h == 0 && w != 1)) throw InvalidStructure("fan: bad height/width");
    f = h == 0 ? Fan::point() : Fan(h, w);
    if (!j.contains("nodes")) return f;
  } else {
    const RootedTree t(tree_spec(j));
    if (validate(tree_spec(j)).shape != Shape::Fan && t.size() > 1) throw InvalidStructure("structure is not a fan");
    NodeId w = 0, h = 0;
    for (NodeId v = 0; v < t.size(); ++v) {
      if (v != t.root() && t.parent(v) == t.root()) ++w;
      h = std::max(h, t.depth(v));
    }
    f = h == 0 ? Fan::point() : Fan(h, w);
  }
  const TreeSpec spec = tree_spec(j);
  const json canon = structure_json(f);
  const TreeSpec want = tree_spec(canon);
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(spec.nodes) != sorted(want.nodes) || spec.root != want.root || spec.parent != want.parent)
    throw InvalidStructure("fan: nodes/parent do not match height " + std::to_string(f.height()) + " width " +
                           std::to_string(f.width()) + " with canonical names");
  return f;
}

inline json to_json(const Spider& s) {
  json j = {{"lengths", s.lengths()}};
  j.update(structure_json(s));
  return j;
}

inline Spider spider_from_json(const json& j) {
  return Spider(j.at("lengths").get<std::vector<NodeId>>());
}

/// {name: name} table of a node map.
template <Structure S, Structure T>
json map_json(const S& s, const T& t, const std::vector<NodeId>& map) {
  json m = json::object();
  for (NodeId v = 0; v < s.size(); ++v) m[s.name(v)] = t.name(map[v]);
  return m;
}

template <Structure S, Structure T>
std::vector<NodeId> map_from_json(const S& s, const T& t, const json& m) {
  std::vector<NodeId> out(s.size(), kNoNode);
  if (!m.is_object()) throw ParseError("map: expected an object");
  for (const auto& [k, v] : m.items()) {
    const NodeId a = s.find(k), b = t.find(v.template get<std::string>());
    if (a == kNoNode || b == kNoNode) throw ParseError("map: unknown node " + k + " -> " + v.dump());
    out[a] = b;
  }
  for (NodeId v = 0; v < s.size(); ++v)
    if (out[v] == kNoNode) throw ParseError("map: node " + s.name(v) + " has no image");
  return out;
}

inline json to_json(const FanMap& f) {
  return {{"source", to_json(f.source)}, {"target", to_json(f.target)}, {"map", map_json(f.source, f.target, f.map)}};
}

inline FanMap fan_map_from_json(const json& j) {
  Fan s = fan_from_json(j.at("source")), t = fan_from_json(j.at("target"));
  auto m = map_from_json(s, t, j.at("map"));
  return {std::move(s), std::move(t), std::move(m)};
}

// -- sequence ---------------------------------------------------------------

inline json to_json(const Demand& d) {
  return {{"level", d.level}, {"phi1", to_json(d.phi1)}, {"phi2", to_json(d.phi2)}, {"leaf_depth", d.leaf_depth}};
}

inline Demand demand_from_json(const json& j) {
  return {j.at("level").get<NodeId>(), fan_map_from_json(j.at("phi1")), fan_map_from_json(j.at("phi2")),
          j.at("leaf_depth").get<NodeId>()};
}

inline json to_json(const Certificate& c, const Fan& source) {
  json j = {{"kind", c.kind == Certificate::Kind::Universality ? "universality" : "extension"},
            {"level", c.level},
            {"target", to_json(c.target)},
            {"witness", map_json(source, c.target, c.witness)}};
  j["demand"] = c.demand ? to_json(*c.demand) : json(nullptr);
  return j;
}

/// {"schema_version", "seed", "levels": [{fan, bond, certificates}]}; the
/// bond of level n is f_n: T_{n+1} -> T_n (null on the last level) and a
/// certificate is listed at the level its witness starts from.
inline json to_json(const InverseSequence& seq) {
  json levels = json::array();
  for (NodeId n = 0; n <= seq.depth(); ++n) {
    const Fan& t = seq.level(n);
    json entry = {{"fan", to_json(t)}};
    entry["bond"] = n < seq.depth() ? map_json(seq.level(n + 1), t, seq.bond_map(n)) : json(nullptr);
    json certs = json::array();
    for (std::size_t i = 0; i < seq.certificates().size(); ++i) {
      const auto& c = seq.certificates()[i];
      if (c.level != n) continue;
      json cj = {{"index", i}};
      cj.update(to_json(c, t));
      certs.push_back(std::move(cj));
    }
    entry["certificates"] = std::move(certs);
    levels.push_back(std::move(entry));
  }
  return {{"schema_version", kSchemaVersion}, {"seed", seq.seed()}, {"levels", std::move(levels)}};
}

inline InverseSequence sequence_from_json(const json& j) {
  std::vector<Fan> levels;
  for (const auto& e : j.at("levels")) levels.push_back(fan_from_json(e.at("fan")));
  std::vector<std::vector<NodeId>> bonds;
  std::vector<std::pair<std::size_t, Certificate>> certs;
  for (std::size_t n = 0; n < levels.size(); ++n) {
    const json& e = j.at("levels")[n];
    if (n + 1 < levels.size()) bonds.push_back(map_from_json(levels[n + 1], levels[n], e.at("bond")));
    for (const auto& c : e.at("certificates")) {
      Certificate cert;
      const auto kind = c.at("kind").get<std::string>();
      if (kind != "universality" && kind != "extension") throw ParseError("certificate: unknown kind " + kind);
      cert.kind = kind == "universality" ? Certificate::Kind::Universality : Certificate::Kind::Extension;
      cert.level = c.at("level").get<NodeId>();
      cert.target = fan_from_json(c.at("target"));
      cert.witness = map_from_json(levels.at(cert.level), cert.target, c.at("witness"));
      if (!c.at("demand").is_null()) cert.demand = demand_from_json(c.at("demand"));
      certs.emplace_back(c.at("index").get<std::size_t>(), std::move(cert));
    }
  }
  std::sort(certs.begin(), certs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Certificate> ordered;
  for (auto& [_, c] : certs) ordered.push_back(std::move(c));
  return InverseSequence::from_parts(j.at("seed").get<std::uint64_t>(), std::move(levels), std::move(bonds),
                                     std::move(ordered));
}

inline json to_json(const Envelope& env) {
  json levels = json::array();
  for (NodeId n = 0; n <= env.depth(); ++n) {
    const Spider& s = env.levels[n];
    json entry = {{"spider", to_json(s)}, {"t_height", env.t_height[n]}, {"t_width", env.t_width[n]}};
    const Fan t = env.t_height[n] == 0 ? Fan::point() : Fan(env.t_height[n], env.t_width[n]);
    entry["inclusion"] = map_json(t, s, env.inclusions[n]);
    entry["bond"] = n < env.depth() ? map_json(env.levels[n + 1], s, env.bonds[n]) : json(nullptr);
    levels.push_back(std::move(entry));
  }
  return {{"schema_version", kSchemaVersion}, {"levels", std::move(levels)}};
}

inline Envelope envelope_from_json(const json& j) {
  Envelope env;
  for (const auto& e : j.at("levels")) {
    env.levels.push_back(spider_from_json(e.at("spider")));
    env.t_height.push_back(e.at("t_height").get<NodeId>());
    env.t_width.push_back(e.at("t_width").get<NodeId>());
  }
  for (std::size_t n = 0; n < env.levels.size(); ++n) {
    const json& e = j.at("levels")[n];
    const Fan t = env.t_height[n] == 0 ? Fan::point() : Fan(env.t_height[n], env.t_width[n]);
    env.inclusions.push_back(map_from_json(t, env.levels[n], e.at("inclusion")));
    if (n + 1 < env.levels.size()) env.bonds.push_back(map_from_json(env.levels[n + 1], env.levels[n], e.at("bond")));
  }
  return env;
}

// -- geometry ---------------------------------------------------------------

inline json to_json(const Rational& r) { return r.str(); }

inline Rational rational_from_json(const json& j) {
  const auto s = j.get<std::string>();
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ParseError("rational: cannot parse " + s);
  }
}

inline json to_json(const CellAssignment& c) {
  json nodes = json::array();
  for (NodeId v = 0; v < c.shape.size(); ++v)
    nodes.push_back({{"name", c.shape.name(v)}, {"code", c.code(v)}, {"lo", c.lo[v]}, {"hi", c.hi[v]}});
  return {{"schema_version", kSchemaVersion}, {"level", c.level}, {"spider", to_json(c.shape)},
          {"branch_code", c.branch_code}, {"mesh", c.mesh()}, {"nodes", std::move(nodes)}};
}

inline json to_json(const CoverStructure& c) {
  json intervals = json::array();
  for (const auto& [lo, hi] : c.intervals) intervals.push_back({to_json(lo), to_json(hi)});
  return {{"schema_version", kSchemaVersion},
          {"n", c.n},
          {"m", c.m},
          {"fan", to_json(c.a)},
          {"intervals", std::move(intervals)},
          {"clopens", c.clopens},
          {"cylinder_depth", c.cylinder_depth},
          {"eps", to_json(c.eps)}};
}

inline CoverStructure cover_from_json(const json& j) {
  CoverStructure c;
  c.n = j.at("n").get<NodeId>();
  c.m = j.at("m").get<NodeId>();
  c.a = fan_from_json(j.at("fan"));
  for (const auto& p : j.at("intervals")) c.intervals.emplace_back(rational_from_json(p.at(0)), rational_from_json(p.at(1)));
  c.clopens = j.at("clopens").get<std::vector<std::vector<std::string>>>();
  c.cylinder_depth = j.at("cylinder_depth").get<NodeId>();
  c.eps = rational_from_json(j.at("eps"));
  return c;
}

inline json to_json(const CoverReport& r) {
  return {{"c1", r.c1}, {"c2", r.c2}, {"c3", r.c3}, {"c4", r.c4}, {"samples", r.samples}, {"witness", r.witness}};
}

// -- factorization ----------------------------------------------------------

inline json to_json(const FactorChain& c) {
  json steps = json::array();
  for (const auto& s : c.steps) steps.push_back(map_json(c.carrier, c.base, s));
  return {{"schema_version", kSchemaVersion}, {"base", to_json(c.base)}, {"carrier", to_json(c.carrier)},
          {"order", c.order}, {"steps", std::move(steps)}};
}

inline FactorChain chain_from_json(const json& j) {
  FactorChain c{fan_from_json(j.at("base")), fan_from_json(j.at("carrier")), {}, j.at("order").get<std::vector<NodeId>>()};
  for (const auto& s : j.at("steps")) c.steps.push_back(map_from_json(c.carrier, c.base, s));
  return c;
}

// -- relations --------------------------------------------------------------

inline json to_json(const SRelation& r) {
  json pairs = json::array();
  for (const auto& [x, y] : r.pairs) pairs.push_back({r.t.name(x), r.t.name(y)});
  return {{"fan", to_json(r.t)}, {"pairs", std::move(pairs)}};
}

inline SRelation relation_from_json(const json& j) {
  SRelation r{fan_from_json(j.at("fan")), {}};
  for (const auto& p : j.at("pairs")) {
    if (!p.is_array() || p.size() != 2) throw ParseError("pairs: expected [x, y]");
    const NodeId x = r.t.find(p[0].get<std::string>()), y = r.t.find(p[1].get<std::string>());
    if (x == kNoNode || y == kNoNode) throw ParseError("pairs: unknown node in " + p.dump());
    r.pairs.insert({x, y});
  }
  return r;
}

inline json to_json(const FPlusWitness& w) {
  return {{"s", to_json(w.s)}, {"p1", map_json(w.s, w.p1.target, w.p1.map)}, {"p2", map_json(w.s, w.p2.target, w.p2.map)}};
}

// -- files ------------------------------------------------------------------

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Writes through a temporary file and renames it into place.
inline void write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("cannot write " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename into " + path);
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(1) + "\n"); }

}  // namespace lelek::io
