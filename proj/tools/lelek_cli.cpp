// lelek: command-line front end.
//
// Exit status: 0 success / property holds, 1 a checked property is false,
// 2 usage or input error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "lelek/lelek.hpp"

using namespace lelek;
using lelek::io::json;

namespace {

constexpr int kOk = 0;
constexpr int kFalse = 1;
constexpr int kUsage = 2;

struct Options {
  NodeId depth = 6;
  std::uint64_t seed = 1;
  NodeId level = 2;
  NodeId n = 3, m = 2;
  NodeId max_height = 2, max_width = 2;
  std::string in, out;
  bool quiet = false;
};

void emit(const Options& o, const json& j) {
  if (o.out.empty())
    std::cout << j.dump(1) << "\n";
  else
    io::write_json(o.out, j);
}

json report_json(const Report& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"level", x.level}, {"condition", x.condition}, {"witness", x.witness}});
  return {{"ok", r.ok()}, {"checks", r.checks}, {"violations", std::move(v)}};
}

int cmd_verify_family(const Options& o) {
  const auto r = verify_family(o.max_height, o.max_width);
  json j = {{"schema_version", io::kSchemaVersion}, {"max_height", o.max_height}, {"max_width", o.max_width},
            {"jpp_cases", r.jpp_cases}, {"ap_cases", r.ap_cases}, {"failures", r.failures}, {"witness", r.witness}};
  if (!o.quiet) std::cerr << "jpp " << r.jpp_cases << " cases, ap " << r.ap_cases << " cases, " << r.failures << " failures\n";
  emit(o, j);
  return r.ok() ? kOk : kFalse;
}

int cmd_build(const Options& o) {
  const InverseSequence seq = build(o.depth, o.seed);
  const Envelope env = envelope(seq);
  const Report rs = verify(seq), re = verify_envelope(seq, env);
  json j = {{"schema_version", io::kSchemaVersion},
            {"sequence", io::to_json(seq)},
            {"envelope", io::to_json(env)},
            {"verify", {{"sequence", report_json(rs)}, {"envelope", report_json(re)}}}};
  if (!o.quiet)
    for (NodeId n = 0; n <= seq.depth(); ++n)
      std::cerr << "level " << n << ": T height " << seq.level(n).height() << " width " << seq.level(n).width()
                << ", S nodes " << env.levels[n].size() << "\n";
  emit(o, j);
  return rs.ok() && re.ok() ? kOk : kFalse;
}

int cmd_render(const Options& o) {
  if (o.level > o.depth) throw DomainMismatch("render: --level exceeds --depth");
  const std::string svg = render(envelope(build(o.depth, o.seed)), o.level);
  if (o.out.empty())
    std::cout << svg;
  else
    io::write_text(o.out, svg);
  return kOk;
}

int cmd_cells(const Options& o) {
  if (o.level > o.depth) throw DomainMismatch("cells: --level exceeds --depth");
  emit(o, io::to_json(cells(envelope(build(o.depth, o.seed)), o.level)));
  return kOk;
}

int cmd_gap(const Options& o) {
  if (o.level > o.depth) throw DomainMismatch("gap: --level exceeds --depth");
  const Envelope env = envelope(build(o.depth, o.seed));
  json rows = json::array();
  for (NodeId m = o.level; m <= o.depth; ++m) {
    const double g = endpoint_gap(env, o.level, m);
    const double mesh = cells(env, m).mesh();
    if (!o.quiet) std::fprintf(stderr, "n=%d m=%d gap=%.6f mesh=%.6f\n", static_cast<int>(o.level), static_cast<int>(m), g, mesh);
    rows.push_back({{"m", m}, {"gap", g}, {"mesh", mesh}});
  }
  emit(o, {{"schema_version", io::kSchemaVersion}, {"seed", o.seed}, {"depth", o.depth}, {"n", o.level}, {"rows", rows}});
  return kOk;
}

int cmd_cover(const Options& o) {
  const auto c = cover_cantor(o.n, o.m);
  const auto r = check_cover(c);
  json j = io::to_json(c);
  j["report"] = io::to_json(r);
  if (!o.quiet)
    std::cerr << "|A| = " << c.a.size() << ", eps = " << c.eps.str() << ", C1-C4: " << r.c1 << r.c2 << r.c3 << r.c4 << "\n";
  emit(o, j);
  return r.ok() ? kOk : kFalse;
}

int cmd_factorize(const Options& o) {
  const json in = io::read_json(o.in);
  const FanMap beta0 = io::fan_map_from_json(in.at("beta0"));
  const FanMap beta = io::fan_map_from_json(in.at("beta"));
  if (!(beta0.source == beta.source) || !(beta0.target == beta.target))
    throw DomainMismatch("factorize: beta0 and beta differ in source or target");
  try {
    const auto star = ensure_star(beta0, beta0.target.width());
    const FanMap lifted{star.carrier, beta.target, compose_maps(beta.map, star.lift.map)};
    const auto chain = factorize(star.beta0, lifted);
    const auto rep = check_chain(chain, star.beta0, lifted);
    json j = io::to_json(chain);
    j["lift"] = io::map_json(star.carrier, beta0.source, star.lift.map);
    j["valid"] = rep.ok();
    if (!o.quiet) std::cerr << "chain of length " << chain.length() << (rep.ok() ? "" : ": " + rep.witness) << "\n";
    emit(o, j);
    return rep.ok() ? kOk : kFalse;
  } catch (const NotEpi& e) {
    std::cerr << e.what() << "\n";
    return kFalse;
  } catch (const NotOnto& e) {
    std::cerr << e.what() << "\n";
    return kFalse;
  }
}

int cmd_fplus(const Options& o) {
  const SRelation rel = io::relation_from_json(io::read_json(o.in));
  json j = {{"schema_version", io::kSchemaVersion}, {"relation", io::to_json(rel)}};
  int code = kOk;
  if (auto why = fplus_refutation(rel)) {
    j["in_fplus"] = false;
    j["refutation"] = *why;
    code = kFalse;
  } else {
    j["in_fplus"] = true;
    j["witness"] = io::to_json(fplus_witness(rel));
  }
  if (!o.quiet) std::cerr << (code == kOk ? "in F+" : "not in F+: " + j["refutation"].get<std::string>()) << "\n";
  emit(o, j);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite approximations of the Lelek fan"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("-q,--quiet", o.quiet, "No progress output on stderr");

  auto seq_opts = [&](CLI::App* c) {
    c->add_option("--depth", o.depth, "Levels built above the point")->check(CLI::Range(0, 12));
    c->add_option("--seed", o.seed, "Random seed");
  };
  auto out_opt = [&](CLI::App* c) { c->add_option("-o,--out", o.out, "Output file (default: stdout)"); };

  auto* fam = app.add_subcommand("verify-family", "Exhaustive JPP and AP checks");
  fam->add_option("--max-height", o.max_height)->check(CLI::Range(1, 3));
  fam->add_option("--max-width", o.max_width)->check(CLI::Range(1, 3));
  out_opt(fam);

  auto* bld = app.add_subcommand("build", "Build and verify the sequence and its envelope");
  seq_opts(bld);
  out_opt(bld);

  auto* rnd = app.add_subcommand("render", "SVG of one envelope level");
  seq_opts(rnd);
  rnd->add_option("--level", o.level)->check(CLI::NonNegativeNumber);
  out_opt(rnd);

  auto* cel = app.add_subcommand("cells", "Cell assignment of one envelope level");
  seq_opts(cel);
  cel->add_option("--level", o.level)->check(CLI::NonNegativeNumber);
  out_opt(cel);

  auto* gap = app.add_subcommand("gap", "Endpoint gap table for a fixed level");
  seq_opts(gap);
  gap->add_option("--level", o.level, "The level n of endpoint_gap(n, m)")->check(CLI::NonNegativeNumber);
  out_opt(gap);

  auto* cov = app.add_subcommand("cover", "Cantor-fan cover and its (C1)-(C4) report");
  cov->add_option("-n", o.n)->check(CLI::Range(2, 64));
  cov->add_option("-m", o.m)->check(CLI::Range(1, 64));
  out_opt(cov);

  auto* fac = app.add_subcommand("factorize", "Chain of adjacent epimorphisms from beta0 to beta");
  fac->add_option("--chain", o.in, "JSON with morphisms \"beta0\" and \"beta\"")->required()->check(CLI::ExistingFile);
  out_opt(fac);

  auto* fpl = app.add_subcommand("fplus", "Decide membership in F+");
  fpl->add_option("--check", o.in, "Relation JSON")->required()->check(CLI::ExistingFile);
  out_opt(fpl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fam) return cmd_verify_family(o);
    if (*bld) return cmd_build(o);
    if (*rnd) return cmd_render(o);
    if (*cel) return cmd_cells(o);
    if (*gap) return cmd_gap(o);
    if (*cov) return cmd_cover(o);
    if (*fac) return cmd_factorize(o);
    if (*fpl) return cmd_fplus(o);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
