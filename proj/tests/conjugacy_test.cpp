#include <gtest/gtest.h>

#include "lelek/conjugacy.hpp"
#include "test_support.hpp"

using namespace lelek;
using lelek::testing::naive_is_epi;

namespace {

SRelation rel(const Fan& t, std::initializer_list<std::pair<const char*, const char*>> pairs) {
  SRelation r{t, {}};
  for (auto [a, b] : pairs) r.pairs.insert({t.find(a), t.find(b)});
  return r;
}

// Every relation on t, as the bit pattern `code` over t x t.
SRelation from_bits(const Fan& t, std::uint64_t code) {
  SRelation r{t, {}};
  const NodeId n = t.size();
  for (NodeId i = 0; i < n * n; ++i)
    if ((code >> i) & 1) r.pairs.insert({i / n, i % n});
  return r;
}

// Members of F+ by the image characterization: random S and epimorphisms.
SRelation random_member(Rng& rng, Fan* t_out = nullptr) {
  const Fan t(1 + rng.below(2), 1 + rng.below(3));
  const Fan s(t.height() + rng.below(2), t.width() + rng.below(3));
  auto p1 = random_epi(s, t, rng), p2 = random_epi(s, t, rng);
  if (t_out) *t_out = t;
  return {t, realized(*p1, *p2)};
}

void expect_witness(const SRelation& r) {
  const auto w = fplus_witness(r);
  EXPECT_TRUE(naive_is_epi(w.s, r.t, w.p1.map));
  EXPECT_TRUE(naive_is_epi(w.s, r.t, w.p2.map));
  std::set<NodePair> image;
  for (NodeId z = 0; z < w.s.size(); ++z) image.insert({w.p1.map[z], w.p2.map[z]});
  EXPECT_EQ(image, r.pairs);
}

}  // namespace

TEST(SurjectiveRel, Examples) {
  const Fan f11(1, 1), f12(1, 2);
  EXPECT_TRUE(is_surjective_rel(graph_of(identity(f11))));
  EXPECT_FALSE(is_surjective_rel(SRelation{f11, {}}));
  EXPECT_TRUE(is_surjective_rel(rel(f12, {{"r", "r"}, {"1:1", "2:1"}, {"2:1", "1:1"}})));
}

TEST(SConnected, Examples) {
  const Fan c = Fan::chain(2);
  const auto diag = rel(c, {{"r", "r"}, {"1:1", "1:1"}, {"1:2", "1:2"}});
  EXPECT_EQ(s_connected(diag), diag.pairs);
  const auto twisted = rel(c, {{"r", "r"}, {"1:1", "1:2"}, {"1:2", "1:1"}});
  EXPECT_EQ(s_connected(twisted), (std::set<NodePair>{{0, 0}}));
  EXPECT_TRUE(s_connected(SRelation{c, {{1, 1}}}).empty());
}

TEST(SConnected, ClosedAndMonotone) {
  const Fan t(2, 2);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const SRelation r = from_bits(t, rng.next() & rng.next());
    const auto reach = s_connected(r);
    // closure: any s-adjacent pair of a reached pair is reached
    for (const auto& [x0, y0] : reach)
      for (const auto& [x1, y1] : r.pairs)
        if (t.related(x0, x1) && t.related(y0, y1)) {
          EXPECT_TRUE(reach.count({x1, y1}));
        }
    SRelation bigger = r;
    bigger.pairs.insert({static_cast<NodeId>(rng.below(t.size())), static_cast<NodeId>(rng.below(t.size()))});
    const auto grown = s_connected(bigger);
    for (const auto& p : reach) EXPECT_TRUE(grown.count(p));
  }
}

TEST(InFPlus, Examples) {
  EXPECT_TRUE(in_fplus(graph_of(identity(Fan(1, 1)))));
  const Fan c = Fan::chain(2);
  const auto twisted = rel(c, {{"r", "r"}, {"1:1", "1:2"}, {"1:2", "1:1"}});
  EXPECT_FALSE(in_fplus(twisted));
  EXPECT_FALSE(fplus_oracle(twisted));
  const auto swap = rel(Fan(1, 2), {{"r", "r"}, {"1:1", "2:1"}, {"2:1", "1:1"}});
  EXPECT_TRUE(in_fplus(swap));
  EXPECT_TRUE(fplus_oracle(swap));
  EXPECT_FALSE(fplus_oracle(rel(Fan(1, 1), {{"1:1", "1:1"}, {"r", "1:1"}, {"1:1", "r"}})));
}

TEST(FPlusWitness, IdentityOnArc) {
  const auto r = graph_of(identity(Fan(1, 1)));
  const auto w = fplus_witness(r);
  EXPECT_EQ(w.s, Fan(4, 2));
  expect_witness(r);
  EXPECT_THROW(fplus_witness(SRelation{Fan(1, 1), {{0, 0}}}), NotInFPlus);
}

TEST(FPlusWitness, RandomMembers) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const SRelation r = random_member(rng);
    ASSERT_TRUE(in_fplus(r));
    expect_witness(r);
  }
}

TEST(FPlusOracle, AgreesOnSmallFans) {
  std::size_t members = 0, total = 0;
  for (const Fan& t : lelek::testing::all_small_fans(3)) {
    const NodeId n = t.size();
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * n)); ++code) {
      const SRelation r = from_bits(t, code);
      const bool a = in_fplus(r), b = fplus_oracle(r);
      ASSERT_EQ(a, b) << "fan " << t.height() << "x" << t.width() << " code " << code;
      members += a;
      ++total;
    }
  }
  EXPECT_GT(members, 0u);
  EXPECT_GT(total, members);
}

TEST(FPlusOracle, WitnessesCheckOut) {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const SRelation r = random_member(rng);
    const auto w = fplus_oracle_witness(r);
    ASSERT_TRUE(w);
    EXPECT_TRUE(naive_is_epi(w->s, r.t, w->p1.map));
    EXPECT_TRUE(naive_is_epi(w->s, r.t, w->p2.map));
    EXPECT_LE(static_cast<std::size_t>(w->s.size()), 1 + (2 * r.t.height() + 2) * r.pairs.size());
  }
}

TEST(FPlusJpp, Examples) {
  const auto id = graph_of(identity(Fan(1, 1)));
  const auto j = fplus_jpp(id, id);
  EXPECT_EQ(j.joint.t, Fan(1, 2));
  EXPECT_EQ(j.joint.pairs, graph_of(identity(Fan(1, 2))).pairs);
  EXPECT_TRUE(in_fplus(j.joint));
  const auto pt = graph_of(identity(Fan::point()));
  EXPECT_EQ(fplus_jpp(pt, pt).joint.t, Fan::point());
  EXPECT_THROW(fplus_jpp(id, SRelation{Fan(1, 1), {}}), NotInFPlus);
}

TEST(FPlusJpp, RandomPairs) {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const SRelation a = random_member(rng), b = random_member(rng);
    const auto j = fplus_jpp(a, b);
    EXPECT_TRUE(in_fplus(j.joint));
    EXPECT_TRUE(is_rel_epimorphism(j.first, j.joint, a));
    EXPECT_TRUE(is_rel_epimorphism(j.second, j.joint, b));
  }
}
