#include <gtest/gtest.h>

#include "../support/properties.hpp"

using namespace mpst;
using analysis::Dependency;
using analysis::Prefix;

namespace {

CheckReport linearity(const std::string& text) { return analysis::check_linearity(analysis::unfold_once(parse_global(text))); }

CheckReport asserted(const std::string& text) { return analysis::check_well_asserted(parse_global(text)); }

}  // namespace

TEST(Dependencies, Rules) {
  using S = std::set<Dependency>;
  EXPECT_EQ(analysis::dependencies(Prefix{"A", "B", "k"}, Prefix{"A", "B", "k"}), (S{Dependency::II, Dependency::OO}));
  EXPECT_EQ(analysis::dependencies(Prefix{"A", "B", "k"}, Prefix{"C", "B", "h"}), S{Dependency::II});
  EXPECT_EQ(analysis::dependencies(Prefix{"A", "B", "k"}, Prefix{"C", "B", "k"}), S{});
  EXPECT_EQ(analysis::dependencies(Prefix{"A", "B", "k"}, Prefix{"B", "C", "h"}), S{Dependency::IO});
  EXPECT_EQ(analysis::dependencies(Prefix{"A", "B", "k"}, Prefix{"B", "C", "k"}), S{});
  EXPECT_EQ(analysis::dependencies(Prefix{"A", "B", "k"}, Prefix{"A", "C", "k"}), S{Dependency::OO});
}

TEST(Dependencies, AgreeWithTables) {
  auto o = props::dependency_grid();
  EXPECT_TRUE(o.ok) << o.detail;
  EXPECT_EQ(o.cases, 144u);
}

TEST(Linearity, RaceOnSharedChannel) {
  CheckReport r = linearity("A -> B : k(x:int)[-]; C -> D : k(y:int)[-]; end");
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].kind, ViolationKind::Linearity);
  EXPECT_EQ(r.violations[0].path, "2");
}

TEST(Linearity, OrderedThroughAnotherChannel) {
  EXPECT_TRUE(linearity("A -> B : k(x:int)[-]; B -> C : h(y:int)[-]; C -> D : k(z:int)[-]; end").ok());
}

TEST(Linearity, SameSenderAndReceiver) {
  EXPECT_TRUE(linearity("A -> B : k(x:int)[-]; A -> B : k(y:int)[-]; end").ok());
}

TEST(Linearity, ChecksAcrossUnfolding) {
  // C -> D on k races with the next iteration's A -> B.
  CheckReport r = linearity("mu t(0)(r:int)[-]. A -> B : k(x:int)[-]; C -> D : h(y:int)[-]; t(r)");
  EXPECT_TRUE(r.ok());
  r = linearity("mu t(0)(r:int)[-]. A -> B : k(x:int)[-]; C -> D : k(y:int)[-]; t(r)");
  EXPECT_FALSE(r.ok());
}

TEST(Linearity, Corpus) {
  for (const auto& name : {"buyer_seller.gp", "guessing_game.gp", "ping_pong.gp"}) {
    ProtocolFile f = parse_protocol_file(props::read_file(std::string("protocols/") + name));
    EXPECT_TRUE(analysis::check_linearity(analysis::unfold_once(f.global)).ok()) << name;
  }
}

TEST(WellAsserted, HistorySensitivity) {
  CheckReport r = asserted("A -> B : k(x:int)[x>0]; C -> B : h(y:int)[y>x]; end");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.violations[0].kind, ViolationKind::HistorySensitivity);
  EXPECT_EQ(r.violations[0].path, "2");
  EXPECT_TRUE(asserted("A -> B : k(x:int)[x>0]; B -> C : h(y:int)[y>x]; end").ok());
}

TEST(WellAsserted, TemporalSatisfiability) {
  CheckReport r = asserted("A -> B : k(x:int)[x>0]; B -> A : h(y:int)[y>x && y<5]; end");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.violations[0].kind, ViolationKind::TemporalSatisfiability);
  EXPECT_TRUE(asserted("A -> B : k(x:int)[x>0 && x<3]; B -> A : h(y:int)[y>x && y<5]; end").ok());
}

TEST(WellAsserted, BranchNeedsSomeEnabledLabel) {
  EXPECT_FALSE(asserted("A -> B : k(x:int)[-]; A -> B : k&id{[x>0 && x<0] a: end}").ok());
  EXPECT_TRUE(asserted("A -> B : k(x:int)[-]; A -> B : k&id{[x>0] a: end, [x<=0] b: end}").ok());
}

TEST(WellAsserted, RecursionInvariant) {
  EXPECT_TRUE(asserted("mu t(1)(r:int)[r>0]. A -> B : k(x:int)[x>r]; t(x)").ok());
  CheckReport r = asserted("mu t(1)(r:int)[r>0]. A -> B : k(x:int)[-]; t(x)");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.violations[0].kind, ViolationKind::InvariantUnsatisfied);
  EXPECT_FALSE(asserted("mu t(0)(r:int)[r>0]. A -> B : k(x:int)[x>r]; t(x)").ok());
}

TEST(WellAsserted, Corpus) {
  for (const auto& name : {"buyer_seller.gp", "guessing_game.gp", "ping_pong.gp"}) {
    ProtocolFile f = parse_protocol_file(props::read_file(std::string("protocols/") + name));
    EXPECT_TRUE(analysis::check_well_asserted(f.global).ok()) << name;
  }
}

TEST(Unfold, ReplacesCallsOnce) {
  GlobalPtr g = analysis::unfold_once(parse_global("mu t(0)(r:int)[-]. A -> B : k(x:int)[-]; t(x)"));
  std::string s = global::to_string(g);
  EXPECT_NE(s.find("mu t"), std::string::npos);
  EXPECT_EQ(global::participants(g), (std::vector<std::string>{"A", "B"}));
}
