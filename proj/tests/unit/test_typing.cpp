#include <gtest/gtest.h>

#include "../support/properties.hpp"

using namespace mpst;

namespace {

const char* kGlobal =
    "C -> Srv : req(x:int)[x>0];\n"
    "Srv -> C : resp(y:int)[y>x];\n"
    "end\n";

ProtocolFile system(const std::string& client, const std::string& server) {
  return parse_protocol_file(std::string(kGlobal) + "C :: init:p[C,Srv](req,resp).\n" + client +
                             "\nSrv :: join:p[Srv](req,resp).\n" + server + "\n");
}

Validation validate(const ProtocolFile& f, const TypingMode& mode = TypingMode::multiparty()) {
  return validate_all(f, project_all(f.global), mode);
}

const std::string kClient = "req!(20)(x:int)[x>0]; resp?(y:int)[y>x]; end";
const std::string kServer = "req?(x:int)[x>0]; resp!(x+1)(y:int)[y>x]; end";

LocalPtr projection_of(const std::string& global, const std::string& who) { return project(parse_global(global), who); }

}  // namespace

TEST(Inference, PingPong) {
  Validation v = validate(system(kClient, kServer));
  EXPECT_TRUE(v.report.ok());
  ASSERT_EQ(v.types.size(), 2u);
  EXPECT_EQ(v.types[0].heading, "init:p[C,Srv](req,resp)");
  EXPECT_EQ(local::to_string(v.types[0].type), "req!<x:int>[x>0];resp?<y:int>[y>x];end");
  EXPECT_EQ(local::to_string(v.types[1].type), "req?<x:int>[x>0];resp!<y:int>[y>x];end");
}

TEST(Inference, SendAssertionMustFollow) {
  Validation v = validate(system("req!(0)(x:int)[x>0]; resp?(y:int)[y>x]; end", kServer));
  ASSERT_FALSE(v.report.ok());
  EXPECT_EQ(v.report.violations[0].kind, ViolationKind::Typing);
  EXPECT_EQ(v.report.violations[0].note, to_string(ErrorKind::TypingSendUnsat));
  EXPECT_EQ(v.report.violations[0].message, "[Typing-Send] Assertion not satisfiable: true => 0 > 0");
}

TEST(Inference, ReceivedFactsAreKnown) {
  // x+1 > x only because x was received
  EXPECT_TRUE(validate(system(kClient, "req?(x:int)[x>0]; resp!(x+1)(y:int)[y>x]; end")).report.ok());
  Validation v = validate(system(kClient, "req?(x:int)[x>0]; resp!(2)(y:int)[y>x]; end"));
  EXPECT_FALSE(v.report.ok());
}

TEST(Inference, IfConditionsAreKnownInBranches) {
  Validation v = validate(system(kClient,
                                 "req?(x:int)[x>0]; if x > 5 then resp!(6)(y:int)[y>x]; end "
                                 "else resp!(x+1)(y:int)[y>x]; end"));
  EXPECT_FALSE(v.report.ok());
  v = validate(system(kClient,
                      "req?(x:int)[x>0]; if x < 5 then resp!(6)(y:int)[y>x]; end "
                      "else resp!(x+1)(y:int)[y>x]; end"));
  EXPECT_TRUE(v.report.ok());
}

TEST(Inference, ChannelNotInScope) {
  Validation v = validate(system("nope!(20)(x:int)[x>0]; resp?(y:int)[y>x]; end", kServer));
  ASSERT_FALSE(v.report.ok());
  EXPECT_EQ(v.report.violations[0].note, to_string(ErrorKind::ChannelNotInScope));
}

TEST(Inference, UnknownBranchGroup) {
  ProtocolFile f = parse_protocol_file(
      "A -> B : k&id{[-] a: end, [-] b: end}\n"
      "A :: init:s[A,B](k). k$[-] other.a; end\n"
      "B :: join:s[B](k). k&id{[-] a: end [-] b: end}\n");
  Validation v = validate(f);
  ASSERT_FALSE(v.report.ok());
  EXPECT_EQ(v.report.violations[0].note, to_string(ErrorKind::UnknownBranchGroup));
}

TEST(Inference, GuessingGameUsesRecursionInvariant) {
  ProtocolFile f = parse_protocol_file(props::read_file("protocols/guessing_game.gp"));
  Validation v = validate(f);
  EXPECT_TRUE(v.report.ok()) << (v.report.ok() ? "" : v.report.violations[0].render());
  auto golden = props::block(props::read_file("tests/golden/guessing_game_run.out"), "Types:");
  ASSERT_EQ(v.types.size(), golden.size());
  for (std::size_t i = 0; i < golden.size(); ++i)
    EXPECT_EQ(v.types[i].heading + ". " + local::to_string(v.types[i].type), golden[i]);
}

TEST(Refinement, SendsMayStrengthen) {
  LocalPtr weak = projection_of("A -> B : k(x:int)[x>0]; end", "A");
  LocalPtr strong = projection_of("A -> B : k(x:int)[x>50]; end", "A");
  EXPECT_FALSE(refines(strong, weak).has_value());
  auto m = refines(weak, strong);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->path, "1");
}

TEST(Refinement, ReceivesMayWeaken) {
  LocalPtr weak = projection_of("A -> B : k(x:int)[x>0]; end", "B");
  LocalPtr strong = projection_of("A -> B : k(x:int)[x>50]; end", "B");
  EXPECT_FALSE(refines(weak, strong).has_value());
  EXPECT_TRUE(refines(strong, weak).has_value());
}

TEST(Refinement, SelectionMayDropLabels) {
  LocalPtr both = projection_of("A -> B : k&id{[-] a: end, [-] b: end}", "A");
  LocalPtr one = projection_of("A -> B : k&id{[-] a: end}", "A");
  EXPECT_FALSE(refines(one, both).has_value());
  EXPECT_TRUE(refines(both, one).has_value());
  // a branching must accept every projected label
  EXPECT_TRUE(refines(projection_of("A -> B : k&id{[-] a: end}", "B"),
                      projection_of("A -> B : k&id{[-] a: end, [-] b: end}", "B"))
                  .has_value());
}

TEST(Refinement, SortMismatch) {
  auto m = refines(projection_of("A -> B : k(x:int)[-]; end", "A"), projection_of("A -> B : k(x:string)[-]; end", "A"));
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->reason, "payload of sort int where string is expected");
}

TEST(Refinement, ReportShowsWholeTypes) {
  PipelineResult r = props::run_protocol("buyer_seller_title_int.gp");
  ASSERT_EQ(r.typing_report.violations.size(), 1u);
  const Violation& v = r.typing_report.violations[0];
  EXPECT_EQ(v.kind, ViolationKind::Refinement);
  EXPECT_EQ(v.message, "Local type doesn't match projection for B1!");
  ASSERT_EQ(v.details.size(), 2u);
  EXPECT_EQ(v.details[0], "Type:       s!<t:int>[true];b1?<q:int>[q>0];b2!<c:int>[0<c && c<=q];end");
}

TEST(Refinement, ReflexiveAndTransitive) {
  auto o = props::refinement_reflexive_transitive();
  EXPECT_TRUE(o.ok) << o.detail;
}

TEST(Composition, DeterministicAndOrderIndependent) {
  auto o = props::typing_deterministic_and_commutative();
  EXPECT_TRUE(o.ok) << o.detail;
}

TEST(Composition, RoleTypedTwice) {
  ProtocolFile f = system(kClient, kServer);
  auto ids = branch_ids(f);
  TypingMode mode = TypingMode::multiparty();
  TypingEnvironment srv = infer_type(f.participants[1].process, mode, ids);
  TypingEnvironment both = mode.compose(infer_type(f.participants[0].process, mode, ids), srv);
  EXPECT_EQ(mode.incompatibility(both, srv), "role Srv of session p is typed twice");
  EXPECT_EQ(both.entries.size(), 2u);
}

TEST(Composition, BinaryModeNeedsDualTypes) {
  EXPECT_TRUE(validate(system(kClient, kServer), TypingMode::binary_sessions()).report.ok());
  Validation v = validate(system(kClient, "req?(x:int)[x>0]; end"), TypingMode::binary_sessions());
  ASSERT_FALSE(v.report.ok());
  bool compat = false;
  for (const auto& x : v.report.violations) compat |= x.kind == ViolationKind::Compatibility;
  EXPECT_TRUE(compat);
}

TEST(Composition, BinaryModeRejectsThreeRoles) {
  ProtocolFile f = parse_protocol_file(props::read_file("protocols/buyer_seller.gp"));
  EXPECT_FALSE(validate(f, TypingMode::binary_sessions()).report.ok());
}

TEST(Composition, MultipartyEnvironmentIsComplete) {
  ProtocolFile f = parse_protocol_file(props::read_file("protocols/buyer_seller.gp"));
  Validation v = validate(f);
  EXPECT_TRUE(v.report.ok());
  EXPECT_EQ(v.environment.entries.size(), 3u);
}
