#include <gtest/gtest.h>

#include "../support/properties.hpp"

using namespace mpst;

namespace {

Error parse_error(const std::string& text) {
  try {
    parse_protocol_file(text);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error for: " << text;
  return Error(ErrorKind::Syntax, "");
}

}  // namespace

TEST(Lexer, ReportsLineAndColumn) {
  Error e = parse_error("A -> B : k(x:int)[x>0];\nA -> B : k(y:int)[y>0]\nend");
  EXPECT_EQ(e.kind(), ErrorKind::Syntax);
  EXPECT_EQ(e.pos().line, 3);
  EXPECT_EQ(e.pos().column, 1);
  EXPECT_STREQ(e.what(), "expected ';', found 'end'");
}

TEST(Parser, ReservedWordsAreNotNames) {
  EXPECT_EQ(parse_error("A -> B : k(end:int)[-]; end").kind(), ErrorKind::Syntax);
  EXPECT_EQ(parse_error("mu -> B : k(x:int)[-]; end").kind(), ErrorKind::Syntax);
}

TEST(Parser, DashAssertionMeansTrue) {
  GlobalPtr g = parse_global("A -> B : k(x:int)[-]; end");
  const auto& i = std::get<Global::Interaction>(g->node);
  EXPECT_TRUE(logic::is_true(i.assertion));
}

TEST(Parser, EqualityAcceptsBothSpellings) {
  EXPECT_EQ(*parse_formula("x = 1"), *parse_formula("x == 1"));
}

TEST(Parser, NegativeLiteralsAreFolded) {
  ExprPtr e = parse_expression("-3");
  ASSERT_TRUE(std::holds_alternative<Expr::Int>(e->node));
  EXPECT_EQ(std::get<Expr::Int>(e->node).value, -3);
}

TEST(Parser, QuantifiersAndConnectives) {
  FormulaPtr f = parse_formula("forall x:int. exists y:int. x = 2*y || x = 2*y + 1");
  EXPECT_EQ(logic::to_string(f), "forall x:int. exists y:int. x==2*y || x==2*y+1");
  EXPECT_EQ(logic::free_variables(parse_formula("exists q:int. 0<c && c<=q")), std::set<std::string>{"c"});
}

TEST(Parser, ProtocolFileSections) {
  ProtocolFile f = parse_protocol_file(props::read_file("protocols/buyer_seller.gp"));
  ASSERT_EQ(f.participants.size(), 3u);
  EXPECT_EQ(f.participants[0].name, "B1");
  EXPECT_EQ(process::heading(f.participants[0].process), "init:a[B1,B2,S](s,b1,b2)");
  EXPECT_EQ(process::heading(f.participants[2].process), "join:a[S](s,b1,b2)");
  EXPECT_EQ(global::participants(f.global), (std::vector<std::string>{"B1", "S", "B2"}));
}

TEST(Parser, EmptySystem) {
  ProtocolFile f = parse_protocol_file("end");
  EXPECT_TRUE(std::holds_alternative<Global::End>(f.global->node));
  EXPECT_TRUE(f.participants.empty());
}

TEST(WellFormed, DuplicateLabel) {
  Error e = parse_error("A -> B : k&id{[-] a: end, [-] a: end}");
  EXPECT_EQ(e.kind(), ErrorKind::DuplicateLabel);
}

TEST(WellFormed, UnknownRecursionVariable) {
  EXPECT_EQ(parse_error("A -> B : k(x:int)[x>0]; t(1)").kind(), ErrorKind::UnknownRecursionVariable);
}

TEST(WellFormed, UnboundAssertionVariable) {
  EXPECT_EQ(parse_error("A -> B : k(x:int)[y>0]; end").kind(), ErrorKind::UnboundVariable);
}

TEST(WellFormed, StringsCannotBeConstrained) {
  EXPECT_EQ(parse_error("A -> B : k(x:string)[x>0]; end").kind(), ErrorKind::Sort);
}

TEST(Lexer, LiteralsAreBounded) {
  EXPECT_NO_THROW(parse_expression("999999999999999999"));
  EXPECT_EQ(parse_error("A -> B : k(x:int)[x>9999999999999999999]; end").kind(), ErrorKind::Syntax);
}

TEST(WellFormed, RecursionArity) {
  EXPECT_EQ(parse_error("mu t(0)(r:int)[-]. A -> B : k(x:int)[-]; t(1,2)").kind(), ErrorKind::ArityMismatch);
}

TEST(WellFormed, SendValueMustMatchSort) {
  Error e = parse_error(
      "A -> B : k(x:int)[-]; end\n"
      "A :: init:a[A,B](k). k!(\"text\")(x:int)[-]; end\n"
      "B :: join:a[B](k). k?(x:int)[-]; end\n");
  EXPECT_EQ(e.kind(), ErrorKind::Sort);
  EXPECT_EQ(e.pos().line, 2);
}

TEST(WellFormed, SingleInitiator) {
  Error e = parse_error(
      "A -> B : k(x:int)[-]; end\n"
      "A :: join:a[A](k). k!(1)(x:int)[-]; end\n"
      "B :: join:a[B](k). k?(x:int)[-]; end\n");
  EXPECT_EQ(e.kind(), ErrorKind::Session);
}

TEST(WellFormed, JoinRoleMatchesSection) {
  Error e = parse_error(
      "A -> B : k(x:int)[-]; end\n"
      "A :: init:a[A,B](k). k!(1)(x:int)[-]; end\n"
      "B :: join:a[A](k). k?(x:int)[-]; end\n");
  EXPECT_EQ(e.kind(), ErrorKind::Session);
}

TEST(RoundTrip, Globals) {
  auto o = props::global_round_trip(200, 11);
  EXPECT_TRUE(o.ok) << o.detail;
}

TEST(RoundTrip, Formulas) {
  auto o = props::formula_round_trip(500, 12);
  EXPECT_TRUE(o.ok) << o.detail;
}

TEST(RoundTrip, Corpus) {
  auto o = props::corpus_round_trip();
  EXPECT_TRUE(o.ok) << o.detail;
}

TEST(Diagnostics, FormatIncludesPosition) {
  Error e(ErrorKind::Syntax, "boom", SourcePos{4, 2});
  EXPECT_EQ(format_diagnostic("f.gp", e), "f.gp:4:2: boom");
  EXPECT_EQ(format_diagnostic("f.gp", Error(ErrorKind::Syntax, "boom")), "f.gp: boom");
}
