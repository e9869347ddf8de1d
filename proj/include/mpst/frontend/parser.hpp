#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpst/core/global.hpp"
#include "mpst/core/local.hpp"
#include "mpst/core/process.hpp"
#include "mpst/frontend/lexer.hpp"

namespace mpst {

struct ParticipantProcess {
  std::string name;
  ProcessPtr process;
  SourcePos pos;
};

/// One input file: the global description followed by `Name :: process` sections.
struct ProtocolFile {
  GlobalPtr global;
  std::vector<ParticipantProcess> participants;
};

namespace frontend {

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  void expect_eof() {
    if (peek().kind != TokenKind::Eof) fail("end of input");
  }

  // ---- expressions -------------------------------------------------------

  ExprPtr expression() { return or_expr(); }

  // ---- formulas ----------------------------------------------------------

  FormulaPtr formula() {
    FormulaPtr lhs = disjunction();
    if (accept("=>")) return logic::implication(lhs, formula());
    return lhs;
  }

  /// `[formula]` or the placeholder `[-]`.
  FormulaPtr assertion() {
    expect("[");
    if (at("-") && peek(1).text == "]" && peek(1).kind == TokenKind::Punct) {
      take();
      take();
      return logic::truth();
    }
    FormulaPtr f = formula();
    expect("]");
    return f;
  }

  // ---- global descriptions -----------------------------------------------

  GlobalPtr global() {
    SourcePos pos = peek().pos;
    if (at_keyword("end")) {
      take();
      return global::end(pos);
    }
    if (at_keyword("mu")) {
      take();
      Global::Rec rec;
      rec.var = ident("recursion variable");
      expect("(");
      auto inits = expr_list();
      if (at(";")) fail("')' (global recursion takes no channel parameters)");
      expect(")");
      expect("(");
      auto params = param_list();
      if (at(";")) fail("')' (global recursion takes no channel parameters)");
      expect(")");
      if (inits.size() != params.size())
        throw Error(ErrorKind::ArityMismatch,
                    "recursion '" + rec.var + "' has " + std::to_string(params.size()) + " parameters but " +
                        std::to_string(inits.size()) + " initial values",
                    pos);
      for (std::size_t i = 0; i < params.size(); ++i)
        rec.params.push_back(ValueParam{params[i].name, params[i].sort, inits[i]});
      rec.invariant = at("[") ? assertion() : logic::truth();
      expect(".");
      rec.body = global();
      return Global{std::move(rec), pos};
    }
    std::string first = ident("participant, 'mu' or 'end'");
    if (at("(")) {
      take();
      Global::Call call{first, expr_list()};
      expect(")");
      return Global{std::move(call), pos};
    }
    expect("->");
    std::string receiver = ident("receiver");
    expect(":");
    std::string channel = ident("channel");
    if (accept("&")) {
      Global::Branch br{first, receiver, channel, ident("branch identifier"), {}};
      expect("{");
      while (!at("}")) {
        SourcePos lpos = peek().pos;
        FormulaPtr a = assertion();
        std::string label = ident("label");
        expect(":");
        GlobalPtr cont = global();
        br.branches.push_back(Global::Label{label, a, cont, lpos});
        accept(",");
      }
      expect("}");
      if (br.branches.empty()) throw Error(ErrorKind::Syntax, "branching needs at least one label", pos);
      return Global{std::move(br), pos};
    }
    expect("(");
    std::string var = ident("payload variable");
    expect(":");
    Sort sort = sort_name();
    expect(")");
    FormulaPtr a = assertion();
    expect(";");
    GlobalPtr cont = global();
    return Global{Global::Interaction{first, receiver, channel, var, sort, a, cont}, pos};
  }

  // ---- local types -------------------------------------------------------

  LocalPtr local_type() {
    if (at_keyword("end")) {
      take();
      return local::end();
    }
    if (at_keyword("mu")) {
      SourcePos pos = take().pos;
      Local::Rec rec;
      rec.var = ident("recursion variable");
      expect("(");
      auto inits = expr_list();
      expect(")");
      expect("(");
      auto params = param_list();
      expect(")");
      if (inits.size() != params.size()) throw Error(ErrorKind::ArityMismatch, "recursion arity mismatch", pos);
      for (std::size_t i = 0; i < params.size(); ++i)
        rec.params.push_back(ValueParam{params[i].name, params[i].sort, inits[i]});
      rec.invariant = at("[") ? assertion() : logic::truth();
      expect(".");
      rec.body = local_type();
      return Local{std::move(rec)};
    }
    std::string name = ident("channel, 'mu' or 'end'");
    if (accept("(")) {
      Local::Call call{name, expr_list()};
      expect(")");
      return Local{std::move(call)};
    }
    if (at("!") || at("?")) {
      Polarity p = take().text == "!" ? Polarity::Out : Polarity::In;
      expect("<");
      std::string var = ident("payload variable");
      expect(":");
      Sort sort = sort_name();
      expect(">");
      FormulaPtr a = assertion();
      expect(";");
      return local::message(p, name, var, sort, a, local_type());
    }
    if (at("$") || at("&")) {
      Polarity p = take().text == "$" ? Polarity::Out : Polarity::In;
      std::string id = ident("branch identifier");
      expect("{");
      std::vector<Local::Label> labels;
      while (!at("}")) {
        FormulaPtr a = assertion();
        std::string label = ident("label");
        expect(":");
        labels.push_back(Local::Label{label, a, local_type()});
        accept(",");
      }
      expect("}");
      return local::choice(p, name, id, std::move(labels));
    }
    fail("'!', '?', '$', '&' or '('");
  }

  // ---- processes ---------------------------------------------------------

  ProcessPtr process() {
    SourcePos pos = peek().pos;
    if (at_keyword("end")) {
      take();
      return process::inact(pos);
    }
    if (at_keyword("init") || at_keyword("join")) {
      bool init = take().text == "init";
      expect(":");
      std::string service = ident("service name");
      expect("[");
      std::vector<std::string> roles;
      while (!at("]")) {
        roles.push_back(ident("participant"));
        accept(",");
      }
      expect("]");
      expect("(");
      auto channels = ident_list();
      expect(")");
      expect(".");
      ProcessPtr body = process();
      if (init) {
        if (roles.empty()) throw Error(ErrorKind::Syntax, "init needs at least one participant", pos);
        return Process{Process::Init{service, roles, channels, body}, pos};
      }
      if (roles.size() != 1) throw Error(ErrorKind::Syntax, "join names exactly one participant", pos);
      return Process{Process::Join{service, roles.front(), channels, body}, pos};
    }
    if (at_keyword("if")) {
      take();
      ExprPtr cond = expression();
      expect_keyword("then");
      ProcessPtr then_body = process();
      expect_keyword("else");
      ProcessPtr else_body = process();
      return Process{Process::If{cond, then_body, else_body}, pos};
    }
    if (at_keyword("mu")) {
      take();
      Process::Rec rec;
      rec.var = ident("recursion variable");
      expect("(");
      rec.args = expr_list();
      if (accept(";")) rec.channel_args = ident_list();
      expect(")");
      expect("(");
      rec.params = param_list();
      if (accept(";")) rec.channel_params = ident_list();
      expect(")");
      rec.invariant = at("[") ? assertion() : logic::truth();
      expect(".");
      rec.body = process();
      return Process{std::move(rec), pos};
    }
    std::string name = ident("channel, 'init', 'join', 'if', 'mu' or 'end'");
    if (accept("(")) {
      Process::Call call;
      call.var = name;
      call.args = expr_list();
      if (accept(";")) call.channel_args = ident_list();
      expect(")");
      return Process{std::move(call), pos};
    }
    if (accept("!")) {
      expect("(");
      ExprPtr value = expression();
      expect(")");
      expect("(");
      std::string var = ident("payload variable");
      expect(":");
      Sort sort = sort_name();
      expect(")");
      FormulaPtr a = assertion();
      expect(";");
      return Process{Process::Send{name, value, var, sort, a, process()}, pos};
    }
    if (accept("?")) {
      expect("(");
      std::string var = ident("payload variable");
      expect(":");
      Sort sort = sort_name();
      expect(")");
      FormulaPtr a = assertion();
      expect(";");
      return Process{Process::Receive{name, var, sort, a, process()}, pos};
    }
    if (accept("$")) {
      FormulaPtr a = assertion();
      std::string id = ident("branch identifier");
      expect(".");
      std::string label = ident("label");
      expect(";");
      return Process{Process::Select{name, a, id, label, process()}, pos};
    }
    if (accept("&")) {
      Process::Branch br{name, ident("branch identifier"), {}};
      expect("{");
      while (!at("}")) {
        SourcePos lpos = peek().pos;
        FormulaPtr a = assertion();
        std::string label = ident("label");
        expect(":");
        ProcessPtr body = process();
        br.branches.push_back(Process::Label{label, a, body, lpos});
        accept(",");
      }
      expect("}");
      if (br.branches.empty()) throw Error(ErrorKind::Syntax, "branching needs at least one label", pos);
      return Process{std::move(br), pos};
    }
    fail("'!', '?', '$', '&' or '('");
  }

  ProtocolFile file() {
    ProtocolFile out;
    out.global = global();
    while (peek().kind != TokenKind::Eof) {
      SourcePos pos = peek().pos;
      std::string name = ident("participant name");
      expect("::");
      out.participants.push_back(ParticipantProcess{name, process(), pos});
    }
    return out;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return tokens_[std::min(index_ + k, tokens_.size() - 1)]; }
  bool at(std::string_view punct) const { return peek().kind == TokenKind::Punct && peek().text == punct; }
  bool at_keyword(std::string_view kw) const { return peek().kind == TokenKind::Ident && peek().text == kw; }
  Token take() {
    Token t = peek();
    if (index_ < tokens_.size() - 1) ++index_;
    return t;
  }
  bool accept(std::string_view punct) {
    if (!at(punct)) return false;
    take();
    return true;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    throw Error(ErrorKind::Syntax, "expected " + expected + ", found " + describe(peek()), peek().pos);
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) fail("'" + std::string(punct) + "'");
  }
  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("'" + std::string(kw) + "'");
    take();
  }
  static bool reserved(const std::string& s) {
    static const std::set<std::string> words = {"end", "mu", "if", "then", "else", "init",
                                                "join", "exists", "forall", "true", "false"};
    return words.count(s) > 0;
  }
  std::string ident(const std::string& what) {
    if (peek().kind != TokenKind::Ident || reserved(peek().text)) fail(what);
    return take().text;
  }
  Sort sort_name() {
    if (peek().kind == TokenKind::Ident)
      if (auto s = parse_sort(peek().text)) {
        take();
        return *s;
      }
    fail("sort (int, bool, string, date)");
  }
  std::vector<std::string> ident_list() {
    std::vector<std::string> out;
    if (at(")")) return out;
    out.push_back(ident("identifier"));
    while (accept(",")) out.push_back(ident("identifier"));
    return out;
  }
  std::vector<ExprPtr> expr_list() {
    std::vector<ExprPtr> out;
    if (at(")") || at(";")) return out;
    out.push_back(expression());
    while (accept(",")) out.push_back(expression());
    return out;
  }
  std::vector<Process::Param> param_list() {
    std::vector<Process::Param> out;
    if (at(")") || at(";")) return out;
    do {
      std::string name = ident("parameter");
      expect(":");
      out.push_back(Process::Param{name, sort_name()});
    } while (accept(","));
    return out;
  }

  // expression grammar: || < && < ! < comparison < + - < * / < unary minus
  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (at("||")) {
      SourcePos pos = take().pos;
      lhs = expr::binary(BinaryOp::Or, lhs, and_expr(), pos);
    }
    return lhs;
  }
  ExprPtr and_expr() {
    ExprPtr lhs = not_expr();
    while (at("&&")) {
      SourcePos pos = take().pos;
      lhs = expr::binary(BinaryOp::And, lhs, not_expr(), pos);
    }
    return lhs;
  }
  ExprPtr not_expr() {
    if (at("!")) {
      SourcePos pos = take().pos;
      return expr::unary(UnaryOp::Not, not_expr(), pos);
    }
    ExprPtr lhs = additive();
    if (auto op = comparison_op()) {
      SourcePos pos = take().pos;
      return expr::binary(*op, lhs, additive(), pos);
    }
    return lhs;
  }
  std::optional<BinaryOp> comparison_op() const {
    if (peek().kind != TokenKind::Punct) return std::nullopt;
    const std::string& t = peek().text;
    if (t == "=" || t == "==") return BinaryOp::Eq;
    if (t == "!=") return BinaryOp::Ne;
    if (t == "<") return BinaryOp::Lt;
    if (t == "<=") return BinaryOp::Le;
    if (t == ">") return BinaryOp::Gt;
    if (t == ">=") return BinaryOp::Ge;
    return std::nullopt;
  }
  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (at("+") || at("-")) {
      Token op = take();
      lhs = expr::binary(op.text == "+" ? BinaryOp::Add : BinaryOp::Sub, lhs, multiplicative(), op.pos);
    }
    return lhs;
  }
  ExprPtr multiplicative() {
    ExprPtr lhs = unary_minus();
    while (at("*") || at("/")) {
      Token op = take();
      lhs = expr::binary(op.text == "*" ? BinaryOp::Mul : BinaryOp::Div, lhs, unary_minus(), op.pos);
    }
    return lhs;
  }
  ExprPtr unary_minus() {
    if (at("-")) {
      SourcePos pos = take().pos;
      if (peek().kind == TokenKind::Int) return expr::integer(-std::stoll(take().text), pos);
      return expr::unary(UnaryOp::Neg, unary_minus(), pos);
    }
    return primary();
  }
  ExprPtr primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::Int) {
      take();
      return expr::integer(std::stoll(t.text), t.pos);
    }
    if (t.kind == TokenKind::String) {
      Token s = take();
      return expr::string(s.text, s.pos);
    }
    if (at_keyword("true") || at_keyword("false")) {
      Token b = take();
      return expr::boolean(b.text == "true", b.pos);
    }
    if (at("(")) {
      take();
      ExprPtr e = expression();
      expect(")");
      return e;
    }
    SourcePos pos = t.pos;
    return expr::var(ident("expression"), pos);
  }

  // formula grammar
  FormulaPtr disjunction() {
    std::vector<FormulaPtr> parts{conjunction()};
    while (accept("||")) parts.push_back(conjunction());
    return parts.size() == 1 ? parts.front() : logic::raw_or(std::move(parts));
  }
  FormulaPtr conjunction() {
    std::vector<FormulaPtr> parts{negated()};
    while (accept("&&")) parts.push_back(negated());
    return parts.size() == 1 ? parts.front() : logic::raw_and(std::move(parts));
  }
  FormulaPtr negated() {
    if (accept("!")) return logic::negation(negated());
    if (at_keyword("exists") || at_keyword("forall")) {
      Quantifier q = take().text == "exists" ? Quantifier::Exists : Quantifier::Forall;
      std::vector<std::pair<std::string, Sort>> binders;
      do {
        std::string v = ident("bound variable");
        expect(":");
        SourcePos spos = peek().pos;
        Sort s = sort_name();
        if (!is_logical(s)) throw Error(ErrorKind::Sort, "quantified variables must be int or bool", spos);
        binders.emplace_back(v, s);
      } while (accept(","));
      expect(".");
      FormulaPtr body = formula();
      for (auto it = binders.rbegin(); it != binders.rend(); ++it)
        body = logic::quantified(q, it->first, it->second, body);
      return body;
    }
    return atom();
  }
  FormulaPtr atom() {
    if (at_keyword("true") || at_keyword("false")) return logic::truth(take().text == "true");
    std::size_t mark = index_;
    try {
      ExprPtr lhs = arith();
      if (auto op = comparison_op()) {
        take();
        return logic::compare(*op, lhs, arith());
      }
      if (auto* v = std::get_if<Expr::Var>(&lhs->node)) return logic::bool_var(v->name);
    } catch (const Error&) {
    }
    index_ = mark;
    if (accept("(")) {
      FormulaPtr f = formula();
      expect(")");
      return f;
    }
    ExprPtr lhs = arith();
    fail("comparison operator after '" + expr::to_string(lhs) + "'");
  }
  ExprPtr arith() {
    ExprPtr lhs = arith_term();
    while (at("+") || at("-")) {
      Token op = take();
      lhs = expr::binary(op.text == "+" ? BinaryOp::Add : BinaryOp::Sub, lhs, arith_term(), op.pos);
    }
    return lhs;
  }
  ExprPtr arith_term() {
    ExprPtr lhs = arith_unary();
    while (at("*") || at("/")) {
      Token op = take();
      lhs = expr::binary(op.text == "*" ? BinaryOp::Mul : BinaryOp::Div, lhs, arith_unary(), op.pos);
    }
    return lhs;
  }
  ExprPtr arith_unary() {
    if (at("-")) {
      SourcePos pos = take().pos;
      if (peek().kind == TokenKind::Int) return expr::integer(-std::stoll(take().text), pos);
      return expr::unary(UnaryOp::Neg, arith_unary(), pos);
    }
    const Token& t = peek();
    if (t.kind == TokenKind::Int) {
      take();
      return expr::integer(std::stoll(t.text), t.pos);
    }
    if (accept("(")) {
      ExprPtr e = arith();
      expect(")");
      return e;
    }
    SourcePos pos = t.pos;
    return expr::var(ident("arithmetic term"), pos);
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

}  // namespace frontend
}  // namespace mpst
