#pragma once

// Reference implementations used only by the tests. None of them shares code
// with the library beyond the AST types.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mpst/mpst.hpp"

namespace oracle {

using namespace mpst;
using Assignment = std::map<std::string, std::int64_t>;

// ---------------------------------------------------------------- formulas

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline std::int64_t value(const ExprPtr& e, const Assignment& env) {
  if (auto* i = std::get_if<Expr::Int>(&e->node)) return i->value;
  if (auto* b = std::get_if<Expr::Bool>(&e->node)) return b->value ? 1 : 0;
  if (auto* v = std::get_if<Expr::Var>(&e->node)) return env.at(v->name);
  if (auto* u = std::get_if<Expr::Unary>(&e->node)) {
    std::int64_t x = value(u->operand, env);
    return u->op == UnaryOp::Neg ? -x : !x;
  }
  const auto& b = std::get<Expr::Binary>(e->node);
  std::int64_t x = value(b.lhs, env), y = value(b.rhs, env);
  switch (b.op) {
    case BinaryOp::Add: return x + y;
    case BinaryOp::Sub: return x - y;
    case BinaryOp::Mul: return x * y;
    case BinaryOp::Div: return floor_div(x, y);
    case BinaryOp::Eq: return x == y;
    case BinaryOp::Ne: return x != y;
    case BinaryOp::Lt: return x < y;
    case BinaryOp::Le: return x <= y;
    case BinaryOp::Gt: return x > y;
    case BinaryOp::Ge: return x >= y;
    case BinaryOp::And: return x && y;
    case BinaryOp::Or: return x || y;
  }
  return 0;
}

/// Truth of `f` under `env`. Quantified integers range over [-bound, bound],
/// booleans over {0, 1}.
inline bool holds(const FormulaPtr& f, Assignment& env, std::int64_t bound) {
  return std::visit(
      [&](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Formula::Const>) {
          return n.value;
        } else if constexpr (std::is_same_v<N, Formula::Compare>) {
          std::int64_t x = value(n.lhs, env), y = value(n.rhs, env);
          switch (n.op) {
            case BinaryOp::Eq: return x == y;
            case BinaryOp::Ne: return x != y;
            case BinaryOp::Lt: return x < y;
            case BinaryOp::Le: return x <= y;
            case BinaryOp::Gt: return x > y;
            default: return x >= y;
          }
        } else if constexpr (std::is_same_v<N, Formula::BoolVar>) {
          return env.at(n.name) != 0;
        } else if constexpr (std::is_same_v<N, Formula::Not>) {
          return !holds(n.operand, env, bound);
        } else if constexpr (std::is_same_v<N, Formula::And>) {
          for (const auto& g : n.operands)
            if (!holds(g, env, bound)) return false;
          return true;
        } else if constexpr (std::is_same_v<N, Formula::Or>) {
          for (const auto& g : n.operands)
            if (holds(g, env, bound)) return true;
          return false;
        } else if constexpr (std::is_same_v<N, Formula::Implies>) {
          return !holds(n.lhs, env, bound) || holds(n.rhs, env, bound);
        } else if constexpr (std::is_same_v<N, Formula::Quant>) {
          std::optional<std::int64_t> saved;
          if (auto it = env.find(n.var); it != env.end()) saved = it->second;
          std::int64_t lo = n.sort == Sort::Bool ? 0 : -bound, hi = n.sort == Sort::Bool ? 1 : bound;
          bool exists = n.quantifier == Quantifier::Exists;
          bool result = !exists;
          for (std::int64_t v = lo; v <= hi; ++v) {
            env[n.var] = v;
            if (holds(n.body, env, bound) == exists) {
              result = exists;
              break;
            }
          }
          if (saved)
            env[n.var] = *saved;
          else
            env.erase(n.var);
          return result;
        } else {
          std::int64_t t = value(n.term, env);
          return t % n.modulus == 0;
        }
      },
      f->node);
}

/// Calls `visit` on every assignment of `vars` over [-window, window]
/// (booleans over {0,1}) until it returns false.
template <class F>
bool for_each_point(const std::vector<std::pair<std::string, Sort>>& vars, std::int64_t window, F visit) {
  Assignment env;
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == vars.size()) return visit(env);
    bool b = vars[i].second == Sort::Bool;
    for (std::int64_t v = b ? 0 : -window; v <= (b ? 1 : window); ++v) {
      env[vars[i].first] = v;
      if (!rec(i + 1)) return false;
    }
    return true;
  };
  return rec(0);
}

struct Query {
  FormulaPtr formula;                              // body over the free variables
  FormulaPtr box;                                  // window constraint on the free variables
  std::vector<std::pair<std::string, Sort>> free;  // free variables with sorts
};

/// Random linear formulas whose quantifiers are bounded inside the formula,
/// so brute force over the window decides them exactly.
class FormulaGenerator {
 public:
  struct Config {
    int max_free = 3;
    int max_quantifiers = 2;
    std::int64_t coefficient = 5;
    std::int64_t window = 3;
    std::int64_t quantifier_bound = 2;
    bool booleans = false;
    int depth = 3;
  };

  FormulaGenerator(std::uint64_t seed, Config c) : rng_(seed), c_(c) {}

  Query next() {
    std::vector<std::string> names{"x", "y", "z"};
    std::shuffle(names.begin(), names.end(), rng_);
    int nfree = pick(1, c_.max_free);
    Query q;
    std::vector<std::string> ints;
    for (int i = 0; i < nfree; ++i) {
      q.free.emplace_back(names[i], Sort::Int);
      ints.push_back(names[i]);
    }
    std::vector<std::string> bools;
    if (c_.booleans) {
      q.free.emplace_back("p", Sort::Bool);
      bools.push_back("p");
    }
    quantifiers_left_ = pick(0, c_.max_quantifiers);
    next_bound_ = 0;
    q.formula = node(c_.depth, ints, bools);
    std::vector<FormulaPtr> box;
    for (const auto& v : ints) {
      box.push_back(logic::compare(BinaryOp::Le, expr::integer(-c_.window), expr::var(v)));
      box.push_back(logic::compare(BinaryOp::Le, expr::var(v), expr::integer(c_.window)));
    }
    q.box = logic::raw_and(box);
    return q;
  }

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  Config c_;
  int quantifiers_left_ = 0;
  int next_bound_ = 0;

  std::int64_t coefficient(bool nonzero) {
    while (true) {
      std::int64_t v = std::uniform_int_distribution<std::int64_t>(-c_.coefficient, c_.coefficient)(rng_);
      if (!nonzero || v != 0) return v;
    }
  }

  FormulaPtr atom(const std::vector<std::string>& ints, const std::vector<std::string>& bools) {
    if (!bools.empty() && pick(0, 4) == 0) return logic::bool_var(bools[pick(0, int(bools.size()) - 1)]);
    int nvars = std::min<int>(int(ints.size()), pick(1, 2));
    std::vector<std::string> chosen = ints;
    std::shuffle(chosen.begin(), chosen.end(), rng_);
    ExprPtr lhs;
    for (int i = 0; i < nvars; ++i) {
      ExprPtr t = expr::binary(BinaryOp::Mul, expr::integer(coefficient(true)), expr::var(chosen[i]));
      lhs = lhs ? expr::binary(BinaryOp::Add, lhs, t) : t;
    }
    static const BinaryOp ops[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
    return logic::compare(ops[pick(0, 5)], lhs, expr::integer(coefficient(false)));
  }

  FormulaPtr node(int depth, std::vector<std::string> ints, const std::vector<std::string>& bools) {
    if (depth == 0) return atom(ints, bools);
    int k = pick(0, 9);
    if (k <= 2) return atom(ints, bools);
    if (k <= 4) return logic::raw_and({node(depth - 1, ints, bools), node(depth - 1, ints, bools)});
    if (k <= 6) return logic::raw_or({node(depth - 1, ints, bools), node(depth - 1, ints, bools)});
    if (k == 7) return logic::negation(node(depth - 1, ints, bools));
    if (k == 8 || quantifiers_left_ == 0)
      return logic::implication(node(depth - 1, ints, bools), node(depth - 1, ints, bools));
    --quantifiers_left_;
    std::string v = next_bound_++ == 0 ? "u" : "v";
    ints.push_back(v);
    FormulaPtr range =
        logic::raw_and({logic::compare(BinaryOp::Le, expr::integer(-c_.quantifier_bound), expr::var(v)),
                        logic::compare(BinaryOp::Le, expr::var(v), expr::integer(c_.quantifier_bound))});
    FormulaPtr body = node(depth - 1, ints, bools);
    if (pick(0, 1) == 0) return logic::exists(v, Sort::Int, logic::raw_and({range, body}));
    return logic::forall(v, Sort::Int, logic::implication(range, body));
  }
};

/// Quantifier-free formulas over one variable whose atoms only change truth
/// value inside [-16, 16]; a window of 60 therefore decides them over all
/// integers.
inline FormulaPtr threshold_formula(std::mt19937_64& rng, int depth) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  if (depth == 0 || pick(0, 2) == 0) {
    static const BinaryOp ops[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
    ExprPtr lhs;
    if (pick(0, 2) == 0) {
      lhs = expr::binary(BinaryOp::Div, expr::var("x"), expr::integer(pick(2, 3)));
    } else {
      int c = pick(1, 5) * (pick(0, 1) ? 1 : -1);
      lhs = expr::binary(BinaryOp::Mul, expr::integer(c), expr::var("x"));
    }
    return logic::compare(ops[pick(0, 5)], lhs, expr::integer(pick(-5, 5)));
  }
  switch (pick(0, 2)) {
    case 0: return logic::raw_and({threshold_formula(rng, depth - 1), threshold_formula(rng, depth - 1)});
    case 1: return logic::raw_or({threshold_formula(rng, depth - 1), threshold_formula(rng, depth - 1)});
    default: return logic::negation(threshold_formula(rng, depth - 1));
  }
}

// ------------------------------------------------------------ projection

inline void participants_of(const GlobalPtr& g, std::set<std::string>& out) {
  if (auto* i = std::get_if<Global::Interaction>(&g->node)) {
    out.insert(i->sender);
    out.insert(i->receiver);
    participants_of(i->cont, out);
  } else if (auto* b = std::get_if<Global::Branch>(&g->node)) {
    out.insert(b->sender);
    out.insert(b->receiver);
    for (const auto& l : b->branches) participants_of(l.cont, out);
  } else if (auto* r = std::get_if<Global::Rec>(&g->node)) {
    participants_of(r->body, out);
  }
}

/// Projection without assertions: classic endpoint projection where an
/// uninvolved participant's branches must coincide and a recursion the
/// participant takes no part in collapses to end. nullopt when some merge
/// fails.
inline std::optional<LocalPtr> plain_project(const GlobalPtr& g, const std::string& p,
                                             const std::set<std::string>& absent = {}) {
  FormulaPtr t = logic::truth();
  if (auto* i = std::get_if<Global::Interaction>(&g->node)) {
    auto cont = plain_project(i->cont, p, absent);
    if (!cont) return std::nullopt;
    if (i->sender == p) return local::message(Polarity::Out, i->channel, i->var, i->sort, t, *cont);
    if (i->receiver == p) return local::message(Polarity::In, i->channel, i->var, i->sort, t, *cont);
    return cont;
  }
  if (auto* b = std::get_if<Global::Branch>(&g->node)) {
    std::vector<Local::Label> labels;
    for (const auto& l : b->branches) {
      auto cont = plain_project(l.cont, p, absent);
      if (!cont) return std::nullopt;
      labels.push_back(Local::Label{l.label, t, *cont});
    }
    if (b->sender == p || b->receiver == p)
      return local::choice(b->sender == p ? Polarity::Out : Polarity::In, b->channel, b->branch_id, labels);
    for (const auto& l : labels)
      if (!(l.cont == labels.front().cont)) return std::nullopt;
    return labels.front().cont;
  }
  if (auto* r = std::get_if<Global::Rec>(&g->node)) {
    std::set<std::string> who;
    participants_of(r->body, who);
    std::set<std::string> inner = absent;
    if (!who.count(p)) {
      inner.insert(r->var);
      return plain_project(r->body, p, inner);
    }
    inner.erase(r->var);
    auto body = plain_project(r->body, p, inner);
    if (!body) return std::nullopt;
    return Local{Local::Rec{r->var, r->params, t, *body}};
  }
  if (auto* c = std::get_if<Global::Call>(&g->node)) {
    if (absent.count(c->var)) return local::end();
    return Local{Local::Call{c->var, c->args}};
  }
  return local::end();
}

/// Assertion-free globals over participants A, B, C and channels k1, k2.
class GlobalGenerator {
 public:
  explicit GlobalGenerator(std::uint64_t seed) : rng_(seed) {}

  GlobalPtr next(int depth = 4) {
    counter_ = 0;
    return node(depth, {});
  }

 private:
  std::mt19937_64 rng_;
  int counter_ = 0;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::pair<std::string, std::string> pair() {
    static const char* names[] = {"A", "B", "C"};
    int s = pick(0, 2), r = (s + pick(1, 2)) % 3;
    return {names[s], names[r]};
  }

  GlobalPtr leaf(const std::vector<std::string>& recs) {
    if (!recs.empty() && pick(0, 1) == 0) {
      const std::string& t = recs[pick(0, int(recs.size()) - 1)];
      std::string param = "r" + t.substr(1);
      return Global{Global::Call{t, {expr::binary(BinaryOp::Add, expr::var(param), expr::integer(1))}}};
    }
    return global::end();
  }

  GlobalPtr node(int depth, std::vector<std::string> recs) {
    if (depth == 0) return leaf(recs);
    int k = pick(0, 19);
    std::string channel = pick(0, 1) ? "k1" : "k2";
    if (k < 10) {
      auto [s, r] = pair();
      std::string v = "x" + std::to_string(++counter_);
      return Global{Global::Interaction{s, r, channel, v, Sort::Int, logic::truth(), node(depth - 1, recs)}};
    }
    if (k < 15) {
      auto [s, r] = pair();
      std::string id = "b" + std::to_string(++counter_);
      std::vector<Global::Label> labels;
      labels.push_back(Global::Label{"l1", logic::truth(), node(depth - 1, recs), {}});
      labels.push_back(Global::Label{"l2", logic::truth(), node(depth - 1, recs), {}});
      return Global{Global::Branch{s, r, channel, id, labels}};
    }
    if (k < 17 && depth >= 2) {
      std::string n = std::to_string(++counter_);
      recs.push_back("t" + n);
      std::vector<ValueParam> params{ValueParam{"r" + n, Sort::Int, expr::integer(0)}};
      return Global{Global::Rec{"t" + n, params, logic::truth(), node(depth - 1, recs)}};
    }
    return leaf(recs);
  }
};

// ---------------------------------------------------------------- typing

/// Lists labels in a fixed order so types that differ only in label order
/// compare equal.
inline LocalPtr canonical(const LocalPtr& t) {
  if (auto* m = std::get_if<Local::Message>(&t->node)) {
    auto n = *m;
    n.cont = canonical(m->cont);
    return Local{n};
  }
  if (auto* c = std::get_if<Local::Choice>(&t->node)) {
    auto n = *c;
    for (auto& l : n.branches) l.cont = canonical(l.cont);
    std::sort(n.branches.begin(), n.branches.end(),
              [](const Local::Label& a, const Local::Label& b) { return a.label < b.label; });
    return Local{n};
  }
  if (auto* r = std::get_if<Local::Rec>(&t->node)) {
    auto n = *r;
    n.body = canonical(r->body);
    return Local{n};
  }
  return t;
}

inline std::optional<LocalPtr> plain_merge(const LocalPtr& a, const LocalPtr& b) {
  if (a == b) return a;
  auto* x = std::get_if<Local::Choice>(&a->node);
  auto* y = std::get_if<Local::Choice>(&b->node);
  if (!x || !y || x->polarity != Polarity::Out || y->polarity != Polarity::Out || x->channel != y->channel ||
      x->branch_id != y->branch_id)
    return std::nullopt;
  Local::Choice out = *x;
  for (const auto& l : y->branches) {
    auto it = std::find_if(out.branches.begin(), out.branches.end(),
                           [&](const Local::Label& m) { return m.label == l.label; });
    if (it == out.branches.end()) {
      out.branches.push_back(l);
      continue;
    }
    auto merged = plain_merge(it->cont, l.cont);
    if (!merged) return std::nullopt;
    it->cont = *merged;
  }
  return Local{out};
}

/// Session type of a process with assertions ignored. `channels` maps the
/// process's channel names to session channels.
inline std::optional<LocalPtr> plain_type(const ProcessPtr& p, std::map<std::string, std::string> channels = {}) {
  FormulaPtr t = logic::truth();
  auto ch = [&](const std::string& c) {
    auto it = channels.find(c);
    return it == channels.end() ? c : it->second;
  };
  if (auto* i = std::get_if<Process::Init>(&p->node)) return plain_type(i->body, channels);
  if (auto* j = std::get_if<Process::Join>(&p->node)) return plain_type(j->body, channels);
  if (auto* s = std::get_if<Process::Send>(&p->node)) {
    auto cont = plain_type(s->body, channels);
    if (!cont) return std::nullopt;
    return local::message(Polarity::Out, ch(s->channel), s->var, s->sort, t, *cont);
  }
  if (auto* r = std::get_if<Process::Receive>(&p->node)) {
    auto cont = plain_type(r->body, channels);
    if (!cont) return std::nullopt;
    return local::message(Polarity::In, ch(r->channel), r->var, r->sort, t, *cont);
  }
  if (auto* s = std::get_if<Process::Select>(&p->node)) {
    auto cont = plain_type(s->body, channels);
    if (!cont) return std::nullopt;
    return local::choice(Polarity::Out, ch(s->channel), s->branch_id, {Local::Label{s->label, t, *cont}});
  }
  if (auto* b = std::get_if<Process::Branch>(&p->node)) {
    std::vector<Local::Label> labels;
    for (const auto& l : b->branches) {
      auto cont = plain_type(l.body, channels);
      if (!cont) return std::nullopt;
      labels.push_back(Local::Label{l.label, t, *cont});
    }
    return local::choice(Polarity::In, ch(b->channel), b->branch_id, labels);
  }
  if (auto* i = std::get_if<Process::If>(&p->node)) {
    auto a = plain_type(i->then_body, channels), b = plain_type(i->else_body, channels);
    if (!a || !b) return std::nullopt;
    return plain_merge(*a, *b);
  }
  if (auto* r = std::get_if<Process::Rec>(&p->node)) {
    std::map<std::string, std::string> inner = channels;
    for (std::size_t k = 0; k < r->channel_params.size(); ++k) inner[r->channel_params[k]] = ch(r->channel_args[k]);
    auto body = plain_type(r->body, inner);
    if (!body) return std::nullopt;
    std::vector<ValueParam> params;
    for (std::size_t k = 0; k < r->params.size(); ++k)
      params.push_back(ValueParam{r->params[k].name, r->params[k].sort, r->args[k]});
    return Local{Local::Rec{r->var, params, t, *body}};
  }
  if (auto* c = std::get_if<Process::Call>(&p->node)) return Local{Local::Call{c->var, c->args}};
  return local::end();
}

/// A process whose session type is `t` (assertions dropped). Selections
/// between two labels are sometimes written as an if over both labels.
inline ProcessPtr implement(const LocalPtr& t, std::mt19937_64& rng) {
  FormulaPtr yes = logic::truth();
  if (auto* m = std::get_if<Local::Message>(&t->node)) {
    if (m->polarity == Polarity::Out)
      return Process{Process::Send{m->channel, expr::integer(1), m->var, m->sort, yes, implement(m->cont, rng)}};
    return Process{Process::Receive{m->channel, m->var, m->sort, yes, implement(m->cont, rng)}};
  }
  if (auto* c = std::get_if<Local::Choice>(&t->node)) {
    if (c->polarity == Polarity::In) {
      std::vector<Process::Label> labels;
      for (const auto& l : c->branches) labels.push_back(Process::Label{l.label, yes, implement(l.cont, rng), {}});
      return Process{Process::Branch{c->channel, c->branch_id, labels}};
    }
    auto select = [&](const Local::Label& l) {
      return ProcessPtr(Process{Process::Select{c->channel, yes, c->branch_id, l.label, implement(l.cont, rng)}});
    };
    if (c->branches.size() >= 2 && std::uniform_int_distribution<int>(0, 1)(rng) == 0)
      return Process{Process::If{expr::boolean(true), select(c->branches[0]), select(c->branches[1])}};
    return select(c->branches.front());
  }
  if (auto* r = std::get_if<Local::Rec>(&t->node)) {
    std::vector<ExprPtr> args;
    std::vector<Process::Param> params;
    for (const auto& p : r->params) {
      args.push_back(p.init);
      params.push_back(Process::Param{p.name, p.sort});
    }
    return Process{Process::Rec{r->var, args, {}, params, {}, yes, implement(r->body, rng)}};
  }
  if (auto* c = std::get_if<Local::Call>(&t->node)) return Process{Process::Call{c->var, c->args, {}}};
  return process::inact();
}

}  // namespace oracle
