#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mpst/core/expr.hpp"

namespace mpst {

enum class Quantifier { Exists, Forall };

struct Formula;
using FormulaPtr = Ref<Formula>;

/// Assertion language: boolean combinations of linear integer comparisons and
/// boolean variables, with int/bool quantifiers. `Divides` is produced by
/// quantifier elimination only; the surface syntax never accepts it.
struct Formula {
  struct Const {
    bool value;
    bool operator==(const Const&) const = default;
  };
  struct Compare {
    BinaryOp op;  // one of Eq, Ne, Lt, Le, Gt, Ge
    ExprPtr lhs;
    ExprPtr rhs;
    bool operator==(const Compare&) const = default;
  };
  struct BoolVar {
    std::string name;
    bool operator==(const BoolVar&) const = default;
  };
  struct Not {
    FormulaPtr operand;
    bool operator==(const Not&) const = default;
  };
  struct And {
    std::vector<FormulaPtr> operands;
    bool operator==(const And&) const = default;
  };
  struct Or {
    std::vector<FormulaPtr> operands;
    bool operator==(const Or&) const = default;
  };
  struct Implies {
    FormulaPtr lhs;
    FormulaPtr rhs;
    bool operator==(const Implies&) const = default;
  };
  struct Quant {
    Quantifier quantifier;
    std::string var;
    Sort sort;
    FormulaPtr body;
    bool operator==(const Quant&) const = default;
  };
  struct Divides {
    std::int64_t modulus;
    ExprPtr term;
    bool operator==(const Divides&) const = default;
  };

  std::variant<Const, Compare, BoolVar, Not, And, Or, Implies, Quant, Divides> node;

  bool operator==(const Formula&) const = default;
};

namespace logic {

inline FormulaPtr truth(bool value = true) { return Formula{Formula::Const{value}}; }
inline FormulaPtr falsity() { return truth(false); }
inline FormulaPtr compare(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return Formula{Formula::Compare{op, std::move(lhs), std::move(rhs)}};
}
inline FormulaPtr bool_var(std::string name) { return Formula{Formula::BoolVar{std::move(name)}}; }
inline FormulaPtr negation(FormulaPtr f) { return Formula{Formula::Not{std::move(f)}}; }
inline FormulaPtr implication(FormulaPtr a, FormulaPtr b) { return Formula{Formula::Implies{std::move(a), std::move(b)}}; }
inline FormulaPtr quantified(Quantifier q, std::string var, Sort sort, FormulaPtr body) {
  return Formula{Formula::Quant{q, std::move(var), sort, std::move(body)}};
}
inline FormulaPtr exists(std::string var, Sort sort, FormulaPtr body) {
  return quantified(Quantifier::Exists, std::move(var), sort, std::move(body));
}
inline FormulaPtr forall(std::string var, Sort sort, FormulaPtr body) {
  return quantified(Quantifier::Forall, std::move(var), sort, std::move(body));
}
inline FormulaPtr divides(std::int64_t modulus, ExprPtr term) {
  return Formula{Formula::Divides{modulus, std::move(term)}};
}

inline bool is_const(const FormulaPtr& f, bool value) {
  auto* c = std::get_if<Formula::Const>(&f->node);
  return c && c->value == value;
}
inline bool is_true(const FormulaPtr& f) { return is_const(f, true); }

/// Raw n-ary conjunction: no flattening or simplification. Used by the parser
/// so that printing and re-parsing is the identity.
inline FormulaPtr raw_and(std::vector<FormulaPtr> fs) { return Formula{Formula::And{std::move(fs)}}; }
inline FormulaPtr raw_or(std::vector<FormulaPtr> fs) { return Formula{Formula::Or{std::move(fs)}}; }

/// Conjunction that flattens nested conjunctions and drops `true` operands.
inline FormulaPtr conj(const std::vector<FormulaPtr>& fs) {
  std::vector<FormulaPtr> out;
  for (const auto& f : fs) {
    if (is_true(f)) continue;
    if (is_const(f, false)) return falsity();
    if (auto* a = std::get_if<Formula::And>(&f->node)) {
      for (const auto& g : a->operands)
        if (!is_true(g)) out.push_back(g);
    } else {
      out.push_back(f);
    }
  }
  if (out.empty()) return truth();
  if (out.size() == 1) return out.front();
  return raw_and(std::move(out));
}
inline FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return conj(std::vector<FormulaPtr>{std::move(a), std::move(b)}); }

inline FormulaPtr disj(const std::vector<FormulaPtr>& fs) {
  std::vector<FormulaPtr> out;
  for (const auto& f : fs) {
    if (is_const(f, false)) continue;
    if (is_true(f)) return truth();
    if (auto* o = std::get_if<Formula::Or>(&f->node)) {
      for (const auto& g : o->operands) out.push_back(g);
    } else {
      out.push_back(f);
    }
  }
  if (out.empty()) return falsity();
  if (out.size() == 1) return out.front();
  return raw_or(std::move(out));
}
inline FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return disj(std::vector<FormulaPtr>{std::move(a), std::move(b)}); }

namespace detail {

inline void free_vars(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& out) {
  auto expr_vars = [&](const ExprPtr& e) {
    for (const auto& v : expr::variables(e))
      if (!bound.count(v)) out.insert(v);
  };
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Formula::Compare>) {
          expr_vars(n.lhs);
          expr_vars(n.rhs);
        } else if constexpr (std::is_same_v<N, Formula::BoolVar>) {
          if (!bound.count(n.name)) out.insert(n.name);
        } else if constexpr (std::is_same_v<N, Formula::Not>) {
          free_vars(n.operand, bound, out);
        } else if constexpr (std::is_same_v<N, Formula::And> || std::is_same_v<N, Formula::Or>) {
          for (const auto& g : n.operands) free_vars(g, bound, out);
        } else if constexpr (std::is_same_v<N, Formula::Implies>) {
          free_vars(n.lhs, bound, out);
          free_vars(n.rhs, bound, out);
        } else if constexpr (std::is_same_v<N, Formula::Quant>) {
          bool fresh = bound.insert(n.var).second;
          free_vars(n.body, bound, out);
          if (fresh) bound.erase(n.var);
        } else if constexpr (std::is_same_v<N, Formula::Divides>) {
          expr_vars(n.term);
        }
      },
      f->node);
}

inline void all_names(const FormulaPtr& f, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Formula::Compare>) {
          expr::collect_vars(n.lhs, out);
          expr::collect_vars(n.rhs, out);
        } else if constexpr (std::is_same_v<N, Formula::BoolVar>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<N, Formula::Not>) {
          all_names(n.operand, out);
        } else if constexpr (std::is_same_v<N, Formula::And> || std::is_same_v<N, Formula::Or>) {
          for (const auto& g : n.operands) all_names(g, out);
        } else if constexpr (std::is_same_v<N, Formula::Implies>) {
          all_names(n.lhs, out);
          all_names(n.rhs, out);
        } else if constexpr (std::is_same_v<N, Formula::Quant>) {
          out.insert(n.var);
          all_names(n.body, out);
        } else if constexpr (std::is_same_v<N, Formula::Divides>) {
          expr::collect_vars(n.term, out);
        }
      },
      f->node);
}

}  // namespace detail

/// Variables occurring outside any binder for them.
inline std::set<std::string> free_variables(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  detail::free_vars(f, bound, out);
  return out;
}

/// Free and bound variable names.
inline std::set<std::string> all_names(const FormulaPtr& f) {
  std::set<std::string> out;
  detail::all_names(f, out);
  return out;
}

/// `base_k` for the smallest k >= 1 not in `taken`.
inline std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  for (int k = 1;; ++k) {
    std::string candidate = base + "_" + std::to_string(k);
    if (!taken.count(candidate)) return candidate;
  }
}

/// Sort of an expression when it can be read off syntactically (variables
/// have no intrinsic sort and yield nullopt).
inline std::optional<Sort> syntactic_sort(const ExprPtr& e) {
  return std::visit(
      [&](const auto& n) -> std::optional<Sort> {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Expr::Int>) return Sort::Int;
        else if constexpr (std::is_same_v<N, Expr::Bool>) return Sort::Bool;
        else if constexpr (std::is_same_v<N, Expr::Str>) return Sort::String;
        else if constexpr (std::is_same_v<N, Expr::Var>) return std::nullopt;
        else if constexpr (std::is_same_v<N, Expr::Unary>) return n.op == UnaryOp::Neg ? Sort::Int : Sort::Bool;
        else return expr::is_arithmetic(n.op) ? Sort::Int : Sort::Bool;
      },
      e->node);
}

/// Reads a boolean-sorted expression as a formula. Throws SortError when the
/// expression compares non-logical values (strings, dates).
inline FormulaPtr from_expr(const ExprPtr& e) {
  return std::visit(
      [&](const auto& n) -> FormulaPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Expr::Bool>) {
          return truth(n.value);
        } else if constexpr (std::is_same_v<N, Expr::Var>) {
          return bool_var(n.name);
        } else if constexpr (std::is_same_v<N, Expr::Unary>) {
          if (n.op != UnaryOp::Not) throw Error(ErrorKind::Sort, "expected sort bool, found int", e->pos);
          return negation(from_expr(n.operand));
        } else if constexpr (std::is_same_v<N, Expr::Binary>) {
          if (n.op == BinaryOp::And) return raw_and({from_expr(n.lhs), from_expr(n.rhs)});
          if (n.op == BinaryOp::Or) return raw_or({from_expr(n.lhs), from_expr(n.rhs)});
          if (expr::is_arithmetic(n.op)) throw Error(ErrorKind::Sort, "expected sort bool, found int", e->pos);
          auto ls = syntactic_sort(n.lhs), rs = syntactic_sort(n.rhs);
          auto non_logical = [](std::optional<Sort> s) { return s && !is_logical(*s); };
          if (non_logical(ls) || non_logical(rs))
            throw Error(ErrorKind::Sort, "comparison of non-logical values is not expressible in assertions", e->pos);
          bool boolean = (ls == Sort::Bool) || (rs == Sort::Bool);
          if (boolean && (n.op == BinaryOp::Eq || n.op == BinaryOp::Ne)) {
            FormulaPtr a = from_expr(n.lhs), b = from_expr(n.rhs);
            FormulaPtr same = raw_or({raw_and({a, b}), raw_and({negation(a), negation(b)})});
            return n.op == BinaryOp::Eq ? same : negation(same);
          }
          if (boolean) throw Error(ErrorKind::Sort, "ordering comparison on booleans", e->pos);
          return compare(n.op, n.lhs, n.rhs);
        } else {
          throw Error(ErrorKind::Sort, "expected sort bool", e->pos);
        }
      },
      e->node);
}

/// Capture-avoiding substitution of expressions for free variables. Bound
/// variables are renamed when a substituted expression would be captured.
inline FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, ExprPtr>& bindings) {
  if (bindings.empty()) return f;
  return std::visit(
      [&](const auto& n) -> FormulaPtr {
        using N = std::decay_t<decltype(n)>;
        auto check_int = [&](const ExprPtr& e) {
          for (const auto& v : expr::variables(e)) {
            auto it = bindings.find(v);
            if (it == bindings.end()) continue;
            auto s = syntactic_sort(it->second);
            if (s && *s != Sort::Int)
              throw Error(ErrorKind::Sort, "cannot substitute " + std::string(to_string(*s)) + " expression for int variable '" + v + "'");
          }
        };
        if constexpr (std::is_same_v<N, Formula::Const>) {
          return f;
        } else if constexpr (std::is_same_v<N, Formula::Compare>) {
          check_int(n.lhs);
          check_int(n.rhs);
          return compare(n.op, expr::substitute(n.lhs, bindings), expr::substitute(n.rhs, bindings));
        } else if constexpr (std::is_same_v<N, Formula::BoolVar>) {
          auto it = bindings.find(n.name);
          if (it == bindings.end()) return f;
          auto s = syntactic_sort(it->second);
          if (s && *s != Sort::Bool)
            throw Error(ErrorKind::Sort, "cannot substitute " + std::string(to_string(*s)) + " expression for bool variable '" + n.name + "'");
          return from_expr(it->second);
        } else if constexpr (std::is_same_v<N, Formula::Not>) {
          return negation(substitute(n.operand, bindings));
        } else if constexpr (std::is_same_v<N, Formula::And>) {
          std::vector<FormulaPtr> out;
          for (const auto& g : n.operands) out.push_back(substitute(g, bindings));
          return raw_and(std::move(out));
        } else if constexpr (std::is_same_v<N, Formula::Or>) {
          std::vector<FormulaPtr> out;
          for (const auto& g : n.operands) out.push_back(substitute(g, bindings));
          return raw_or(std::move(out));
        } else if constexpr (std::is_same_v<N, Formula::Implies>) {
          return implication(substitute(n.lhs, bindings), substitute(n.rhs, bindings));
        } else if constexpr (std::is_same_v<N, Formula::Quant>) {
          std::map<std::string, ExprPtr> inner = bindings;
          inner.erase(n.var);
          if (inner.empty()) return f;
          std::set<std::string> body_free = free_variables(n.body);
          bool captured = false;
          std::set<std::string> taken = all_names(n.body);
          for (const auto& [v, e] : inner) {
            auto ev = expr::variables(e);
            taken.insert(ev.begin(), ev.end());
            taken.insert(v);
            if (body_free.count(v) && ev.count(n.var)) captured = true;
          }
          if (!captured) return quantified(n.quantifier, n.var, n.sort, substitute(n.body, inner));
          std::string renamed = fresh_name(n.var, taken);
          std::map<std::string, ExprPtr> with_rename = inner;
          with_rename[n.var] = expr::var(renamed);
          return quantified(n.quantifier, renamed, n.sort, substitute(n.body, with_rename));
        } else {
          check_int(n.term);
          return divides(n.modulus, expr::substitute(n.term, bindings));
        }
      },
      f->node);
}

inline FormulaPtr rename_free(const FormulaPtr& f, const std::map<std::string, std::string>& names) {
  std::map<std::string, ExprPtr> bindings;
  for (const auto& [from, to] : names)
    if (from != to) bindings.emplace(from, expr::var(to));
  return substitute(f, bindings);
}

inline bool is_quantifier_free(const FormulaPtr& f) {
  return std::visit(
      [&](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Formula::Not>) return is_quantifier_free(n.operand);
        else if constexpr (std::is_same_v<N, Formula::And> || std::is_same_v<N, Formula::Or>) {
          for (const auto& g : n.operands)
            if (!is_quantifier_free(g)) return false;
          return true;
        } else if constexpr (std::is_same_v<N, Formula::Implies>) {
          return is_quantifier_free(n.lhs) && is_quantifier_free(n.rhs);
        } else if constexpr (std::is_same_v<N, Formula::Quant>) {
          return false;
        } else {
          return true;
        }
      },
      f->node);
}

/// Sorts of the free variables: variables in arithmetic positions are int,
/// standalone variables are bool. Throws SortError on conflicting use.
inline std::map<std::string, Sort> variable_sorts(const FormulaPtr& f) {
  std::map<std::string, Sort> out;
  std::set<std::string> bound;
  auto note = [&](const std::string& v, Sort s) {
    if (bound.count(v)) return;
    auto [it, inserted] = out.emplace(v, s);
    if (!inserted && it->second != s)
      throw Error(ErrorKind::Sort, "variable '" + v + "' used both as int and bool");
  };
  auto walk = [&](auto&& self, const FormulaPtr& g) -> void {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Formula::Compare>) {
            for (const auto& v : expr::variables(n.lhs)) note(v, Sort::Int);
            for (const auto& v : expr::variables(n.rhs)) note(v, Sort::Int);
          } else if constexpr (std::is_same_v<N, Formula::BoolVar>) {
            note(n.name, Sort::Bool);
          } else if constexpr (std::is_same_v<N, Formula::Not>) {
            self(self, n.operand);
          } else if constexpr (std::is_same_v<N, Formula::And> || std::is_same_v<N, Formula::Or>) {
            for (const auto& h : n.operands) self(self, h);
          } else if constexpr (std::is_same_v<N, Formula::Implies>) {
            self(self, n.lhs);
            self(self, n.rhs);
          } else if constexpr (std::is_same_v<N, Formula::Quant>) {
            bool fresh = bound.insert(n.var).second;
            self(self, n.body);
            if (fresh) bound.erase(n.var);
          } else if constexpr (std::is_same_v<N, Formula::Divides>) {
            for (const auto& v : expr::variables(n.term)) note(v, Sort::Int);
          }
        },
        g->node);
  };
  walk(walk, f);
  return out;
}

/// Textual form. `Compact` prints comparisons without spaces (`0<c`), as in
/// types; `Spaced` prints `0 > 50`, as in logic diagnostics.
enum class Style { Compact, Spaced };

namespace detail {

// 0 quantifier, 1 implication, 2 disjunction, 3 conjunction, 4 negation, 5 atom
inline int level(const FormulaPtr& f) {
  return std::visit(
      [](const auto& n) -> int {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Formula::Quant>) return 0;
        else if constexpr (std::is_same_v<N, Formula::Implies>) return 1;
        else if constexpr (std::is_same_v<N, Formula::Or>) return 2;
        else if constexpr (std::is_same_v<N, Formula::And>) return 3;
        else if constexpr (std::is_same_v<N, Formula::Not>) return 4;
        else return 5;
      },
      f->node);
}

inline std::string print(const FormulaPtr& f, Style style);

inline std::string operand(const FormulaPtr& f, int min_level, Style style) {
  std::string s = print(f, style);
  int l = level(f);
  return (l < min_level || l == 0) ? "(" + s + ")" : s;
}

inline std::string print(const FormulaPtr& f, Style style) {
  bool spaced = style == Style::Spaced;
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Formula::Const>) {
          return n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<N, Formula::Compare>) {
          std::string op = expr::symbol(n.op);
          if (spaced) op = " " + op + " ";
          return expr::detail::print(n.lhs, 4, spaced) + op + expr::detail::print(n.rhs, 4, spaced);
        } else if constexpr (std::is_same_v<N, Formula::BoolVar>) {
          return n.name;
        } else if constexpr (std::is_same_v<N, Formula::Not>) {
          return "!" + operand(n.operand, 5, style);
        } else if constexpr (std::is_same_v<N, Formula::And> || std::is_same_v<N, Formula::Or>) {
          constexpr bool is_and = std::is_same_v<N, Formula::And>;
          if (n.operands.empty()) return is_and ? "true" : "false";
          std::string out;
          for (std::size_t i = 0; i < n.operands.size(); ++i) {
            if (i) out += is_and ? " && " : " || ";
            out += operand(n.operands[i], is_and ? 4 : 3, style);
          }
          return out;
        } else if constexpr (std::is_same_v<N, Formula::Implies>) {
          return operand(n.lhs, 2, style) + " => " + operand(n.rhs, 1, style);
        } else if constexpr (std::is_same_v<N, Formula::Quant>) {
          return std::string(n.quantifier == Quantifier::Exists ? "exists " : "forall ") + n.var + ":" +
                 to_string(n.sort) + ". " + print(n.body, style);
        } else {
          return "(" + std::to_string(n.modulus) + " | " + expr::to_string(n.term, spaced) + ")";
        }
      },
      f->node);
}

}  // namespace detail

inline std::string to_string(const FormulaPtr& f, Style style = Style::Compact) {
  return detail::print(f, style);
}

}  // namespace logic
}  // namespace mpst
