#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mpst/core/error.hpp"
#include "mpst/core/ref.hpp"
#include "mpst/core/sort.hpp"

namespace mpst {

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp { Neg, Not };

struct Expr;
using ExprPtr = Ref<Expr>;

/// Expressions of the process language. `/` is floor division and is only
/// admitted with a positive constant divisor inside assertions.
struct Expr {
  struct Int {
    std::int64_t value;
    bool operator==(const Int&) const = default;
  };
  struct Bool {
    bool value;
    bool operator==(const Bool&) const = default;
  };
  struct Str {
    std::string value;
    bool operator==(const Str&) const = default;
  };
  struct Var {
    std::string name;
    bool operator==(const Var&) const = default;
  };
  struct Unary {
    UnaryOp op;
    ExprPtr operand;
    bool operator==(const Unary&) const = default;
  };
  struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
    bool operator==(const Binary&) const = default;
  };

  std::variant<Int, Bool, Str, Var, Unary, Binary> node;
  SourcePos pos;

  bool operator==(const Expr&) const = default;
};

namespace expr {

inline ExprPtr integer(std::int64_t v, SourcePos pos = {}) { return Expr{Expr::Int{v}, pos}; }
inline ExprPtr boolean(bool v, SourcePos pos = {}) { return Expr{Expr::Bool{v}, pos}; }
inline ExprPtr string(std::string v, SourcePos pos = {}) { return Expr{Expr::Str{std::move(v)}, pos}; }
inline ExprPtr var(std::string name, SourcePos pos = {}) { return Expr{Expr::Var{std::move(name)}, pos}; }
inline ExprPtr unary(UnaryOp op, ExprPtr e, SourcePos pos = {}) { return Expr{Expr::Unary{op, std::move(e)}, pos}; }
inline ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b, SourcePos pos = {}) {
  return Expr{Expr::Binary{op, std::move(a), std::move(b)}, pos};
}

inline bool is_comparison(BinaryOp op) {
  return op == BinaryOp::Eq || op == BinaryOp::Ne || op == BinaryOp::Lt || op == BinaryOp::Le ||
         op == BinaryOp::Gt || op == BinaryOp::Ge;
}
inline bool is_arithmetic(BinaryOp op) {
  return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul || op == BinaryOp::Div;
}

inline const char* symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

inline void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Expr::Var>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<N, Expr::Unary>) {
          collect_vars(n.operand, out);
        } else if constexpr (std::is_same_v<N, Expr::Binary>) {
          collect_vars(n.lhs, out);
          collect_vars(n.rhs, out);
        }
      },
      e->node);
}

inline std::set<std::string> variables(const ExprPtr& e) {
  std::set<std::string> out;
  collect_vars(e, out);
  return out;
}

/// Replaces variables by expressions (expressions bind nothing, so no capture).
inline ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& bindings) {
  if (bindings.empty()) return e;
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Expr::Var>) {
          auto it = bindings.find(n.name);
          return it == bindings.end() ? e : it->second;
        } else if constexpr (std::is_same_v<N, Expr::Unary>) {
          return unary(n.op, substitute(n.operand, bindings), e->pos);
        } else if constexpr (std::is_same_v<N, Expr::Binary>) {
          return binary(n.op, substitute(n.lhs, bindings), substitute(n.rhs, bindings), e->pos);
        } else {
          return e;
        }
      },
      e->node);
}

inline ExprPtr rename(const ExprPtr& e, const std::map<std::string, std::string>& names) {
  std::map<std::string, ExprPtr> bindings;
  for (const auto& [from, to] : names) bindings.emplace(from, var(to));
  return substitute(e, bindings);
}

/// Sort of an expression given the sorts of its variables.
/// Throws SortError on ill-sorted expressions and UnboundVariable on unknown names.
inline Sort sort_of(const ExprPtr& e, const std::map<std::string, Sort>& scope) {
  auto fail = [&](const std::string& msg) -> Sort { throw Error(ErrorKind::Sort, msg, e->pos); };
  return std::visit(
      [&](const auto& n) -> Sort {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Expr::Int>) {
          return Sort::Int;
        } else if constexpr (std::is_same_v<N, Expr::Bool>) {
          return Sort::Bool;
        } else if constexpr (std::is_same_v<N, Expr::Str>) {
          return Sort::String;
        } else if constexpr (std::is_same_v<N, Expr::Var>) {
          auto it = scope.find(n.name);
          if (it == scope.end()) throw Error(ErrorKind::UnboundVariable, "unknown variable '" + n.name + "'", e->pos);
          return it->second;
        } else if constexpr (std::is_same_v<N, Expr::Unary>) {
          Sort s = sort_of(n.operand, scope);
          Sort want = n.op == UnaryOp::Neg ? Sort::Int : Sort::Bool;
          if (s != want) return fail(std::string("expected sort ") + to_string(want) + ", found " + to_string(s));
          return want;
        } else {
          Sort a = sort_of(n.lhs, scope);
          Sort b = sort_of(n.rhs, scope);
          if (is_arithmetic(n.op)) {
            if (a != Sort::Int) return fail(std::string("expected sort int, found ") + to_string(a));
            if (b != Sort::Int) return fail(std::string("expected sort int, found ") + to_string(b));
            return Sort::Int;
          }
          if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
            if (a != Sort::Bool) return fail(std::string("expected sort bool, found ") + to_string(a));
            if (b != Sort::Bool) return fail(std::string("expected sort bool, found ") + to_string(b));
            return Sort::Bool;
          }
          if (n.op == BinaryOp::Eq || n.op == BinaryOp::Ne) {
            bool compatible = a == b || (assignable(a, b) || assignable(b, a));
            if (!compatible) return fail(std::string("cannot compare ") + to_string(a) + " with " + to_string(b));
            return Sort::Bool;
          }
          if (a != Sort::Int) return fail(std::string("expected sort int, found ") + to_string(a));
          if (b != Sort::Int) return fail(std::string("expected sort int, found ") + to_string(b));
          return Sort::Bool;
        }
      },
      e->node);
}

namespace detail {

inline int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 4;
    case BinaryOp::Mul:
    case BinaryOp::Div: return 5;
    default: return 3;
  }
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

inline std::string print(const ExprPtr& e, int context, bool spaced) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Expr::Int>) {
          std::string s = std::to_string(n.value);
          return (n.value < 0 && context > 0) ? "(" + s + ")" : s;
        } else if constexpr (std::is_same_v<N, Expr::Bool>) {
          return n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<N, Expr::Str>) {
          return quote(n.value);
        } else if constexpr (std::is_same_v<N, Expr::Var>) {
          return n.name;
        } else if constexpr (std::is_same_v<N, Expr::Unary>) {
          std::string s = (n.op == UnaryOp::Neg ? "-" : "!") + print(n.operand, 6, spaced);
          return context > 6 ? "(" + s + ")" : s;
        } else {
          int p = precedence(n.op);
          bool cmp = is_comparison(n.op);
          std::string op = symbol(n.op);
          if (n.op == BinaryOp::And || n.op == BinaryOp::Or || (cmp && spaced)) op = " " + op + " ";
          std::string s = print(n.lhs, cmp ? p + 1 : p, spaced) + op + print(n.rhs, p + 1, spaced);
          return context > p ? "(" + s + ")" : s;
        }
      },
      e->node);
}

}  // namespace detail

inline std::string to_string(const ExprPtr& e, bool spaced = false) { return detail::print(e, 0, spaced); }

}  // namespace expr
}  // namespace mpst
