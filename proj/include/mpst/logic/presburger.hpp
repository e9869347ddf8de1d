#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpst/core/formula.hpp"

namespace mpst {

struct SolverOptions {
  /// Upper bound on atom constructions and elimination steps per query.
  std::uint64_t budget = 2'000'000;
};

struct QeStats {
  std::size_t eliminated = 0;
  std::size_t atoms = 0;
};

struct QeResult {
  FormulaPtr formula;
  QeStats stats;
};

namespace presburger {

// ---- checked integer arithmetic -------------------------------------------

[[noreturn]] inline void overflow() {
  throw Error(ErrorKind::ResourceExhausted, "integer overflow during quantifier elimination");
}
inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) overflow();
  return r;
}
inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) overflow();
  return r;
}
inline std::int64_t neg(std::int64_t a) { return mul(a, -1); }
inline std::int64_t lcm(std::int64_t a, std::int64_t b) {
  a = a < 0 ? neg(a) : a;
  b = b < 0 ? neg(b) : b;
  if (a == 0 || b == 0) return std::max(a, b);
  return mul(a / std::gcd(a, b), b);
}
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return neg(floor_div(neg(a), b)); }
inline std::int64_t mod(std::int64_t a, std::int64_t k) {
  std::int64_t r = a % k;
  return r < 0 ? r + k : r;
}

// ---- linear terms ---------------------------------------------------------

using Coeffs = std::vector<std::pair<int, std::int64_t>>;  // sorted by variable id, no zeros

struct Term {
  Coeffs coeffs;
  std::int64_t constant = 0;
  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;

  static Term constant_term(std::int64_t c) { return Term{{}, c}; }
  static Term variable(int id, std::int64_t c = 1) { return Term{{{id, c}}, 0}; }

  std::int64_t coefficient(int x) const {
    for (const auto& [v, c] : coeffs)
      if (v == x) return c;
    return 0;
  }
  bool ground() const { return coeffs.empty(); }
};

inline Term scale(const Term& t, std::int64_t k) {
  if (k == 0) return Term{};
  Term out;
  out.constant = mul(t.constant, k);
  for (const auto& [v, c] : t.coeffs) out.coeffs.emplace_back(v, mul(c, k));
  return out;
}

inline Term plus(const Term& a, const Term& b) {
  Term out;
  out.constant = add(a.constant, b.constant);
  std::size_t i = 0, j = 0;
  while (i < a.coeffs.size() || j < b.coeffs.size()) {
    if (j == b.coeffs.size() || (i < a.coeffs.size() && a.coeffs[i].first < b.coeffs[j].first)) {
      out.coeffs.push_back(a.coeffs[i++]);
    } else if (i == a.coeffs.size() || b.coeffs[j].first < a.coeffs[i].first) {
      out.coeffs.push_back(b.coeffs[j++]);
    } else {
      std::int64_t c = add(a.coeffs[i].second, b.coeffs[j].second);
      if (c != 0) out.coeffs.emplace_back(a.coeffs[i].first, c);
      ++i;
      ++j;
    }
  }
  return out;
}

inline Term minus(const Term& a, const Term& b) { return plus(a, scale(b, -1)); }

/// t with x := s.
inline Term substitute(const Term& t, int x, const Term& s) {
  std::int64_t a = t.coefficient(x);
  if (a == 0) return t;
  Term rest = t;
  rest.coeffs.erase(std::find_if(rest.coeffs.begin(), rest.coeffs.end(), [&](const auto& p) { return p.first == x; }));
  return plus(rest, scale(s, a));
}

/// t with the coefficient of x replaced by `c`.
inline Term with_coefficient(const Term& t, int x, std::int64_t c) {
  Term out = t;
  auto it = std::find_if(out.coeffs.begin(), out.coeffs.end(), [&](const auto& p) { return p.first == x; });
  if (it != out.coeffs.end()) out.coeffs.erase(it);
  if (c != 0) {
    auto pos = std::lower_bound(out.coeffs.begin(), out.coeffs.end(), x,
                                [](const auto& p, int v) { return p.first < v; });
    out.coeffs.insert(pos, {x, c});
  }
  return out;
}

// ---- quantifier-free formulas in negation normal form ---------------------

enum class Rel { Le, Eq, Ne, Dvd, NDvd };  // t <= 0, t = 0, t != 0, k | t, !(k | t)

struct Atom {
  Rel rel;
  std::int64_t modulus = 0;
  Term term;
  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

struct Node;
using NodeP = std::shared_ptr<const Node>;

struct Node {
  enum Kind { True, False, Leaf, And, Or } kind;
  Atom atom{};
  std::vector<NodeP> kids;
};

inline bool mentions(const NodeP& n, int x) {
  if (n->kind == Node::Leaf) return n->atom.term.coefficient(x) != 0;
  for (const auto& k : n->kids)
    if (mentions(k, x)) return true;
  return false;
}

inline void collect_atoms(const NodeP& n, std::vector<Atom>& out) {
  if (n->kind == Node::Leaf) out.push_back(n->atom);
  for (const auto& k : n->kids) collect_atoms(k, out);
}

inline std::size_t count_atoms(const NodeP& n) {
  if (n->kind == Node::Leaf) return 1;
  std::size_t total = 0;
  for (const auto& k : n->kids) total += count_atoms(k);
  return total;
}

inline Coeffs negated(const Coeffs& cs) {
  Coeffs out;
  for (const auto& [v, c] : cs) out.emplace_back(v, neg(c));
  return out;
}

/// Cooper's quantifier elimination over the NNF representation, with a
/// simplifier applied at every construction.
class Engine {
 public:
  explicit Engine(std::uint64_t budget) : budget_(budget) {}

  NodeP truth(bool v) const { return v ? true_ : false_; }

  void tick() {
    if (++steps_ > budget_)
      throw Error(ErrorKind::ResourceExhausted,
                  "quantifier elimination exceeded its budget of " + std::to_string(budget_) + " steps");
  }

  NodeP atom(Rel rel, Term t, std::int64_t modulus = 0) {
    tick();
    if (rel == Rel::Dvd || rel == Rel::NDvd) {
      bool positive = rel == Rel::Dvd;
      if (modulus < 0) modulus = neg(modulus);
      if (modulus == 0) throw Error(ErrorKind::NonLinearAtom, "divisibility by zero");
      t.constant = mod(t.constant, modulus);
      Coeffs kept;
      for (const auto& [v, c] : t.coeffs)
        if (std::int64_t r = mod(c, modulus); r != 0) kept.emplace_back(v, r);
      t.coeffs = std::move(kept);
      std::int64_t g = modulus;
      g = std::gcd(g, t.constant);
      for (const auto& [v, c] : t.coeffs) g = std::gcd(g, c);
      if (g > 1) {
        modulus /= g;
        t.constant /= g;
        for (auto& vc : t.coeffs) vc.second /= g;
      }
      if (modulus == 1) return truth(positive);
      if (t.ground()) return truth((t.constant % modulus == 0) == positive);
      return leaf(Atom{rel, modulus, std::move(t)});
    }
    if (t.ground()) {
      switch (rel) {
        case Rel::Le: return truth(t.constant <= 0);
        case Rel::Eq: return truth(t.constant == 0);
        default: return truth(t.constant != 0);
      }
    }
    std::int64_t g = 0;
    for (const auto& vc : t.coeffs) g = std::gcd(g, vc.second < 0 ? neg(vc.second) : vc.second);
    if (rel == Rel::Le) {
      if (g > 1) {
        for (auto& vc : t.coeffs) vc.second /= g;
        t.constant = ceil_div(t.constant, g);
      }
      return leaf(Atom{rel, 0, std::move(t)});
    }
    if (t.constant % g != 0) return truth(rel == Rel::Ne);
    if (t.coeffs.front().second < 0) t = scale(t, -1);
    if (g > 1) {
      for (auto& vc : t.coeffs) vc.second /= g;
      t.constant /= g;
    }
    return leaf(Atom{rel, 0, std::move(t)});
  }

  NodeP negate(const NodeP& n) {
    switch (n->kind) {
      case Node::True: return false_;
      case Node::False: return true_;
      case Node::Leaf: {
        const Atom& a = n->atom;
        switch (a.rel) {
          case Rel::Le: return atom(Rel::Le, plus(scale(a.term, -1), Term::constant_term(1)));
          case Rel::Eq: return atom(Rel::Ne, a.term);
          case Rel::Ne: return atom(Rel::Eq, a.term);
          case Rel::Dvd: return atom(Rel::NDvd, a.term, a.modulus);
          case Rel::NDvd: return atom(Rel::Dvd, a.term, a.modulus);
        }
        return n;
      }
      case Node::And:
      case Node::Or: {
        std::vector<NodeP> kids;
        for (const auto& k : n->kids) kids.push_back(negate(k));
        return n->kind == Node::And ? disj(std::move(kids)) : conj(std::move(kids));
      }
    }
    return n;
  }

  NodeP conj(std::vector<NodeP> kids) { return combine(std::move(kids), true); }
  NodeP disj(std::vector<NodeP> kids) { return combine(std::move(kids), false); }

  template <class F>
  NodeP map_atoms(const NodeP& n, F&& f) {
    switch (n->kind) {
      case Node::True:
      case Node::False: return n;
      case Node::Leaf: return f(n->atom);
      default: {
        std::vector<NodeP> kids;
        for (const auto& k : n->kids) kids.push_back(map_atoms(k, f));
        return n->kind == Node::And ? conj(std::move(kids)) : disj(std::move(kids));
      }
    }
  }

  NodeP substitute(const NodeP& n, int x, const Term& s) {
    if (!mentions(n, x)) return n;
    return map_atoms(n, [&](const Atom& a) {
      if (a.term.coefficient(x) == 0) return leaf(a);
      return atom(a.rel, presburger::substitute(a.term, x, s), a.modulus);
    });
  }

  /// Equivalent of `exists x. n` without x.
  NodeP eliminate(int x, const NodeP& n) {
    tick();
    if (!mentions(n, x)) return n;
    if (n->kind == Node::Or) {
      std::vector<NodeP> parts;
      for (const auto& k : n->kids) {
        NodeP e = eliminate(x, k);
        if (e->kind == Node::True) return true_;
        parts.push_back(e);
      }
      return disj(std::move(parts));
    }
    // A conjunct x = s (unit coefficient) determines x.
    {
      std::vector<NodeP> top = n->kind == Node::And ? n->kids : std::vector<NodeP>{n};
      for (const auto& k : top) {
        if (k->kind != Node::Leaf || k->atom.rel != Rel::Eq) continue;
        std::int64_t a = k->atom.term.coefficient(x);
        if (a != 1 && a != -1) continue;
        // a*x + r = 0  =>  x = -r/a
        Term r = with_coefficient(k->atom.term, x, 0);
        return substitute(n, x, scale(r, -a));
      }
    }

    std::vector<Atom> atoms;
    collect_atoms(n, atoms);
    std::int64_t l = 1;
    for (const auto& a : atoms)
      if (std::int64_t c = a.term.coefficient(x); c != 0) l = lcm(l, c);

    // Scale every atom so that x has coefficient +-l, then read l*x as x.
    NodeP unit = map_atoms(n, [&](const Atom& a) -> NodeP {
      std::int64_t c = a.term.coefficient(x);
      if (c == 0) return leaf(a);
      std::int64_t m = l / (c < 0 ? neg(c) : c);
      Term t = scale(a.term, m);
      t = with_coefficient(t, x, c < 0 ? -1 : 1);
      return atom(a.rel, std::move(t), a.rel == Rel::Dvd || a.rel == Rel::NDvd ? mul(a.modulus, m) : 0);
    });
    if (l > 1) unit = conj({unit, atom(Rel::Dvd, Term::variable(x), l)});

    atoms.clear();
    collect_atoms(unit, atoms);
    std::size_t lower = 0, upper = 0;
    for (const auto& a : atoms) {
      std::int64_t c = a.term.coefficient(x);
      if (c == 0) continue;
      if (a.rel == Rel::Le) (c < 0 ? lower : upper) += 1;
      if (a.rel == Rel::Eq || a.rel == Rel::Ne) {
        ++lower;
        ++upper;
      }
    }
    if (upper < lower) {
      unit = map_atoms(unit, [&](const Atom& a) -> NodeP {
        std::int64_t c = a.term.coefficient(x);
        if (c == 0) return leaf(a);
        return atom(a.rel, with_coefficient(a.term, x, neg(c)), a.modulus);
      });
      atoms.clear();
      collect_atoms(unit, atoms);
    }

    std::int64_t delta = 1;
    std::vector<Term> bset;
    for (const auto& a : atoms) {
      std::int64_t c = a.term.coefficient(x);
      if (c == 0) continue;
      Term rest = with_coefficient(a.term, x, 0);
      switch (a.rel) {
        case Rel::Dvd:
        case Rel::NDvd: delta = lcm(delta, a.modulus); break;
        case Rel::Le:
          // -x + r <= 0 is the lower bound x >= r; contributes r - 1.
          if (c < 0) bset.push_back(plus(rest, Term::constant_term(-1)));
          break;
        case Rel::Eq:
        case Rel::Ne: {
          // c*x + r = 0 with c = +-1: x = s where s = -r/c.
          Term s = scale(rest, -c);
          bset.push_back(a.rel == Rel::Eq ? plus(s, Term::constant_term(-1)) : s);
          break;
        }
      }
    }
    std::sort(bset.begin(), bset.end());
    bset.erase(std::unique(bset.begin(), bset.end()), bset.end());

    NodeP minus_infinity = map_atoms(unit, [&](const Atom& a) -> NodeP {
      std::int64_t c = a.term.coefficient(x);
      if (c == 0) return leaf(a);
      switch (a.rel) {
        case Rel::Le: return truth(c > 0);
        case Rel::Eq: return false_;
        case Rel::Ne: return true_;
        default: return leaf(a);
      }
    });

    std::vector<NodeP> parts;
    for (std::int64_t j = 1; j <= delta; ++j) {
      NodeP p = substitute(minus_infinity, x, Term::constant_term(j));
      if (p->kind == Node::True) return true_;
      parts.push_back(p);
    }
    for (const auto& b : bset)
      for (std::int64_t j = 1; j <= delta; ++j) {
        NodeP p = substitute(unit, x, plus(b, Term::constant_term(j)));
        if (p->kind == Node::True) return true_;
        parts.push_back(p);
      }
    return disj(std::move(parts));
  }

  std::uint64_t steps() const { return steps_; }

 private:
  NodeP leaf(Atom a) const { return std::make_shared<const Node>(Node{Node::Leaf, std::move(a), {}}); }

  static std::optional<Atom> complement(const Atom& a) {
    switch (a.rel) {
      case Rel::Eq: return Atom{Rel::Ne, 0, a.term};
      case Rel::Ne: return Atom{Rel::Eq, 0, a.term};
      case Rel::Dvd: return Atom{Rel::NDvd, a.modulus, a.term};
      case Rel::NDvd: return Atom{Rel::Dvd, a.modulus, a.term};
      default: return std::nullopt;
    }
  }

  // Flattens, removes neutral elements and duplicates, keeps one bound per
  // linear form and detects contradictory (resp. exhaustive) bound pairs.
  NodeP combine(std::vector<NodeP> kids, bool is_and) {
    tick();
    const Node::Kind self = is_and ? Node::And : Node::Or;
    const Node::Kind absorbing = is_and ? Node::False : Node::True;
    const Node::Kind neutral = is_and ? Node::True : Node::False;

    std::vector<NodeP> flat;
    auto push = [&](auto&& rec, const NodeP& k) -> bool {
      if (k->kind == absorbing) return false;
      if (k->kind == neutral) return true;
      if (k->kind == self) {
        for (const auto& g : k->kids)
          if (!rec(rec, g)) return false;
        return true;
      }
      flat.push_back(k);
      return true;
    };
    for (const auto& k : kids)
      if (!push(push, k)) return truth(!is_and);

    std::vector<NodeP> out;
    std::map<Coeffs, std::size_t> bound_at;  // Le atoms by linear form
    std::set<Atom> seen;
    for (const auto& k : flat) {
      if (k->kind != Node::Leaf) {
        out.push_back(k);
        continue;
      }
      const Atom& a = k->atom;
      if (seen.count(a)) continue;
      if (auto c = complement(a); c && seen.count(*c)) return truth(!is_and);
      if (a.rel == Rel::Le) {
        auto it = bound_at.find(a.term.coeffs);
        if (it != bound_at.end()) {
          const Atom& old = out[it->second]->atom;
          bool replace = is_and ? a.term.constant > old.term.constant : a.term.constant < old.term.constant;
          if (replace) out[it->second] = k;
          seen.insert(a);
          continue;
        }
        bound_at.emplace(a.term.coeffs, out.size());
      }
      seen.insert(a);
      out.push_back(k);
    }

    // v + c1 <= 0 together with -v + c2 <= 0.
    for (auto& [coeffs, index] : bound_at) {
      auto other = bound_at.find(negated(coeffs));
      if (other == bound_at.end() || other->second < index) continue;
      std::int64_t c1 = out[index]->atom.term.constant, c2 = out[other->second]->atom.term.constant;
      std::int64_t sum = add(c1, c2);
      if (is_and) {
        if (sum > 0) return false_;
        if (sum == 0) {
          out[index] = atom(Rel::Eq, out[index]->atom.term);
          out[other->second] = true_;
        }
      } else if (sum <= 1) {
        return true_;
      }
    }
    std::erase_if(out, [&](const NodeP& k) { return k->kind == neutral; });
    if (out.empty()) return truth(is_and);
    if (out.size() == 1) return out.front();
    return std::make_shared<const Node>(Node{self, {}, std::move(out)});
  }

  std::uint64_t budget_;
  std::uint64_t steps_ = 0;
  NodeP true_ = std::make_shared<const Node>(Node{Node::True, {}, {}});
  NodeP false_ = std::make_shared<const Node>(Node{Node::False, {}, {}});
};

/// Translation from the surface formula language. Bound variables get fresh
/// ids, so shadowing is harmless; inner quantifiers are eliminated on the way.
class Translator {
 public:
  Translator(Engine& engine) : engine_(engine) {}

  struct FreeVar {
    std::string name;
    bool boolean;
  };

  NodeP translate(const FormulaPtr& f, bool negate, const std::map<std::string, int>& scope) {
    return std::visit(
        [&](const auto& n) -> NodeP {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Formula::Const>) {
            return engine_.truth(n.value != negate);
          } else if constexpr (std::is_same_v<N, Formula::Compare>) {
            return compare(n.op, n.lhs, n.rhs, negate, scope);
          } else if constexpr (std::is_same_v<N, Formula::BoolVar>) {
            int id = lookup(n.name, true, scope);
            // b encoded as 0/1: b holds iff 1 - b <= 0
            if (!negate) return engine_.atom(Rel::Le, plus(Term::constant_term(1), Term::variable(id, -1)));
            return engine_.atom(Rel::Le, Term::variable(id));
          } else if constexpr (std::is_same_v<N, Formula::Not>) {
            return translate(n.operand, !negate, scope);
          } else if constexpr (std::is_same_v<N, Formula::And> || std::is_same_v<N, Formula::Or>) {
            std::vector<NodeP> kids;
            for (const auto& g : n.operands) kids.push_back(translate(g, negate, scope));
            bool as_and = std::is_same_v<N, Formula::And> != negate;
            return as_and ? engine_.conj(std::move(kids)) : engine_.disj(std::move(kids));
          } else if constexpr (std::is_same_v<N, Formula::Implies>) {
            NodeP a = translate(n.lhs, !negate, scope);
            NodeP b = translate(n.rhs, negate, scope);
            return negate ? engine_.conj({a, b}) : engine_.disj({a, b});
          } else if constexpr (std::is_same_v<N, Formula::Quant>) {
            if (!is_logical(n.sort))
              throw Error(ErrorKind::Sort, std::string("cannot quantify over sort ") + to_string(n.sort));
            ++eliminated_;
            int id = next_id_++;
            std::map<std::string, int> inner = scope;
            inner[n.var] = id;
            bool exists = n.quantifier == Quantifier::Exists;
            // forall x. p == !exists x. !p
            NodeP body = translate(n.body, !exists, inner);
            NodeP e = n.sort == Sort::Bool ? engine_.disj({engine_.substitute(body, id, Term::constant_term(0)),
                                                          engine_.substitute(body, id, Term::constant_term(1))})
                                           : engine_.eliminate(id, body);
            return (exists ? negate : !negate) ? engine_.negate(e) : e;
          } else {
            auto [t, defs] = linear(n.term, scope);
            NodeP a = engine_.atom(negate ? Rel::NDvd : Rel::Dvd, t, n.modulus);
            return with_divisions(a, defs);
          }
        },
        f->node);
  }

  const std::map<int, FreeVar>& free_vars() const { return free_; }
  std::size_t eliminated() const { return eliminated_; }

  int lookup(const std::string& name, bool boolean, const std::map<std::string, int>& scope) {
    if (auto it = scope.find(name); it != scope.end()) return it->second;
    if (auto it = free_ids_.find(name); it != free_ids_.end()) {
      if (free_[it->second].boolean != boolean)
        throw Error(ErrorKind::Sort, "variable '" + name + "' used both as int and bool");
      return it->second;
    }
    int id = next_id_++;
    free_ids_[name] = id;
    free_[id] = FreeVar{name, boolean};
    return id;
  }

 private:
  struct Division {
    int var;
    std::int64_t divisor;
    Term dividend;
  };

  std::pair<Term, std::vector<Division>> linear(const ExprPtr& e, const std::map<std::string, int>& scope) {
    std::vector<Division> defs;
    Term t = linear_into(e, scope, defs);
    return {std::move(t), std::move(defs)};
  }

  Term linear_into(const ExprPtr& e, const std::map<std::string, int>& scope, std::vector<Division>& defs) {
    return std::visit(
        [&](const auto& n) -> Term {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Expr::Int>) {
            return Term::constant_term(n.value);
          } else if constexpr (std::is_same_v<N, Expr::Var>) {
            return Term::variable(lookup(n.name, false, scope));
          } else if constexpr (std::is_same_v<N, Expr::Unary>) {
            if (n.op != UnaryOp::Neg) throw Error(ErrorKind::Sort, "expected sort int, found bool", e->pos);
            return scale(linear_into(n.operand, scope, defs), -1);
          } else if constexpr (std::is_same_v<N, Expr::Binary>) {
            switch (n.op) {
              case BinaryOp::Add: return plus(linear_into(n.lhs, scope, defs), linear_into(n.rhs, scope, defs));
              case BinaryOp::Sub: return minus(linear_into(n.lhs, scope, defs), linear_into(n.rhs, scope, defs));
              case BinaryOp::Mul: {
                Term a = linear_into(n.lhs, scope, defs), b = linear_into(n.rhs, scope, defs);
                if (a.ground()) return scale(b, a.constant);
                if (b.ground()) return scale(a, b.constant);
                throw Error(ErrorKind::NonLinearAtom, "non-linear term '" + expr::to_string(e) + "'", e->pos);
              }
              case BinaryOp::Div: {
                Term a = linear_into(n.lhs, scope, defs), b = linear_into(n.rhs, scope, defs);
                if (!b.ground() || b.constant <= 0)
                  throw Error(ErrorKind::NonLinearAtom,
                              "division by a non-constant or non-positive term in '" + expr::to_string(e) + "'", e->pos);
                if (b.constant == 1) return a;
                if (a.ground()) return Term::constant_term(floor_div(a.constant, b.constant));
                int d = next_id_++;
                defs.push_back(Division{d, b.constant, a});
                return Term::variable(d);
              }
              default:
                throw Error(ErrorKind::Sort, "expected an arithmetic term, found '" + expr::to_string(e) + "'", e->pos);
            }
          } else {
            throw Error(ErrorKind::Sort, "expected an arithmetic term, found '" + expr::to_string(e) + "'", e->pos);
          }
        },
        e->node);
  }

  // x = e / k is k*x <= e <= k*x + k - 1; x is then eliminated.
  NodeP with_divisions(NodeP n, const std::vector<Division>& defs) {
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
      Term kx = Term::variable(it->var, it->divisor);
      NodeP lo = engine_.atom(Rel::Le, minus(kx, it->dividend));
      NodeP hi = engine_.atom(Rel::Le, minus(it->dividend, plus(kx, Term::constant_term(it->divisor - 1))));
      n = engine_.eliminate(it->var, engine_.conj({lo, hi, n}));
    }
    return n;
  }

  NodeP compare(BinaryOp op, const ExprPtr& lhs, const ExprPtr& rhs, bool negate,
                const std::map<std::string, int>& scope) {
    auto [l, ldefs] = linear(lhs, scope);
    auto [r, rdefs] = linear(rhs, scope);
    ldefs.insert(ldefs.end(), rdefs.begin(), rdefs.end());
    if (negate) {
      switch (op) {
        case BinaryOp::Eq: op = BinaryOp::Ne; break;
        case BinaryOp::Ne: op = BinaryOp::Eq; break;
        case BinaryOp::Lt: op = BinaryOp::Ge; break;
        case BinaryOp::Le: op = BinaryOp::Gt; break;
        case BinaryOp::Gt: op = BinaryOp::Le; break;
        case BinaryOp::Ge: op = BinaryOp::Lt; break;
        default: break;
      }
    }
    Term d = minus(l, r);  // l - r
    NodeP a;
    switch (op) {
      case BinaryOp::Eq: a = engine_.atom(Rel::Eq, d); break;
      case BinaryOp::Ne: a = engine_.atom(Rel::Ne, d); break;
      case BinaryOp::Le: a = engine_.atom(Rel::Le, d); break;
      case BinaryOp::Lt: a = engine_.atom(Rel::Le, plus(d, Term::constant_term(1))); break;
      case BinaryOp::Ge: a = engine_.atom(Rel::Le, scale(d, -1)); break;
      case BinaryOp::Gt: a = engine_.atom(Rel::Le, plus(scale(d, -1), Term::constant_term(1))); break;
      default: throw Error(ErrorKind::Sort, std::string("'") + expr::symbol(op) + "' is not a comparison");
    }
    return with_divisions(a, ldefs);
  }

  Engine& engine_;
  int next_id_ = 0;
  std::map<std::string, int> free_ids_;
  std::map<int, FreeVar> free_;
  std::size_t eliminated_ = 0;
};

// ---- back to the surface language -----------------------------------------

inline ExprPtr sum_expr(const std::vector<std::pair<std::string, std::int64_t>>& parts, std::int64_t constant) {
  ExprPtr out;
  for (const auto& [name, c] : parts) {
    ExprPtr term = c == 1 ? expr::var(name) : expr::binary(BinaryOp::Mul, expr::integer(c), expr::var(name));
    out = out ? expr::binary(BinaryOp::Add, out, term) : term;
  }
  if (!out) return expr::integer(constant);
  if (constant > 0) return expr::binary(BinaryOp::Add, out, expr::integer(constant));
  if (constant < 0) return expr::binary(BinaryOp::Sub, out, expr::integer(neg(constant)));
  return out;
}

inline FormulaPtr to_formula(const NodeP& n, const std::map<int, std::string>& names) {
  switch (n->kind) {
    case Node::True: return logic::truth();
    case Node::False: return logic::falsity();
    case Node::And:
    case Node::Or: {
      std::vector<FormulaPtr> kids;
      for (const auto& k : n->kids) kids.push_back(to_formula(k, names));
      return n->kind == Node::And ? logic::conj(kids) : logic::disj(kids);
    }
    case Node::Leaf: break;
  }
  const Atom& a = n->atom;
  std::vector<std::pair<std::string, std::int64_t>> pos, negs;
  for (const auto& [v, c] : a.term.coeffs) (c > 0 ? pos : negs).emplace_back(names.at(v), c > 0 ? c : neg(c));
  if (a.rel == Rel::Dvd || a.rel == Rel::NDvd) {
    std::vector<std::pair<std::string, std::int64_t>> all;
    for (const auto& [v, c] : a.term.coeffs) all.emplace_back(names.at(v), c);
    FormulaPtr d = logic::divides(a.modulus, sum_expr(all, a.term.constant));
    return a.rel == Rel::Dvd ? d : logic::negation(d);
  }
  // pos + c (rel) negs
  BinaryOp op = a.rel == Rel::Le ? BinaryOp::Le : a.rel == Rel::Eq ? BinaryOp::Eq : BinaryOp::Ne;
  if (pos.empty()) {
    BinaryOp flipped = op == BinaryOp::Le ? BinaryOp::Ge : op;
    return logic::compare(flipped, sum_expr(negs, 0), expr::integer(a.term.constant));
  }
  return logic::compare(op, sum_expr(pos, 0), sum_expr(negs, neg(a.term.constant)));
}

inline std::set<std::string> free_bool_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  for (const auto& [v, s] : logic::variable_sorts(f))
    if (s == Sort::Bool) out.insert(v);
  return out;
}

}  // namespace presburger

/// The decision procedure. Every query runs with its own step budget.
class Solver {
 public:
  explicit Solver(SolverOptions options = {}) : options_(options) {}

  /// Quantifier-free equivalent of `f`. Free boolean variables are kept
  /// boolean by case analysis; divisibility atoms may appear in the result.
  QeResult eliminate_quantifiers(const FormulaPtr& f) const {
    presburger::Engine engine(options_.budget);
    QeStats stats;
    FormulaPtr out = eliminate_cases(f, engine, stats, presburger::free_bool_vars(f));
    auto count = [](auto&& self, const FormulaPtr& g) -> std::size_t {
      if (const auto* a = std::get_if<Formula::And>(&g->node)) {
        std::size_t t = 0;
        for (const auto& k : a->operands) t += self(self, k);
        return t;
      }
      if (const auto* o = std::get_if<Formula::Or>(&g->node)) {
        std::size_t t = 0;
        for (const auto& k : o->operands) t += self(self, k);
        return t;
      }
      if (const auto* n = std::get_if<Formula::Not>(&g->node)) return self(self, n->operand);
      if (std::holds_alternative<Formula::Const>(g->node)) return 0;
      return 1;
    };
    stats.atoms = count(count, out);
    return QeResult{out, stats};
  }

  /// Free variables are read existentially.
  bool is_satisfiable(const FormulaPtr& f) const {
    presburger::Engine engine(options_.budget);
    presburger::Translator tr(engine);
    presburger::NodeP n = tr.translate(f, false, {});
    return decide(engine, tr, n);
  }

  /// Free variables are read universally.
  bool is_valid(const FormulaPtr& f) const {
    presburger::Engine engine(options_.budget);
    presburger::Translator tr(engine);
    presburger::NodeP n = tr.translate(f, true, {});
    return !decide(engine, tr, n);
  }

  bool implies(const FormulaPtr& hypothesis, const FormulaPtr& conclusion) const {
    return is_valid(logic::implication(hypothesis, conclusion));
  }

  const SolverOptions& options() const { return options_; }

 private:
  static bool decide(presburger::Engine& engine, presburger::Translator& tr, presburger::NodeP n) {
    using presburger::Node;
    std::vector<int> pending;
    for (const auto& [id, fv] : tr.free_vars()) {
      if (fv.boolean) {
        n = engine.disj({engine.substitute(n, id, presburger::Term::constant_term(0)),
                         engine.substitute(n, id, presburger::Term::constant_term(1))});
      } else {
        pending.push_back(id);
      }
    }
    while (!pending.empty() && n->kind != Node::True && n->kind != Node::False) {
      // Cheapest variable first: fewest occurrences.
      std::vector<presburger::Atom> atoms;
      presburger::collect_atoms(n, atoms);
      auto cost = [&](int x) {
        std::size_t c = 0;
        for (const auto& a : atoms) c += a.term.coefficient(x) != 0;
        return c;
      };
      auto best = std::min_element(pending.begin(), pending.end(), [&](int a, int b) { return cost(a) < cost(b); });
      int x = *best;
      pending.erase(best);
      n = engine.eliminate(x, n);
    }
    if (n->kind != Node::True && n->kind != Node::False)
      throw Error(ErrorKind::ResourceExhausted, "decision procedure left a non-ground residue");
    return n->kind == Node::True;
  }

  static FormulaPtr eliminate_cases(const FormulaPtr& f, presburger::Engine& engine, QeStats& stats,
                                    std::set<std::string> bools) {
    if (!bools.empty()) {
      std::string b = *bools.begin();
      bools.erase(bools.begin());
      FormulaPtr on = eliminate_cases(logic::substitute(f, {{b, expr::boolean(true)}}), engine, stats, bools);
      FormulaPtr off = eliminate_cases(logic::substitute(f, {{b, expr::boolean(false)}}), engine, stats, bools);
      if (on == off) return on;
      return logic::disj(logic::conj(logic::bool_var(b), on), logic::conj(logic::negation(logic::bool_var(b)), off));
    }
    presburger::Translator tr(engine);
    presburger::NodeP n = tr.translate(f, false, {});
    stats.eliminated = std::max(stats.eliminated, tr.eliminated());
    std::map<int, std::string> names;
    for (const auto& [id, fv] : tr.free_vars()) names[id] = fv.name;
    return presburger::to_formula(n, names);
  }

  SolverOptions options_;
};

inline QeResult eliminate_quantifiers(const FormulaPtr& f, SolverOptions o = {}) {
  return Solver(o).eliminate_quantifiers(f);
}
inline bool is_satisfiable(const FormulaPtr& f, SolverOptions o = {}) { return Solver(o).is_satisfiable(f); }
inline bool is_valid(const FormulaPtr& f, SolverOptions o = {}) { return Solver(o).is_valid(f); }
inline bool implies(const FormulaPtr& hypothesis, const FormulaPtr& conclusion, SolverOptions o = {}) {
  return Solver(o).implies(hypothesis, conclusion);
}

}  // namespace mpst
