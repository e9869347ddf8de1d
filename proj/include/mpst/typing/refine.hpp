#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>

#include "mpst/analysis/report.hpp"
#include "mpst/core/local.hpp"
#include "mpst/logic/presburger.hpp"

namespace mpst {

struct Mismatch {
  std::string path;
  std::string inferred;   // the inferred sub-type where the comparison failed
  std::string projected;  // the projected sub-type at the same place
  std::string reason;
};

namespace typing_detail {

class Refiner {
 public:
  explicit Refiner(const Solver& solver) : solver_(solver) {}

  std::optional<Mismatch> check(const LocalPtr& inf, const LocalPtr& proj, std::map<std::string, std::string> names,
                                std::map<std::string, std::string> recs, TreePath path) {
    auto fail = [&](const std::string& at, const std::string& reason) -> std::optional<Mismatch> {
      return Mismatch{at, local::to_string(inf), local::to_string(proj), reason};
    };
    auto here = [&] { return path.prefix.empty() ? std::to_string(path.counter + 1) : path.prefix + "." + std::to_string(path.counter + 1); };
    if (inf->node.index() != proj->node.index()) return fail(here(), "different kinds of action");

    if (const auto* a = std::get_if<Local::Message>(&inf->node)) {
      const auto& b = std::get<Local::Message>(proj->node);
      std::string at = path.next();
      if (a->polarity != b.polarity) return fail(at, "send where a receive is expected, or vice versa");
      if (a->channel != b.channel) return fail(at, "channel " + a->channel + " where " + b.channel + " is expected");
      if (a->sort != b.sort)
        return fail(at, std::string("payload of sort ") + to_string(a->sort) + " where " + to_string(b.sort) +
                            " is expected");
      names[a->var] = b.var;
      if (!entails(a->polarity, logic::rename_free(a->assertion, names), b.assertion))
        return fail(at, a->polarity == Polarity::Out ? "sent assertion does not imply the projected one"
                                                      : "received assertion is not implied by the projected one");
      return check(a->cont, b.cont, names, recs, path);
    }
    if (const auto* a = std::get_if<Local::Choice>(&inf->node)) {
      const auto& b = std::get<Local::Choice>(proj->node);
      std::string at = path.next();
      if (a->polarity != b.polarity) return fail(at, "selection where a branching is expected, or vice versa");
      if (a->channel != b.channel) return fail(at, "channel " + a->channel + " where " + b.channel + " is expected");
      if (a->polarity == Polarity::In && a->branches.size() != b.branches.size())
        return fail(at, "branching must offer exactly the projected labels");
      for (const auto& l : a->branches) {
        auto it = std::find_if(b.branches.begin(), b.branches.end(), [&](const auto& k) { return k.label == l.label; });
        if (it == b.branches.end()) return fail(at, "label '" + l.label + "' is not in the projection");
        if (!entails(a->polarity, logic::rename_free(l.assertion, names), it->assertion))
          return fail(at, "assertion of label '" + l.label + "' does not refine the projection");
        if (auto m = check(l.cont, it->cont, names, recs, path.enter(at, l.label))) return m;
      }
      return std::nullopt;
    }
    if (const auto* a = std::get_if<Local::Rec>(&inf->node)) {
      const auto& b = std::get<Local::Rec>(proj->node);
      std::string at = here();
      if (a->params.size() != b.params.size()) return fail(at, "recursions have different parameters");
      for (std::size_t i = 0; i < a->params.size(); ++i) {
        if (a->params[i].sort != b.params[i].sort) return fail(at, "recursion parameter sorts differ");
        if (!(expr::rename(a->params[i].init, names) == b.params[i].init))
          return fail(at, "recursion initial values differ");
      }
      for (std::size_t i = 0; i < a->params.size(); ++i) names[a->params[i].name] = b.params[i].name;
      recs[a->var] = b.var;
      if (!logic::is_true(a->invariant) &&
          !solver_.implies(logic::rename_free(a->invariant, names), b.invariant))
        return fail(at, "recursion invariant does not imply the projected one");
      return check(a->body, b.body, names, recs, path);
    }
    if (const auto* a = std::get_if<Local::Call>(&inf->node)) {
      const auto& b = std::get<Local::Call>(proj->node);
      std::string at = here();
      auto it = recs.find(a->var);
      if (it == recs.end() || it->second != b.var || a->args.size() != b.args.size())
        return fail(at, "different recursive calls");
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!(expr::rename(a->args[i], names) == b.args[i])) return fail(at, "recursive call arguments differ");
      return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  // Out: the implementation may promise more; In: it may assume less.
  bool entails(Polarity p, const FormulaPtr& inferred, const FormulaPtr& projected) const {
    if (inferred == projected) return true;
    return p == Polarity::Out ? solver_.implies(inferred, projected) : solver_.implies(projected, inferred);
  }

  const Solver& solver_;
};

}  // namespace typing_detail

/// Whether an inferred type refines its projection: fewer selected labels,
/// stronger send/select assertions, weaker receive/branch assertions.
inline std::optional<Mismatch> refines(const LocalPtr& inferred, const LocalPtr& projected,
                                       const Solver& solver = Solver{}) {
  return typing_detail::Refiner(solver).check(inferred, projected, {}, {}, {});
}

}  // namespace mpst
