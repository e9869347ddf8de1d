#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mpst/analysis/report.hpp"
#include "mpst/core/global.hpp"
#include "mpst/logic/presburger.hpp"

namespace mpst::analysis {

using KnowledgeMap = std::map<std::string, std::set<std::string>>;

namespace detail {

struct RecInfo {
  std::vector<ValueParam> params;
  FormulaPtr invariant;
};

struct AssertState {
  KnowledgeMap known;
  std::vector<FormulaPtr> context;  // every assertion on the path
  std::set<std::string> bound;      // variables introduced so far on the path
  std::map<std::string, RecInfo> recs;
};

class WellAssertedChecker {
 public:
  WellAssertedChecker(const Solver& solver, std::set<std::string> names) : solver_(solver), names_(std::move(names)) {}

  void walk(const GlobalPtr& g, AssertState st, TreePath path) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Global::Interaction>) {
            std::string at = path.next();
            history(n.assertion, st.known[n.sender], n.var, n.sender, at, g->pos);
            rebind(st, n.var);
            FormulaPtr gamma = logic::conj(st.context);
            if (is_logical(n.sort)) {
              FormulaPtr goal = logic::exists(n.var, n.sort, n.assertion);
              if (!solver_.implies(gamma, goal))
                report.add(Violation{ViolationKind::TemporalSatisfiability, at,
                                     n.sender + " cannot guarantee " + logic::to_string(n.assertion, logic::Style::Spaced) +
                                         ": " + logic::to_string(logic::implication(gamma, goal), logic::Style::Spaced) +
                                         " is not valid",
                                     g->pos, {}});
            } else if (!solver_.implies(gamma, n.assertion)) {
              report.add(Violation{ViolationKind::TemporalSatisfiability, at,
                                   n.sender + " cannot guarantee " + logic::to_string(n.assertion, logic::Style::Spaced),
                                   g->pos, {}});
            }
            st.known[n.sender].insert(n.var);
            st.known[n.receiver].insert(n.var);
            push(st, n.assertion);
            walk(n.cont, std::move(st), path);
          } else if constexpr (std::is_same_v<N, Global::Branch>) {
            std::string at = path.next();
            std::vector<FormulaPtr> choices;
            for (const auto& l : n.branches) {
              history(l.assertion, st.known[n.sender], "", n.sender, at + "." + l.label, l.pos);
              choices.push_back(l.assertion);
            }
            FormulaPtr gamma = logic::conj(st.context);
            FormulaPtr some = logic::disj(choices);
            if (!solver_.implies(gamma, some))
              report.add(Violation{ViolationKind::TemporalSatisfiability, at,
                                   n.sender + " may be unable to select any label: " +
                                       logic::to_string(logic::implication(gamma, some), logic::Style::Spaced) +
                                       " is not valid",
                                   g->pos, {}});
            for (const auto& l : n.branches) {
              AssertState inner = st;
              push(inner, l.assertion);
              walk(l.cont, std::move(inner), path.enter(at, l.label));
            }
          } else if constexpr (std::is_same_v<N, Global::Rec>) {
            std::map<std::string, ExprPtr> actuals;
            for (const auto& p : n.params) actuals[p.name] = p.init;
            check_invariant(st, n.var, n.invariant, actuals, path.prefix.empty() ? "entry of " + n.var : path.prefix + " entry of " + n.var, g->pos);
            for (const auto& p : n.params) rebind(st, p.name);
            for (const auto& who : global::participants(n.body))
              for (const auto& p : n.params) st.known[who].insert(p.name);
            push(st, n.invariant);
            st.recs[n.var] = RecInfo{n.params, n.invariant};
            walk(n.body, std::move(st), path);
          } else if constexpr (std::is_same_v<N, Global::Call>) {
            auto it = st.recs.find(n.var);
            if (it == st.recs.end()) return;
            std::map<std::string, ExprPtr> actuals;
            for (std::size_t i = 0; i < it->second.params.size() && i < n.args.size(); ++i)
              actuals[it->second.params[i].name] = n.args[i];
            std::string at = (path.prefix.empty() ? "" : path.prefix + " ") + "call of " + n.var;
            check_invariant(st, n.var, it->second.invariant, actuals, at, g->pos);
          }
        },
        g->node);
  }

  CheckReport report;

 private:
  void history(const FormulaPtr& a, const std::set<std::string>& known, const std::string& payload,
               const std::string& sender, const std::string& at, SourcePos pos) {
    for (const auto& v : logic::free_variables(a))
      if (v != payload && !known.count(v))
        report.add(Violation{ViolationKind::HistorySensitivity, at,
                             "assertion of " + sender + " mentions '" + v + "', which " + sender + " does not know", pos,
                             {}});
  }

  void check_invariant(const AssertState& st, const std::string& var, const FormulaPtr& inv,
                       const std::map<std::string, ExprPtr>& actuals, const std::string& at, SourcePos pos) {
    FormulaPtr inst = logic::substitute(inv, actuals);
    FormulaPtr gamma = logic::conj(st.context);
    if (!solver_.implies(gamma, inst))
      report.add(Violation{ViolationKind::InvariantUnsatisfied, at,
                           "invariant of " + var + " does not hold: " +
                               logic::to_string(logic::implication(gamma, inst), logic::Style::Spaced) + " is not valid",
                           pos, {}});
  }

  // A variable bound again on the same path: earlier facts about it now
  // concern an anonymous older value.
  void rebind(AssertState& st, const std::string& v) {
    if (!st.bound.insert(v).second) {
      std::string old = logic::fresh_name(v, names_);
      names_.insert(old);
      for (auto& f : st.context) f = logic::rename_free(f, {{v, old}});
    }
  }

  void push(AssertState& st, const FormulaPtr& f) {
    if (!logic::is_true(f)) st.context.push_back(f);
  }

  const Solver& solver_;
  std::set<std::string> names_;
};

}  // namespace detail

/// History sensitivity, temporal satisfiability and recursion invariants.
inline CheckReport check_well_asserted(const GlobalPtr& g, const Solver& solver = Solver{}) {
  std::set<std::string> names;
  global::collect_names(g, names);
  detail::WellAssertedChecker checker(solver, names);
  checker.walk(g, {}, {});
  return checker.report;
}

}  // namespace mpst::analysis
