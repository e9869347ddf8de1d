#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mpst/analysis/report.hpp"
#include "mpst/core/global.hpp"
#include "mpst/core/local.hpp"

namespace mpst {

struct Projection {
  std::string participant;
  LocalPtr type;
};

namespace projection_detail {

struct State {
  std::vector<FormulaPtr> context;                  // path assertions, oldest first
  std::set<std::string> known;                      // variables known to the participant
  std::vector<std::pair<std::string, Sort>> intro;  // bound variables in order of introduction
  std::set<std::string> dropped;                    // recursions the participant takes no part in
};

class Projector {
 public:
  Projector(std::string who, std::set<std::string> names) : who_(std::move(who)), names_(std::move(names)) {}

  LocalPtr project(const GlobalPtr& g, State st, TreePath path) {
    return std::visit(
        [&](const auto& n) -> LocalPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Global::Interaction>) {
            path.next();
            bind(st, n.var, n.sort);
            if (n.sender == who_) {
              st.known.insert(n.var);
              push(st, n.assertion);
              return local::message(Polarity::Out, n.channel, n.var, n.sort, n.assertion, project(n.cont, st, path));
            }
            if (n.receiver == who_) {
              st.known.insert(n.var);
              FormulaPtr rely = this->rely(st, n.assertion);
              push(st, n.assertion);
              return local::message(Polarity::In, n.channel, n.var, n.sort, rely, project(n.cont, st, path));
            }
            push(st, n.assertion);
            return project(n.cont, st, path);
          } else if constexpr (std::is_same_v<N, Global::Branch>) {
            std::string at = path.next();
            bool sender = n.sender == who_, receiver = n.receiver == who_;
            if (sender || receiver) {
              std::vector<Local::Label> labels;
              for (const auto& l : n.branches) {
                State inner = st;
                FormulaPtr a = sender ? l.assertion : rely(st, l.assertion);
                push(inner, l.assertion);
                labels.push_back(Local::Label{l.label, a, project(l.cont, inner, path.enter(at, l.label))});
              }
              return local::choice(sender ? Polarity::Out : Polarity::In, n.channel, n.branch_id, std::move(labels));
            }
            // Not involved: the participant cannot tell which label was chosen.
            std::vector<FormulaPtr> choices;
            for (const auto& l : n.branches) choices.push_back(l.assertion);
            push(st, logic::disj(choices));
            LocalPtr first;
            std::string first_label;
            for (const auto& l : n.branches) {
              LocalPtr t = project(l.cont, st, path.enter(at, l.label));
              if (!first) {
                first = t;
                first_label = l.label;
              } else if (!(t == first)) {
                throw Error(ErrorKind::UnmergeableBranches,
                            "projection on " + who_ + " differs between labels '" + first_label + "' (" +
                                local::to_string(first) + ") and '" + l.label + "' (" + local::to_string(t) + ") at " + at,
                            g->pos);
              }
            }
            return first;
          } else if constexpr (std::is_same_v<N, Global::Rec>) {
            auto involved = global::participants(n.body);
            bool takes_part = std::find(involved.begin(), involved.end(), who_) != involved.end();
            State inner = st;
            for (const auto& p : n.params) {
              bind(inner, p.name, p.sort);
              if (takes_part) inner.known.insert(p.name);
            }
            push(inner, n.invariant);
            if (!takes_part) {
              inner.dropped.insert(n.var);
              return project(n.body, inner, path);
            }
            inner.dropped.erase(n.var);
            FormulaPtr inv = quantify_unknown(inner, n.invariant);
            return Local{Local::Rec{n.var, n.params, inv, project(n.body, inner, path)}};
          } else if constexpr (std::is_same_v<N, Global::Call>) {
            if (st.dropped.count(n.var)) return local::end();
            return Local{Local::Call{n.var, n.args}};
          } else {
            return local::end();
          }
        },
        g->node);
  }

 private:
  // Current assertion, then the path most recent first; unknown variables
  // are existentially quantified, the latest introduced outermost.
  FormulaPtr rely(const State& st, const FormulaPtr& current) const {
    std::vector<FormulaPtr> parts{current};
    for (auto it = st.context.rbegin(); it != st.context.rend(); ++it) parts.push_back(*it);
    return quantify_unknown(st, logic::conj(parts));
  }

  FormulaPtr quantify_unknown(const State& st, FormulaPtr f) const {
    std::set<std::string> free = logic::free_variables(f);
    std::set<std::string> done;
    for (const auto& [v, sort] : st.intro) {
      if (!free.count(v) || st.known.count(v) || done.count(v)) continue;
      done.insert(v);
      f = logic::exists(v, sort, f);
    }
    for (const auto& v : free)
      if (!st.known.count(v) && !done.count(v)) f = logic::exists(v, Sort::Int, f);
    return f;
  }

  void bind(State& st, const std::string& v, Sort sort) {
    auto it = std::find_if(st.intro.begin(), st.intro.end(), [&](const auto& p) { return p.first == v; });
    if (it != st.intro.end()) {
      std::string old = logic::fresh_name(v, names_);
      names_.insert(old);
      it->first = old;
      st.known.erase(v);
      for (auto& f : st.context) f = logic::rename_free(f, {{v, old}});
    }
    st.intro.emplace_back(v, sort);
  }

  static void push(State& st, const FormulaPtr& f) {
    if (!logic::is_true(f)) st.context.push_back(f);
  }

  std::string who_;
  std::set<std::string> names_;
};

}  // namespace projection_detail

/// Local type of `participant`, with rely/guarantee assertions.
inline LocalPtr project(const GlobalPtr& g, const std::string& participant) {
  std::set<std::string> names;
  global::collect_names(g, names);
  projection_detail::Projector p(participant, names);
  return p.project(g, {}, {});
}

/// One projection per participant, in alphabetical order.
inline std::vector<Projection> project_all(const GlobalPtr& g) {
  auto who = global::participants(g);
  std::sort(who.begin(), who.end());
  std::vector<Projection> out;
  for (const auto& p : who) out.push_back(Projection{p, project(g, p)});
  return out;
}

}  // namespace mpst
