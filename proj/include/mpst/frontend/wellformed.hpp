#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mpst/frontend/parser.hpp"

namespace mpst::frontend {

namespace detail {

using Scope = std::map<std::string, Sort>;

/// Re-raises a position-less error at `pos`.
template <class F>
auto at_pos(SourcePos pos, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.pos().known()) throw;
    throw Error(e.kind(), e.what(), pos);
  }
}

/// Assertions may only constrain int/bool variables, used at their declared sort.
inline void check_assertion(const FormulaPtr& f, const Scope& scope, bool require_bound, SourcePos pos) {
  at_pos(pos, [&] {
    for (const auto& [v, used] : logic::variable_sorts(f)) {
      auto it = scope.find(v);
      if (it == scope.end()) {
        if (require_bound) throw Error(ErrorKind::UnboundVariable, "unknown variable '" + v + "' in assertion");
        continue;
      }
      if (!is_logical(it->second))
        throw Error(ErrorKind::Sort, "assertion mentions variable '" + v + "' of sort " + to_string(it->second) +
                                         " (only int and bool can be constrained)");
      if (it->second != used)
        throw Error(ErrorKind::Sort, std::string("expected sort ") + to_string(it->second) + ", found " +
                                         to_string(used) + " for variable '" + v + "'");
    }
  });
}

inline void check_value(const ExprPtr& e, Sort declared, const Scope& scope) {
  Sort found = expr::sort_of(e, scope);
  if (!assignable(found, declared))
    throw Error(ErrorKind::Sort, std::string("expected sort ") + to_string(declared) + ", found " + to_string(found),
                e->pos);
}

template <class Labels>
void check_distinct(const Labels& labels) {
  std::set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l.label).second)
      throw Error(ErrorKind::DuplicateLabel, "label '" + l.label + "' appears twice in one branching", l.pos);
}

inline void check_global(const GlobalPtr& g, Scope scope, std::map<std::string, std::vector<Sort>> recs) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          if (n.sender == n.receiver)
            throw Error(ErrorKind::Syntax, "participant '" + n.sender + "' cannot send to itself", g->pos);
          scope[n.var] = n.sort;
          check_assertion(n.assertion, scope, true, g->pos);
          check_global(n.cont, scope, recs);
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          if (n.sender == n.receiver)
            throw Error(ErrorKind::Syntax, "participant '" + n.sender + "' cannot send to itself", g->pos);
          check_distinct(n.branches);
          for (const auto& l : n.branches) {
            check_assertion(l.assertion, scope, true, l.pos);
            check_global(l.cont, scope, recs);
          }
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          std::vector<Sort> sorts;
          for (const auto& p : n.params) {
            check_value(p.init, p.sort, scope);
            sorts.push_back(p.sort);
          }
          for (const auto& p : n.params) scope[p.name] = p.sort;
          check_assertion(n.invariant, scope, true, g->pos);
          recs[n.var] = sorts;
          check_global(n.body, scope, recs);
        } else if constexpr (std::is_same_v<N, Global::Call>) {
          auto it = recs.find(n.var);
          if (it == recs.end())
            throw Error(ErrorKind::UnknownRecursionVariable, "unknown recursion variable '" + n.var + "'", g->pos);
          if (it->second.size() != n.args.size())
            throw Error(ErrorKind::ArityMismatch,
                        "recursion '" + n.var + "' expects " + std::to_string(it->second.size()) + " arguments, got " +
                            std::to_string(n.args.size()),
                        g->pos);
          for (std::size_t i = 0; i < n.args.size(); ++i) check_value(n.args[i], it->second[i], scope);
        }
      },
      g->node);
}

struct ProcessRec {
  std::vector<Sort> sorts;
  std::size_t channels;
};

inline void check_process(const ProcessPtr& p, Scope scope, std::map<std::string, ProcessRec> recs, bool top) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Process::Init> || std::is_same_v<N, Process::Join>) {
          if (!top) throw Error(ErrorKind::Session, "session initiation must start a participant's process", p->pos);
          check_process(n.body, scope, recs, false);
        } else {
          if (top) throw Error(ErrorKind::Session, "a participant's process must start with init or join", p->pos);
          if constexpr (std::is_same_v<N, Process::Send>) {
            check_value(n.value, n.sort, scope);
            Scope inner = scope;
            inner[n.var] = n.sort;
            check_assertion(n.assertion, inner, true, p->pos);
            check_process(n.body, inner, recs, false);
          } else if constexpr (std::is_same_v<N, Process::Receive>) {
            scope[n.var] = n.sort;
            check_assertion(n.assertion, scope, true, p->pos);
            check_process(n.body, scope, recs, false);
          } else if constexpr (std::is_same_v<N, Process::Select>) {
            check_assertion(n.assertion, scope, true, p->pos);
            check_process(n.body, scope, recs, false);
          } else if constexpr (std::is_same_v<N, Process::Branch>) {
            check_distinct(n.branches);
            for (const auto& l : n.branches) {
              check_assertion(l.assertion, scope, true, l.pos);
              check_process(l.body, scope, recs, false);
            }
          } else if constexpr (std::is_same_v<N, Process::If>) {
            Sort s = expr::sort_of(n.cond, scope);
            if (s != Sort::Bool)
              throw Error(ErrorKind::Sort, std::string("expected sort bool, found ") + to_string(s), n.cond->pos);
            check_process(n.then_body, scope, recs, false);
            check_process(n.else_body, scope, recs, false);
          } else if constexpr (std::is_same_v<N, Process::Rec>) {
            if (n.args.size() != n.params.size() || n.channel_args.size() != n.channel_params.size())
              throw Error(ErrorKind::ArityMismatch, "recursion '" + n.var + "' initialised with the wrong number of arguments",
                          p->pos);
            ProcessRec rec{{}, n.channel_params.size()};
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              check_value(n.args[i], n.params[i].sort, scope);
              rec.sorts.push_back(n.params[i].sort);
            }
            for (const auto& prm : n.params) scope[prm.name] = prm.sort;
            check_assertion(n.invariant, scope, true, p->pos);
            recs[n.var] = rec;
            check_process(n.body, scope, recs, false);
          } else if constexpr (std::is_same_v<N, Process::Call>) {
            auto it = recs.find(n.var);
            if (it == recs.end())
              throw Error(ErrorKind::UnknownRecursionVariable, "unknown recursion variable '" + n.var + "'", p->pos);
            if (it->second.sorts.size() != n.args.size() || it->second.channels != n.channel_args.size())
              throw Error(ErrorKind::ArityMismatch,
                          "recursion '" + n.var + "' expects " + std::to_string(it->second.sorts.size()) +
                              " values and " + std::to_string(it->second.channels) + " channels",
                          p->pos);
            for (std::size_t i = 0; i < n.args.size(); ++i) check_value(n.args[i], it->second.sorts[i], scope);
          }
        }
      },
      p->node);
}

inline void check_local(const LocalPtr& t, std::map<std::string, std::size_t> recs) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Local::Message>) {
          check_local(n.cont, recs);
        } else if constexpr (std::is_same_v<N, Local::Choice>) {
          std::set<std::string> seen;
          for (const auto& l : n.branches) {
            if (!seen.insert(l.label).second)
              throw Error(ErrorKind::DuplicateLabel, "label '" + l.label + "' appears twice in one branching");
            check_local(l.cont, recs);
          }
        } else if constexpr (std::is_same_v<N, Local::Rec>) {
          recs[n.var] = n.params.size();
          check_local(n.body, recs);
        } else if constexpr (std::is_same_v<N, Local::Call>) {
          auto it = recs.find(n.var);
          if (it == recs.end()) throw Error(ErrorKind::UnknownRecursionVariable, "unknown recursion variable '" + n.var + "'");
          if (it->second != n.args.size()) throw Error(ErrorKind::ArityMismatch, "recursion '" + n.var + "' arity mismatch");
        }
      },
      t->node);
}

}  // namespace detail

inline void check_global(const GlobalPtr& g) { detail::check_global(g, {}, {}); }
inline void check_local(const LocalPtr& t) { detail::check_local(t, {}); }

/// Top-level process of one participant: must open with init or join.
inline void check_participant(const ProcessPtr& p) { detail::check_process(p, {}, {}, true); }

/// Session wiring: one init, a join per remaining role, matching channel counts.
inline void check_file(const ProtocolFile& file) {
  detail::check_global(file.global, {}, {});
  if (file.participants.empty()) return;

  std::set<std::string> names;
  for (const auto& part : file.participants)
    if (!names.insert(part.name).second)
      throw Error(ErrorKind::Syntax, "participant '" + part.name + "' is implemented twice", part.pos);

  auto global_roles = global::participants(file.global);
  std::set<std::string> known(global_roles.begin(), global_roles.end());
  const Process::Init* init = nullptr;
  SourcePos init_pos;
  for (const auto& part : file.participants) {
    detail::check_process(part.process, {}, {}, true);
    if (!known.count(part.name))
      throw Error(ErrorKind::Session, "participant '" + part.name + "' does not occur in the global description", part.pos);
    if (const auto* i = std::get_if<Process::Init>(&part.process->node)) {
      if (init) throw Error(ErrorKind::Session, "more than one init in the protocol file", part.process->pos);
      init = i;
      init_pos = part.process->pos;
      if (i->roles.front() != part.name)
        throw Error(ErrorKind::Session,
                    "the initiator '" + i->roles.front() + "' must be the participant issuing init ('" + part.name + "')",
                    part.process->pos);
    } else {
      const auto& j = std::get<Process::Join>(part.process->node);
      if (j.role != part.name)
        throw Error(ErrorKind::Session, "participant '" + part.name + "' joins as '" + j.role + "'", part.process->pos);
    }
  }
  if (!init) throw Error(ErrorKind::Session, "no participant initiates the session (missing init)", file.participants.front().pos);
  std::set<std::string> roles;
  for (const auto& r : init->roles) {
    if (!roles.insert(r).second) throw Error(ErrorKind::Session, "role '" + r + "' listed twice in init", init_pos);
    if (!known.count(r)) throw Error(ErrorKind::Session, "role '" + r + "' does not occur in the global description", init_pos);
  }
  for (const auto& part : file.participants) {
    const auto* j = std::get_if<Process::Join>(&part.process->node);
    if (!j) continue;
    if (j->service != init->service)
      throw Error(ErrorKind::Session, "join on service '" + j->service + "' but the session is '" + init->service + "'",
                  part.process->pos);
    if (!roles.count(j->role))
      throw Error(ErrorKind::Session, "role '" + j->role + "' is not part of the init", part.process->pos);
    if (j->channels.size() != init->channels.size())
      throw Error(ErrorKind::Session, "join names " + std::to_string(j->channels.size()) + " channels but init names " +
                                          std::to_string(init->channels.size()),
                  part.process->pos);
  }
}

}  // namespace mpst::frontend
