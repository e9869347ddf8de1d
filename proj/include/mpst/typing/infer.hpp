#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mpst/core/process.hpp"
#include "mpst/logic/presburger.hpp"
#include "mpst/typing/environment.hpp"

namespace mpst {

namespace typing_detail {

struct RecInfo {
  std::vector<Process::Param> params;
  std::vector<std::string> channels;  // session channels bound to the channel parameters
  FormulaPtr invariant;
};

struct Context {
  std::vector<FormulaPtr> facts;              // assertions met so far on this path
  std::map<std::string, Sort> scope;          // value variables
  std::map<std::string, std::string> channels;  // process channel -> session channel
  std::map<std::string, RecInfo> recs;
};

inline std::string show(const std::vector<FormulaPtr>& facts) {
  return logic::to_string(logic::conj(facts), logic::Style::Spaced);
}

/// Joins the types of the two arms of a conditional: selections of the same
/// group may contribute different labels.
inline LocalPtr merge(const LocalPtr& a, const LocalPtr& b, SourcePos pos) {
  if (a == b) return a;
  auto fail = [&]() -> LocalPtr {
    throw Error(ErrorKind::IfBranchMismatch,
                "[Typing-If] branches have different types: " + local::to_string(a) + " vs " + local::to_string(b), pos);
  };
  if (a->node.index() != b->node.index()) return fail();
  if (const auto* m = std::get_if<Local::Message>(&a->node)) {
    const auto& n = std::get<Local::Message>(b->node);
    if (m->polarity != n.polarity || m->channel != n.channel || m->var != n.var || m->sort != n.sort ||
        !(m->assertion == n.assertion))
      return fail();
    auto out = *m;
    out.cont = merge(m->cont, n.cont, pos);
    return Local{out};
  }
  if (const auto* c = std::get_if<Local::Choice>(&a->node)) {
    const auto& d = std::get<Local::Choice>(b->node);
    if (c->polarity != d.polarity || c->channel != d.channel || c->branch_id != d.branch_id) return fail();
    auto out = *c;
    for (const auto& l : d.branches) {
      auto it = std::find_if(out.branches.begin(), out.branches.end(), [&](const auto& k) { return k.label == l.label; });
      if (it == out.branches.end()) {
        if (c->polarity == Polarity::In) return fail();
        out.branches.push_back(l);
        continue;
      }
      if (!(it->assertion == l.assertion)) return fail();
      it->cont = merge(it->cont, l.cont, pos);
    }
    if (c->polarity == Polarity::In && out.branches.size() != c->branches.size()) return fail();
    return Local{out};
  }
  if (const auto* r = std::get_if<Local::Rec>(&a->node)) {
    const auto& s = std::get<Local::Rec>(b->node);
    if (r->var != s.var || !(r->params == s.params) || !(r->invariant == s.invariant)) return fail();
    auto out = *r;
    out.body = merge(r->body, s.body, pos);
    return Local{out};
  }
  return fail();
}

class Inferrer {
 public:
  Inferrer(const Solver& solver, const std::set<std::string>& branch_ids, std::set<std::string> names)
      : solver_(solver), branch_ids_(branch_ids), names_(std::move(names)) {}

  LocalPtr infer(const ProcessPtr& p, Context ctx) {
    return std::visit(
        [&](const auto& n) -> LocalPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Process::Send>) {
            std::string ch = channel(ctx, n.channel, p->pos);
            FormulaPtr inst = is_logical(n.sort) ? logic::substitute(n.assertion, {{n.var, n.value}}) : n.assertion;
            if (!logic::is_true(inst) && !solver_.implies(logic::conj(ctx.facts), inst))
              throw Error(ErrorKind::TypingSendUnsat,
                          "[Typing-Send] Assertion not satisfiable: " + show(ctx.facts) + " => " +
                              logic::to_string(inst, logic::Style::Spaced),
                          p->pos);
            bind(ctx, n.var, n.sort);
            push(ctx, n.assertion);
            return local::message(Polarity::Out, ch, n.var, n.sort, n.assertion, infer(n.body, ctx));
          } else if constexpr (std::is_same_v<N, Process::Receive>) {
            std::string ch = channel(ctx, n.channel, p->pos);
            bind(ctx, n.var, n.sort);
            push(ctx, n.assertion);
            return local::message(Polarity::In, ch, n.var, n.sort, n.assertion, infer(n.body, ctx));
          } else if constexpr (std::is_same_v<N, Process::Select>) {
            std::string ch = channel(ctx, n.channel, p->pos);
            if (!branch_ids_.count(n.branch_id))
              throw Error(ErrorKind::UnknownBranchGroup,
                          "[Typing-Select] unknown branch group '" + n.branch_id + "' in selection of '" + n.label + "'",
                          p->pos);
            if (!logic::is_true(n.assertion) && !solver_.implies(logic::conj(ctx.facts), n.assertion))
              throw Error(ErrorKind::TypingSelectUnsat,
                          "[Typing-Select] Assertion not satisfiable: " + show(ctx.facts) + " => " +
                              logic::to_string(n.assertion, logic::Style::Spaced),
                          p->pos);
            push(ctx, n.assertion);
            LocalPtr cont = infer(n.body, ctx);
            return local::choice(Polarity::Out, ch, n.branch_id, {Local::Label{n.label, n.assertion, cont}});
          } else if constexpr (std::is_same_v<N, Process::Branch>) {
            std::string ch = channel(ctx, n.channel, p->pos);
            std::vector<Local::Label> labels;
            for (const auto& l : n.branches) {
              Context inner = ctx;
              push(inner, l.assertion);
              labels.push_back(Local::Label{l.label, l.assertion, infer(l.body, inner)});
            }
            return local::choice(Polarity::In, ch, n.branch_id, std::move(labels));
          } else if constexpr (std::is_same_v<N, Process::If>) {
            Context then_ctx = ctx, else_ctx = ctx;
            if (auto cond = condition(ctx, n.cond)) {
              push(then_ctx, *cond);
              push(else_ctx, logic::negation(*cond));
            }
            return merge(infer(n.then_body, then_ctx), infer(n.else_body, else_ctx), p->pos);
          } else if constexpr (std::is_same_v<N, Process::Rec>) {
            return rec(p, n, std::move(ctx));
          } else if constexpr (std::is_same_v<N, Process::Call>) {
            return call(p, n, ctx);
          } else if constexpr (std::is_same_v<N, Process::Inact>) {
            return local::end();
          } else {
            throw Error(ErrorKind::Session, "nested session initiation is not supported", p->pos);
          }
        },
        p->node);
  }

 private:
  LocalPtr rec(const ProcessPtr& p, const Process::Rec& n, Context ctx) {
    if (n.args.size() != n.params.size() || n.channel_args.size() != n.channel_params.size())
      throw Error(ErrorKind::ArityMismatch, "[Typing-Rec] recursion '" + n.var + "' has mismatched arguments", p->pos);
    check_sorts(ctx, n.var, n.args, n.params, p->pos);
    RecInfo info{n.params, {}, n.invariant};
    // Channel formals shadow the enclosing channel names, which stay visible.
    std::map<std::string, std::string> channels = ctx.channels;
    for (std::size_t i = 0; i < n.channel_args.size(); ++i) {
      info.channels.push_back(channel(ctx, n.channel_args[i], p->pos));
      channels[n.channel_params[i]] = info.channels.back();
    }
    check_invariant(ctx, n.var, n.invariant, n.params, n.args, "[Typing-Rec]", p->pos);
    std::vector<ValueParam> params;
    for (std::size_t i = 0; i < n.params.size(); ++i) params.push_back(ValueParam{n.params[i].name, n.params[i].sort, n.args[i]});
    for (const auto& prm : n.params) bind(ctx, prm.name, prm.sort);
    push(ctx, n.invariant);
    ctx.channels = std::move(channels);
    ctx.recs[n.var] = info;
    return Local{Local::Rec{n.var, std::move(params), n.invariant, infer(n.body, std::move(ctx))}};
  }

  LocalPtr call(const ProcessPtr& p, const Process::Call& n, const Context& ctx) {
    auto it = ctx.recs.find(n.var);
    if (it == ctx.recs.end())
      throw Error(ErrorKind::UnknownRecursionVariable, "[Typing-Call] unknown recursion variable '" + n.var + "'", p->pos);
    const RecInfo& info = it->second;
    if (n.args.size() != info.params.size() || n.channel_args.size() != info.channels.size())
      throw Error(ErrorKind::ArityMismatch,
                  "[Typing-Call] '" + n.var + "' expects " + std::to_string(info.params.size()) + " values and " +
                      std::to_string(info.channels.size()) + " channels",
                  p->pos);
    check_sorts(ctx, n.var, n.args, info.params, p->pos);
    for (std::size_t i = 0; i < n.channel_args.size(); ++i) {
      std::string ch = channel(ctx, n.channel_args[i], p->pos);
      if (ch != info.channels[i])
        throw Error(ErrorKind::ChannelNotInScope,
                    "[Typing-Call] '" + n.var + "' is called with channel " + ch + " where " + info.channels[i] +
                        " is expected",
                    p->pos);
    }
    check_invariant(ctx, n.var, info.invariant, info.params, n.args, "[Typing-Call]", p->pos);
    return Local{Local::Call{n.var, n.args}};
  }

  void check_sorts(const Context& ctx, const std::string& var, const std::vector<ExprPtr>& args,
                   const std::vector<Process::Param>& params, SourcePos pos) const {
    for (std::size_t i = 0; i < args.size(); ++i) {
      Sort s;
      try {
        s = expr::sort_of(args[i], ctx.scope);
      } catch (const Error& e) {
        throw Error(ErrorKind::SortMismatch, std::string("[Typing-Rec] ") + e.what(), pos);
      }
      if (!assignable(s, params[i].sort))
        throw Error(ErrorKind::SortMismatch,
                    "[Typing-Rec] argument " + std::to_string(i + 1) + " of '" + var + "' has sort " + to_string(s) +
                        ", expected " + to_string(params[i].sort),
                    pos);
    }
  }

  void check_invariant(const Context& ctx, const std::string& var, const FormulaPtr& inv,
                       const std::vector<Process::Param>& params, const std::vector<ExprPtr>& args,
                       const std::string& rule, SourcePos pos) const {
    if (logic::is_true(inv)) return;
    std::map<std::string, ExprPtr> actuals;
    for (std::size_t i = 0; i < params.size(); ++i) actuals[params[i].name] = args[i];
    FormulaPtr inst = logic::substitute(inv, actuals);
    if (!solver_.implies(logic::conj(ctx.facts), inst))
      throw Error(ErrorKind::InvariantUnsat,
                  rule + " Invariant of '" + var + "' not satisfiable: " + show(ctx.facts) + " => " +
                      logic::to_string(inst, logic::Style::Spaced),
                  pos);
  }

  std::string channel(const Context& ctx, const std::string& name, SourcePos pos) const {
    auto it = ctx.channels.find(name);
    if (it == ctx.channels.end())
      throw Error(ErrorKind::ChannelNotInScope, "[Typing-Channel] channel '" + name + "' is not in scope", pos);
    return it->second;
  }

  // The condition as a fact, when it lies in the assertion language.
  std::optional<FormulaPtr> condition(const Context& ctx, const ExprPtr& cond) const {
    for (const auto& v : expr::variables(cond)) {
      auto it = ctx.scope.find(v);
      if (it == ctx.scope.end() || !is_logical(it->second)) return std::nullopt;
    }
    try {
      return logic::from_expr(cond);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  void bind(Context& ctx, const std::string& v, Sort sort) {
    if (ctx.scope.count(v)) {
      std::string old = logic::fresh_name(v, names_);
      names_.insert(old);
      for (auto& f : ctx.facts) f = logic::rename_free(f, {{v, old}});
    }
    ctx.scope[v] = sort;
  }

  static void push(Context& ctx, const FormulaPtr& f) {
    if (!logic::is_true(f)) ctx.facts.push_back(f);
  }

  const Solver& solver_;
  const std::set<std::string>& branch_ids_;
  std::set<std::string> names_;
};

inline void collect_process_names(const ProcessPtr& p, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        auto formula = [&](const FormulaPtr& f) {
          auto names = logic::all_names(f);
          out.insert(names.begin(), names.end());
        };
        if constexpr (std::is_same_v<N, Process::Init> || std::is_same_v<N, Process::Join>) {
          collect_process_names(n.body, out);
        } else if constexpr (std::is_same_v<N, Process::Send> || std::is_same_v<N, Process::Receive>) {
          out.insert(n.var);
          formula(n.assertion);
          collect_process_names(n.body, out);
        } else if constexpr (std::is_same_v<N, Process::Select>) {
          formula(n.assertion);
          collect_process_names(n.body, out);
        } else if constexpr (std::is_same_v<N, Process::Branch>) {
          for (const auto& l : n.branches) {
            formula(l.assertion);
            collect_process_names(l.body, out);
          }
        } else if constexpr (std::is_same_v<N, Process::If>) {
          expr::collect_vars(n.cond, out);
          collect_process_names(n.then_body, out);
          collect_process_names(n.else_body, out);
        } else if constexpr (std::is_same_v<N, Process::Rec>) {
          for (const auto& prm : n.params) out.insert(prm.name);
          formula(n.invariant);
          collect_process_names(n.body, out);
        }
      },
      p->node);
}

}  // namespace typing_detail

/// Session type of a participant process: one entry for the session it
/// opens with init or join. Assertions on sends, selections and recursion
/// entries/calls are validated against the context accumulated so far.
inline TypingEnvironment infer_type(const ProcessPtr& p, const TypingMode& mode,
                                    const std::set<std::string>& known_branch_ids, const Solver& solver = Solver{}) {
  std::set<std::string> names;
  typing_detail::collect_process_names(p, names);
  typing_detail::Inferrer inferrer(solver, known_branch_ids, names);
  typing_detail::Context ctx;
  TypingEnvironment env;
  auto open = [&](const std::string& service, const std::string& role, const std::vector<std::string>& channels,
                  const ProcessPtr& body) {
    for (const auto& c : channels) ctx.channels[c] = c;
    SessionKey key{service, channels, role};
    env.entries[key] = SessionType{inferrer.infer(body, ctx), false};
    env.groups[TypingEnvironment::group_of(key)] = Completeness::Open;
    return TypingEnvironment::group_of(key);
  };
  if (const auto* i = std::get_if<Process::Init>(&p->node)) {
    if (mode.binary && i->roles.size() != 2)
      throw Error(ErrorKind::Session,
                  "binary sessions have exactly two participants, init names " + std::to_string(i->roles.size()), p->pos);
    auto g = open(i->service, i->roles.front(), i->channels, i->body);
    env.declared_roles[g] = i->roles;
  } else if (const auto* j = std::get_if<Process::Join>(&p->node)) {
    open(j->service, j->role, j->channels, j->body);
  } else {
    throw Error(ErrorKind::Session, "a participant's process must start with init or join", p->pos);
  }
  env.refresh_completeness();
  return env;
}

}  // namespace mpst
