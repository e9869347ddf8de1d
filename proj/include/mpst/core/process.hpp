#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mpst/core/formula.hpp"

namespace mpst {

struct Process;
using ProcessPtr = Ref<Process>;

/// Participant implementation in the pi-calculus dialect.
struct Process {
  struct Init {
    std::string service;
    std::vector<std::string> roles;  // first role is the initiator's
    std::vector<std::string> channels;
    ProcessPtr body;
    bool operator==(const Init&) const = default;
  };
  struct Join {
    std::string service;
    std::string role;
    std::vector<std::string> channels;
    ProcessPtr body;
    bool operator==(const Join&) const = default;
  };
  struct Send {
    std::string channel;
    ExprPtr value;
    std::string var;
    Sort sort;
    FormulaPtr assertion;
    ProcessPtr body;
    bool operator==(const Send&) const = default;
  };
  struct Receive {
    std::string channel;
    std::string var;
    Sort sort;
    FormulaPtr assertion;
    ProcessPtr body;
    bool operator==(const Receive&) const = default;
  };
  struct Select {
    std::string channel;
    FormulaPtr assertion;
    std::string branch_id;
    std::string label;
    ProcessPtr body;
    bool operator==(const Select&) const = default;
  };
  struct Label {
    std::string label;
    FormulaPtr assertion;
    ProcessPtr body;
    SourcePos pos;
    bool operator==(const Label&) const = default;
  };
  struct Branch {
    std::string channel;
    std::string branch_id;
    std::vector<Label> branches;
    bool operator==(const Branch&) const = default;
  };
  struct If {
    ExprPtr cond;
    ProcessPtr then_body;
    ProcessPtr else_body;
    bool operator==(const If&) const = default;
  };
  struct Param {
    std::string name;
    Sort sort;
    bool operator==(const Param&) const = default;
  };
  struct Rec {
    std::string var;
    std::vector<ExprPtr> args;
    std::vector<std::string> channel_args;
    std::vector<Param> params;
    std::vector<std::string> channel_params;
    FormulaPtr invariant;
    ProcessPtr body;
    bool operator==(const Rec&) const = default;
  };
  struct Call {
    std::string var;
    std::vector<ExprPtr> args;
    std::vector<std::string> channel_args;
    bool operator==(const Call&) const = default;
  };
  struct Inact {
    bool operator==(const Inact&) const = default;
  };

  std::variant<Init, Join, Send, Receive, Select, Branch, If, Rec, Call, Inact> node;
  SourcePos pos;

  bool operator==(const Process&) const = default;
};

namespace process {

inline ProcessPtr inact(SourcePos pos = {}) { return Process{Process::Inact{}, pos}; }

inline std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ",";
    out += names[i];
  }
  return out;
}

inline std::string print_exprs(const std::vector<ExprPtr>& es) {
  std::string out;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) out += ",";
    out += expr::to_string(es[i]);
  }
  return out;
}

/// Session heading of a process: `init:a[B1,B2,S](s,b1,b2)` or `join:a[S](s,b1,b2)`.
inline std::string heading(const ProcessPtr& p) {
  if (auto* i = std::get_if<Process::Init>(&p->node))
    return "init:" + i->service + "[" + join_names(i->roles) + "](" + join_names(i->channels) + ")";
  if (auto* j = std::get_if<Process::Join>(&p->node))
    return "join:" + j->service + "[" + j->role + "](" + join_names(j->channels) + ")";
  return "";
}

inline std::string to_string(const ProcessPtr& p) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Process::Init> || std::is_same_v<N, Process::Join>) {
          return heading(p) + ". " + to_string(n.body);
        } else if constexpr (std::is_same_v<N, Process::Send>) {
          return n.channel + "!(" + expr::to_string(n.value) + ")(" + n.var + ":" + mpst::to_string(n.sort) + ")[" +
                 logic::to_string(n.assertion) + "]; " + to_string(n.body);
        } else if constexpr (std::is_same_v<N, Process::Receive>) {
          return n.channel + "?(" + n.var + ":" + mpst::to_string(n.sort) + ")[" + logic::to_string(n.assertion) +
                 "]; " + to_string(n.body);
        } else if constexpr (std::is_same_v<N, Process::Select>) {
          return n.channel + "$ [" + logic::to_string(n.assertion) + "] " + n.branch_id + "." + n.label + "; " +
                 to_string(n.body);
        } else if constexpr (std::is_same_v<N, Process::Branch>) {
          std::string out = n.channel + "&" + n.branch_id + "{";
          for (std::size_t i = 0; i < n.branches.size(); ++i) {
            if (i) out += ", ";
            out += "[" + logic::to_string(n.branches[i].assertion) + "] " + n.branches[i].label + ": " +
                   to_string(n.branches[i].body);
          }
          return out + "}";
        } else if constexpr (std::is_same_v<N, Process::If>) {
          return "if " + expr::to_string(n.cond) + " then " + to_string(n.then_body) + " else " +
                 to_string(n.else_body);
        } else if constexpr (std::is_same_v<N, Process::Rec>) {
          std::string params;
          for (std::size_t i = 0; i < n.params.size(); ++i) {
            if (i) params += ",";
            params += n.params[i].name + ":" + mpst::to_string(n.params[i].sort);
          }
          std::string args = print_exprs(n.args);
          if (!n.channel_args.empty() || !n.channel_params.empty()) {
            args += ";" + join_names(n.channel_args);
            params += ";" + join_names(n.channel_params);
          }
          return "mu " + n.var + "(" + args + ")(" + params + ")[" + logic::to_string(n.invariant) + "]. " +
                 to_string(n.body);
        } else if constexpr (std::is_same_v<N, Process::Call>) {
          std::string args = print_exprs(n.args);
          if (!n.channel_args.empty()) args += ";" + join_names(n.channel_args);
          return n.var + "(" + args + ")";
        } else {
          return "end";
        }
      },
      p->node);
}

/// Replaces every assertion and invariant by `true`.
inline ProcessPtr erase_assertions(const ProcessPtr& p) {
  return std::visit(
      [&](const auto& n) -> ProcessPtr {
        using N = std::decay_t<decltype(n)>;
        auto m = n;
        if constexpr (std::is_same_v<N, Process::Init> || std::is_same_v<N, Process::Join>) {
          m.body = erase_assertions(n.body);
        } else if constexpr (std::is_same_v<N, Process::Send> || std::is_same_v<N, Process::Receive> ||
                             std::is_same_v<N, Process::Select>) {
          m.assertion = logic::truth();
          m.body = erase_assertions(n.body);
        } else if constexpr (std::is_same_v<N, Process::Branch>) {
          for (auto& b : m.branches) {
            b.assertion = logic::truth();
            b.body = erase_assertions(b.body);
          }
        } else if constexpr (std::is_same_v<N, Process::If>) {
          m.then_body = erase_assertions(n.then_body);
          m.else_body = erase_assertions(n.else_body);
        } else if constexpr (std::is_same_v<N, Process::Rec>) {
          m.invariant = logic::truth();
          m.body = erase_assertions(n.body);
        }
        return Process{m, p->pos};
      },
      p->node);
}

inline void collect_branch_ids(const ProcessPtr& p, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Process::Branch>) {
          out.insert(n.branch_id);
          for (const auto& b : n.branches) collect_branch_ids(b.body, out);
        } else if constexpr (std::is_same_v<N, Process::If>) {
          collect_branch_ids(n.then_body, out);
          collect_branch_ids(n.else_body, out);
        } else if constexpr (std::is_same_v<N, Process::Call> || std::is_same_v<N, Process::Inact>) {
        } else {
          collect_branch_ids(n.body, out);
        }
      },
      p->node);
}

}  // namespace process
}  // namespace mpst
