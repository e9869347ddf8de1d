#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mpst/core/formula.hpp"

namespace mpst {

/// Value parameter of a recursion: `formal:sort` initialised with `init`.
struct ValueParam {
  std::string name;
  Sort sort;
  ExprPtr init;
  bool operator==(const ValueParam&) const = default;
};

struct Global;
using GlobalPtr = Ref<Global>;

/// Asserted global interaction tree.
struct Global {
  struct Interaction {
    std::string sender;
    std::string receiver;
    std::string channel;
    std::string var;
    Sort sort;
    FormulaPtr assertion;
    GlobalPtr cont;
    bool operator==(const Interaction&) const = default;
  };
  struct Label {
    std::string label;
    FormulaPtr assertion;
    GlobalPtr cont;
    SourcePos pos;
    bool operator==(const Label&) const = default;
  };
  struct Branch {
    std::string sender;
    std::string receiver;
    std::string channel;
    std::string branch_id;
    std::vector<Label> branches;
    bool operator==(const Branch&) const = default;
  };
  struct Rec {
    std::string var;
    std::vector<ValueParam> params;
    FormulaPtr invariant;
    GlobalPtr body;
    bool operator==(const Rec&) const = default;
  };
  struct Call {
    std::string var;
    std::vector<ExprPtr> args;
    bool operator==(const Call&) const = default;
  };
  struct End {
    bool operator==(const End&) const = default;
  };

  std::variant<Interaction, Branch, Rec, Call, End> node;
  SourcePos pos;

  bool operator==(const Global&) const = default;
};

namespace global {

inline GlobalPtr end(SourcePos pos = {}) { return Global{Global::End{}, pos}; }

/// Participants in order of first occurrence.
inline void collect_participants(const GlobalPtr& g, std::vector<std::string>& out) {
  auto note = [&](const std::string& p) {
    for (const auto& q : out)
      if (q == p) return;
    out.push_back(p);
  };
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          note(n.sender);
          note(n.receiver);
          collect_participants(n.cont, out);
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          note(n.sender);
          note(n.receiver);
          for (const auto& b : n.branches) collect_participants(b.cont, out);
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          collect_participants(n.body, out);
        }
      },
      g->node);
}

inline std::vector<std::string> participants(const GlobalPtr& g) {
  std::vector<std::string> out;
  collect_participants(g, out);
  return out;
}

inline void collect_channels(const GlobalPtr& g, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          out.insert(n.channel);
          collect_channels(n.cont, out);
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          out.insert(n.channel);
          for (const auto& b : n.branches) collect_channels(b.cont, out);
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          collect_channels(n.body, out);
        }
      },
      g->node);
}

inline void collect_branch_ids(const GlobalPtr& g, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          collect_branch_ids(n.cont, out);
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          out.insert(n.branch_id);
          for (const auto& b : n.branches) collect_branch_ids(b.cont, out);
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          collect_branch_ids(n.body, out);
        }
      },
      g->node);
}

/// Every identifier used anywhere in the tree (for fresh-name generation).
inline void collect_names(const GlobalPtr& g, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          out.insert(n.var);
          auto names = logic::all_names(n.assertion);
          out.insert(names.begin(), names.end());
          collect_names(n.cont, out);
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          for (const auto& b : n.branches) {
            auto names = logic::all_names(b.assertion);
            out.insert(names.begin(), names.end());
            collect_names(b.cont, out);
          }
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          for (const auto& p : n.params) {
            out.insert(p.name);
            expr::collect_vars(p.init, out);
          }
          auto names = logic::all_names(n.invariant);
          out.insert(names.begin(), names.end());
          collect_names(n.body, out);
        } else if constexpr (std::is_same_v<N, Global::Call>) {
          for (const auto& a : n.args) expr::collect_vars(a, out);
        }
      },
      g->node);
}

/// Replaces every assertion and invariant by `true`.
inline GlobalPtr erase_assertions(const GlobalPtr& g) {
  return std::visit(
      [&](const auto& n) -> GlobalPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          auto m = n;
          m.assertion = logic::truth();
          m.cont = erase_assertions(n.cont);
          return Global{m, g->pos};
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          auto m = n;
          for (auto& b : m.branches) {
            b.assertion = logic::truth();
            b.cont = erase_assertions(b.cont);
          }
          return Global{m, g->pos};
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          auto m = n;
          m.invariant = logic::truth();
          m.body = erase_assertions(n.body);
          return Global{m, g->pos};
        } else {
          return g;
        }
      },
      g->node);
}

inline std::string print_args(const std::vector<ExprPtr>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += expr::to_string(args[i]);
  }
  return out;
}

inline std::string print_params(const std::vector<ValueParam>& params, bool with_init) {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ",";
    out += with_init ? expr::to_string(params[i].init) : params[i].name + ":" + to_string(params[i].sort);
  }
  return out;
}

inline std::string to_string(const GlobalPtr& g) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          return n.sender + " -> " + n.receiver + " : " + n.channel + "(" + n.var + ":" + mpst::to_string(n.sort) +
                 ")[" + logic::to_string(n.assertion) + "]; " + to_string(n.cont);
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          std::string out = n.sender + " -> " + n.receiver + " : " + n.channel + "&" + n.branch_id + "{";
          for (std::size_t i = 0; i < n.branches.size(); ++i) {
            if (i) out += ", ";
            out += "[" + logic::to_string(n.branches[i].assertion) + "] " + n.branches[i].label + ": " +
                   to_string(n.branches[i].cont);
          }
          return out + "}";
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          return "mu " + n.var + "(" + print_params(n.params, true) + ")(" + print_params(n.params, false) + ")[" +
                 logic::to_string(n.invariant) + "]. " + to_string(n.body);
        } else if constexpr (std::is_same_v<N, Global::Call>) {
          return n.var + "(" + print_args(n.args) + ")";
        } else {
          return "end";
        }
      },
      g->node);
}

}  // namespace global
}  // namespace mpst
