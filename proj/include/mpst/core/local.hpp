#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mpst/core/global.hpp"

namespace mpst {

/// Out = send/select, In = receive/branch.
enum class Polarity { Out, In };

inline Polarity flip(Polarity p) { return p == Polarity::Out ? Polarity::In : Polarity::Out; }

struct Local;
using LocalPtr = Ref<Local>;

/// Endpoint type with assertions (one participant's view of a session).
struct Local {
  struct Message {
    Polarity polarity;
    std::string channel;
    std::string var;
    Sort sort;
    FormulaPtr assertion;
    LocalPtr cont;
    bool operator==(const Message&) const = default;
  };
  struct Label {
    std::string label;
    FormulaPtr assertion;
    LocalPtr cont;
    bool operator==(const Label&) const = default;
  };
  struct Choice {
    Polarity polarity;
    std::string channel;
    std::string branch_id;
    std::vector<Label> branches;
    bool operator==(const Choice&) const = default;
  };
  struct Rec {
    std::string var;
    std::vector<ValueParam> params;
    FormulaPtr invariant;
    LocalPtr body;
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

  std::variant<Message, Choice, Rec, Call, End> node;

  bool operator==(const Local&) const = default;
};

namespace local {

inline LocalPtr end() { return Local{Local::End{}}; }
inline LocalPtr message(Polarity p, std::string ch, std::string var, Sort sort, FormulaPtr a, LocalPtr cont) {
  return Local{Local::Message{p, std::move(ch), std::move(var), sort, std::move(a), std::move(cont)}};
}
inline LocalPtr choice(Polarity p, std::string ch, std::string id, std::vector<Local::Label> branches) {
  return Local{Local::Choice{p, std::move(ch), std::move(id), std::move(branches)}};
}

/// Swaps send/receive and select/branch; assertions are kept.
inline LocalPtr dual(const LocalPtr& t) {
  return std::visit(
      [&](const auto& n) -> LocalPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Local::Message>) {
          auto m = n;
          m.polarity = flip(n.polarity);
          m.cont = dual(n.cont);
          return Local{m};
        } else if constexpr (std::is_same_v<N, Local::Choice>) {
          auto m = n;
          m.polarity = flip(n.polarity);
          for (auto& b : m.branches) b.cont = dual(b.cont);
          return Local{m};
        } else if constexpr (std::is_same_v<N, Local::Rec>) {
          auto m = n;
          m.body = dual(n.body);
          return Local{m};
        } else {
          return t;
        }
      },
      t->node);
}

inline LocalPtr erase_assertions(const LocalPtr& t) {
  return std::visit(
      [&](const auto& n) -> LocalPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Local::Message>) {
          auto m = n;
          m.assertion = logic::truth();
          m.cont = erase_assertions(n.cont);
          return Local{m};
        } else if constexpr (std::is_same_v<N, Local::Choice>) {
          auto m = n;
          for (auto& b : m.branches) {
            b.assertion = logic::truth();
            b.cont = erase_assertions(b.cont);
          }
          return Local{m};
        } else if constexpr (std::is_same_v<N, Local::Rec>) {
          auto m = n;
          m.invariant = logic::truth();
          m.body = erase_assertions(n.body);
          return Local{m};
        } else {
          return t;
        }
      },
      t->node);
}

/// Renames session channels throughout the type.
inline LocalPtr rename_channels(const LocalPtr& t, const std::map<std::string, std::string>& names) {
  auto map = [&](const std::string& c) {
    auto it = names.find(c);
    return it == names.end() ? c : it->second;
  };
  return std::visit(
      [&](const auto& n) -> LocalPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Local::Message>) {
          auto m = n;
          m.channel = map(n.channel);
          m.cont = rename_channels(n.cont, names);
          return Local{m};
        } else if constexpr (std::is_same_v<N, Local::Choice>) {
          auto m = n;
          m.channel = map(n.channel);
          for (auto& b : m.branches) b.cont = rename_channels(b.cont, names);
          return Local{m};
        } else if constexpr (std::is_same_v<N, Local::Rec>) {
          auto m = n;
          m.body = rename_channels(n.body, names);
          return Local{m};
        } else {
          return t;
        }
      },
      t->node);
}

inline std::string to_string(const LocalPtr& t) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Local::Message>) {
          return n.channel + (n.polarity == Polarity::Out ? "!<" : "?<") + n.var + ":" + mpst::to_string(n.sort) +
                 ">[" + logic::to_string(n.assertion) + "];" + to_string(n.cont);
        } else if constexpr (std::is_same_v<N, Local::Choice>) {
          std::string out = n.channel + (n.polarity == Polarity::Out ? "$" : "&") + n.branch_id + "{";
          for (std::size_t i = 0; i < n.branches.size(); ++i) {
            if (i) out += ", ";
            out += "[" + logic::to_string(n.branches[i].assertion) + "] " + n.branches[i].label + ": " +
                   to_string(n.branches[i].cont);
          }
          return out + "}";
        } else if constexpr (std::is_same_v<N, Local::Rec>) {
          return "mu " + n.var + "(" + global::print_params(n.params, true) + ")(" +
                 global::print_params(n.params, false) + ")[" + logic::to_string(n.invariant) + "]." +
                 to_string(n.body);
        } else if constexpr (std::is_same_v<N, Local::Call>) {
          return n.var + "(" + global::print_args(n.args) + ")";
        } else {
          return "end";
        }
      },
      t->node);
}

}  // namespace local
}  // namespace mpst
