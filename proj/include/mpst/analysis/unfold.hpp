#pragma once

#include <string>

#include "mpst/core/global.hpp"

namespace mpst::analysis {

namespace detail {

inline GlobalPtr replace_calls(const GlobalPtr& g, const std::string& var, const Global::Rec& rec) {
  return std::visit(
      [&](const auto& n) -> GlobalPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          N m = n;
          m.cont = replace_calls(n.cont, var, rec);
          return Global{m, g->pos};
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          N m = n;
          for (auto& l : m.branches) l.cont = replace_calls(l.cont, var, rec);
          return Global{m, g->pos};
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          if (n.var == var) return g;  // shadowed
          N m = n;
          m.body = replace_calls(n.body, var, rec);
          return Global{m, g->pos};
        } else if constexpr (std::is_same_v<N, Global::Call>) {
          if (n.var != var) return g;
          Global::Rec copy = rec;
          for (std::size_t i = 0; i < copy.params.size() && i < n.args.size(); ++i) copy.params[i].init = n.args[i];
          return Global{copy, g->pos};
        } else {
          return g;
        }
      },
      g->node);
}

}  // namespace detail

/// One-time unfolding: inside every recursion, each call is replaced by a
/// copy of the recursion whose initial values are the call's arguments.
inline GlobalPtr unfold_once(const GlobalPtr& g) {
  return std::visit(
      [&](const auto& n) -> GlobalPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          N m = n;
          m.cont = unfold_once(n.cont);
          return Global{m, g->pos};
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          N m = n;
          for (auto& l : m.branches) l.cont = unfold_once(l.cont);
          return Global{m, g->pos};
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          N m = n;
          m.body = detail::replace_calls(unfold_once(n.body), n.var, n);
          return Global{m, g->pos};
        } else {
          return g;
        }
      },
      g->node);
}

}  // namespace mpst::analysis
