#pragma once

#include <set>
#include <string>
#include <vector>

#include "mpst/analysis/report.hpp"
#include "mpst/core/global.hpp"

namespace mpst::analysis {

/// A message prefix `sender -> receiver : channel` at a tree position.
struct Prefix {
  std::string sender;
  std::string receiver;
  std::string channel;
  std::string position;
  SourcePos pos{};
};

enum class Dependency { II, IO, OO };

inline const char* to_string(Dependency d) {
  switch (d) {
    case Dependency::II: return "II";
    case Dependency::IO: return "IO";
    case Dependency::OO: return "OO";
  }
  return "?";
}

/// Dependencies from n1 to a later prefix n2.
inline std::set<Dependency> dependencies(const Prefix& n1, const Prefix& n2) {
  std::set<Dependency> out;
  bool same_channel = n1.channel == n2.channel;
  if (n1.receiver == n2.receiver && (!same_channel || n1.sender == n2.sender)) out.insert(Dependency::II);
  if (n1.receiver == n2.sender && !same_channel) out.insert(Dependency::IO);
  if (n1.sender == n2.sender && same_channel) out.insert(Dependency::OO);
  return out;
}

namespace detail {

inline void prefix_paths(const GlobalPtr& g, TreePath path, std::vector<Prefix>& current,
                         std::vector<std::vector<Prefix>>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Global::Interaction>) {
          current.push_back(Prefix{n.sender, n.receiver, n.channel, path.next(), g->pos});
          prefix_paths(n.cont, path, current, out);
          current.pop_back();
        } else if constexpr (std::is_same_v<N, Global::Branch>) {
          std::string at = path.next();
          current.push_back(Prefix{n.sender, n.receiver, n.channel, at, g->pos});
          for (const auto& l : n.branches) prefix_paths(l.cont, path.enter(at, l.label), current, out);
          current.pop_back();
        } else if constexpr (std::is_same_v<N, Global::Rec>) {
          prefix_paths(n.body, path, current, out);
        } else {
          out.push_back(current);
        }
      },
      g->node);
}

}  // namespace detail

/// Prefix sequences of every root-to-leaf path, in order.
inline std::vector<std::vector<Prefix>> prefix_paths(const GlobalPtr& g) {
  std::vector<std::vector<Prefix>> out;
  std::vector<Prefix> current;
  detail::prefix_paths(g, {}, current, out);
  return out;
}

/// Every later use of a channel must be reachable from the earlier one
/// through II/IO/OO dependencies along the same path. Expects an unfolded
/// description so that loop-carried pairs are visible.
inline CheckReport check_linearity(const GlobalPtr& g) {
  CheckReport report;
  for (const auto& path : prefix_paths(g)) {
    const std::size_t n = path.size();
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<bool> reach(n, false);
      reach[i] = true;
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = i; k < j && !reach[j]; ++k)
          if (reach[k] && !dependencies(path[k], path[j]).empty()) reach[j] = true;
        if (path[j].channel == path[i].channel && !reach[j]) {
          const Prefix& a = path[i];
          const Prefix& b = path[j];
          report.add(Violation{ViolationKind::Linearity, b.position,
                               "race on channel '" + b.channel + "': " + b.sender + " -> " + b.receiver +
                                   " is not ordered after " + a.sender + " -> " + a.receiver + " (at " + a.position + ")",
                               b.pos, {}});
        }
      }
    }
  }
  return report;
}

}  // namespace mpst::analysis
