#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpst/core/local.hpp"

namespace mpst {

/// A session as seen by one participant: service name, the session's
/// channel list and the role played.
struct SessionKey {
  std::string service;
  std::vector<std::string> channels;
  std::string role;
  auto operator<=>(const SessionKey&) const = default;
};

struct ChannelGroup {
  std::string service;
  std::vector<std::string> channels;
  auto operator<=>(const ChannelGroup&) const = default;
};

enum class Completeness { Open, Closed };

struct SessionType {
  LocalPtr type;
  bool bottom = false;  // binary composition: both endpoints are internal
  bool operator==(const SessionType&) const = default;
};

/// Delta: session channels and roles mapped to local types.
struct TypingEnvironment {
  std::map<SessionKey, SessionType> entries;
  std::map<ChannelGroup, Completeness> groups;
  std::map<ChannelGroup, std::vector<std::string>> declared_roles;  // known from init

  static ChannelGroup group_of(const SessionKey& k) { return ChannelGroup{k.service, k.channels}; }

  std::vector<std::string> roles_in(const ChannelGroup& g) const {
    std::vector<std::string> out;
    for (const auto& [k, t] : entries)
      if (group_of(k) == g) out.push_back(k.role);
    return out;
  }

  void refresh_completeness() {
    for (auto& [g, c] : groups) {
      auto it = declared_roles.find(g);
      if (it == declared_roles.end()) continue;
      auto present = roles_in(g);
      bool all = std::all_of(it->second.begin(), it->second.end(), [&](const std::string& r) {
        return std::find(present.begin(), present.end(), r) != present.end();
      });
      c = all ? Completeness::Closed : Completeness::Open;
    }
  }

  bool operator==(const TypingEnvironment&) const = default;
};

namespace typing {

/// Structural equality ignoring assertions, payload and parameter names,
/// value expressions, branch identifiers and label order.
inline bool same_shape(const LocalPtr& a, const LocalPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* m = std::get_if<Local::Message>(&a->node)) {
    const auto& n = std::get<Local::Message>(b->node);
    return m->polarity == n.polarity && m->channel == n.channel && m->sort == n.sort && same_shape(m->cont, n.cont);
  }
  if (const auto* c = std::get_if<Local::Choice>(&a->node)) {
    const auto& d = std::get<Local::Choice>(b->node);
    if (c->polarity != d.polarity || c->channel != d.channel || c->branches.size() != d.branches.size()) return false;
    for (const auto& l : c->branches) {
      auto it = std::find_if(d.branches.begin(), d.branches.end(), [&](const auto& k) { return k.label == l.label; });
      if (it == d.branches.end() || !same_shape(l.cont, it->cont)) return false;
    }
    return true;
  }
  if (const auto* r = std::get_if<Local::Rec>(&a->node)) {
    const auto& s = std::get<Local::Rec>(b->node);
    if (r->var != s.var || r->params.size() != s.params.size()) return false;
    for (std::size_t i = 0; i < r->params.size(); ++i)
      if (r->params[i].sort != s.params[i].sort) return false;
    return same_shape(r->body, s.body);
  }
  if (const auto* c = std::get_if<Local::Call>(&a->node))
    return c->var == std::get<Local::Call>(b->node).var && c->args.size() == std::get<Local::Call>(b->node).args.size();
  return true;
}

}  // namespace typing

/// The two parameters of the typing algorithm.
struct TypingMode {
  std::string name;
  /// Empty when compatible, otherwise the reason.
  std::function<std::optional<std::string>(const TypingEnvironment&, const TypingEnvironment&)> incompatibility;
  std::function<TypingEnvironment(const TypingEnvironment&, const TypingEnvironment&)> compose;
  bool binary = false;

  bool compatible(const TypingEnvironment& a, const TypingEnvironment& b) const { return !incompatibility(a, b); }

  /// Shared channels must be typed for different participants; composition is union.
  static TypingMode multiparty() {
    TypingMode m;
    m.name = "multiparty";
    m.incompatibility = [](const TypingEnvironment& a, const TypingEnvironment& b) -> std::optional<std::string> {
      for (const auto& [k, t] : a.entries)
        if (b.entries.count(k))
          return "role " + k.role + " of session " + k.service + " is typed twice";
      return std::nullopt;
    };
    m.compose = [](const TypingEnvironment& a, const TypingEnvironment& b) {
      TypingEnvironment out = a;
      for (const auto& [k, t] : b.entries) out.entries.emplace(k, t);
      for (const auto& [g, c] : b.groups) out.groups.emplace(g, c);
      for (const auto& [g, r] : b.declared_roles) out.declared_roles.emplace(g, r);
      out.refresh_completeness();
      return out;
    };
    return m;
  }

  /// Shared channels must carry dual types; composing them makes them internal.
  static TypingMode binary_sessions() {
    TypingMode m;
    m.name = "binary";
    m.binary = true;
    m.incompatibility = [](const TypingEnvironment& a, const TypingEnvironment& b) -> std::optional<std::string> {
      for (const auto& [k, t] : a.entries) {
        if (t.bottom) continue;
        for (const auto& [k2, t2] : b.entries) {
          if (TypingEnvironment::group_of(k) != TypingEnvironment::group_of(k2)) continue;
          if (k.role == k2.role) return "role " + k.role + " of session " + k.service + " is typed twice";
          if (t2.bottom) return "session " + k.service + " is already complete";
          if (!typing::same_shape(local::dual(local::erase_assertions(t.type)), local::erase_assertions(t2.type)))
            return "the types of " + k.role + " and " + k2.role + " are not dual: " + local::to_string(t.type) +
                   " vs " + local::to_string(t2.type);
        }
      }
      return std::nullopt;
    };
    m.compose = [](const TypingEnvironment& a, const TypingEnvironment& b) {
      TypingEnvironment out = a;
      for (const auto& [k, t] : b.entries) {
        bool shared = false;
        for (auto& [k1, t1] : out.entries)
          if (TypingEnvironment::group_of(k1) == TypingEnvironment::group_of(k)) {
            t1.bottom = true;
            shared = true;
          }
        out.entries.emplace(k, SessionType{t.type, shared});
      }
      for (const auto& [g, c] : b.groups) out.groups.emplace(g, c);
      for (const auto& [g, r] : b.declared_roles) out.declared_roles.emplace(g, r);
      out.refresh_completeness();
      return out;
    };
    return m;
  }
};

}  // namespace mpst
