#pragma once

#include <string>
#include <vector>

#include "mpst/core/error.hpp"

namespace mpst {

enum class ViolationKind {
  Linearity,
  HistorySensitivity,
  TemporalSatisfiability,
  InvariantUnsatisfied,
  Projection,
  Typing,
  Compatibility,
  Refinement,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::Linearity: return "Linearity";
    case ViolationKind::HistorySensitivity: return "HistorySensitivity";
    case ViolationKind::TemporalSatisfiability: return "TemporalSatisfiability";
    case ViolationKind::InvariantUnsatisfied: return "InvariantUnsatisfied";
    case ViolationKind::Projection: return "Projection";
    case ViolationKind::Typing: return "Typing";
    case ViolationKind::Compatibility: return "Compatibility";
    case ViolationKind::Refinement: return "Refinement";
  }
  return "Violation";
}

struct Violation {
  ViolationKind kind;
  std::string path;  // tree path such as "4.ok.1"; empty when not applicable
  std::string message;
  SourcePos pos{};
  std::vector<std::string> details;  // extra lines printed under the message
  std::string note{};                // structured explanation, kept out of the text report

  /// "KIND at <path>: <message>"
  std::string render() const {
    std::string out = to_string(kind);
    if (!path.empty()) out += " at " + path;
    return out + ": " + message;
  }
};

struct CheckReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  const char* verdict() const { return ok() ? "ok" : "failed"; }

  void add(Violation v) {
    for (const auto& w : violations)
      if (w.kind == v.kind && w.path == v.path && w.message == v.message) return;
    violations.push_back(std::move(v));
  }
  void merge(const CheckReport& other) {
    for (const auto& v : other.violations) add(v);
  }
};

/// Dotted tree paths: prefixes are numbered from 1 along a path, a branch
/// label opens a nested level ("4.ok.1").
struct TreePath {
  std::string prefix;
  int counter = 0;

  std::string next() {
    ++counter;
    return prefix.empty() ? std::to_string(counter) : prefix + "." + std::to_string(counter);
  }
  TreePath enter(const std::string& at, const std::string& label) const { return TreePath{at + "." + label, 0}; }
};

}  // namespace mpst
