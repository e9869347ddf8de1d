#pragma once

#include <stdexcept>
#include <string>

namespace mpst {

/// Position in the input text. Positions never take part in structural
/// equality of trees.
struct SourcePos {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

enum class ErrorKind {
  Syntax,
  Sort,
  DuplicateLabel,
  UnknownRecursionVariable,
  UnboundVariable,
  NonLinearAtom,
  ResourceExhausted,
  UnmergeableBranches,
  TypingSendUnsat,
  TypingSelectUnsat,
  InvariantUnsat,
  UnknownBranchGroup,
  ChannelNotInScope,
  ArityMismatch,
  SortMismatch,
  IfBranchMismatch,
  Session,
  ValueDecode,
  Deadlock,
  MonitorViolation,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Sort: return "SortError";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::UnknownRecursionVariable: return "UnknownRecursionVariable";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::NonLinearAtom: return "NonLinearAtom";
    case ErrorKind::ResourceExhausted: return "ResourceExhausted";
    case ErrorKind::UnmergeableBranches: return "UnmergeableBranches";
    case ErrorKind::TypingSendUnsat: return "TypingSendUnsat";
    case ErrorKind::TypingSelectUnsat: return "TypingSelectUnsat";
    case ErrorKind::InvariantUnsat: return "InvariantUnsat";
    case ErrorKind::UnknownBranchGroup: return "UnknownBranchGroup";
    case ErrorKind::ChannelNotInScope: return "ChannelNotInScope";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::SortMismatch: return "SortMismatch";
    case ErrorKind::IfBranchMismatch: return "IfBranchMismatch";
    case ErrorKind::Session: return "SessionError";
    case ErrorKind::ValueDecode: return "ValueDecodeError";
    case ErrorKind::Deadlock: return "Deadlock";
    case ErrorKind::MonitorViolation: return "MonitorViolation";
  }
  return "Error";
}

/// Every failure raised by the toolkit. `kind()` identifies the error class
/// named in diagnostics; `pos()` is set whenever the failure has a source
/// location.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, SourcePos pos = {})
      : std::runtime_error(message), kind_(kind), pos_(pos) {}

  ErrorKind kind() const { return kind_; }
  const SourcePos& pos() const { return pos_; }

 private:
  ErrorKind kind_;
  SourcePos pos_;
};

}  // namespace mpst
