#pragma once

#include <string>
#include <string_view>

#include "mpst/frontend/parser.hpp"
#include "mpst/frontend/wellformed.hpp"

namespace mpst {

inline FormulaPtr parse_formula(std::string_view text) {
  frontend::Parser p(text);
  FormulaPtr f = p.formula();
  p.expect_eof();
  logic::variable_sorts(f);
  return f;
}

inline ExprPtr parse_expression(std::string_view text) {
  frontend::Parser p(text);
  ExprPtr e = p.expression();
  p.expect_eof();
  return e;
}

inline GlobalPtr parse_global(std::string_view text) {
  frontend::Parser p(text);
  GlobalPtr g = p.global();
  p.expect_eof();
  frontend::check_global(g);
  return g;
}

inline LocalPtr parse_local(std::string_view text) {
  frontend::Parser p(text);
  LocalPtr t = p.local_type();
  p.expect_eof();
  frontend::check_local(t);
  return t;
}

/// A participant process, starting with init or join.
inline ProcessPtr parse_process(std::string_view text) {
  frontend::Parser p(text);
  ProcessPtr proc = p.process();
  p.expect_eof();
  frontend::check_participant(proc);
  return proc;
}

inline ProtocolFile parse_protocol_file(std::string_view text) {
  frontend::Parser p(text);
  ProtocolFile file = p.file();
  frontend::check_file(file);
  return file;
}

/// "file:line:col: message", dropping unknown parts of the position.
inline std::string format_diagnostic(const std::string& file, const Error& e) {
  std::string out = file;
  if (e.pos().known()) out += ":" + std::to_string(e.pos().line) + ":" + std::to_string(e.pos().column);
  return out + ": " + e.what();
}

}  // namespace mpst
