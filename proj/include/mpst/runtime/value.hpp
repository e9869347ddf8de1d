#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mpst/core/error.hpp"
#include "mpst/core/expr.hpp"
#include "mpst/core/sort.hpp"

namespace mpst::runtime {

/// Runtime value. Strings carry both `string` and `date` payloads.
using Value = std::variant<std::int64_t, bool, std::string>;

inline Sort sort_of(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return Sort::Int;
  if (std::holds_alternative<bool>(v)) return Sort::Bool;
  return Sort::String;
}

/// Wire form of a value. The receiver knows the sort from its type, so
/// strings travel unquoted.
inline std::string serialize_value(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<std::string>(v);
}

inline Value deserialize_value(const std::string& s, Sort sort) {
  switch (sort) {
    case Sort::Int: {
      std::int64_t out = 0;
      const char* end = s.data() + s.size();
      auto [ptr, ec] = std::from_chars(s.data(), end, out);
      if (s.empty() || ec != std::errc() || ptr != end)
        throw Error(ErrorKind::ValueDecode, "cannot decode '" + s + "' as int");
      return out;
    }
    case Sort::Bool:
      if (s == "true") return true;
      if (s == "false") return false;
      throw Error(ErrorKind::ValueDecode, "cannot decode '" + s + "' as bool");
    case Sort::String:
    case Sort::Date:
      return s;
  }
  throw Error(ErrorKind::ValueDecode, "unknown sort");
}

/// Labels travel prefixed by their branch identifier: (id, ok) -> "idok".
inline std::string serialize_label(const std::string& branch_id, const std::string& label) { return branch_id + label; }

inline std::string deserialize_label(const std::string& s, const std::string& branch_id,
                                     const std::vector<std::string>& labels) {
  if (s.compare(0, branch_id.size(), branch_id) == 0) {
    std::string rest = s.substr(branch_id.size());
    for (const auto& l : labels)
      if (l == rest) return l;
  }
  throw Error(ErrorKind::ValueDecode, "cannot decode '" + s + "' as a label of branch '" + branch_id + "'");
}

/// Human-readable form used in traces: strings are quoted.
inline std::string display(const Value& v) {
  if (auto* s = std::get_if<std::string>(&v)) return expr::detail::quote(*s);
  return serialize_value(v);
}

inline ExprPtr to_expr(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return expr::integer(*i);
  if (auto* b = std::get_if<bool>(&v)) return expr::boolean(*b);
  return expr::string(std::get<std::string>(v));
}

}  // namespace mpst::runtime
