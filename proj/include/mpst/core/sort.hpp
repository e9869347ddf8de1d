#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace mpst {

/// Payload sorts. Only int and bool may be constrained by assertions.
enum class Sort { Int, Bool, String, Date };

inline const char* to_string(Sort sort) {
  switch (sort) {
    case Sort::Int: return "int";
    case Sort::Bool: return "bool";
    case Sort::String: return "string";
    case Sort::Date: return "date";
  }
  return "?";
}

inline std::optional<Sort> parse_sort(std::string_view text) {
  if (text == "int") return Sort::Int;
  if (text == "bool") return Sort::Bool;
  if (text == "string") return Sort::String;
  if (text == "date") return Sort::Date;
  return std::nullopt;
}

inline bool is_logical(Sort sort) { return sort == Sort::Int || sort == Sort::Bool; }

/// A value of sort `from` may be stored where `to` is expected. Dates are
/// opaque strings, so string literals are accepted for date payloads.
inline bool assignable(Sort from, Sort to) {
  return from == to || (from == Sort::String && to == Sort::Date);
}

}  // namespace mpst
