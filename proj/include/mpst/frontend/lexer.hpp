#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "mpst/core/error.hpp"

namespace mpst::frontend {

enum class TokenKind { Ident, Int, String, Punct, Eof };

struct Token {
  TokenKind kind;
  std::string text;
  SourcePos pos;
};

inline std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::Eof: return "end of input";
    case TokenKind::String: return "string literal";
    case TokenKind::Int: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

/// Splits input into tokens. `//` starts a comment running to end of line.
inline std::vector<Token> tokenize(std::string_view text) {
  static constexpr std::string_view two_char[] = {"->", "::", "=>", "==", "!=", "<=", ">=", "&&", "||"};
  static constexpr std::string_view one_char = "()[]{}<>=!:;,.&$?+-*/|";

  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (text.substr(i, 2) == "//") {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back({TokenKind::Ident, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j - i > 18) throw Error(ErrorKind::Syntax, "integer literal too large", pos);
      out.push_back({TokenKind::Int, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::string value;
      advance(1);
      bool closed = false;
      while (i < text.size()) {
        char d = text[i];
        if (d == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\' && i + 1 < text.size()) {
          char e = text[i + 1];
          value += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          advance(2);
          continue;
        }
        value += d;
        advance(1);
      }
      if (!closed) throw Error(ErrorKind::Syntax, "unterminated string literal", pos);
      out.push_back({TokenKind::String, value, pos});
      continue;
    }
    bool matched = false;
    for (auto p : two_char) {
      if (text.substr(i, 2) == p) {
        out.push_back({TokenKind::Punct, std::string(p), pos});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (one_char.find(c) != std::string_view::npos) {
      out.push_back({TokenKind::Punct, std::string(1, c), pos});
      advance(1);
      continue;
    }
    throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", pos);
  }
  out.push_back({TokenKind::Eof, "", SourcePos{line, col}});
  return out;
}

}  // namespace mpst::frontend
