#pragma once

// Shared text-scanning helpers for the term syntax and the TRS file format.

#include <string>
#include <string_view>

#include "setrw/errors.hpp"
#include "setrw/term.hpp"

namespace setrw::detail {

inline bool ident_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '+' || c == '*' || c == '-';
}

struct cursor {
  std::string_view text;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  explicit cursor(std::string_view t, std::size_t line0 = 1) : text(t), line(line0) {}

  bool eof() const { return i >= text.size(); }
  char peek() const { return text[i]; }
  char peek2() const { return i + 1 < text.size() ? text[i + 1] : '\0'; }

  void advance() {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n'))
      advance();
  }

  [[noreturn]] void fail(const std::string& msg) const { throw parse_error(line, col, msg); }

  // Reads a maximal identifier. A '-' immediately followed by '>' terminates
  // the identifier so `lhs->rhs` splits around the rule arrow.
  std::string read_ident() {
    if (eof() || !ident_char(peek())) fail("expected an identifier");
    std::string out;
    while (!eof() && ident_char(peek())) {
      if (peek() == '-' && peek2() == '>') break;
      out += peek();
      advance();
    }
    if (out.empty()) fail("expected an identifier");
    return out;
  }
};

// Parses one term starting at the cursor; leaves the cursor just past it.
term_id parse_term_prefix(term_pool& pool, cursor& cur);

}  // namespace setrw::detail
