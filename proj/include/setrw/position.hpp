#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace setrw {

// A path from the root of a term: a sequence of 1-based child indices.
// The empty sequence is the root position; concatenation has it as unit.
class position {
 public:
  position() = default;
  explicit position(std::vector<std::uint32_t> indices) : ix_(std::move(indices)) {}

  // Accepts "" or the empty-position glyph for the root, otherwise "1.2.1".
  static position parse(std::string_view text);

  bool is_root() const { return ix_.empty(); }
  std::size_t length() const { return ix_.size(); }
  std::uint32_t operator[](std::size_t i) const { return ix_[i]; }
  std::span<const std::uint32_t> indices() const { return ix_; }

  position concat(const position& q) const;
  position child(std::uint32_t i) const;

  // Prefix order: p <= q iff p is a prefix of q.
  bool is_prefix_of(const position& q) const;
  // Strips `prefix` from the front; internal_error if it is not a prefix.
  position suffix_after(const position& prefix) const;

  std::string str() const;

  friend bool operator==(const position&, const position&) = default;

  // Document order: a prefix precedes its extensions, siblings left to right.
  static bool lex_less(const position& a, const position& b);
  // Shorter positions first, ties broken in document order.
  static bool shortlex_less(const position& a, const position& b);

 private:
  std::vector<std::uint32_t> ix_;
};

struct position_lex_less {
  bool operator()(const position& a, const position& b) const { return position::lex_less(a, b); }
};

struct position_shortlex_less {
  bool operator()(const position& a, const position& b) const {
    return position::shortlex_less(a, b);
  }
};

struct position_hash {
  std::size_t operator()(const position& p) const;
};

// Longest common prefix under the prefix order; pre: non-empty input.
position greatest_common_prefix(std::span<const position> ps);

}  // namespace setrw
