#include "setrw/position.hpp"

#include <algorithm>

#include "setrw/errors.hpp"

namespace setrw {

position position::parse(std::string_view text) {
  if (text.empty() || text == "\xce\xb5") return position{};
  std::vector<std::uint32_t> ix;
  std::uint64_t cur = 0;
  bool have_digit = false;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      cur = cur * 10 + static_cast<std::uint64_t>(c - '0');
      if (cur > 0xffffffffull) throw error("position index out of range: " + std::string(text));
      have_digit = true;
    } else if (c == '.') {
      if (!have_digit) throw error("malformed position: " + std::string(text));
      ix.push_back(static_cast<std::uint32_t>(cur));
      cur = 0;
      have_digit = false;
    } else {
      throw error("malformed position: " + std::string(text));
    }
  }
  if (!have_digit) throw error("malformed position: " + std::string(text));
  ix.push_back(static_cast<std::uint32_t>(cur));
  for (std::uint32_t i : ix)
    if (i == 0) throw error("position indices are 1-based: " + std::string(text));
  return position{std::move(ix)};
}

position position::concat(const position& q) const {
  std::vector<std::uint32_t> ix;
  ix.reserve(ix_.size() + q.ix_.size());
  ix.insert(ix.end(), ix_.begin(), ix_.end());
  ix.insert(ix.end(), q.ix_.begin(), q.ix_.end());
  return position{std::move(ix)};
}

position position::child(std::uint32_t i) const {
  std::vector<std::uint32_t> ix = ix_;
  ix.push_back(i);
  return position{std::move(ix)};
}

bool position::is_prefix_of(const position& q) const {
  return ix_.size() <= q.ix_.size() && std::equal(ix_.begin(), ix_.end(), q.ix_.begin());
}

position position::suffix_after(const position& prefix) const {
  if (!prefix.is_prefix_of(*this))
    throw internal_error("suffix_after: " + prefix.str() + " is not a prefix of " + str());
  return position{std::vector<std::uint32_t>(ix_.begin() + static_cast<std::ptrdiff_t>(prefix.length()),
                                             ix_.end())};
}

std::string position::str() const {
  if (ix_.empty()) return "\xce\xb5";
  std::string out;
  for (std::size_t i = 0; i < ix_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(ix_[i]);
  }
  return out;
}

bool position::lex_less(const position& a, const position& b) {
  return std::lexicographical_compare(a.ix_.begin(), a.ix_.end(), b.ix_.begin(), b.ix_.end());
}

bool position::shortlex_less(const position& a, const position& b) {
  if (a.ix_.size() != b.ix_.size()) return a.ix_.size() < b.ix_.size();
  return lex_less(a, b);
}

std::size_t position_hash::operator()(const position& p) const {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (std::uint32_t i : p.indices()) h = (h ^ i) * 0x100000001b3ull;
  return h;
}

position greatest_common_prefix(std::span<const position> ps) {
  if (ps.empty()) throw internal_error("greatest_common_prefix of empty set");
  std::size_t len = ps[0].length();
  for (const position& p : ps.subspan(1)) {
    std::size_t k = 0;
    while (k < len && k < p.length() && p[k] == ps[0][k]) ++k;
    len = k;
  }
  std::vector<std::uint32_t> ix(ps[0].indices().begin(),
                                ps[0].indices().begin() + static_cast<std::ptrdiff_t>(len));
  return position{std::move(ix)};
}

}  // namespace setrw
