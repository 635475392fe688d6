#include "setrw/trs.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "setrw/errors.hpp"
#include "term_text.hpp"

namespace setrw {

bool rewrite_system::left_linear() const {
  return std::all_of(rules.begin(), rules.end(), [](const rewrite_rule& r) { return r.linear; });
}

variable_partition compute_variable_partition(const term_pool& pool, term_id pattern) {
  std::map<symbol_id, std::vector<position>> by_var;
  for (const position& p : pool.variable_positions(pattern))
    by_var[pool.head(pool.subterm_at(pattern, p))].push_back(p);
  variable_partition classes;
  for (auto& [var, ps] : by_var) {
    std::sort(ps.begin(), ps.end(), position::lex_less);
    classes.push_back(std::move(ps));
  }
  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return position::lex_less(a.front(), b.front()); });
  return classes;
}

bool is_consistent(const term_pool& pool, term_id t, const variable_partition& partition) {
  for (const std::vector<position>& cls : partition) {
    term_id first = pool.subterm_at(t, cls.front());
    for (std::size_t i = 1; i < cls.size(); ++i)
      if (pool.subterm_at(t, cls[i]) != first) return false;
  }
  return true;
}

bool pre_matches(const term_pool& pool, term_id t, term_id pattern) {
  if (pool.is_variable(pattern)) return true;
  if (pool.head(t) != pool.head(pattern)) return false;
  std::span<const term_id> pc = pool.children(pattern);
  std::span<const term_id> tc = pool.children(t);
  for (std::size_t i = 0; i < pc.size(); ++i)
    if (!pre_matches(pool, tc[i], pc[i])) return false;
  return true;
}

namespace {

void count_var_occurrences(const term_pool& pool, term_id t,
                           std::map<symbol_id, std::size_t>& counts) {
  if (pool.is_variable(t)) {
    ++counts[pool.head(t)];
    return;
  }
  for (term_id c : pool.children(t)) count_var_occurrences(pool, c, counts);
}

}  // namespace

bool is_duplicating(const term_pool& pool, term_id lhs, term_id rhs) {
  std::map<symbol_id, std::size_t> in_lhs, in_rhs;
  count_var_occurrences(pool, lhs, in_lhs);
  count_var_occurrences(pool, rhs, in_rhs);
  for (const auto& [var, n] : in_rhs)
    if (n > in_lhs[var]) return true;
  return false;
}

std::string rule_name(std::uint32_t rule_index) { return "R" + std::to_string(rule_index + 1); }

namespace {

struct line_scanner {
  std::string_view text;
  std::size_t offset = 0;
  std::size_t line_no = 0;

  // Returns the next line with comments stripped; skips blank lines.
  // Returns false at end of input.
  bool next(std::string_view& out, std::size_t& out_line) {
    while (offset < text.size()) {
      std::size_t end = text.find('\n', offset);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(offset, end - offset);
      offset = end + 1;
      ++line_no;
      if (std::size_t h = raw.find('#'); h != std::string_view::npos) raw = raw.substr(0, h);
      std::size_t b = raw.find_first_not_of(" \t\r");
      if (b == std::string_view::npos) continue;
      std::size_t e = raw.find_last_not_of(" \t\r");
      out = raw.substr(b, e - b + 1);
      out_line = line_no;
      return true;
    }
    return false;
  }
};

void collect_vars(const term_pool& pool, term_id t, std::set<symbol_id>& out) {
  if (pool.is_variable(t)) {
    out.insert(pool.head(t));
    return;
  }
  for (term_id c : pool.children(t)) collect_vars(pool, c, out);
}

}  // namespace

rewrite_system parse_trs(term_pool& pool, std::string_view text) {
  line_scanner lines{text};
  rewrite_system trs;
  std::string_view line;
  std::size_t line_no = 0;

  if (!lines.next(line, line_no) || !line.starts_with("symbols:"))
    throw parse_error(line_no ? line_no : 1, 1, "expected a 'symbols:' section");
  {
    detail::cursor cur(line.substr(8), line_no);
    cur.skip_ws();
    while (!cur.eof()) {
      std::string name = cur.read_ident();
      if (cur.eof() || cur.peek() != ':') cur.fail("expected ':<arity>' after symbol name");
      cur.advance();
      if (cur.eof() || cur.peek() < '0' || cur.peek() > '9') cur.fail("expected an arity");
      std::uint32_t arity = 0;
      while (!cur.eof() && cur.peek() >= '0' && cur.peek() <= '9') {
        arity = arity * 10 + static_cast<std::uint32_t>(cur.peek() - '0');
        cur.advance();
      }
      trs.alphabet.push_back(pool.symbols.declare_function(name, arity));
      cur.skip_ws();
    }
    if (trs.alphabet.empty()) throw parse_error(line_no, 1, "empty symbol list");
  }

  if (!lines.next(line, line_no) || !line.starts_with("vars:"))
    throw parse_error(line_no ? line_no : 1, 1, "expected a 'vars:' section");
  {
    detail::cursor cur(line.substr(5), line_no);
    cur.skip_ws();
    while (!cur.eof()) {
      trs.variables.push_back(pool.symbols.declare_variable(cur.read_ident()));
      cur.skip_ws();
    }
  }

  if (!lines.next(line, line_no) || line != "rules:")
    throw parse_error(line_no ? line_no : 1, 1, "expected a 'rules:' section");

  while (lines.next(line, line_no)) {
    detail::cursor cur(line, line_no);
    term_id lhs = detail::parse_term_prefix(pool, cur);
    cur.skip_ws();
    if (cur.eof() || cur.peek() != '-' || cur.peek2() != '>') cur.fail("expected '->'");
    cur.advance();
    cur.advance();
    term_id rhs = detail::parse_term_prefix(pool, cur);
    cur.skip_ws();
    if (!cur.eof()) cur.fail("unexpected trailing input after rule");

    if (pool.is_variable(lhs))
      throw parse_error(line_no, 1, "left-hand side must not be a variable");
    std::set<symbol_id> lhs_vars, rhs_vars;
    collect_vars(pool, lhs, lhs_vars);
    collect_vars(pool, rhs, rhs_vars);
    for (symbol_id v : rhs_vars)
      if (!lhs_vars.count(v))
        throw parse_error(line_no, 1,
                          "variable '" + pool.symbols[v].name +
                              "' occurs in the right-hand side only");

    rewrite_rule rule;
    rule.lhs = lhs;
    rule.rhs = rhs;
    rule.id = static_cast<std::uint32_t>(trs.rules.size());
    rule.lhs_partition = compute_variable_partition(pool, lhs);
    rule.linear = std::all_of(rule.lhs_partition.begin(), rule.lhs_partition.end(),
                              [](const auto& cls) { return cls.size() == 1; });
    rule.duplicating = is_duplicating(pool, lhs, rhs);
    trs.rules.push_back(std::move(rule));
  }

  if (trs.rules.empty()) throw parse_error(line_no ? line_no : 1, 1, "a TRS needs at least one rule");
  return trs;
}

}  // namespace setrw
