#pragma once

#include <optional>
#include <string>

#include "setrw/engine_stack.hpp"
#include "setrw/errors.hpp"
#include "setrw/matcher.hpp"
#include "setrw/rewriter.hpp"
#include "setrw/selftest.hpp"
#include "setrw/set_automaton.hpp"

namespace ts {

using namespace setrw;

// Single-pattern system behind the worked single-rule automaton.
extern const char* const add_trs;
// The five-rule if/not system.
extern const char* const if_trs;
// Three non-linear projection rules plus h(a) -> a.
extern const char* const nl_trs;
// g(x) is a proper subpattern of f(g(x)); exercises non-root output positions.
extern const char* const subpattern_trs;
// Non-linear eq over Peano addition; confluent, known normal forms.
extern const char* const eq_trs;
// Peano fibonacci with a duplicating rule.
extern const char* const fib_trs;

struct system_fixture {
  term_pool pool;
  rewrite_system trs;

  explicit system_fixture(const char* text) : trs(parse_trs(pool, text)) {}

  term_id term(const std::string& text) { return parse_term(pool, text); }
  symbol_id sym(const std::string& name) { return *pool.symbols.find(name); }
  set_automaton automaton(dependency_kind kind = dependency_kind::standard) {
    return construct(pool, trs, kind);
  }
};

inline position pos(const char* text) { return position::parse(text); }
inline redex rx(std::uint32_t rule, const char* p) { return redex{rule, position::parse(p)}; }

// The unique state with a non-empty output cell for `symbol`, if any.
std::optional<std::uint32_t> state_with_output(const set_automaton& a, const term_pool& pool,
                                               const std::string& symbol);

// s(s(...s(0)...)) with n applications.
std::string peano(unsigned n);
// cons(peano(v0), cons(..., nil))
std::string peano_list(const std::vector<unsigned>& values);

}  // namespace ts
