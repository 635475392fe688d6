#include "support.hpp"

namespace ts {

const char* const add_trs = R"(symbols: add:2 s:1 0:0
vars: x y z
rules:
add(add(x, s(y)), s(z)) -> add(x, s(y))
)";

const char* const if_trs = R"(symbols: if:3 not:1 true:0 false:0
vars: x y
rules:
if(true, x, y) -> x
if(false, x, y) -> y
not(true) -> false
not(false) -> true
not(not(x)) -> x
)";

const char* const nl_trs = R"(symbols: f:3 h:1 a:0
vars: x y
rules:
f(x, x, y) -> y
f(x, y, y) -> x
f(x, y, x) -> x
h(a) -> a
)";

const char* const subpattern_trs = R"(symbols: f:1 g:1 a:0
vars: x
rules:
f(g(x)) -> a
g(x) -> x
)";

const char* const eq_trs = R"(symbols: eq:2 add:2 s:1 0:0 true:0
vars: x y
rules:
add(0, y) -> y
add(s(x), y) -> s(add(x, y))
eq(x, x) -> true
)";

const char* const fib_trs = R"(symbols: fib:1 add:2 s:1 0:0
vars: x y
rules:
add(0, y) -> y
add(s(x), y) -> s(add(x, y))
fib(0) -> 0
fib(s(0)) -> s(0)
fib(s(s(x))) -> add(fib(s(x)), fib(x))
)";

std::optional<std::uint32_t> state_with_output(const set_automaton& a, const term_pool& pool,
                                               const std::string& symbol) {
  symbol_id f = *pool.symbols.find(symbol);
  for (std::uint32_t s = 0; s < a.state_count(); ++s) {
    const automaton_cell& c = a.cell(s, f);
    if (!c.out_linear.empty() || !c.out_nonlinear.empty()) return s;
  }
  return std::nullopt;
}

std::string peano(unsigned n) {
  std::string out;
  for (unsigned i = 0; i < n; ++i) out += "s(";
  out += "0";
  out.append(n, ')');
  return out;
}

std::string peano_list(const std::vector<unsigned>& values) {
  std::string out;
  for (unsigned v : values) out += "cons(" + peano(v) + ", ";
  out += "nil";
  out.append(values.size(), ')');
  return out;
}

}  // namespace ts
