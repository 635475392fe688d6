#include "doctest.h"
#include "support.hpp"

using namespace ts;

TEST_CASE("parse_trs: the if/not system") {
  system_fixture sys(if_trs);
  CHECK(sys.trs.rules.size() == 5);
  REQUIRE(sys.trs.alphabet.size() == 4);
  CHECK(sys.pool.symbols[sys.sym("if")].arity == 3);
  CHECK(sys.pool.symbols[sys.sym("not")].arity == 1);
  CHECK(sys.pool.symbols[sys.sym("true")].arity == 0);
  CHECK(sys.pool.symbols[sys.sym("false")].arity == 0);
  for (const rewrite_rule& r : sys.trs.rules) CHECK(r.linear);
  CHECK(sys.trs.left_linear());
}

TEST_CASE("parse_trs: errors") {
  term_pool pool;
  SUBCASE("empty rules section") {
    CHECK_THROWS_AS((void)parse_trs(pool, "symbols: a:0\nvars: x\nrules:\n"), parse_error);
  }
  SUBCASE("fresh right-hand-side variable") {
    CHECK_THROWS_AS((void)parse_trs(pool, "symbols: f:1 g:1\nvars: x y\nrules:\nf(x) -> g(y)\n"),
                    parse_error);
  }
  SUBCASE("variable as lhs") {
    CHECK_THROWS_AS((void)parse_trs(pool, "symbols: a:0\nvars: x\nrules:\nx -> a\n"), parse_error);
  }
  SUBCASE("arity inconsistency") {
    CHECK_THROWS_AS((void)parse_trs(pool, "symbols: f:1 a:0\nvars: x\nrules:\nf(x, x) -> a\n"),
                    parse_error);
  }
  SUBCASE("missing sections") {
    CHECK_THROWS_AS((void)parse_trs(pool, "vars: x\nrules:\n"), parse_error);
    CHECK_THROWS_AS((void)parse_trs(pool, "symbols: a:0\nrules:\na -> a\n"), parse_error);
  }
  SUBCASE("syntax error carries a location") {
    try {
      parse_trs(pool, "symbols: f:1 a:0\nvars: x\nrules:\nf(x) -> \n");
      FAIL("expected a parse error");
    } catch (const parse_error& e) {
      CHECK(e.line == 4);
    }
  }
  SUBCASE("comments and blank lines are fine") {
    const char* text =
        "# a comment\nsymbols: a:0 b:0 # trailing\n\nvars:\nrules:\n# between rules\na -> b\n";
    rewrite_system trs = parse_trs(pool, text);
    CHECK(trs.rules.size() == 1);
    CHECK(trs.variables.empty());
  }
}

TEST_CASE("variable_partition") {
  {
    system_fixture sys(nl_trs);
    variable_partition p = compute_variable_partition(sys.pool, sys.trs.rules[0].lhs);
    REQUIRE(p.size() == 2);
    CHECK(p[0] == std::vector<position>{pos("1"), pos("2")});
    CHECK(p[1] == std::vector<position>{pos("3")});
    CHECK(!sys.trs.rules[0].linear);
  }
  {
    system_fixture sys(add_trs);
    variable_partition p = compute_variable_partition(sys.pool, sys.trs.rules[0].lhs);
    REQUIRE(p.size() == 3);
    CHECK(p[0] == std::vector<position>{pos("1.1")});
    CHECK(p[1] == std::vector<position>{pos("1.2.1")});
    CHECK(p[2] == std::vector<position>{pos("2.1")});
  }
  {
    system_fixture sys(if_trs);
    variable_partition p = compute_variable_partition(sys.pool, sys.trs.rules[4].lhs);  // not(not(x))
    REQUIRE(p.size() == 1);
    CHECK(p[0] == std::vector<position>{pos("1.1")});
  }
}

TEST_CASE("is_consistent") {
  system_fixture sys(nl_trs);
  term_id t = sys.term("f(a, h(a), h(a))");
  CHECK(is_consistent(sys.pool, t, sys.trs.rules[1].lhs_partition));   // f(x,y,y)
  CHECK(!is_consistent(sys.pool, t, sys.trs.rules[0].lhs_partition));  // f(x,x,y)
  CHECK(!is_consistent(sys.pool, t, sys.trs.rules[2].lhs_partition));  // f(x,y,x)
  variable_partition singletons{{pos("1")}, {pos("2")}, {pos("3")}};
  CHECK(is_consistent(sys.pool, t, singletons));
  variable_partition outside{{pos("1.1"), pos("2")}};
  CHECK_THROWS_AS((void)is_consistent(sys.pool, t, outside), position_error);
}

TEST_CASE("pre_matches") {
  system_fixture sys(nl_trs);
  term_id t = sys.term("f(a, h(a), h(a))");
  CHECK(pre_matches(sys.pool, t, sys.trs.rules[0].lhs));
  CHECK(pre_matches(sys.pool, t, sys.trs.rules[1].lhs));
  CHECK(pre_matches(sys.pool, t, sys.trs.rules[2].lhs));
  CHECK(!pre_matches(sys.pool, t, sys.trs.rules[3].lhs));  // h(a)

  system_fixture ifs(if_trs);
  CHECK(!pre_matches(ifs.pool, ifs.term("not(true)"), ifs.trs.rules[3].lhs));  // not(false)
}

TEST_CASE("property: matching = pre-matching + consistency") {
  selftest::fuzz_config cfg;
  cfg.seed = 21;
  for (std::uint64_t i = 0; i < 40; ++i) {
    selftest::fuzz_case c = selftest::generate_case(cfg, i);
    term_pool pool;
    rewrite_system trs = parse_trs(pool, c.trs_text);
    term_id t = parse_term(pool, c.term_text);
    for (const position& p : pool.domain(t)) {
      term_id sub = pool.subterm_at(t, p);
      for (const rewrite_rule& r : trs.rules) {
        bool matched = match_root(pool, r.lhs, sub).has_value();
        bool split = pre_matches(pool, sub, r.lhs) && is_consistent(pool, sub, r.lhs_partition);
        CHECK(matched == split);
      }
    }
  }
}

TEST_CASE("property: linear iff all partition classes are singletons") {
  selftest::fuzz_config cfg;
  cfg.seed = 22;
  for (std::uint64_t i = 0; i < 40; ++i) {
    selftest::fuzz_case c = selftest::generate_case(cfg, i);
    term_pool pool;
    rewrite_system trs = parse_trs(pool, c.trs_text);
    for (const rewrite_rule& r : trs.rules) {
      std::size_t var_positions = pool.variable_positions(r.lhs).size();
      if (r.linear)
        CHECK(r.lhs_partition.size() == var_positions);
      else
        CHECK(r.lhs_partition.size() < var_positions);
    }
  }
}

TEST_CASE("is_duplicating") {
  term_pool pool;
  rewrite_system trs = parse_trs(pool, R"(symbols: f:1 g:2 if:3 sub:2 s:1 true:0
vars: x y
rules:
f(x) -> g(x, x)
if(true, x, y) -> x
sub(s(x), s(y)) -> sub(x, y)
)");
  CHECK(trs.rules[0].duplicating);
  CHECK(!trs.rules[1].duplicating);
  CHECK(!trs.rules[2].duplicating);
}
