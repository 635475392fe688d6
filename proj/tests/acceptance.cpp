// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run from anywhere; fixture paths are compiled in.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "support.hpp"

using namespace ts;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

struct criterion_scope {
  int id;
  const char* title;
  clock_type::time_point start = clock_type::now();
  std::string detail;
  bool ok = true;

  criterion_scope(int id_, const char* title_) : id(id_), title(title_) {}

  void expect(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }

  ~criterion_scope() {
    double ms = std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
    std::ostringstream line;
    line << "criterion " << id << " [" << title << "]: " << (ok ? "PASS" : "FAIL");
    if (!ok) line << " — " << detail;
    line << " (" << ms << " ms)";
    std::cout << line.str() << "\n";
    if (!ok) ++failures;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string bench_path(const std::string& name) {
  return std::string(SETRW_SOURCE_DIR) + "/bench/suite/" + name;
}

void criterion_1() {
  criterion_scope c(1, "single-pattern automaton layout");
  system_fixture sys(add_trs);
  set_automaton a = sys.automaton();
  c.expect(a.state_count() == 4,
           "expected 4 states, got " + std::to_string(a.state_count()));
  auto s3 = state_with_output(a, sys.pool, "s");
  c.expect(s3.has_value(), "no state outputs on s");
  if (s3) {
    const automaton_cell& cell = a.cell(*s3, sys.sym("s"));
    std::vector<position> offsets;
    for (const branch& b : cell.branches) offsets.push_back(b.offset);
    std::sort(offsets.begin(), offsets.end(), position::lex_less);
    c.expect(offsets == std::vector<position>{pos("1"), pos("1.2.1")},
             "branch offsets are not {1, 1.2.1}");
    c.expect(cell.out_linear.size() == 1 && cell.out_nonlinear.empty() &&
                 cell.out_linear[0].rule == 0 && cell.out_linear[0].pos == position{},
             "out(s3,s) is not exactly the root match");
  }
  double ms = std::chrono::duration<double, std::milli>(clock_type::now() - c.start).count();
  c.expect(ms < 1000.0, "construction exceeded 1 s");
}

void criterion_2() {
  criterion_scope c(2, "single-pass trace on the nested-add term");
  system_fixture sys(add_trs);
  set_automaton a = sys.automaton();
  term_id t = sys.term("add(add(add(0, s(0)), s(0)), s(0))");
  eval_result ev = eval(a, sys.pool, t);
  c.expect(ev.linear == redex_set{rx(0, ""), rx(0, "1")}, "redex set is not {R1@e, R1@1}");
  c.expect(ev.nonlinear.empty(), "unexpected non-linear pre-matches");
  c.expect(ev.inspections == 10, "expected exactly 10 symbol inspections, got " +
                                     std::to_string(ev.inspections));
  double ms = std::chrono::duration<double, std::milli>(clock_type::now() - c.start).count();
  c.expect(ms < 1000.0, "evaluation exceeded 1 s");
}

void criterion_3() {
  criterion_scope c(3, "transition-cell law over the suite");
  std::size_t checked = 0;
  auto check_automaton = [&](const set_automaton& a) {
    set_automaton::statistics_record st = a.statistics();
    c.expect(st.transition_cells == st.states * st.symbols,
             "cells != states x symbols on automaton #" + std::to_string(checked));
    ++checked;
  };
  for (const char* text : {add_trs, if_trs, nl_trs, subpattern_trs, eq_trs, fib_trs}) {
    system_fixture sys(text);
    check_automaton(sys.automaton(dependency_kind::standard));
    check_automaton(sys.automaton(dependency_kind::outermost_preserving));
  }
  for (const char* name : {"fib20.trs", "sieve100.trs", "mergesort32.trs", "bubblesort50.trs"}) {
    term_pool pool;
    rewrite_system trs = parse_trs(pool, read_file(bench_path(name)));
    check_automaton(construct(pool, trs, dependency_kind::standard));
    check_automaton(construct(pool, trs, dependency_kind::outermost_preserving));
  }
  selftest::fuzz_config cfg;
  cfg.seed = 3;
  for (std::uint64_t i = 0; i < 50; ++i) {
    selftest::fuzz_case fc = selftest::generate_case(cfg, i);
    term_pool pool;
    rewrite_system trs = parse_trs(pool, fc.trs_text);
    check_automaton(construct(pool, trs, dependency_kind::standard));
  }
  c.expect(checked == 70, "unexpected automaton count");
}

void criterion_4() {
  criterion_scope c(4, "non-linear bookkeeping on the projection example");
  system_fixture sys(nl_trs);
  set_automaton a = sys.automaton();
  rewrite_session session(a, sys.pool, sys.term("f(a, h(a), h(a))"));
  while (true) {
    auto buds = session.buds();
    if (buds.empty()) break;
    session.grow_bud(buds.front().first, buds.front().second);
  }
  c.expect(session.linear_redexes() == redex_set{rx(3, "2"), rx(3, "3")},
           "reds_L after full matching is not {R4@2, R4@3}");
  c.expect(session.ambiguous() == redex_set{rx(0, ""), rx(1, ""), rx(2, "")},
           "am after full matching is not {R1@e, R2@e, R3@e}");
  while (!session.ambiguous().empty()) session.check(*session.ambiguous().begin());
  c.expect(session.disabled() == redex_set{rx(0, ""), rx(2, "")},
           "dis is not {R1@e, R3@e}");
  c.expect(session.enabled() == redex_set{rx(1, "")}, "en is not {R2@e}");
  session.reduce(rx(3, "2"));
  c.expect(session.ambiguous() == redex_set{rx(0, ""), rx(1, "")},
           "update did not move exactly {R1@e, R2@e} to am");
  c.expect(session.disabled() == redex_set{rx(2, "")}, "R3@e did not stay disabled");
  c.expect(session.enabled().empty(), "en not emptied by the update");
}

void criterion_5() {
  criterion_scope c(5, "oracle equivalence on 1000 seeded cases");
  selftest::fuzz_config cfg;  // default seed
  for (std::uint64_t i = 0; i < 1000; ++i) {
    selftest::fuzz_outcome o =
        selftest::run_case(selftest::generate_case(cfg, i), cfg, {true, false, true});
    if (!o.ok) {
      c.expect(false, "case " + std::to_string(i) + ": " + o.failure);
      break;
    }
  }
  double ms = std::chrono::duration<double, std::milli>(clock_type::now() - c.start).count();
  c.expect(ms < 60'000.0, "fuzz loop exceeded 60 s");
}

void criterion_6() {
  criterion_scope c(6, "configuration-tree law suite on 200 seeded cases");
  selftest::fuzz_config cfg;
  cfg.seed = 43;
  for (std::uint64_t i = 0; i < 200; ++i) {
    selftest::fuzz_outcome o =
        selftest::run_case(selftest::generate_case(cfg, i), cfg, {false, true, false});
    if (!o.ok) {
      c.expect(false, "case " + std::to_string(i) + ": " + o.failure);
      break;
    }
  }
}

void criterion_7() {
  criterion_scope c(7, "pruning saves inspections on the if/not example");
  system_fixture sys(if_trs);
  set_automaton a = sys.automaton(dependency_kind::outermost_preserving);
  term_id t0 = sys.term("if(not(not(true)), false, true)");
  term_id t1 = sys.term("if(true, false, true)");
  term_id t2 = sys.term("false");
  engine_trace trace;
  engine_options opt;
  opt.trace = &trace;
  engine_result r = rewrite_outermost(a, sys.pool, t0, opt);
  c.expect(r.term == t2, "normal form is not false");
  std::uint64_t restart_cost =
      sys.pool.tree_size(t0) + sys.pool.tree_size(t1) + sys.pool.tree_size(t2);
  c.expect(restart_cost == 11, "restart-from-scratch cost is not 11");
  c.expect(r.counters.symbol_inspections == 5,
           "expected exactly 5 inspections, got " +
               std::to_string(r.counters.symbol_inspections));
  c.expect(r.counters.symbol_inspections < restart_cost,
           "pruning did not beat restart-from-scratch");
  symbol_id if_sym = sys.sym("if");
  auto if_count = std::count_if(trace.begin(), trace.end(), [&](const engine_observation& o) {
    return o.symbol == if_sym;
  });
  c.expect(if_count == 1, "the root if symbol was inspected " + std::to_string(if_count) +
                              " times");
}

void criterion_8() {
  criterion_scope c(8, "desk-scale benchmarks normalize correctly");
  for (const char* name : {"fib20", "sieve100", "mergesort32"}) {
    term_pool pool;
    rewrite_system trs = parse_trs(pool, read_file(bench_path(std::string(name) + ".trs")));
    set_automaton a = construct(pool, trs, dependency_kind::outermost_preserving);
    term_id t0 = parse_term(pool, read_file(bench_path(std::string(name) + ".term")));
    term_id want = parse_term(pool, read_file(bench_path(std::string(name) + ".expected")));
    engine_options opt;
    opt.deadline = clock_type::now() + std::chrono::seconds(60);
    auto start = clock_type::now();
    try {
      engine_result r = rewrite_outermost(a, pool, t0, opt);
      double ms = std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
      c.expect(r.term == want, std::string(name) + ": wrong normal form");
      double ratio = r.counters.rewrite_steps
                         ? static_cast<double>(r.counters.symbol_inspections) /
                               static_cast<double>(r.counters.rewrite_steps)
                         : 0.0;
      std::cout << "  " << name << ": steps=" << r.counters.rewrite_steps
                << " inspections=" << r.counters.symbol_inspections
                << " inspections/step=" << ratio << " time=" << ms << " ms\n";
    } catch (const deadline_error&) {
      c.expect(false, std::string(name) + ": exceeded the 60 s budget");
    }
  }
}

}  // namespace

int main() {
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << "\n";
    return 100;
  }
  std::cout << "acceptance: " << (8 - failures) << "/8 criteria passed\n";
  return failures;
}
