#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "setrw/engine_stack.hpp"
#include "setrw/errors.hpp"
#include "setrw/matcher.hpp"
#include "setrw/rewriter.hpp"
#include "setrw/selftest.hpp"
#include "setrw/set_automaton.hpp"

namespace setrw::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

dependency_kind parse_relation(const std::string& name) {
  if (name == "standard") return dependency_kind::standard;
  if (name == "outermost") return dependency_kind::outermost_preserving;
  throw error("unknown dependency relation '" + name + "'");
}

term_id parse_ground_term(term_pool& pool, const std::string& text) {
  term_id t = parse_term(pool, text);
  if (!pool.ground(t)) throw error("input term must be ground");
  return t;
}

struct rewrite_flags {
  std::string trs_path;
  std::string term_text;
  std::string term_file;
  std::string engine = "stack";
  std::string relation;  // empty = engine default
  std::string strategy_name = "reduce-on-discovery";
  std::string oracle_order = "leftmost-outermost";
  std::uint64_t max_steps = 1'000'000'000;
  bool trace = false;
  bool as_json = false;
};

struct run_outcome {
  std::string normal_form;
  rewrite_counters counters;
  double construct_ms = 0;
  double rewrite_ms = 0;
  std::vector<std::string> trace_lines;
};

run_outcome run_rewrite(term_pool& pool, const rewrite_flags& fl) {
  run_outcome out;
  auto t_pre = clock_type::now();
  rewrite_system trs = parse_trs(pool, read_file(fl.trs_path));

  std::string relation = fl.relation;
  if (relation.empty()) relation = fl.engine == "stack" ? "outermost" : "standard";

  set_automaton a;
  if (fl.engine != "oracle") a = construct(pool, trs, parse_relation(relation));
  out.construct_ms = ms_since(t_pre);

  std::string term_text = fl.term_text;
  if (!fl.term_file.empty()) term_text = read_file(fl.term_file);
  term_id t0 = parse_ground_term(pool, term_text);

  auto t_run = clock_type::now();
  term_id nf = t0;
  if (fl.engine == "stack") {
    engine_trace trace;
    engine_options opt;
    opt.max_steps = fl.max_steps;
    if (fl.trace) opt.trace = &trace;
    engine_result r = rewrite_outermost(a, pool, t0, opt);
    nf = r.term;
    out.counters.rewrite_steps = r.counters.rewrite_steps;
    out.counters.symbol_inspections = r.counters.symbol_inspections;
    out.counters.consistency_checks = r.counters.consistency_checks;
    for (const engine_observation& o : trace)
      out.trace_lines.push_back("observe\t" + o.abs_pos.str() + "\t" + pool.symbols[o.symbol].name +
                                "\ts" + std::to_string(o.state));
  } else if (fl.engine == "reference" || fl.engine == "reference-nonlinear") {
    auto it = builtin_strategies().find(fl.strategy_name);
    if (it == builtin_strategies().end()) throw error("unknown strategy '" + fl.strategy_name + "'");
    step_trace trace;
    session_options opt;
    opt.max_steps = fl.max_steps;
    opt.trace = &trace;
    nf = fl.engine == "reference" ? normalize(a, pool, t0, it->second, opt)
                                  : normalize_nonlinear(a, pool, t0, it->second, opt);
    for (const step_record& s : trace) {
      switch (s.kind) {
        case step_record::grow:
          ++out.counters.symbol_inspections;
          if (fl.trace)
            out.trace_lines.push_back("grow\t" + s.pos.str() + "\ts" + std::to_string(*s.state));
          break;
        case step_record::check:
          ++out.counters.consistency_checks;
          if (fl.trace)
            out.trace_lines.push_back("check\t" + s.pos.str() + "\t" + rule_name(*s.rule));
          break;
        case step_record::reduce:
          ++out.counters.rewrite_steps;
          if (fl.trace)
            out.trace_lines.push_back("reduce\t" + s.pos.str() + "\t" + rule_name(*s.rule));
          break;
      }
    }
  } else if (fl.engine == "oracle") {
    scan_order order;
    if (fl.oracle_order == "leftmost-outermost")
      order = scan_order::leftmost_outermost;
    else if (fl.oracle_order == "leftmost-innermost")
      order = scan_order::leftmost_innermost;
    else
      throw error("unknown oracle order '" + fl.oracle_order + "'");
    oracle_stats stats;
    nf = oracle_normalize(trs, pool, t0, order, fl.max_steps, ~0ull, &stats);
    out.counters.rewrite_steps = stats.rewrite_steps;
    out.counters.symbol_inspections = stats.positions_scanned;
  } else {
    throw error("unknown engine '" + fl.engine + "'");
  }
  out.rewrite_ms = ms_since(t_run);
  out.normal_form = pool.to_string(nf);
  return out;
}

int cmd_rewrite(const rewrite_flags& fl, std::ostream& out) {
  term_pool pool;
  run_outcome r = run_rewrite(pool, fl);
  std::string term_text = fl.term_text;
  if (!fl.term_file.empty()) term_text = "@" + fl.term_file;
  if (fl.as_json) {
    json j{{"input", term_text},
           {"normal_form", r.normal_form},
           {"rewrite_steps", r.counters.rewrite_steps},
           {"symbol_inspections", r.counters.symbol_inspections},
           {"consistency_checks", r.counters.consistency_checks},
           {"construct_ms", r.construct_ms},
           {"rewrite_ms", r.rewrite_ms}};
    if (fl.trace) j["trace"] = r.trace_lines;
    out << j.dump() << "\n";
    return 0;
  }
  out << r.normal_form << "\n";
  out << "metric\tvalue\n";
  out << "rewrite_steps\t" << r.counters.rewrite_steps << "\n";
  out << "symbol_inspections\t" << r.counters.symbol_inspections << "\n";
  out << "consistency_checks\t" << r.counters.consistency_checks << "\n";
  out << "construct_ms\t" << r.construct_ms << "\n";
  out << "rewrite_ms\t" << r.rewrite_ms << "\n";
  for (const std::string& line : r.trace_lines) out << line << "\n";
  return 0;
}

int cmd_dot(const std::string& trs_path, const std::string& relation, bool stats, bool as_json,
            std::ostream& out) {
  term_pool pool;
  rewrite_system trs = parse_trs(pool, read_file(trs_path));
  set_automaton a = construct(pool, trs, parse_relation(relation));
  if (!stats) {
    out << export_dot(a, pool);
    return 0;
  }
  set_automaton::statistics_record st = a.statistics();
  if (as_json) {
    out << json{{"states", st.states},
                {"symbols", st.symbols},
                {"rules", st.rules},
                {"transition_cells", st.transition_cells},
                {"branches", st.branch_count}}
               .dump()
        << "\n";
  } else {
    out << "states\tsymbols\trules\ttransition_cells\tbranches\n";
    out << st.states << "\t" << st.symbols << "\t" << st.rules << "\t" << st.transition_cells
        << "\t" << st.branch_count << "\n";
  }
  return 0;
}

struct bench_row {
  std::string name;
  std::string engine;
  std::string solved;
  std::uint64_t steps = 0;
  std::uint64_t inspections = 0;
  double ms = 0;
};

bench_row run_bench_one(const fs::path& trs_file, const std::string& engine,
                        const std::string& relation, double timeout_s) {
  bench_row row;
  row.name = trs_file.stem().string();
  row.engine = engine;
  fs::path term_file = trs_file;
  term_file.replace_extension(".term");
  fs::path expected_file = trs_file;
  expected_file.replace_extension(".expected");
  try {
    if (!fs::exists(term_file)) throw error("missing term file " + term_file.string());
    term_pool pool;
    rewrite_system trs = parse_trs(pool, read_file(trs_file.string()));
    term_id t0 = parse_ground_term(pool, read_file(term_file.string()));

    auto deadline = clock_type::now() + std::chrono::duration_cast<clock_type::duration>(
                                            std::chrono::duration<double>(timeout_s));
    auto t_run = clock_type::now();
    term_id nf;
    if (engine == "stack" || engine == "reference" || engine == "reference-nonlinear") {
      set_automaton a =
          construct(pool, trs,
                    relation.empty() ? (engine == "stack" ? dependency_kind::outermost_preserving
                                                          : dependency_kind::standard)
                                     : parse_relation(relation));
      t_run = clock_type::now();
      if (engine == "stack") {
        engine_options opt;
        opt.deadline = deadline;
        engine_result r = rewrite_outermost(a, pool, t0, opt);
        nf = r.term;
        row.steps = r.counters.rewrite_steps;
        row.inspections = r.counters.symbol_inspections;
      } else {
        step_trace trace;
        session_options opt;
        opt.trace = &trace;
        nf = engine == "reference"
                 ? normalize(a, pool, t0, reduce_on_discovery(), opt)
                 : normalize_nonlinear(a, pool, t0, reduce_on_discovery(), opt);
        for (const step_record& s : trace) {
          if (s.kind == step_record::reduce) ++row.steps;
          if (s.kind == step_record::grow) ++row.inspections;
        }
      }
    } else if (engine == "oracle") {
      oracle_stats stats;
      nf = oracle_normalize(trs, pool, t0, scan_order::leftmost_outermost, ~0ull, ~0ull, &stats);
      row.steps = stats.rewrite_steps;
      row.inspections = stats.positions_scanned;
    } else {
      throw error("unknown engine '" + engine + "'");
    }
    row.ms = ms_since(t_run);
    row.solved = "yes";
    if (fs::exists(expected_file)) {
      term_id want = parse_ground_term(pool, read_file(expected_file.string()));
      if (want != nf) row.solved = "wrong";
    }
  } catch (const deadline_error&) {
    row.solved = "dnf";
    row.ms = timeout_s * 1000.0;
  } catch (const step_limit_error&) {
    row.solved = "dnf";
  } catch (const error& e) {
    row.solved = std::string("error: ") + e.what();
  }
  return row;
}

int cmd_bench(const std::string& dir, const std::string& engine, const std::string& relation,
              double timeout_s, bool as_json, std::ostream& out) {
  if (!fs::exists(dir) || !fs::is_directory(dir)) throw error("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".trs") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<bench_row> rows;
  rows.reserve(files.size());
  for (const fs::path& f : files) rows.push_back(run_bench_one(f, engine, relation, timeout_s));
  std::size_t failures = 0;
  for (const bench_row& r : rows)
    if (r.solved != "yes") ++failures;

  if (as_json) {
    json jrows = json::array();
    for (const bench_row& r : rows)
      jrows.push_back({{"name", r.name},
                       {"engine", r.engine},
                       {"solved", r.solved},
                       {"rewrite_steps", r.steps},
                       {"inspections", r.inspections},
                       {"ms", r.ms}});
    out << json{{"rows", jrows}, {"total_failures", failures}}.dump() << "\n";
    return 0;
  }
  out << "name\tengine\tsolved\trewrite_steps\tinspections\tms\n";
  for (const bench_row& r : rows)
    out << r.name << "\t" << r.engine << "\t" << r.solved << "\t" << r.steps << "\t"
        << r.inspections << "\t" << r.ms << "\n";
  out << "Total failures\t" << failures << "\n";
  return 0;
}

int cmd_selftest(std::uint64_t iterations, std::uint64_t seed, std::ostream& out,
                 std::ostream& err) {
  selftest::fuzz_config cfg;
  cfg.seed = seed;
  for (std::uint64_t i = 0; i < iterations; ++i) {
    selftest::fuzz_case c = selftest::generate_case(cfg, i);
    selftest::fuzz_outcome o = selftest::run_case(c, cfg);
    if (!o.ok) {
      selftest::fuzz_case small = selftest::shrink_case(c, cfg);
      err << "selftest failure at iteration " << i << " (seed " << seed << "): " << o.failure
          << "\n";
      err << "--- TRS ---\n" << small.trs_text;
      err << "--- term ---\n" << small.term_text << "\n";
      return 2;
    }
    if ((i + 1) % 100 == 0) out << "selftest: " << (i + 1) << "/" << iterations << " ok\n";
  }
  out << "selftest: " << iterations << " iterations passed (seed " << seed << ")\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"term rewriting with set-automaton matching"};
  app.require_subcommand(1);

  rewrite_flags rw;
  CLI::App* c_rewrite = app.add_subcommand("rewrite", "normalize a term");
  c_rewrite->add_option("trs", rw.trs_path, "TRS file")->required();
  c_rewrite->add_option("term", rw.term_text, "term text");
  c_rewrite->add_option("--term-file", rw.term_file, "read the term from a file");
  c_rewrite->add_option("--engine", rw.engine, "stack|reference|reference-nonlinear|oracle");
  c_rewrite->add_option("--relation", rw.relation, "standard|outermost");
  c_rewrite->add_option("--strategy", rw.strategy_name,
                        "reduce-on-discovery|explore-all-then-reduce");
  c_rewrite->add_option("--oracle-order", rw.oracle_order,
                        "leftmost-outermost|leftmost-innermost");
  c_rewrite->add_option("--max-steps", rw.max_steps, "rewrite step budget");
  c_rewrite->add_flag("--trace", rw.trace, "emit one record per step");
  c_rewrite->add_flag("--json", rw.as_json, "machine-readable output");

  std::string dot_trs, dot_relation = "standard";
  bool dot_stats = false, dot_json = false;
  CLI::App* c_dot = app.add_subcommand("dot", "export the set automaton as DOT");
  c_dot->add_option("trs", dot_trs, "TRS file")->required();
  c_dot->add_option("--relation", dot_relation, "standard|outermost");
  c_dot->add_flag("--stats", dot_stats, "print automaton statistics instead");
  c_dot->add_flag("--json", dot_json, "machine-readable output");

  std::string bench_dir, bench_engine = "stack", bench_relation;
  double bench_timeout = 60.0;
  bool bench_json = false;
  CLI::App* c_bench = app.add_subcommand("bench", "run a benchmark suite directory");
  c_bench->add_option("dir", bench_dir, "directory of NAME.trs/NAME.term[/NAME.expected]")
      ->required();
  c_bench->add_option("--engine", bench_engine, "stack|reference|reference-nonlinear|oracle");
  c_bench->add_option("--relation", bench_relation, "standard|outermost");
  c_bench->add_option("--timeout", bench_timeout, "per-benchmark timeout in seconds");
  c_bench->add_flag("--json", bench_json, "machine-readable output");

  std::uint64_t st_iterations = 1000, st_seed = 42;
  CLI::App* c_selftest = app.add_subcommand("selftest", "run the oracle-equivalence fuzz loop");
  c_selftest->add_option("--iterations", st_iterations, "number of random cases");
  c_selftest->add_option("--seed", st_seed, "random seed");

  try {
    app.parse(argc, argv);
    if (c_rewrite->parsed()) {
      if (rw.term_text.empty() && rw.term_file.empty())
        throw error("rewrite needs a term argument or --term-file");
      return cmd_rewrite(rw, out);
    }
    if (c_dot->parsed()) return cmd_dot(dot_trs, dot_relation, dot_stats, dot_json, out);
    if (c_bench->parsed())
      return cmd_bench(bench_dir, bench_engine, bench_relation, bench_timeout, bench_json, out);
    if (c_selftest->parsed()) return cmd_selftest(st_iterations, st_seed, out, err);
    err << "no subcommand\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 1;
  } catch (const internal_error& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace setrw::cli
