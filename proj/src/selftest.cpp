#include "setrw/selftest.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "setrw/engine_stack.hpp"
#include "setrw/errors.hpp"
#include "setrw/rewriter.hpp"
#include "setrw/set_automaton.hpp"

namespace setrw::selftest {

redex_set brute_force_redexes(const term_pool& pool, const rewrite_system& trs, term_id t) {
  redex_set out;
  for (const position& p : pool.domain(t)) {
    term_id sub = pool.subterm_at(t, p);
    for (const rewrite_rule& r : trs.rules)
      if (match_root(pool, r.lhs, sub)) out.insert({r.id, p});
  }
  return out;
}

redex_set brute_force_prematches(const term_pool& pool, const rewrite_system& trs, term_id t) {
  redex_set out;
  for (const position& p : pool.domain(t)) {
    term_id sub = pool.subterm_at(t, p);
    for (const rewrite_rule& r : trs.rules)
      if (pre_matches(pool, sub, r.lhs)) out.insert({r.id, p});
  }
  return out;
}

bool in_normal_form_brute(const term_pool& pool, const rewrite_system& trs, term_id t) {
  std::unordered_set<term_id> seen;
  std::vector<term_id> stack{t};
  while (!stack.empty()) {
    term_id cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    for (const rewrite_rule& r : trs.rules)
      if (match_root(pool, r.lhs, cur)) return false;
    for (term_id c : pool.children(cur)) stack.push_back(c);
  }
  return true;
}

namespace {

term_id resolve(const term_pool& pool, const substitution& sigma, term_id t) {
  while (pool.is_variable(t)) {
    auto it = sigma.find(pool.head(t));
    if (it == sigma.end()) break;
    t = it->second;
  }
  return t;
}

bool occurs(const term_pool& pool, const substitution& sigma, symbol_id v, term_id t) {
  t = resolve(pool, sigma, t);
  if (pool.is_variable(t)) return pool.head(t) == v;
  for (term_id c : pool.children(t))
    if (occurs(pool, sigma, v, c)) return true;
  return false;
}

}  // namespace

std::optional<substitution> unify(term_pool& pool, term_id a, term_id b) {
  substitution sigma;
  std::vector<std::pair<term_id, term_id>> work{{a, b}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    x = resolve(pool, sigma, x);
    y = resolve(pool, sigma, y);
    if (x == y) continue;
    if (pool.is_variable(x)) {
      if (occurs(pool, sigma, pool.head(x), y)) return std::nullopt;
      sigma[pool.head(x)] = y;
      continue;
    }
    if (pool.is_variable(y)) {
      if (occurs(pool, sigma, pool.head(y), x)) return std::nullopt;
      sigma[pool.head(y)] = x;
      continue;
    }
    if (pool.head(x) != pool.head(y)) return std::nullopt;
    std::span<const term_id> xc = pool.children(x);
    std::span<const term_id> yc = pool.children(y);
    for (std::size_t i = 0; i < xc.size(); ++i) work.emplace_back(xc[i], yc[i]);
  }
  return sigma;
}

namespace {

term_id rename_apart(term_pool& pool, term_id t, substitution& renaming, std::size_t& counter) {
  if (pool.is_variable(t)) {
    symbol_id v = pool.head(t);
    auto it = renaming.find(v);
    if (it == renaming.end()) {
      symbol_id fresh = pool.symbols.declare_variable("!cp" + std::to_string(counter++));
      it = renaming.emplace(v, pool.make_leaf(fresh)).first;
    }
    return it->second;
  }
  std::span<const term_id> cs = pool.children(t);
  std::vector<term_id> mapped(cs.begin(), cs.end());
  for (term_id& c : mapped) c = rename_apart(pool, c, renaming, counter);
  return pool.make(pool.head(t), mapped);
}

}  // namespace

bool has_critical_pairs(term_pool& pool, const rewrite_system& trs) {
  std::size_t counter = 0;
  for (const rewrite_rule& ri : trs.rules) {
    for (const rewrite_rule& rj : trs.rules) {
      substitution renaming;
      term_id lhs_j = rename_apart(pool, rj.lhs, renaming, counter);
      for (const position& p : pool.domain(ri.lhs)) {
        term_id sub = pool.subterm_at(ri.lhs, p);
        if (pool.is_variable(sub)) continue;
        if (ri.id == rj.id && p.is_root()) continue;  // the trivial self-overlap
        if (unify(pool, sub, lhs_j)) return true;
      }
    }
  }
  return false;
}

bool orthogonal(term_pool& pool, const rewrite_system& trs) {
  return trs.left_linear() && !has_critical_pairs(pool, trs);
}

namespace {

struct gen {
  std::mt19937_64 rng;

  explicit gen(std::uint64_t seed) : rng(seed) {}

  std::uint64_t below(std::uint64_t n) { return rng() % n; }
  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }
};

struct scratch_system {
  term_pool pool;
  std::vector<symbol_id> funcs;
  std::vector<symbol_id> constants;
  std::vector<symbol_id> vars;
  std::vector<std::pair<term_id, term_id>> rules;
};

term_id gen_pattern(scratch_system& s, gen& g, std::size_t depth_left,
                    std::vector<symbol_id>& var_pool) {
  if (depth_left == 0 || g.coin(0.45)) {
    if (!var_pool.empty() && g.coin(0.65))
      return s.pool.make_leaf(var_pool[g.below(var_pool.size())]);
    return s.pool.make_leaf(s.constants[g.below(s.constants.size())]);
  }
  symbol_id f = s.funcs[g.below(s.funcs.size())];
  std::vector<term_id> cs;
  for (std::uint32_t i = 0; i < s.pool.symbols[f].arity; ++i)
    cs.push_back(gen_pattern(s, g, depth_left - 1, var_pool));
  return s.pool.make(f, cs);
}

term_id gen_over_vars(scratch_system& s, gen& g, std::size_t depth_left,
                      const std::vector<symbol_id>& scope) {
  if (depth_left == 0 || g.coin(0.5)) {
    if (!scope.empty() && g.coin(0.55)) return s.pool.make_leaf(scope[g.below(scope.size())]);
    return s.pool.make_leaf(s.constants[g.below(s.constants.size())]);
  }
  symbol_id f = s.funcs[g.below(s.funcs.size())];
  std::vector<term_id> cs;
  for (std::uint32_t i = 0; i < s.pool.symbols[f].arity; ++i)
    cs.push_back(gen_over_vars(s, g, depth_left - 1, scope));
  return s.pool.make(f, cs);
}

term_id gen_ground(scratch_system& s, gen& g, std::uint64_t& budget) {
  if (budget <= 1) {
    budget = 0;
    return s.pool.make_leaf(s.constants[g.below(s.constants.size())]);
  }
  --budget;
  if (g.coin(0.25)) return s.pool.make_leaf(s.constants[g.below(s.constants.size())]);
  symbol_id f = s.funcs[g.below(s.funcs.size())];
  std::uint32_t arity = s.pool.symbols[f].arity;
  if (arity == 0 || budget < arity) return s.pool.make_leaf(s.constants[g.below(s.constants.size())]);
  std::vector<term_id> cs;
  for (std::uint32_t i = 0; i < arity; ++i) cs.push_back(gen_ground(s, g, budget));
  return s.pool.make(f, cs);
}

void collect_vars_of(const term_pool& pool, term_id t, std::vector<symbol_id>& out) {
  if (pool.is_variable(t)) {
    if (std::find(out.begin(), out.end(), pool.head(t)) == out.end()) out.push_back(pool.head(t));
    return;
  }
  for (term_id c : pool.children(t)) collect_vars_of(pool, c, out);
}

}  // namespace

fuzz_case generate_case(const fuzz_config& cfg, std::uint64_t index) {
  std::uint64_t mixed = (cfg.seed + 0x9e3779b97f4a7c15ull) ^ ((index + 1) * 0xbf58476d1ce4e5b9ull);
  gen g(mixed);
  scratch_system s;

  struct sym_decl {
    const char* name;
    std::uint32_t arity;
  };
  std::vector<sym_decl> decls;
  decls.push_back({"a", 0});
  if (g.coin(0.6)) decls.push_back({"b", 0});
  decls.push_back({"f", static_cast<std::uint32_t>(1 + g.below(cfg.max_arity))});
  if (g.coin(0.75)) decls.push_back({"g", static_cast<std::uint32_t>(1 + g.below(cfg.max_arity))});
  if (g.coin(0.4)) decls.push_back({"h", static_cast<std::uint32_t>(g.below(cfg.max_arity + 1))});
  for (const sym_decl& d : decls) {
    symbol_id id = s.pool.symbols.declare_function(d.name, d.arity);
    s.funcs.push_back(id);
    if (d.arity == 0) s.constants.push_back(id);
  }
  for (const char* v : {"x", "y", "z"}) s.vars.push_back(s.pool.symbols.declare_variable(v));

  std::size_t n_rules = 1 + g.below(cfg.max_rules);
  for (std::size_t r = 0; r < n_rules; ++r) {
    // A small variable pool with repetition makes non-linear lhs common.
    std::vector<symbol_id> var_pool;
    std::size_t nv = 1 + g.below(s.vars.size());
    for (std::size_t i = 0; i < nv; ++i) var_pool.push_back(s.vars[i]);
    term_id lhs;
    do {
      symbol_id f = s.funcs[g.below(s.funcs.size())];
      std::vector<term_id> cs;
      for (std::uint32_t i = 0; i < s.pool.symbols[f].arity; ++i)
        cs.push_back(gen_pattern(s, g, cfg.max_lhs_depth - 1, var_pool));
      lhs = s.pool.make(f, cs);
    } while (false);
    std::vector<symbol_id> scope;
    collect_vars_of(s.pool, lhs, scope);
    std::size_t rhs_depth = g.coin(0.8) ? 2 : 3;
    term_id rhs = gen_over_vars(s, g, rhs_depth, scope);
    s.rules.emplace_back(lhs, rhs);
  }

  std::uint64_t budget = 2 + g.below(cfg.max_term_size - 1);
  term_id t = gen_ground(s, g, budget);

  std::string trs_text = "symbols:";
  for (const sym_decl& d : decls)
    trs_text += " " + std::string(d.name) + ":" + std::to_string(d.arity);
  trs_text += "\nvars: x y z\nrules:\n";
  for (const auto& [lhs, rhs] : s.rules)
    trs_text += s.pool.to_string(lhs) + " -> " + s.pool.to_string(rhs) + "\n";

  return {std::move(trs_text), s.pool.to_string(t)};
}

namespace {

std::uint64_t text_seed(const fuzz_case& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : c.trs_text) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001b3ull;
  for (char ch : c.term_text) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001b3ull;
  return h;
}

using config_set = std::set<std::pair<std::uint32_t, std::string>>;

config_set config_signature(const std::vector<const config_tree*>& nodes) {
  config_set out;
  for (const config_tree* n : nodes) out.insert({n->state, n->pos.str()});
  return out;
}

fuzz_outcome check_eval(term_pool& pool, const rewrite_system& trs, const set_automaton& a_std,
                        const set_automaton& a_out, term_id t0) {
  eval_result ev = eval(a_std, pool, t0);
  redex_set found = ev.linear;
  found.insert(ev.nonlinear.begin(), ev.nonlinear.end());
  if (found != brute_force_prematches(pool, trs, t0))
    return {false, "eval union differs from brute-force pre-matching"};
  if (all_redexes(a_std, pool, t0) != brute_force_redexes(pool, trs, t0))
    return {false, "consistency-filtered eval differs from brute-force matching"};
  if (ev.inspections != pool.tree_size(t0))
    return {false, "eval inspections differ from the term domain size"};

  eval_result ev2 = eval(a_out, pool, t0);
  redex_set found2 = ev2.linear;
  found2.insert(ev2.nonlinear.begin(), ev2.nonlinear.end());
  if (found2 != found) return {false, "outermost-preserving automaton finds different matches"};
  if (ev2.inspections != pool.tree_size(t0))
    return {false, "outermost automaton inspections differ from the term domain size"};
  return {};
}

fuzz_outcome check_tree_laws(term_pool& pool, const rewrite_system& trs,
                             const set_automaton& a, term_id t0, gen& g) {
  config_tree full = completed(a, pool, t0);
  std::vector<const config_tree*> full_nodes = nodes_of(full);
  {
    std::set<std::string> observed;
    for (const config_tree* n : full_nodes)
      if (!observed.insert(n->pos.concat(a.state(n->state).label).str()).second)
        return {false, "completed tree observes a position twice"};
    if (observed.size() != pool.tree_size(t0))
      return {false, "completed tree nodes do not biject onto the term domain"};
  }
  {
    redex_set union_matches;
    for (const config_tree* n : full_nodes) {
      auto [lin, nl] = matches(a, pool, n->state, n->pos, t0);
      union_matches.insert(lin.begin(), lin.end());
      union_matches.insert(nl.begin(), nl.end());
    }
    eval_result ev = eval(a, pool, t0);
    redex_set found = ev.linear;
    found.insert(ev.nonlinear.begin(), ev.nonlinear.end());
    if (union_matches != found)
      return {false, "eval differs from the union of matches over the completed tree"};
  }

  // A random fragment, grown further to a second fragment above it.
  config_tree ct = config_tree::bud(0, position{});
  std::size_t steps = g.below(full_nodes.size() + 1);
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<const config_tree*> buds = buds_of(ct);
    if (buds.empty()) break;
    const config_tree* b = buds[g.below(buds.size())];
    ct = grow(ct, b->state, b->pos, a, pool, t0);
    if (!is_fragment(ct, full)) return {false, "grow left the completed fragment"};
  }
  config_tree ct2 = ct;
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<const config_tree*> buds = buds_of(ct2);
    if (buds.empty()) break;
    const config_tree* b = buds[g.below(buds.size())];
    ct2 = grow(ct2, b->state, b->pos, a, pool, t0);
  }

  std::vector<const config_tree*> nodes = nodes_of(ct);
  if (!nodes.empty()) {
    const config_tree* n = nodes[g.below(nodes.size())];
    position p = n->pos.concat(a.state(n->state).label);
    config_tree pruned = prune(ct, a, p);
    if (!is_fragment(pruned, ct)) return {false, "prune(ct,p) is not a fragment of ct"};
    if (!is_fragment(prune(ct, a, p), prune(ct2, a, p)))
      return {false, "prune is not monotone over the fragment order"};
    const config_tree* sub = subtree_at(ct, a, p);
    if (!sub) return {false, "explored node without a subtree_at entry"};
    config_set lhs = config_signature(nodes_of(pruned));
    config_set all = config_signature(nodes_of(ct));
    for (const auto& c : config_signature(nodes_of(*sub))) all.erase(c);
    if (lhs != all) return {false, "nodes(prune(ct,p)) != nodes(ct) minus nodes(ct[p])"};
  }

  redex_set redexes = all_redexes(a, pool, t0);
  if (!redexes.empty()) {
    auto it = redexes.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(g.below(redexes.size())));
    const redex r = *it;
    const rewrite_rule& rule = trs.rules[r.rule];
    auto sigma = match_root(pool, rule.lhs, pool.subterm_at(t0, r.pos));
    if (!sigma) return {false, "brute-confirmed redex fails match_root"};
    term_id t1 = pool.replace_at(t0, r.pos, apply_substitution(pool, rule.rhs, *sigma));
    if (!(prune(completed(a, pool, t0), a, r.pos) == prune(completed(a, pool, t1), a, r.pos)))
      return {false, "prune(completed(t),p) != prune(completed(t'),p) for a rewrite at p"};
  }
  return {};
}

fuzz_outcome check_normal_forms(term_pool& pool, const rewrite_system& trs,
                                const set_automaton& a_std, const set_automaton& a_out,
                                term_id t0, const fuzz_config& cfg) {
  struct run {
    const char* name;
    std::optional<term_id> result;
  };
  std::vector<run> runs;
  auto attempt = [&](const char* name, auto&& fn) {
    try {
      runs.push_back({name, fn()});
    } catch (const step_limit_error&) {
      runs.push_back({name, std::nullopt});
    }
  };

  attempt("oracle-lo", [&] {
    return oracle_normalize(trs, pool, t0, scan_order::leftmost_outermost, cfg.step_budget,
                            cfg.work_budget);
  });
  attempt("oracle-li", [&] {
    return oracle_normalize(trs, pool, t0, scan_order::leftmost_innermost, cfg.step_budget,
                            cfg.work_budget);
  });

  session_options ref;
  ref.max_steps = cfg.step_budget;
  // The reference procedures copy the configuration tree per grow; keep their
  // exploration budget small so pathological cases stay cheap.
  ref.max_inspections = std::min<std::uint64_t>(cfg.work_budget, 2000);
  if (trs.left_linear()) {
    attempt("reference/reduce-on-discovery",
            [&] { return normalize(a_std, pool, t0, reduce_on_discovery(), ref); });
    attempt("reference/explore-all",
            [&] { return normalize(a_std, pool, t0, explore_all_then_reduce(), ref); });
  }
  attempt("reference-nonlinear/reduce-on-discovery",
          [&] { return normalize_nonlinear(a_std, pool, t0, reduce_on_discovery(), ref); });
  attempt("reference-nonlinear/explore-all",
          [&] { return normalize_nonlinear(a_std, pool, t0, explore_all_then_reduce(), ref); });

  engine_options eng;
  eng.max_steps = cfg.step_budget;
  eng.max_inspections = cfg.work_budget;
  attempt("stack", [&] { return rewrite_outermost(a_out, pool, t0, eng).term; });

  for (const run& r : runs)
    if (r.result && !in_normal_form_brute(pool, trs, *r.result))
      return {false, std::string(r.name) + " returned a term that still has a redex"};

  if (orthogonal(pool, trs)) {
    const run* first = nullptr;
    for (const run& r : runs) {
      if (!r.result) continue;
      if (!first) {
        first = &r;
      } else if (*first->result != *r.result) {
        return {false, std::string("orthogonal case: ") + first->name + " and " + r.name +
                           " return different normal forms"};
      }
    }
  }
  return {};
}

}  // namespace

fuzz_outcome run_case(const fuzz_case& c, const fuzz_config& cfg, check_selection sel) {
  term_pool pool;
  rewrite_system trs;
  term_id t0;
  try {
    trs = parse_trs(pool, c.trs_text);
    t0 = parse_term(pool, c.term_text);
  } catch (const error& e) {
    return {false, std::string("case does not parse: ") + e.what()};
  }
  set_automaton a_std, a_out;
  try {
    a_std = construct(pool, trs, dependency_kind::standard, 100'000);
    a_out = construct(pool, trs, dependency_kind::outermost_preserving, 100'000);
  } catch (const state_cap_error&) {
    return {};  // oversized automaton: out of scope for this case
  }

  gen g(text_seed(c));
  if (sel.eval_equivalence) {
    fuzz_outcome o = check_eval(pool, trs, a_std, a_out, t0);
    if (!o.ok) return o;
  }
  if (sel.tree_laws) {
    fuzz_outcome o = check_tree_laws(pool, trs, a_std, t0, g);
    if (!o.ok) return o;
  }
  if (sel.normal_forms) {
    fuzz_outcome o = check_normal_forms(pool, trs, a_std, a_out, t0, cfg);
    if (!o.ok) return o;
  }
  return {};
}

fuzz_case shrink_case(const fuzz_case& c, const fuzz_config& cfg, check_selection sel) {
  fuzz_case cur = c;
  std::size_t attempts = 0;
  bool improved = true;
  while (improved && attempts < 200) {
    improved = false;

    // Promote a child of the term's root.
    try {
      term_pool pool;
      parse_trs(pool, cur.trs_text);
      term_id t = parse_term(pool, cur.term_text);
      for (term_id child : pool.children(t)) {
        fuzz_case cand{cur.trs_text, pool.to_string(child)};
        ++attempts;
        if (!run_case(cand, cfg, sel).ok) {
          cur = cand;
          improved = true;
          break;
        }
      }
    } catch (const error&) {
    }
    if (improved) continue;

    // Drop a rule.
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= cur.trs_text.size()) {
      std::size_t end = cur.trs_text.find('\n', start);
      if (end == std::string::npos) end = cur.trs_text.size();
      lines.push_back(cur.trs_text.substr(start, end - start));
      start = end + 1;
    }
    std::size_t rules_at = 0;
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (lines[i] == "rules:") rules_at = i + 1;
    std::size_t n_rules = 0;
    for (std::size_t i = rules_at; i < lines.size(); ++i)
      if (!lines[i].empty()) ++n_rules;
    if (n_rules > 1) {
      for (std::size_t drop = rules_at; drop < lines.size(); ++drop) {
        if (lines[drop].empty()) continue;
        std::string text;
        for (std::size_t i = 0; i < lines.size(); ++i) {
          if (i == drop) continue;
          text += lines[i];
          text += '\n';
        }
        fuzz_case cand{std::move(text), cur.term_text};
        ++attempts;
        if (!run_case(cand, cfg, sel).ok) {
          cur = cand;
          improved = true;
          break;
        }
      }
    }
  }
  return cur;
}

}  // namespace setrw::selftest
