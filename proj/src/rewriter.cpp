#include "setrw/rewriter.hpp"

#include <algorithm>

#include "setrw/errors.hpp"

namespace setrw {

namespace {

position observed_of(const set_automaton& a, const config_tree& bud) {
  return bud.pos.concat(a.state(bud.state).label);
}

action leftmost_bud(const strategy_view& v) {
  const config_tree* best = nullptr;
  position best_obs;
  for (const config_tree* b : buds_of(v.ct)) {
    position obs = observed_of(v.a, *b);
    if (!best || position::lex_less(obs, best_obs) ||
        (obs == best_obs && b->state < best->state)) {
      best = b;
      best_obs = std::move(obs);
    }
  }
  if (!best) throw internal_error("strategy asked for a bud on a budless tree");
  action act;
  act.kind = action_kind::grow_bud;
  act.state = best->state;
  act.pos = best->pos;
  return act;
}

std::optional<redex> smallest_redex(const redex_set& a, const redex_set& b) {
  const redex* best = nullptr;
  if (!a.empty()) best = &*a.begin();
  if (!b.empty() && (!best || redex_less{}(*b.begin(), *best))) best = &*b.begin();
  if (!best) return std::nullopt;
  return *best;
}

}  // namespace

strategy reduce_on_discovery() {
  return [](const strategy_view& v) -> action {
    if (auto r = smallest_redex(v.linear_redexes, v.enabled)) {
      action act;
      act.kind = action_kind::reduce;
      act.r = *r;
      return act;
    }
    if (!v.ambiguous.empty()) {
      action act;
      act.kind = action_kind::check_ambiguous;
      act.r = *v.ambiguous.begin();
      return act;
    }
    return leftmost_bud(v);
  };
}

strategy explore_all_then_reduce() {
  return [](const strategy_view& v) -> action {
    if (!buds_of(v.ct).empty()) return leftmost_bud(v);
    if (!v.ambiguous.empty()) {
      action act;
      act.kind = action_kind::check_ambiguous;
      act.r = *v.ambiguous.begin();
      return act;
    }
    if (auto r = smallest_redex(v.linear_redexes, v.enabled)) {
      action act;
      act.kind = action_kind::reduce;
      act.r = *r;
      return act;
    }
    throw internal_error("strategy invoked with nothing to select");
  };
}

const std::map<std::string, strategy>& builtin_strategies() {
  static const std::map<std::string, strategy> table = {
      {"reduce-on-discovery", reduce_on_discovery()},
      {"explore-all-then-reduce", explore_all_then_reduce()},
  };
  return table;
}

rewrite_session::rewrite_session(const set_automaton& a, term_pool& pool, term_id t0,
                                 session_options opt)
    : a_(a), pool_(pool), term_(t0), ct_(config_tree::bud(0, position{})), opt_(opt) {
  if (!pool.ground(t0)) throw error("rewriting needs a ground input term");
}

bool rewrite_session::done() const {
  return reds_linear_.empty() && ambiguous_.empty() && enabled_.empty() && buds_of(ct_).empty();
}

std::vector<std::pair<std::uint32_t, position>> rewrite_session::buds() const {
  std::vector<std::pair<std::uint32_t, position>> out;
  for (const config_tree* b : buds_of(ct_)) out.emplace_back(b->state, b->pos);
  return out;
}

void rewrite_session::grow_bud(std::uint32_t state, const position& pos) {
  if (counters_.symbol_inspections >= opt_.max_inspections)
    throw step_limit_error("inspection budget exhausted");
  ct_ = grow(ct_, state, pos, a_, pool_, term_);
  ++counters_.symbol_inspections;
  auto [lin, nl] = matches(a_, pool_, state, pos, term_);
  reds_linear_.insert(lin.begin(), lin.end());
  ambiguous_.insert(nl.begin(), nl.end());
  if (opt_.trace)
    opt_.trace->push_back({step_record::grow, pos.concat(a_.state(state).label), std::nullopt, state});
  if (opt_.check_invariants) verify_invariants();
}

void rewrite_session::check(redex r) {
  auto it = ambiguous_.find(r);
  if (it == ambiguous_.end()) throw error("check: not an ambiguous pre-match");
  ambiguous_.erase(it);
  ++counters_.consistency_checks;
  const rewrite_rule& rule = a_.rules().rules[r.rule];
  if (is_consistent(pool_, pool_.subterm_at(term_, r.pos), rule.lhs_partition))
    enabled_.insert(r);
  else
    disabled_.insert(r);
  if (opt_.trace) opt_.trace->push_back({step_record::check, r.pos, r.rule, std::nullopt});
  if (opt_.check_invariants) verify_invariants();
}

void rewrite_session::reduce(redex r) {
  if (!reds_linear_.count(r) && !enabled_.count(r))
    throw error("reduce: redex is neither linear-found nor enabled");
  if (counters_.rewrite_steps >= opt_.max_steps)
    throw step_limit_error("rewrite step budget exhausted");
  const config_tree* sub = subtree_at(ct_, a_, r.pos);
  if (!sub) throw internal_error("selected redex has no initialization node");

  // All removals are computed against the pre-rewrite term and tree, then the
  // tree is pruned, then the term is rewritten.
  update_after_rewrite(r.pos, *sub);
  ct_ = prune(ct_, a_, r.pos);

  const rewrite_rule& rule = a_.rules().rules[r.rule];
  auto sigma = match_root(pool_, rule.lhs, pool_.subterm_at(term_, r.pos));
  if (!sigma) throw internal_error("selected redex does not match its rule");
  term_ = pool_.replace_at(term_, r.pos, apply_substitution(pool_, rule.rhs, *sigma));
  ++counters_.rewrite_steps;
  if (opt_.trace) opt_.trace->push_back({step_record::reduce, r.pos, r.rule, std::nullopt});
  if (opt_.check_invariants) verify_invariants();
}

void rewrite_session::update_after_rewrite(const position& p, const config_tree& pruned_subtree) {
  redex_set rm_linear, rm_nonlinear;
  for (const config_tree* n : nodes_of(pruned_subtree)) {
    auto [lin, nl] = matches(a_, pool_, n->state, n->pos, term_);
    rm_linear.insert(lin.begin(), lin.end());
    rm_nonlinear.insert(nl.begin(), nl.end());
  }
  for (const redex& x : rm_linear) reds_linear_.erase(x);
  for (const redex& x : rm_nonlinear) {
    enabled_.erase(x);
    disabled_.erase(x);
    ambiguous_.erase(x);
  }
  // Pre-matches whose repeated-variable positions reach down to the rewrite
  // position have a stale consistency verdict; they become ambiguous again.
  redex_set rem;
  auto collect = [&](const redex_set& pool_set) {
    for (const redex& x : pool_set) {
      const rewrite_rule& rule = a_.rules().rules[x.rule];
      for (const auto& cls : rule.lhs_partition) {
        if (cls.size() < 2) continue;
        for (const position& q : cls) {
          if (x.pos.concat(q).is_prefix_of(p)) {
            rem.insert(x);
            goto next_redex;
          }
        }
      }
    next_redex:;
    }
  };
  collect(enabled_);
  collect(disabled_);
  for (const redex& x : rem) {
    enabled_.erase(x);
    disabled_.erase(x);
    ambiguous_.insert(x);
  }
}

void rewrite_session::verify_invariants() const {
  config_tree full = completed(a_, pool_, term_);
  if (!is_fragment(ct_, full))
    throw internal_error("invariant: configuration tree is not a fragment of the completed tree");
  redex_set want_linear, want_nonlinear;
  for (const config_tree* n : nodes_of(ct_)) {
    auto [lin, nl] = matches(a_, pool_, n->state, n->pos, term_);
    want_linear.insert(lin.begin(), lin.end());
    want_nonlinear.insert(nl.begin(), nl.end());
  }
  if (want_linear != reds_linear_)
    throw internal_error("invariant: linear redex pool out of sync with the tree");
  redex_set tracked;
  for (const redex_set* s : {&ambiguous_, &disabled_, &enabled_}) {
    for (const redex& x : *s) {
      if (!tracked.insert(x).second)
        throw internal_error("invariant: ambiguous/disabled/enabled overlap");
      if (reds_linear_.count(x))
        throw internal_error("invariant: non-linear pre-match tracked as linear redex");
    }
  }
  if (tracked != want_nonlinear)
    throw internal_error("invariant: non-linear pools out of sync with the tree");
  for (const redex& x : enabled_)
    if (!is_consistent(pool_, pool_.subterm_at(term_, x.pos), a_.rules().rules[x.rule].lhs_partition))
      throw internal_error("invariant: enabled pre-match is inconsistent");
  for (const redex& x : disabled_)
    if (is_consistent(pool_, pool_.subterm_at(term_, x.pos), a_.rules().rules[x.rule].lhs_partition))
      throw internal_error("invariant: disabled pre-match is consistent");
}

term_id rewrite_session::run(const strategy& select) {
  while (!done()) {
    action act = select({a_, ct_, reds_linear_, ambiguous_, enabled_});
    switch (act.kind) {
      case action_kind::grow_bud:
        grow_bud(act.state, act.pos);
        break;
      case action_kind::check_ambiguous:
        check(act.r);
        break;
      case action_kind::reduce:
        reduce(act.r);
        break;
    }
  }
  return term_;
}

term_id normalize(const set_automaton& a, term_pool& pool, term_id t0, const strategy& select,
                  session_options opt) {
  if (!a.rules().left_linear())
    throw unsupported_rule_error(
        "normalize handles left-linear systems only; use normalize_nonlinear");
  if (!pool.ground(t0)) throw error("rewriting needs a ground input term");

  term_id t = t0;
  redex_set reds;
  config_tree ct = config_tree::bud(0, position{});
  std::uint64_t steps = 0, inspections = 0;
  const redex_set no_ambiguous, no_enabled;

  auto verify = [&]() {
    config_tree full = completed(a, pool, t);
    if (!is_fragment(ct, full))
      throw internal_error("invariant: configuration tree is not a fragment of the completed tree");
    redex_set want;
    for (const config_tree* n : nodes_of(ct)) {
      auto [lin, nl] = matches(a, pool, n->state, n->pos, t);
      want.insert(lin.begin(), lin.end());
      if (!nl.empty()) throw internal_error("non-linear output from a left-linear automaton");
    }
    if (want != reds) throw internal_error("invariant: redex pool out of sync with the tree");
  };

  while (!reds.empty() || !buds_of(ct).empty()) {
    action act = select({a, ct, reds, no_ambiguous, no_enabled});
    if (act.kind == action_kind::grow_bud) {
      if (inspections >= opt.max_inspections) throw step_limit_error("inspection budget exhausted");
      ++inspections;
      ct = grow(ct, act.state, act.pos, a, pool, t);
      auto [lin, nl] = matches(a, pool, act.state, act.pos, t);
      (void)nl;
      reds.insert(lin.begin(), lin.end());
      if (opt.trace)
        opt.trace->push_back(
            {step_record::grow, act.pos.concat(a.state(act.state).label), std::nullopt, act.state});
    } else if (act.kind == action_kind::reduce) {
      if (!reds.count(act.r)) throw error("strategy selected a redex that was never found");
      if (steps >= opt.max_steps) throw step_limit_error("rewrite step budget exhausted");
      ++steps;
      const config_tree* sub = subtree_at(ct, a, act.r.pos);
      if (!sub) throw internal_error("selected redex has no initialization node");
      for (const config_tree* n : nodes_of(*sub)) {
        auto [lin, nl] = matches(a, pool, n->state, n->pos, t);
        (void)nl;
        for (const redex& x : lin) reds.erase(x);
      }
      ct = prune(ct, a, act.r.pos);
      const rewrite_rule& rule = a.rules().rules[act.r.rule];
      auto sigma = match_root(pool, rule.lhs, pool.subterm_at(t, act.r.pos));
      if (!sigma) throw internal_error("selected redex does not match its rule");
      t = pool.replace_at(t, act.r.pos, apply_substitution(pool, rule.rhs, *sigma));
      if (opt.trace) opt.trace->push_back({step_record::reduce, act.r.pos, act.r.rule, std::nullopt});
    } else {
      throw error("check_ambiguous is not a linear-procedure action");
    }
    if (opt.check_invariants) verify();
  }
  return t;
}

term_id normalize_nonlinear(const set_automaton& a, term_pool& pool, term_id t0,
                            const strategy& select, session_options opt) {
  rewrite_session session(a, pool, t0, opt);
  return session.run(select);
}

namespace {

struct oracle_scan {
  const rewrite_system& trs;
  term_pool& pool;
  scan_order order;
  std::uint64_t budget;
  std::uint64_t used = 0;

  // First redex in the chosen order, as (rule, position).
  std::optional<redex> find(term_id t) {
    position at;
    return walk(t, at);
  }

  std::optional<redex> walk(term_id t, position& at) {
    if (used >= budget) throw step_limit_error("oracle work budget exhausted");
    ++used;
    if (order == scan_order::leftmost_outermost) {
      if (auto r = try_rules(t, at)) return r;
    }
    std::span<const term_id> cs = pool.children(t);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      position next = at.child(static_cast<std::uint32_t>(i + 1));
      if (auto r = walk(cs[i], next)) return r;
    }
    if (order == scan_order::leftmost_innermost) {
      if (auto r = try_rules(t, at)) return r;
    }
    return std::nullopt;
  }

  std::optional<redex> try_rules(term_id t, const position& at) {
    for (const rewrite_rule& r : trs.rules)
      if (match_root(pool, r.lhs, t)) return redex{r.id, at};
    return std::nullopt;
  }
};

}  // namespace

term_id oracle_normalize(const rewrite_system& trs, term_pool& pool, term_id t0, scan_order order,
                         std::uint64_t max_steps, std::uint64_t max_work, oracle_stats* stats) {
  if (!pool.ground(t0)) throw error("rewriting needs a ground input term");
  term_id t = t0;
  oracle_scan scan{trs, pool, order, max_work};
  for (std::uint64_t step = 0;; ++step) {
    std::optional<redex> r;
    try {
      r = scan.find(t);
    } catch (const step_limit_error&) {
      if (stats) *stats = {step, scan.used};
      throw;
    }
    if (stats) *stats = {step, scan.used};
    if (!r) return t;
    if (step >= max_steps) throw step_limit_error("rewrite step budget exhausted");
    const rewrite_rule& rule = trs.rules[r->rule];
    auto sigma = match_root(pool, rule.lhs, pool.subterm_at(t, r->pos));
    t = pool.replace_at(t, r->pos, apply_substitution(pool, rule.rhs, *sigma));
  }
}

}  // namespace setrw
