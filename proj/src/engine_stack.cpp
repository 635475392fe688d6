#include "setrw/engine_stack.hpp"

#include <algorithm>
#include <map>

#include "setrw/errors.hpp"
#include "setrw/matcher.hpp"

namespace setrw {

namespace {

struct stack_entry {
  std::uint32_t state;
  term_id subterm;   // current frame subterm, kept current as children fold back
  term_id original;  // frame subterm at push time; unchanged frames skip the fold
  const position* offset;  // transition offset from the parent frame; null at the root
  const automaton_cell* cell = nullptr;  // null until observed
  std::uint32_t next_branch = 0;
  position abs;  // maintained only when tracing or debug-checking
};

struct parked_match {
  std::uint32_t rule;
  std::size_t init_index;  // stack index of the redex's initialization entry
  bool duplicating;
};

struct engine {
  const set_automaton& a;
  term_pool& pool;
  engine_options opt;
  bool track_abs;

  std::vector<stack_entry> stack;
  std::vector<parked_match> parked;
  engine_counters counters;

  // Debug shadow: the configuration tree the stack is a path of.
  config_tree shadow = config_tree::bud(0, position{});

  engine(const set_automaton& a_, term_pool& pool_, engine_options opt_)
      : a(a_), pool(pool_), opt(opt_), track_abs(opt_.trace != nullptr || opt_.debug_checks) {}

  term_id current_full_term() const {
    term_id t = stack.back().subterm;
    for (std::size_t i = stack.size() - 1; i > 0; --i)
      t = pool.replace_at(stack[i - 1].subterm, *stack[i].offset, t);
    return t;
  }

  void check_shadow() {
    term_id t = current_full_term();
    if (!is_fragment(shadow, completed(a, pool, t)))
      throw internal_error("stack engine: shadow tree is not a fragment of the completed tree");
    // The stack must be a root-to-top chain of shadow configurations.
    const config_tree* cur = &shadow;
    for (std::size_t i = 1; i < stack.size(); ++i) {
      const config_tree* next = nullptr;
      for (const config_tree& c : cur->children)
        if (c.state == stack[i].state && c.pos == stack[i].abs) next = &c;
      if (!next) throw internal_error("stack engine: stack path is not a chain in the shadow tree");
      cur = next;
    }
  }

  void observe_top() {
    if (counters.symbol_inspections >= opt.max_inspections)
      throw step_limit_error("inspection budget exhausted");
    if (opt.deadline && (counters.symbol_inspections & 1023u) == 0 &&
        std::chrono::steady_clock::now() > *opt.deadline)
      throw deadline_error("deadline exceeded");
    stack_entry& e = stack.back();
    term_id obs = pool.subterm_at(e.subterm, a.state(e.state).label);
    symbol_id f = pool.head(obs);
    if (!a.in_alphabet(f))
      throw error("symbol '" + pool.symbols[f].name + "' is not in the automaton's alphabet");
    ++counters.symbol_inspections;
    if (opt.trace) opt.trace->push_back({e.state, f, e.abs.concat(a.state(e.state).label)});
    e.cell = &a.cell(e.state, f);
    e.next_branch = 0;
    if (opt.debug_checks) {
      shadow = grow(shadow, e.state, e.abs, a, pool, current_full_term());
      check_shadow();
    }
  }

  // Applies `rule` whose redex sits at the observed position of stack[init].
  // Pops everything above init (folding term changes), rewrites the frame in
  // place and resets the entry for re-exploration.
  void apply_at(std::size_t init, std::uint32_t rule_id, const substitution& sigma) {
    if (counters.rewrite_steps >= opt.max_steps)
      throw step_limit_error("rewrite step budget exhausted");
    while (stack.size() - 1 > init) pop_and_fold();
    stack_entry& e = stack.back();
    const rewrite_rule& rule = a.rules().rules[rule_id];
    position redex_abs;
    if (opt.debug_checks) redex_abs = e.abs.concat(a.state(e.state).label);
    term_id contractum = apply_substitution(pool, rule.rhs, sigma);
    e.subterm = pool.replace_at(e.subterm, a.state(e.state).label, contractum);
    e.cell = nullptr;
    e.next_branch = 0;
    ++counters.rewrite_steps;
    // Matching work at or below the initialization entry is void now.
    std::erase_if(parked, [&](const parked_match& p) { return p.init_index >= init; });
    if (opt.debug_checks) {
      shadow = prune(shadow, a, redex_abs);
      check_shadow();
    }
  }

  // The subterm the announcement `e` of the just-observed top refers to.
  term_id redex_subterm(const out_entry& e) const {
    return pool.subterm_at(stack.back().subterm, e.pos);
  }

  std::size_t init_index_of(const out_entry& e) const {
    if (e.init_distance >= stack.size())
      throw internal_error("announcement's initialization entry is not on the stack");
    return stack.size() - 1 - e.init_distance;
  }

  // Handles the outputs of the just-observed top entry. Returns true if a
  // rewrite was applied (the stack changed; the caller restarts its loop).
  bool handle_outputs() {
    const automaton_cell& cell = *stack.back().cell;
    if (cell.out_linear.empty() && cell.out_nonlinear.empty()) return false;

    struct candidate {
      const out_entry* e;
      bool linear;
    };
    std::vector<candidate> immediate;
    for (const out_entry& e : cell.out_linear) {
      if (a.rules().rules[e.rule].duplicating)
        parked.push_back({e.rule, init_index_of(e), true});
      else
        immediate.push_back({&e, true});
    }
    for (const out_entry& e : cell.out_nonlinear) {
      const rewrite_rule& rule = a.rules().rules[e.rule];
      ++counters.consistency_checks;
      if (is_consistent(pool, redex_subterm(e), rule.lhs_partition) && !rule.duplicating)
        immediate.push_back({&e, false});
      else
        parked.push_back({e.rule, init_index_of(e), rule.duplicating});
    }
    if (immediate.empty()) return false;
    std::sort(immediate.begin(), immediate.end(), [](const candidate& x, const candidate& y) {
      if (x.e->pos != y.e->pos) return position::shortlex_less(x.e->pos, y.e->pos);
      return x.e->rule < y.e->rule;
    });
    const out_entry& e = *immediate.front().e;
    auto sigma = match_root(pool, a.rules().rules[e.rule].lhs, redex_subterm(e));
    if (!sigma) throw internal_error("announced match does not match its rule");
    apply_at(init_index_of(e), e.rule, *sigma);
    return true;
  }

  // Fires parked matches anchored at the completed entry `idx`, most recent
  // first; each is re-verified against the now fully explored subterm.
  bool fire_parked(std::size_t idx) {
    std::vector<parked_match> anchored;
    for (std::size_t i = parked.size(); i > 0; --i) {
      if (parked[i - 1].init_index == idx) {
        anchored.push_back(parked[i - 1]);
        parked.erase(parked.begin() + static_cast<std::ptrdiff_t>(i - 1));
      }
    }
    for (const parked_match& p : anchored) {
      const rewrite_rule& rule = a.rules().rules[p.rule];
      term_id sub = pool.subterm_at(stack[idx].subterm, a.state(stack[idx].state).label);
      if (!rule.linear) ++counters.consistency_checks;
      auto sigma = match_root(pool, rule.lhs, sub);
      if (!sigma) continue;  // rewritten away or still inconsistent; final either way
      if (opt.debug_checks && p.duplicating) verify_duplicates_normal(rule, *sigma);
      apply_at(idx, p.rule, *sigma);
      return true;  // untried ones are rediscovered by the re-exploration
    }
    return false;
  }

  // A parked duplicating rule only fires once its bound subterms are normal.
  void verify_duplicates_normal(const rewrite_rule& rule, const substitution& sigma) {
    std::map<symbol_id, std::size_t> lhs_n, rhs_n;
    auto count = [&](auto&& self, term_id t, std::map<symbol_id, std::size_t>& n) -> void {
      if (pool.is_variable(t)) {
        ++n[pool.head(t)];
        return;
      }
      for (term_id c : pool.children(t)) self(self, c, n);
    };
    count(count, rule.lhs, lhs_n);
    count(count, rule.rhs, rhs_n);
    for (const auto& [var, n] : rhs_n) {
      if (n <= lhs_n[var]) continue;
      term_id bound = sigma.at(var);
      if (!all_redexes(a, pool, bound).empty())
        throw internal_error("duplicating rule fired with a reducible bound subterm");
    }
  }

  void pop_and_fold() {
    stack_entry done = std::move(stack.back());
    stack.pop_back();
    if (done.subterm != done.original) {
      stack_entry& parent = stack.back();
      parent.subterm = pool.replace_at(parent.subterm, *done.offset, done.subterm);
    }
  }

  engine_result run(term_id t0) {
    stack.push_back({0, t0, t0, nullptr, nullptr, 0, position{}});
    while (true) {
      if (!stack.back().cell) {
        observe_top();
        if (handle_outputs()) continue;
      }
      stack_entry& e = stack.back();
      if (e.next_branch < e.cell->branches.size()) {
        const branch& b = e.cell->branches[e.next_branch++];
        stack_entry child;
        child.state = b.target;
        child.subterm = pool.subterm_at(e.subterm, b.offset);
        child.original = child.subterm;
        child.offset = &b.offset;
        if (track_abs) child.abs = e.abs.concat(b.offset);
        stack.push_back(std::move(child));
        continue;
      }
      if (fire_parked(stack.size() - 1)) continue;
      if (stack.size() == 1) return {stack.back().subterm, counters};
      pop_and_fold();
    }
  }
};

}  // namespace

engine_result rewrite_outermost(const set_automaton& a, term_pool& pool, term_id t0,
                                engine_options opt) {
  if (!pool.ground(t0)) throw error("rewriting needs a ground input term");
  engine eng(a, pool, opt);
  return eng.run(t0);
}

}  // namespace setrw
