#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "setrw/matcher.hpp"

namespace setrw {

struct rewrite_counters {
  std::uint64_t rewrite_steps = 0;
  std::uint64_t symbol_inspections = 0;
  std::uint64_t consistency_checks = 0;
};

struct step_record {
  enum kind_t { grow, check, reduce } kind;
  position pos;  // observed position for grows, redex position otherwise
  std::optional<std::uint32_t> rule;
  std::optional<std::uint32_t> state;
  friend bool operator==(const step_record&, const step_record&) = default;
};
using step_trace = std::vector<step_record>;

struct session_options {
  std::uint64_t max_steps = 1'000'000'000;
  std::uint64_t max_inspections = ~0ull;
  bool check_invariants = false;  // verify the loop invariant after every action
  step_trace* trace = nullptr;
};

enum class action_kind { grow_bud, check_ambiguous, reduce };

struct action {
  action_kind kind;
  std::uint32_t state = 0;  // grow_bud
  position pos;             // grow_bud
  redex r;                  // check_ambiguous / reduce
};

// What a strategy may select from. For the linear procedure, ambiguous and
// enabled are empty and linear_redexes holds all found redexes.
struct strategy_view {
  const set_automaton& a;
  const config_tree& ct;
  const redex_set& linear_redexes;
  const redex_set& ambiguous;
  const redex_set& enabled;
};

// Total on views where buds + linear_redexes + ambiguous + enabled is
// non-empty; picking outside those pools is a contract violation.
using strategy = std::function<action(const strategy_view&)>;

strategy reduce_on_discovery();       // prefer the smallest redex, else leftmost bud
strategy explore_all_then_reduce();   // grow every bud before checking or reducing
const std::map<std::string, strategy>& builtin_strategies();

// Interleaves automaton-guided matching with rewriting while keeping the
// matching work stored in a configuration tree. Supports non-linear rules by
// routing their pre-matches through ambiguous/enabled/disabled pools.
class rewrite_session {
 public:
  rewrite_session(const set_automaton& a, term_pool& pool, term_id t0, session_options opt = {});

  term_id term() const { return term_; }
  const config_tree& tree() const { return ct_; }
  const redex_set& linear_redexes() const { return reds_linear_; }
  const redex_set& ambiguous() const { return ambiguous_; }
  const redex_set& disabled() const { return disabled_; }
  const redex_set& enabled() const { return enabled_; }
  const rewrite_counters& counters() const { return counters_; }
  bool done() const;

  std::vector<std::pair<std::uint32_t, position>> buds() const;

  void grow_bud(std::uint32_t state, const position& pos);
  // By value: callers routinely pass references into the session's own pools,
  // which these calls mutate.
  void check(redex r);   // consistency-check an ambiguous pre-match
  void reduce(redex r);  // apply a redex from linear_redexes or enabled

  term_id run(const strategy& select);

 private:
  const set_automaton& a_;
  term_pool& pool_;
  term_id term_;
  config_tree ct_;
  redex_set reds_linear_, ambiguous_, disabled_, enabled_;
  rewrite_counters counters_;
  session_options opt_;

  void update_after_rewrite(const position& p, const config_tree& pruned_subtree);
  void verify_invariants() const;
};

// Algorithm for left-linear systems only: a single redex pool, no
// consistency bookkeeping. unsupported_rule_error on a non-linear rule.
term_id normalize(const set_automaton& a, term_pool& pool, term_id t0, const strategy& select,
                  session_options opt = {});

// The non-linear procedure; on left-linear systems it takes the same steps
// as normalize.
term_id normalize_nonlinear(const set_automaton& a, term_pool& pool, term_id t0,
                            const strategy& select, session_options opt = {});

enum class scan_order { leftmost_outermost, leftmost_innermost };

struct oracle_stats {
  std::uint64_t rewrite_steps = 0;
  std::uint64_t positions_scanned = 0;
};

// Brute force reference: scan all positions with match_root per rule, apply
// the first redex in the chosen order, repeat. Independent of the automaton.
term_id oracle_normalize(const rewrite_system& trs, term_pool& pool, term_id t0, scan_order order,
                         std::uint64_t max_steps = 1'000'000'000, std::uint64_t max_work = ~0ull,
                         oracle_stats* stats = nullptr);

}  // namespace setrw
