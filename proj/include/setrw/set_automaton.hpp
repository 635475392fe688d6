#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "setrw/position.hpp"
#include "setrw/term.hpp"
#include "setrw/trs.hpp"

namespace setrw {

// Which goals of a derivative end up in the same successor state.
enum class dependency_kind {
  standard,              // goals sharing a match-obligation position
  outermost_preserving,  // goals with comparable announcement positions
};

struct obligation_pair {
  term_id pattern;
  position pos;
  friend bool operator==(const obligation_pair&, const obligation_pair&) = default;
};

// "To announce rule `rule` at `announce`, the subpatterns of `obligation`
// still have to be observed at their positions." init_distance counts the
// transitions taken since the observation that first reduced this goal; the
// engine pops exactly that many stack entries when the announcement fires.
struct match_goal {
  std::vector<obligation_pair> obligation;  // sorted by position, never empty
  std::uint32_t rule;
  position announce;
  std::uint32_t init_distance = 0;

  bool fresh() const;
  bool root() const { return announce.is_root(); }
  friend bool operator==(const match_goal&, const match_goal&) = default;
};

bool goal_less(const match_goal& a, const match_goal& b);

struct automaton_state {
  std::vector<match_goal> goals;  // canonical: sorted by goal_less, deduplicated
  position label;
};

struct branch {
  std::uint32_t target;
  position offset;
  friend bool operator==(const branch&, const branch&) = default;
};

struct out_entry {
  std::uint32_t rule;
  position pos;                    // relative to the configuration's frame
  std::uint32_t init_distance;     // stack entries between here and the initialization entry
  friend bool operator==(const out_entry&, const out_entry&) = default;
};

struct automaton_cell {
  std::vector<branch> branches;        // sorted by (offset, target)
  std::vector<out_entry> out_linear;   // linear-lhs rules only
  std::vector<out_entry> out_nonlinear;
};

class set_automaton {
 public:
  std::size_t state_count() const { return states_.size(); }
  const automaton_state& state(std::uint32_t s) const { return states_[s]; }
  std::span<const symbol_id> alphabet() const { return alphabet_; }
  const rewrite_system& rules() const { return trs_; }

  // Total over states x alphabet; empty cells exist.
  const automaton_cell& cell(std::uint32_t s, symbol_id f) const;
  bool in_alphabet(symbol_id f) const;

  struct statistics_record {
    std::size_t states;
    std::size_t symbols;
    std::size_t rules;
    std::size_t transition_cells;  // always states * symbols
    std::size_t branch_count;
  };
  statistics_record statistics() const;

 private:
  std::vector<automaton_state> states_;
  std::vector<automaton_cell> cells_;  // dense, states * alphabet
  std::vector<symbol_id> alphabet_;
  std::vector<std::uint32_t> symbol_slot_;  // symbol_id -> dense alphabet index
  rewrite_system trs_;

  friend set_automaton construct(const term_pool&, const rewrite_system&, dependency_kind,
                                 std::size_t);
};

// Worklist construction over reachable states; state_cap_error with a
// diagnostic if the automaton exceeds the cap.
set_automaton construct(const term_pool& pool, const rewrite_system& trs, dependency_kind kind,
                        std::size_t state_cap = 1'000'000);

// Exposed pieces of the construction, mainly for tests and experiments.

// {l@q in mo | q != p} plus the non-variable children of patterns at p;
// empty result means the observation completed the obligation.
std::vector<obligation_pair> reduce_obligation(const term_pool& pool,
                                               std::span<const obligation_pair> mo, symbol_id f,
                                               const position& p);

struct derivative_result {
  std::vector<match_goal> goals;      // reduced + unchanged + fresh, canonical
  std::vector<out_entry> completed;   // goals whose obligation reduced to empty
};
derivative_result derivative(const term_pool& pool, const automaton_state& s, symbol_id f,
                             const rewrite_system& trs);

std::vector<std::vector<match_goal>> partition_goals(std::span<const match_goal> goals,
                                                     dependency_kind kind);

struct lifted_class {
  std::vector<match_goal> goals;
  position offset;  // the stripped common prefix, recorded on the transition
};
lifted_class lift(std::span<const match_goal> cls);

// Deterministic DOT text: one box per state, one hyperedge per non-empty
// (state, symbol) cell with per-branch offsets and outputs.
std::string export_dot(const set_automaton& a, const term_pool& pool);

// Per-state announcement depths backing the constant-time prune: for each
// goal the distance to its initialization entry, and for each output the
// inclusive pop count (distance + 1).
struct prune_support {
  struct goal_row {
    std::uint32_t rule;
    position announce;
    std::uint32_t distance;
  };
  struct out_row {
    symbol_id symbol;
    std::uint32_t rule;
    position pos;
    std::uint32_t depth;
  };
  std::vector<std::vector<goal_row>> goals_per_state;
  std::vector<std::vector<out_row>> outs_per_state;
};
prune_support constant_time_prune_support(const set_automaton& a);

}  // namespace setrw
