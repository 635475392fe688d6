#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "setrw/set_automaton.hpp"

namespace setrw {

struct redex {
  std::uint32_t rule;
  position pos;  // absolute in the subject term
  friend bool operator==(const redex&, const redex&) = default;
};

// Shortlex on position, then rule id: the order built-in strategies pick in.
struct redex_less {
  bool operator()(const redex& a, const redex& b) const {
    if (a.pos != b.pos) return position::shortlex_less(a.pos, b.pos);
    return a.rule < b.rule;
  }
};

using redex_set = std::set<redex, redex_less>;

// A (state, position) configuration with its exploration status. A bud is an
// unexplored configuration; a node has been observed, possibly with no
// successors. Children are kept sorted by (state, position) so that tree
// equality is structural.
struct config_tree {
  std::uint32_t state;
  position pos;
  bool explored = false;
  std::vector<config_tree> children;

  static config_tree bud(std::uint32_t state, position pos) {
    return config_tree{state, std::move(pos), false, {}};
  }
  friend bool operator==(const config_tree&, const config_tree&) = default;
};

std::vector<const config_tree*> buds_of(const config_tree& ct);
std::vector<const config_tree*> nodes_of(const config_tree& ct);

// One record per symbol observation, mirroring the single-pass trace table.
struct observation {
  std::uint32_t state;
  position abs_pos;  // the observed position p.L(s)
  symbol_id symbol;
  std::vector<std::pair<std::uint32_t, position>> new_configs;
  std::vector<redex> outputs;  // linear and non-linear, absolute positions
};
using eval_trace = std::vector<observation>;

struct eval_result {
  redex_set linear;     // genuine redexes of linear-lhs rules
  redex_set nonlinear;  // pre-matches of non-linear rules, pending consistency
  std::uint64_t inspections = 0;
};

// Finds every match in one top-down pass, inspecting each position once.
eval_result eval(const set_automaton& a, const term_pool& pool, term_id t,
                 eval_trace* trace = nullptr);

// eval with the consistency checks applied: exactly the redexes of t.
redex_set all_redexes(const set_automaton& a, const term_pool& pool, term_id t);

// The matches yielded by observing t from configuration (state, pos):
// out entries shifted to absolute positions. first = linear, second = non-linear.
std::pair<std::vector<redex>, std::vector<redex>> matches(const set_automaton& a,
                                                          const term_pool& pool,
                                                          std::uint32_t state, const position& pos,
                                                          term_id t);

// The fully explored tree for t; its nodes biject onto the positions of t.
config_tree completed(const set_automaton& a, const term_pool& pool, term_id t);

// Replaces the bud (state, pos) by a node whose children are the buds given
// by the automaton's transition on the observed symbol. no_such_bud_error if
// the bud is absent.
config_tree grow(const config_tree& ct, std::uint32_t state, const position& pos,
                 const set_automaton& a, const term_pool& pool, term_id t);

// Collapses every node observing position q back to a bud.
config_tree prune(const config_tree& ct, const set_automaton& a, const position& q);

// The subtree whose root observes position p, if any (unique on fragments of
// completed trees).
const config_tree* subtree_at(const config_tree& ct, const set_automaton& a, const position& p);

// ct1 can be grown into ct2.
bool is_fragment(const config_tree& ct1, const config_tree& ct2);

}  // namespace setrw
