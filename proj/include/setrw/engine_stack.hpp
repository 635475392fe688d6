#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "setrw/set_automaton.hpp"

namespace setrw {

struct engine_counters {
  std::uint64_t rewrite_steps = 0;
  std::uint64_t symbol_inspections = 0;
  std::uint64_t consistency_checks = 0;
};

struct engine_observation {
  std::uint32_t state;
  symbol_id symbol;
  position abs_pos;
};
using engine_trace = std::vector<engine_observation>;

struct engine_options {
  std::uint64_t max_steps = 1'000'000'000;
  std::uint64_t max_inspections = ~0ull;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  // Mirrors the run into a configuration tree and checks it stays a fragment
  // of the completed tree after every observation and rewrite. Quadratic.
  bool debug_checks = false;
  engine_trace* trace = nullptr;
};

struct engine_result {
  term_id term;
  engine_counters counters;
};

// Depth-first configuration-stack rewriter. Entries carry the frame subterm
// and the transition offset that produced them, so no absolute positions are
// stored; a rewrite prunes by popping a precomputed number of entries.
// Linear non-duplicating matches rewrite on discovery; duplicating rules and
// not-yet-consistent non-linear pre-matches wait on a strategy stack until
// the subtree under their redex is fully explored.
engine_result rewrite_outermost(const set_automaton& a, term_pool& pool, term_id t0,
                                engine_options opt = {});

}  // namespace setrw
