#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "setrw/matcher.hpp"
#include "setrw/trs.hpp"

namespace setrw::selftest {

// Independent brute-force routes used to cross-check the automaton path.
// These use match_root / pre_matches directly and never touch the automaton.
redex_set brute_force_redexes(const term_pool& pool, const rewrite_system& trs, term_id t);
redex_set brute_force_prematches(const term_pool& pool, const rewrite_system& trs, term_id t);
// Walks distinct subterm nodes only, so it stays cheap on shared terms.
bool in_normal_form_brute(const term_pool& pool, const rewrite_system& trs, term_id t);

// Syntactic unification; variables may occur on both sides.
std::optional<substitution> unify(term_pool& pool, term_id a, term_id b);
// Existence of a critical pair (overlap of one lhs into a non-variable
// position of another, modulo renaming).
bool has_critical_pairs(term_pool& pool, const rewrite_system& trs);
// Left-linear and no critical pairs; such systems are confluent.
bool orthogonal(term_pool& pool, const rewrite_system& trs);

struct fuzz_config {
  std::uint64_t seed = 42;
  std::size_t max_rules = 6;
  std::size_t max_lhs_depth = 4;
  std::uint32_t max_arity = 3;
  std::uint64_t max_term_size = 40;
  std::uint64_t step_budget = 512;
  std::uint64_t work_budget = 200'000;
};

struct fuzz_case {
  std::string trs_text;
  std::string term_text;
};

struct check_selection {
  bool eval_equivalence = true;
  bool tree_laws = true;
  bool normal_forms = true;
};

struct fuzz_outcome {
  bool ok = true;
  std::string failure;  // empty when ok
};

fuzz_case generate_case(const fuzz_config& cfg, std::uint64_t index);
fuzz_outcome run_case(const fuzz_case& c, const fuzz_config& cfg, check_selection sel = {});

// Greedily shrinks a failing case (subterm promotion, rule dropping) while
// the failure persists.
fuzz_case shrink_case(const fuzz_case& c, const fuzz_config& cfg, check_selection sel = {});

}  // namespace setrw::selftest
