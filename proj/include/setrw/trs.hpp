#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "setrw/term.hpp"

namespace setrw {

// Partition of a pattern's variable positions: positions in the same class
// hold the same variable. All classes singleton iff the pattern is linear.
using variable_partition = std::vector<std::vector<position>>;

struct rewrite_rule {
  term_id lhs;
  term_id rhs;
  std::uint32_t id;  // file order; reporting only, never priority
  bool linear;
  bool duplicating;
  variable_partition lhs_partition;
};

struct rewrite_system {
  std::vector<symbol_id> alphabet;  // declared function symbols, in declaration order
  std::vector<symbol_id> variables;
  std::vector<rewrite_rule> rules;

  bool left_linear() const;
};

// File format: `symbols:` then `vars:` then `rules:` sections in that order,
// `#` line comments, one `lhs -> rhs` per line.
rewrite_system parse_trs(term_pool& pool, std::string_view text);

variable_partition compute_variable_partition(const term_pool& pool, term_id pattern);

// True iff every class of the partition holds id-equal subterms of t.
// position_error if a position of the partition falls outside t.
bool is_consistent(const term_pool& pool, term_id t, const variable_partition& partition);

// True iff t agrees with the pattern's head symbols on every non-variable
// pattern position.
bool pre_matches(const term_pool& pool, term_id t, term_id pattern);

// True iff some lhs variable occurs more often in the rhs than in the lhs.
bool is_duplicating(const term_pool& pool, term_id lhs, term_id rhs);

// "R1", "R2", ... in file order.
std::string rule_name(std::uint32_t rule_index);

}  // namespace setrw
