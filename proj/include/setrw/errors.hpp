#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace setrw {

// Domain-level failures: malformed input, contract misuse, exhausted budgets.
// These map to exit code 1 in the CLI.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : error {
  std::size_t line;
  std::size_t column;
  parse_error(std::size_t line_, std::size_t column_, const std::string& what_)
      : error("parse error at " + std::to_string(line_) + ":" + std::to_string(column_) + ": " +
              what_),
        line(line_),
        column(column_) {}
};

struct arity_error : error {
  using error::error;
};

// A position outside the domain of the term it was applied to.
struct position_error : error {
  using error::error;
};

struct substitution_error : error {
  using error::error;
};

struct no_such_bud_error : error {
  using error::error;
};

struct unsupported_rule_error : error {
  using error::error;
};

struct step_limit_error : error {
  using error::error;
};

struct deadline_error : error {
  using error::error;
};

struct state_cap_error : error {
  using error::error;
};

// Broken internal invariant. Indicates a bug, not bad input; exit code 3 in the CLI.
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace setrw
