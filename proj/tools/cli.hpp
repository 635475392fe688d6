#pragma once

#include <iosfwd>

namespace setrw::cli {

// Exit codes: 0 success, 1 domain error, 2 property violation, 3 internal
// inconsistency.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace setrw::cli
