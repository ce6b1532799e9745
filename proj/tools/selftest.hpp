#pragma once

#include <ostream>

namespace mracrl::tools {

/// Runs the invariant checks, one PASS/FAIL line each. Returns the number of
/// failures.
int run_selftest(std::ostream& out);

}  // namespace mracrl::tools
