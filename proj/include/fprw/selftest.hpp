#pragma once

#include <iosfwd>

namespace fprw::selftest {

// Runs the acceptance checks, one PASS/FAIL line each; true if all pass.
bool run_all(std::ostream& out);

}  // namespace fprw::selftest
