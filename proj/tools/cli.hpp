#pragma once

#include <ostream>

namespace qdesign {

// Exit codes: 0 consistent, 1 a hard assertion failed, 2 usage, validation
// or budget refusal.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdesign
