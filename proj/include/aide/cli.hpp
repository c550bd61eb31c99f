#pragma once

#include <iosfwd>

namespace aide {

// Exit codes: 0 ok, 1 usage, 2 input parse failure, 3 assertion failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aide
