#pragma once

#include <iosfwd>

namespace gazeflow::cli {

// Exit status: 0 success, 1 bad input or usage, 2 internal invariant violated.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace gazeflow::cli
