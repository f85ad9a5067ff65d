#pragma once

#include <ostream>

namespace cvxdef {

inline constexpr const char* kArtifactVersion = "1.0";

/// Entry point of the `cvxdef` tool. Returns 0 when everything passed, 1 when a
/// check or pipeline failed and 2 on malformed input.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cvxdef
