#pragma once

namespace gsi::cli {

/// Exit codes: 0 success, 1 numerical failure, 2 invalid input,
/// 3 verification failure.
int run(int argc, const char* const* argv);

}  // namespace gsi::cli
