#pragma once

namespace bess::cli {

/// Entry point shared by the binary and the in-process CLI tests.
/// Exit codes: 0 success, 1 infeasible result, 2 config/usage error.
int run(int argc, const char* const* argv);

}  // namespace bess::cli
