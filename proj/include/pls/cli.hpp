#pragma once

namespace pls {

/// Command-line entry point. Exit codes: 0 success, 1 validation error
/// (bad flags, malformed config, missing files), 2 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace pls
