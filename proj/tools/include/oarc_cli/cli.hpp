#pragma once

namespace oarc::cli {

/// Parses argv and runs one subcommand. Returns the process exit code:
/// 0 on success, 2 on usage or validation errors, 1 on runtime failures.
int dispatch(int argc, const char* const* argv);

}  // namespace oarc::cli
