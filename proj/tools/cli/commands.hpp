#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cellcast::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Entry point of the `cellcast` tool. `args` excludes the program name.
/// Subcommands: generate | covariates | train | forecast | evaluate | sweep.
/// Returns 0 on success, 1 on validation errors (bad flags, config or data),
/// 2 on I/O errors.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cellcast::cli
