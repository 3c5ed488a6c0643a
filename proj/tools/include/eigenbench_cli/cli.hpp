#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace eigenbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInternal = 2;

/// Runs one command line (args[0] is the program name). Normal output goes
/// to `out`; notices, warnings and the single-line error record go to `err`.
/// Returns 0 on success, 1 on validation errors, 2 on internal errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eigenbench::cli
