#pragma once

// Subcommands of the phaseret tool. Exit codes: 0 holds / valid, 1 fails or
// falsified, 2 error, 3 no witness found (inconclusive).

#include <ostream>
#include <string>
#include <vector>

namespace phaseret::cli {

inline constexpr int kExitHolds = 0;
inline constexpr int kExitFails = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitInconclusive = 3;

/// argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace phaseret::cli
