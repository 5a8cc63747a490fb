#pragma once

#include <ostream>

namespace policylens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConfig = 2;

/// Entry point of the policylens command line tool.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace policylens::cli
