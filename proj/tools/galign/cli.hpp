#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace galign::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitModelError = 1;  // the model failed to load or evaluate
inline constexpr int kExitUsage = 2;       // bad flags, missing files

// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace galign::cli
