#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holo::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kArtifactFormat = 1;

/// Runs one `holo` invocation. Returns the process exit status: 0 on success,
/// nonzero iff an error was reported on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holo::cli
