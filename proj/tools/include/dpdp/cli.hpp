#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dpdp::cli {

/// Exit codes.
inline constexpr int kOk = 0;        // success / accept / expected attack outcome
inline constexpr int kRejected = 1;  // reject, abort, unexpected attack outcome
inline constexpr int kUsage = 2;     // bad flags, missing store, I/O or format errors

/// Runs one `dpdp` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpdp::cli
