#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oqrw::cli {

inline constexpr const char* kVersion = "oqrw-0.1.0";

// Entry point shared by the binary and the tests. Exit codes: 0 success,
// 1 domain refusal or validation failure, 2 I/O, schema or usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oqrw::cli
