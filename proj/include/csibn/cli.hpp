#ifndef CSIBN_CLI_HPP
#define CSIBN_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace csibn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

/// Runs one `csibn` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csibn::cli

#endif  // CSIBN_CLI_HPP
