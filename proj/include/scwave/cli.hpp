#ifndef SCWAVE_CLI_HPP
#define SCWAVE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace scwave {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `scwave` invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int cmd_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scwave

#endif  // SCWAVE_CLI_HPP
