#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace musielak::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string output = ".";  // directory, created if missing
  std::optional<double> tol;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_iter;
};

const std::vector<std::string>& subcommands();

/// Dispatches one subcommand. Reports go to files under config.output, a one
/// line summary to `log`. Unknown subcommands are rejected before anything
/// is read.
int run(const RunConfig& config, std::ostream& log);

/// argv front end (CLI11). Parse errors exit with kExitInputError.
int main(int argc, char** argv);

}  // namespace musielak::cli
