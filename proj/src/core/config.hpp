#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace revclt::cli {

enum class Command { exact, simulate, decompose, ineq, clt, fclt, regen, all };

const char* to_string(Command c) noexcept;

/// Process exit codes.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInconclusive = 2, kExitUsage = 64 };

/// Bad command line or config file; the message names the offending key.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::all;
  std::uint64_t n = 1000;
  /// Unset means the command's own default grid.
  std::optional<std::vector<std::uint64_t>> n_grid;
  std::uint64_t reps = 10'000;
  std::uint64_t master_seed = 42;
  std::vector<double> t_grid{0.25, 0.5, 0.75, 1.0};
  std::vector<double> p{1.5, 2.0, 4.0};
  std::vector<double> x_sigma{1.0, 2.0, 4.0};  ///< tail thresholds in units of sigma_n
  std::vector<double> delta_grid{0.01, 0.05, 0.1, 0.25, 0.5};
  double epsilon = 0.5;
  std::vector<double> m_grid{0.0, 1.0, 2.0, 3.0};
  std::uint64_t horizon = 0;  ///< decomposition horizon; 0 = path length
  std::vector<std::uint64_t> key2_grid{100, 1000};  ///< n values of the nested estimate, each <= 10^4
  std::uint64_t outer_reps = 200;
  std::uint64_t inner_reps = 200;
  std::uint64_t blocks = 1'000'000;
  std::string trajectory;  ///< optional input path for `decompose`
  std::filesystem::path out_dir = "revclt_out";
  unsigned threads = 0;  ///< 0 = auto

  /// Effective n grid for the configured command.
  std::vector<std::uint64_t> grid_or(std::vector<std::uint64_t> fallback) const {
    return n_grid ? *n_grid : std::move(fallback);
  }
};

/// Result of parsing: either a config or a help request.
struct ParseResult {
  RunConfig config;
  bool help = false;
  std::string help_text;
};

/// Parses argv (argv[0] is the program name). A `--config FILE` holds
/// `key = value` lines with `#` comments; command-line flags override file
/// values, and unknown keys are errors. `REVCLT_SEED`, when set, replaces
/// the built-in default seed. Throws UsageError.
ParseResult parse_config(int argc, const char* const* argv);

/// Parses a config file body into key/value pairs (no validation of keys).
std::map<std::string, std::string> read_key_values(const std::string& text,
                                                   const std::string& source);

/// The config echoed back in config-file syntax.
std::string to_key_values(const RunConfig& cfg);

std::string usage_text();

}  // namespace revclt::cli
