#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace revclt::cli {

enum class Status { pass, fail, inconclusive };

/// One line of the manifest. Theorem checks decide the exit code;
/// diagnostics are reported only.
struct Criterion {
  std::string name;
  Status status = Status::pass;
  bool theorem = false;
  std::string detail;
};

struct RunOutcome {
  int exit_code = kExitPass;
  std::vector<Criterion> criteria;
  std::vector<std::string> files;  ///< written, relative to out_dir
};

/// Dispatches the configured command, writes the per-command CSVs plus
/// `manifest.txt` into cfg.out_dir, and logs progress to `log`.
/// Exit code: 0 all theorem checks pass, 1 any fails, 2 any inconclusive.
RunOutcome run(const RunConfig& cfg, std::ostream& log);

/// Version string of the toolkit.
const char* version() noexcept;

}  // namespace revclt::cli
