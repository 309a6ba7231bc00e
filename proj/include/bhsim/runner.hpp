// runner.hpp — experiment orchestration and deterministic result emission.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bhsim/config.hpp"

namespace bhsim::cli {

struct RunOptions {
  std::string out_dir;  // overrides [output] dir when nonempty
  bool overwrite = false;
  std::optional<std::uint64_t> seed;  // overrides the configured seed
  int threads = 1;
};

struct RunResult {
  std::filesystem::path out_dir;
  std::vector<std::string> files;  // relative to out_dir, summary last
};

// Execute one experiment.  Throws ConfigError for configuration problems
// (including output collisions without --overwrite), std::runtime_error for
// numerical failures.
RunResult run(Experiment kind, const Config& cfg, const RunOptions& opts);

}  // namespace bhsim::cli
