#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nlint/errors.hpp"
#include "nlint/scenario.hpp"

namespace nlint {

/// Result of re-running a task's key observable on a refined grid.
struct ConvergenceCheck {
  std::string quantity;
  bool applicable = false;  // false when the observable is closed form or the check could not run
  double coarse = 0.0;
  double fine = 0.0;
  double relative_change = 0.0;
  bool flagged = false;     // relative_change above kConvergenceTolerance
  std::string note;
};

inline constexpr double kConvergenceTolerance = 1e-4;

struct TaskRecord {
  Task task;
  std::vector<std::filesystem::path> files;
  double seconds = 0.0;
  ConvergenceCheck convergence;
};

struct RunManifest {
  std::string scenario_digest;  // FNV-1a 64 of the rendered scenario
  std::string digest;           // scenario plus every output file; excludes timing
  std::vector<TaskRecord> tasks;
  std::filesystem::path manifest_path;
  double seconds = 0.0;

  bool flagged() const;
};

/// 64-bit FNV-1a, continuing from `seed`.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull);

/// Runs every task, writes outputs and `<prefix>_manifest.json` into the output
/// directory. On failure all files written by this run are removed and the
/// error is rethrown with the task name prepended.
RunManifest run_scenario(const Scenario& scenario);

/// Process exit status for an error: 2 for numerical and analysis failures,
/// 1 for everything else.
int exit_code_for(ErrorKind kind);

}  // namespace nlint
