#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace jolopt::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

/// Codes that count as configuration errors (exit 1); the rest are runtime.
bool is_config_error(ErrorCode code);

/// A problem ready to run, with the data it was built from kept alive.
struct PreparedProblem {
  JointProblem problem;
  std::function<std::vector<double>(const Vector& x, const Vector& theta)> objectives;
};

/// Loads or generates the dataset named by the config and builds the
/// problem (for opf, with the given weights).
PreparedProblem prepare_problem(const RunConfig& config, const moo::WeightPair& weight);

/// trajectory.{csv,json} in out_dir; one summary line on `log`.
int cmd_run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// One subdirectory per (Q, R, gamma0) cell plus summary.csv.
int cmd_grid(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// One subdirectory per weight plus archive.csv, hv_vs_iter.csv, hv_vs_time.csv.
int cmd_sweep_opf(const RunConfig& config, const std::filesystem::path& out_dir,
                  std::ostream& log);

/// Dataset CSV and a ground-truth JSON. kind is "logit" or "opf".
int cmd_gen(const RunConfig& config, const std::string& kind, const std::filesystem::path& out_dir,
            std::ostream& log);

/// Hypervolume of an archive.csv's raw points, renormalized with exclusions.
double archive_hypervolume(const std::filesystem::path& archive,
                           const std::vector<std::string>& exclusions, double margin);

/// Runs a command body, mapping exceptions to exit codes and messages on err.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace jolopt::cli
