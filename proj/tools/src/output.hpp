#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jolopt/moo.hpp"
#include "jolopt/solver.hpp"

namespace jolopt::cli {

/// %.17g, round-trip exact.
std::string fmt(double value);

/// Quotes a CSV cell when it holds a comma, quote or newline.
std::string csv_cell(const std::string& text);

/// k, wall_clock_s, f, h, x_0..x_{n-1}, theta_0..theta_{m-1}
void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path);
void write_trajectory_json(const Trajectory& trajectory, const std::filesystem::path& path);

/// Both files into dir (created if needed).
void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& dir);

void write_hv_curve(const std::vector<moo::CurvePoint>& curve, const std::string& axis,
                    const std::filesystem::path& path);

/// Minimal CSV reader for the files this tool writes: header plus rows,
/// quoted cells allowed.
struct CsvRows {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; throws Error(kBadHeader) naming it when absent.
  std::size_t column(const std::string& name) const;
};
CsvRows read_csv_rows(const std::filesystem::path& path);

}  // namespace jolopt::cli
