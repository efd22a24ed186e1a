#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "jolopt/data.hpp"
#include "jolopt/moo.hpp"
#include "jolopt/solver.hpp"

namespace jolopt::cli {

enum class ProblemKind { kRetail, kOpf, kSynthetic };

std::string_view to_string(ProblemKind kind);

struct ScheduleFields {
  double gamma0 = 1.0;
  double beta0 = 1.0;
  double a = 1.0;
  double b = 0.6;
  double tau = 0.75;
};

struct GridAxes {
  std::vector<std::pair<unsigned, unsigned>> out_in;
  std::vector<double> gamma0;
};

/// Everything one invocation needs. Built from a JSON document with unknown
/// keys rejected, then flag overrides.
struct RunConfig {
  ProblemKind problem = ProblemKind::kRetail;

  // data: either a CSV (plus optional sidecar for retail) or a generator
  std::optional<std::filesystem::path> data_path;
  std::optional<std::filesystem::path> sidecar_path;
  data::LogitGenSpec logit_gen;
  data::OpfGenSpec opf_gen;

  ScheduleFields schedule;
  unsigned outer_steps = 15;
  unsigned inner_steps = 15;
  std::optional<std::uint64_t> max_iters;
  std::optional<double> max_wall_time_s;
  std::uint64_t seed = 0;
  std::uint64_t record_every = 1;
  ProjectionOptions projection;
  bool clamp_inner_step = true;
  NoiseModel noise{.kind = NoiseKind::kMinibatch, .stddev = 0.0, .batch_size = 32};
  std::optional<double> ridge;

  // retail
  int sensitivity_sign = -1;
  bool free_theta = false;

  // opf
  double a1 = 1.0;
  double a2 = 0.01;
  double ramp_delta = 0.2;
  moo::WeightPair weight{.w1 = 0.5, .w2 = 0.5};
  std::vector<moo::WeightPair> weights;  // empty: 11 uniform pairs
  std::vector<std::string> exclusions;

  // synthetic-test
  Eigen::Index theta_dim = 1;
  double curvature_min = 1.0;
  double curvature_max = 1.0;

  GridAxes grid;
  unsigned jobs = 0;  // 0: hardware concurrency

  /// Solver settings for one run; schedule validated here.
  SolverConfig solver_config() const;
};

/// Parses and validates. Absent budgets default per problem (retail 500
/// iterations / 30 s, opf 100 / 600 s, synthetic-test 5000 / none); an
/// explicit null disables one. Throws Error(kConfigInvalid) or the schedule
/// error.
RunConfig parse_config(const nlohmann::json& document);

/// Reads a JSON file (empty path: "{}"), applies "key.path=value" overrides
/// and parses. Values are read as JSON when they parse as JSON, otherwise as
/// strings. default_problem fills in "problem" when neither source sets it.
RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::vector<std::string>& overrides,
                      const std::optional<std::string>& default_problem = std::nullopt);

/// Sets a dotted key inside a JSON object, creating intermediate objects.
void apply_override(nlohmann::json& document, const std::string& assignment);

}  // namespace jolopt::cli
