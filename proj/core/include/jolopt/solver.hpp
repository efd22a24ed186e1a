#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jolopt/error.hpp"
#include "jolopt/geometry.hpp"
#include "jolopt/schedules.hpp"

namespace jolopt {

using Rng = std::mt19937_64;

/// How the inner stochastic gradient deviates from the exact one.
enum class NoiseKind { kNone, kGaussian, kMinibatch };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  double stddev = 0.0;          // kGaussian: per-coordinate std of w_k
  std::size_t batch_size = 32;  // kMinibatch: samples drawn with replacement
};

/// Optional problem constants. Only mu_h and L_h are consumed (by clamp_beta0);
/// the others are informational.
struct ProblemConstants {
  double mu_h = 0.0;
  double lipschitz_h = 0.0;
  std::optional<double> lipschitz_f;
  std::optional<double> lipschitz_theta;
  std::optional<double> grad_bound;
};

/// Outer objective f(x, theta) over X coupled to an inner learning loss h(theta)
/// over Theta. inner_grad returns grad h + w for a zero-mean w; with the noise
/// disabled it must agree with inner_grad_exact.
struct JointProblem {
  FeasibleRegion region_x;
  FeasibleRegion region_theta;
  std::function<Vector(const Vector& x, const Vector& theta)> outer_grad;
  std::function<double(const Vector& x, const Vector& theta)> outer_value;
  std::function<Vector(const Vector& theta, Rng& rng)> inner_grad;
  std::function<Vector(const Vector& theta)> inner_grad_exact;
  std::function<double(const Vector& theta)> inner_value;
  std::optional<ProblemConstants> constants;
  /// When set, X depends on theta and is rebuilt from theta_k at the start of
  /// every global iteration (before the outer sub-steps).
  std::function<FeasibleRegion(const Vector& theta)> refresh_region_x;

  Eigen::Index outer_dim() const noexcept { return region_x.dim(); }
  Eigen::Index inner_dim() const noexcept { return region_theta.dim(); }
};

struct StopCriteria {
  std::optional<std::uint64_t> max_global_iters;
  std::optional<double> max_wall_time_s;
};

struct SolverConfig {
  StepSchedule schedule = default_schedule();
  unsigned outer_steps = 1;  // Q
  unsigned inner_steps = 1;  // R
  StopCriteria stop{.max_global_iters = 1000, .max_wall_time_s = std::nullopt};
  std::uint64_t seed = 0;
  std::uint64_t record_every = 1;
  ProjectionOptions projection;
  /// Apply clamp_beta0 when the problem reports (mu_h, L_h).
  bool clamp_inner_step = true;

  /// Throws kConfigInvalid.
  void validate() const;
};

struct TrajectoryRecord {
  std::uint64_t k = 0;
  double wall_clock_s = 0.0;
  Vector x;
  Vector theta;
  double f = 0.0;
  double h = 0.0;
};

enum class StopReason { kIters, kTime };

std::string_view to_string(StopReason reason);

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  StopReason reason = StopReason::kIters;
  std::uint64_t iterations = 0;
  Vector final_x;
  Vector final_theta;
  /// beta0 actually used (after clamping).
  double beta0_used = 0.0;

  const TrajectoryRecord& last() const { return records.back(); }
};

/// Raised by run_mslo when a sub-step fails; carries everything recorded so far.
class RunFailure : public Error {
 public:
  RunFailure(const Error& cause, Trajectory partial)
      : Error(cause.code(), cause.detail()), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

/// One extragradient pair on X:
///   x_half = P_X(x - gamma grad_x f(x, theta))
///   x_next = P_X(x - gamma grad_x f(x_half, theta))
Vector extragradient_pair(const JointProblem& problem, const FeasibleRegion& region,
                          const Vector& x, const Vector& theta, double gamma,
                          const ProjectionOptions& projection = {});
Vector extragradient_pair(const JointProblem& problem, const Vector& x, const Vector& theta,
                          double gamma, const ProjectionOptions& projection = {});

/// theta_next = P_Theta(theta - beta (grad h(theta) + w)).
Vector inner_step(const JointProblem& problem, const Vector& theta, double beta, Rng& rng,
                  const ProjectionOptions& projection = {});

/// Starting iterates: projection of the box anchor of X and of zero onto Theta.
Vector initial_outer(const FeasibleRegion& region_x, const ProjectionOptions& projection = {});
Vector initial_inner(const FeasibleRegion& region_theta, const ProjectionOptions& projection = {});

/// Multi-step learning-optimization loop: per global iteration k, Q
/// extragradient pairs with gamma_k and the current theta_k, then R projected
/// stochastic gradient steps with beta_k. Deterministic given config.seed
/// (wall-clock fields aside). Throws RunFailure on a sub-step error.
Trajectory run_mslo(const JointProblem& problem, const SolverConfig& config);

struct GridOutcome {
  std::optional<Trajectory> trajectory;
  std::string error;  // empty on success

  bool ok() const noexcept { return trajectory.has_value(); }
};

/// Runs every config, config i with seed configs[i].seed + i. The factory
/// builds one problem per run. Failures are collected per cell; results are
/// in config order regardless of scheduling.
std::vector<GridOutcome> run_grid(const std::function<JointProblem(std::size_t)>& problem_factory,
                                  const std::vector<SolverConfig>& configs, bool parallel,
                                  unsigned jobs = 0);

/// Additive N(0, stddev^2 I) perturbation.
void add_gaussian_noise(Vector& gradient, double stddev, Rng& rng);

}  // namespace jolopt
