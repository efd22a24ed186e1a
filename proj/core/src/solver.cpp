#include "jolopt/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include "jolopt/log.hpp"

namespace jolopt {
namespace {

void require_finite(const Vector& g, const char* what) {
  if (!g.allFinite()) {
    throw Error(ErrorCode::kNonfiniteGradient, std::string(what) + " returned a non-finite value");
  }
}

void require_dim(const Vector& v, Eigen::Index dim, const char* what) {
  if (v.size() != dim) {
    std::ostringstream os;
    os << what << " has dimension " << v.size() << ", expected " << dim;
    throw Error(ErrorCode::kDimMismatch, os.str());
  }
}

}  // namespace

std::string_view to_string(StopReason reason) {
  return reason == StopReason::kIters ? "ITERS" : "TIME";
}

void SolverConfig::validate() const {
  if (outer_steps + inner_steps < 1) {
    throw Error(ErrorCode::kConfigInvalid, "Q + R must be at least 1");
  }
  if (!stop.max_global_iters && !stop.max_wall_time_s) {
    throw Error(ErrorCode::kConfigInvalid, "at least one stopping criterion is required");
  }
  if (stop.max_wall_time_s && !(*stop.max_wall_time_s > 0.0)) {
    throw Error(ErrorCode::kConfigInvalid, "max_wall_time must be positive");
  }
  if (record_every < 1) throw Error(ErrorCode::kConfigInvalid, "record_every must be >= 1");
  if (!(projection.tol > 0.0) || projection.max_sweeps < 1) {
    throw Error(ErrorCode::kConfigInvalid, "projection tolerance and sweep budget must be positive");
  }
}

Vector extragradient_pair(const JointProblem& problem, const FeasibleRegion& region,
                          const Vector& x, const Vector& theta, double gamma,
                          const ProjectionOptions& projection) {
  require_dim(x, region.dim(), "x");
  Vector g = problem.outer_grad(x, theta);
  require_dim(g, region.dim(), "outer gradient");
  require_finite(g, "outer gradient");
  const Vector x_half = region.project(x - gamma * g, projection);

  g = problem.outer_grad(x_half, theta);
  require_dim(g, region.dim(), "outer gradient");
  require_finite(g, "outer gradient");
  return region.project(x - gamma * g, projection);
}

Vector extragradient_pair(const JointProblem& problem, const Vector& x, const Vector& theta,
                          double gamma, const ProjectionOptions& projection) {
  return extragradient_pair(problem, problem.region_x, x, theta, gamma, projection);
}

Vector inner_step(const JointProblem& problem, const Vector& theta, double beta, Rng& rng,
                  const ProjectionOptions& projection) {
  require_dim(theta, problem.region_theta.dim(), "theta");
  const Vector g = problem.inner_grad(theta, rng);
  require_dim(g, problem.region_theta.dim(), "inner gradient");
  require_finite(g, "inner gradient");
  return problem.region_theta.project(theta - beta * g, projection);
}

Vector initial_outer(const FeasibleRegion& region_x, const ProjectionOptions& projection) {
  return region_x.project(region_x.anchor(), projection);
}

Vector initial_inner(const FeasibleRegion& region_theta, const ProjectionOptions& projection) {
  return region_theta.project(Vector::Zero(region_theta.dim()), projection);
}

Trajectory run_mslo(const JointProblem& problem, const SolverConfig& config) {
  config.validate();

  StepSchedule schedule = config.schedule;
  if (config.clamp_inner_step) {
    if (problem.constants) {
      const double beta0 =
          clamp_beta0(schedule.beta0(), problem.constants->mu_h, problem.constants->lipschitz_h);
      if (beta0 < schedule.beta0()) {
        std::ostringstream os;
        os << "beta0 clamped from " << schedule.beta0() << " to " << beta0;
        log::info(os.str());
        schedule = schedule.with_bases(schedule.gamma0(), beta0);
      }
    } else if (config.inner_steps > 0) {
      log::warn("problem reports no (mu_h, L_h); beta0 used as configured");
    }
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  Trajectory traj;
  traj.beta0_used = schedule.beta0();
  Rng rng(config.seed);

  Vector theta = initial_inner(problem.region_theta, config.projection);
  FeasibleRegion region =
      problem.refresh_region_x ? problem.refresh_region_x(theta) : problem.region_x;
  Vector x = initial_outer(region, config.projection);

  auto record = [&](std::uint64_t k, double t) {
    traj.records.push_back(TrajectoryRecord{.k = k,
                                            .wall_clock_s = t,
                                            .x = x,
                                            .theta = theta,
                                            .f = problem.outer_value(x, theta),
                                            .h = problem.inner_value(theta)});
  };
  auto finish = [&](std::uint64_t k, StopReason reason) {
    traj.reason = reason;
    traj.iterations = k;
    if (traj.records.empty() || traj.records.back().k != k) record(k, elapsed());
    traj.final_x = x;
    traj.final_theta = theta;
  };

  record(0, 0.0);
  std::uint64_t k = 0;
  try {
    for (;; ++k) {
      if (config.stop.max_global_iters && k >= *config.stop.max_global_iters) {
        finish(k, StopReason::kIters);
        break;
      }
      if (config.stop.max_wall_time_s && elapsed() >= *config.stop.max_wall_time_s) {
        finish(k, StopReason::kTime);
        break;
      }
      const double gamma = schedule.gamma_at(k);
      const double beta = schedule.beta_at(k);
      if (problem.refresh_region_x && k > 0) region = problem.refresh_region_x(theta);

      for (unsigned q = 0; q < config.outer_steps; ++q) {
        x = extragradient_pair(problem, region, x, theta, gamma, config.projection);
      }
      for (unsigned r = 0; r < config.inner_steps; ++r) {
        theta = inner_step(problem, theta, beta, rng, config.projection);
      }
      if ((k + 1) % config.record_every == 0) record(k + 1, elapsed());
    }
  } catch (const Error& e) {
    traj.iterations = k;
    traj.final_x = x;
    traj.final_theta = theta;
    throw RunFailure(e, std::move(traj));
  }
  return traj;
}

std::vector<GridOutcome> run_grid(const std::function<JointProblem(std::size_t)>& problem_factory,
                                  const std::vector<SolverConfig>& configs, bool parallel,
                                  unsigned jobs) {
  std::vector<GridOutcome> out(configs.size());
  auto run_one = [&](std::size_t i) {
    try {
      SolverConfig cfg = configs[i];
      cfg.seed = configs[i].seed + i;
      const JointProblem problem = problem_factory(i);
      out[i].trajectory = run_mslo(problem, cfg);
    } catch (const std::exception& e) {
      out[i].trajectory.reset();
      out[i].error = e.what();
    }
  };

  if (!parallel || configs.size() < 2) {
    for (std::size_t i = 0; i < configs.size(); ++i) run_one(i);
    return out;
  }

  unsigned n_threads = jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, configs.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(n_threads);
  for (unsigned w = 0; w < n_threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) run_one(i);
    });
  }
  workers.clear();  // joins
  return out;
}

void add_gaussian_noise(Vector& gradient, double stddev, Rng& rng) {
  if (stddev <= 0.0) return;
  std::normal_distribution<double> normal(0.0, stddev);
  for (Eigen::Index i = 0; i < gradient.size(); ++i) gradient[i] += normal(rng);
}

}  // namespace jolopt
