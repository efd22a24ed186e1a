#include "jolopt/synthetic.hpp"

#include <cmath>
#include <memory>

#include "jolopt/error.hpp"

namespace jolopt::synthetic {

double fractional_value(double x) { return (x + 1.0) * (x + 1.0) / x; }

double fractional_derivative(double x) { return (x + 1.0) * (x - 1.0) / (x * x); }

Vector curvatures(const FractionalOptions& options) {
  if (options.theta_dim == 1) return Vector::Constant(1, options.curvature_min);
  return Vector::LinSpaced(options.theta_dim, options.curvature_min, options.curvature_max);
}

JointProblem make_fractional_problem(const FractionalOptions& options) {
  if (options.theta_dim < 1) throw Error(ErrorCode::kConfigInvalid, "theta_dim must be >= 1");
  if (!(options.curvature_min > 0.0) || !(options.curvature_min <= options.curvature_max)) {
    throw Error(ErrorCode::kConfigInvalid, "curvatures must satisfy 0 < min <= max");
  }
  if (!(options.lower > 0.0) || !(options.lower < options.upper) || !std::isfinite(options.upper)) {
    throw Error(ErrorCode::kConfigInvalid, "fractional domain must satisfy 0 < lower < upper < inf");
  }
  if (options.noise.kind == NoiseKind::kMinibatch) {
    throw Error(ErrorCode::kConfigInvalid, "the synthetic problem has no data to mini-batch");
  }
  if (options.theta_star.size() != 0 && options.theta_star.size() != options.theta_dim) {
    throw Error(ErrorCode::kConfigInvalid, "theta_star length differs from theta_dim");
  }
  auto c = std::make_shared<const Vector>(curvatures(options));
  auto star = std::make_shared<const Vector>(options.theta_star.size() != 0
                                                 ? options.theta_star
                                                 : Vector::Ones(options.theta_dim));

  JointProblem problem;
  problem.region_x = FeasibleRegion::box(Vector::Constant(1, options.lower),
                                         Vector::Constant(1, options.upper));
  problem.region_theta = FeasibleRegion::whole_space(options.theta_dim);
  problem.outer_value = [](const Vector& x, const Vector&) { return fractional_value(x[0]); };
  problem.outer_grad = [](const Vector& x, const Vector&) {
    return Vector::Constant(1, fractional_derivative(x[0]));
  };
  problem.inner_value = [c, star](const Vector& theta) {
    return c->dot((theta - *star).cwiseAbs2());
  };
  problem.inner_grad_exact = [c, star](const Vector& theta) -> Vector {
    return 2.0 * c->cwiseProduct(theta - *star);
  };
  const NoiseModel noise = options.noise;
  problem.inner_grad = [c, star, noise](const Vector& theta, Rng& rng) -> Vector {
    Vector g = 2.0 * c->cwiseProduct(theta - *star);
    if (noise.kind == NoiseKind::kGaussian) add_gaussian_noise(g, noise.stddev, rng);
    return g;
  };
  if (options.report_constants) {
    problem.constants = ProblemConstants{.mu_h = 2.0 * c->minCoeff(),
                                         .lipschitz_h = 2.0 * c->maxCoeff(),
                                         .lipschitz_f = {},
                                         .lipschitz_theta = {},
                                         .grad_bound = {}};
  }
  return problem;
}

}  // namespace jolopt::synthetic
