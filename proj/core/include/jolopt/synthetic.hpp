#pragma once

#include "jolopt/solver.hpp"

namespace jolopt::synthetic {

/// f(x) = (x+1)^2 / x on [lower, upper] (minimized at x = 1, f = 4), coupled
/// to nothing; h(theta) = sum_j c_j (theta_j - theta*_j)^2 with curvatures c_j
/// evenly spaced in [curvature_min, curvature_max].
struct FractionalOptions {
  Eigen::Index theta_dim = 1;
  double curvature_min = 1.0;
  double curvature_max = 1.0;
  /// Empty means theta*_j = 1 for every j.
  Vector theta_star;
  double lower = 0.5;
  double upper = 5.0;
  NoiseModel noise;  // kNone or kGaussian
  bool report_constants = true;
};

double fractional_value(double x);
double fractional_derivative(double x);

Vector curvatures(const FractionalOptions& options);

/// Throws Error(kConfigInvalid).
JointProblem make_fractional_problem(const FractionalOptions& options = {});

}  // namespace jolopt::synthetic
