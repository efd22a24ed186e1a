#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "jolopt/geometry.hpp"
#include "jolopt/solver.hpp"

namespace jolopt::opf {

using Matrix = Eigen::MatrixXd;

/// Continuous multi-period dispatch of N2 conventional units against demand
/// net of predicted solar. Dispatch vectors are flattened unit-major:
/// x[i * T + t] is unit i at step t.
struct OpfInstance {
  double a1 = 1.0;   // linear cost
  double a2 = 0.01;  // quadratic cost
  Matrix caps;       // N2 x T, cap_i^t
  Vector demand;     // T
  double ramp_delta = 0.2;
  Matrix features;   // T x F
  Vector solar_true; // T
  double eps_den = 0.0;  // denominator floor of the penetration ratio
  std::vector<std::string> timestamps;  // optional, ISO-8601

  Eigen::Index steps() const noexcept { return demand.size(); }
  Eigen::Index units() const noexcept { return caps.rows(); }
  Eigen::Index feature_count() const noexcept { return features.cols(); }
  Eigen::Index outer_dim() const noexcept { return units() * steps(); }
  Eigen::Index inner_dim() const noexcept { return feature_count() + 1; }
};

/// Validates shapes and signs; eps_den <= 0 is replaced by 1e-6 * sum(demand).
/// Throws Error(kInstanceInvalid).
OpfInstance make_instance(OpfInstance raw);

/// Affine solar model: theta = (weights_1..F, intercept).
struct SolarModel {
  Vector weights;
  double intercept = 0.0;

  Vector flatten() const;
  static SolarModel unflatten(const Vector& theta);
};

/// Raw affine predictions per step (may be negative).
Vector predict(const OpfInstance& instance, const Vector& theta);
/// max(0, prediction) per step; this is what enters balance and penetration.
Vector renewable_profile(const OpfInstance& instance, const Vector& theta);

/// f1 = sum_{i,t} a1 x + a2 x^2.
double cost_objective(const OpfInstance& instance, const Vector& dispatch);

/// f2 = sum_t renewable_t / max(eps_den, sum x).
double penetration_objective(const OpfInstance& instance, const Vector& theta,
                             const Vector& dispatch);

struct Scalarized {
  double value = 0.0;
  Vector gradient;
};

/// w1 f1 - w2 f2 and its x-gradient. The penetration numerator depends only
/// on theta, so only the denominator is differentiated (zero below the floor).
/// Throws Error(kWeightsInvalid) unless w1, w2 >= 0 and w1 + w2 = 1.
Scalarized scalarized_objective(const OpfInstance& instance, const Vector& theta,
                                const Vector& dispatch, double w1, double w2);

/// Minimization-oriented objective pair (f1, -f2).
std::vector<double> objective_pair(const OpfInstance& instance, const Vector& theta,
                                   const Vector& dispatch);

/// (1/T) sum_t (w.phi_t + c - y_t)^2 + ridge (||w||^2 + c^2).
double solar_loss(const OpfInstance& instance, const Vector& theta, double ridge);
Vector solar_loss_gradient(const OpfInstance& instance, const Vector& theta, double ridge);

/// Ridge normal equations for solar_loss.
Vector fit_solar_closed_form(const OpfInstance& instance, double ridge);

/// (mu_h, L_h) of solar_loss.
std::pair<double, double> loss_curvature(const OpfInstance& instance, double ridge);

/// Box [0, cap] with balance rows -sum_i x_i^t <= renewable_t - d^t and two
/// linearized ramp rows per (i, t >= 1). Throws Error(kInfeasibleRegion) when
/// demand exceeds capacity plus renewables at some step.
FeasibleRegion dispatch_region(const OpfInstance& instance, const Vector& theta,
                               const ProjectionOptions& check = {});

struct ProblemOptions {
  double ridge = 1e-4;
  NoiseModel noise{.kind = NoiseKind::kMinibatch, .stddev = 0.0, .batch_size = 32};
  bool report_constants = true;
  /// Used for the nonemptiness check of every rebuilt dispatch region.
  ProjectionOptions projection{.tol = 1e-8, .max_sweeps = 200000};
};

/// Dispatch as the outer variable with weights (w1, w2); the ridge solar model
/// as the inner one, Theta = R^{F+1}. The dispatch region is rebuilt from the
/// current theta once per global iteration.
JointProblem build_problem(const OpfInstance& instance, double w1, double w2,
                           const ProblemOptions& options = {});

}  // namespace jolopt::opf
