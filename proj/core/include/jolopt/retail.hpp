#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "jolopt/geometry.hpp"
#include "jolopt/solver.hpp"

namespace jolopt::retail {

using Matrix = Eigen::MatrixXd;

/// Observed fractions are clamped into [kFracFloor, 1 - kFracFloor] so that
/// log(1/y - 1) stays finite.
inline constexpr double kFracFloor = 1e-6;
/// demand() never returns exactly 0 or 1.
inline constexpr double kDemandFloor = 1e-12;

/// Historical prices and sales for N products over T periods.
///
/// sensitivity_sign s selects the utility U = s * theta0 * p + theta1:
///   s = -1 (default): demand falls with price, Theta is unconstrained;
///   s = +1: literal sign, Theta = {theta0 >= 0}.
struct RetailInstance {
  std::vector<std::string> product_ids;
  std::vector<long> periods;
  Matrix prices;  // N x T, positive
  Matrix sales;   // N x T, raw units
  Vector market_size;  // eta_i > 0
  Vector price_lower;  // rho_low_i
  Vector price_upper;  // rho_upp_i
  int sensitivity_sign = -1;
  Matrix sales_frac;  // clamp(sales / eta)

  Eigen::Index products() const noexcept { return prices.rows(); }
  Eigen::Index periods_count() const noexcept { return prices.cols(); }
};

/// Validates and fills sales_frac. When market_size is empty it defaults to
/// 1.05 * max observed sales per product (1 if a product never sold); when the
/// bounds are empty they default to [0.5 min_i, 1.5 max_i] of observed prices.
/// Throws Error(kInstanceInvalid).
RetailInstance make_instance(std::vector<std::string> product_ids, std::vector<long> periods,
                             Matrix prices, Matrix sales, Vector market_size = {},
                             Vector price_lower = {}, Vector price_upper = {},
                             int sensitivity_sign = -1);

/// Per-product (theta0 = price coefficient, theta1 = intercept); N x 2.
struct LogitParams {
  Matrix coef;

  Eigen::Index products() const noexcept { return coef.rows(); }
  Vector flatten() const;
  static LogitParams unflatten(const Vector& theta);
};

double utility(const LogitParams& params, Eigen::Index product, double price, int sign);

/// 1 / (1 + exp(-U)), computed without overflow and kept in
/// [kDemandFloor, 1 - kDemandFloor].
double demand(const LogitParams& params, Eigen::Index product, double price, int sign = -1);

/// sum_{i,t} -p_i^t * eta_i * d_i(p_i^t). Minimization form.
double revenue_objective(const RetailInstance& instance, const LogitParams& params,
                         const Matrix& prices);
Matrix revenue_gradient(const RetailInstance& instance, const LogitParams& params,
                        const Matrix& prices);

/// (1/(N T)) sum_{i,t} (U_i(p_i^t) - log(y/(1-y)))^2 + ridge * ||theta||^2.
double logit_loss(const RetailInstance& instance, const LogitParams& params, double ridge = 0.0);
LogitParams logit_loss_gradient(const RetailInstance& instance, const LogitParams& params,
                                double ridge = 0.0);

/// Per-product 2x2 ridge normal equations; ignores Theta.
LogitParams fit_closed_form(const RetailInstance& instance, double ridge = 0.0);

/// Extreme Hessian eigenvalues of logit_loss: (mu_h, L_h).
std::pair<double, double> loss_curvature(const RetailInstance& instance, double ridge);

/// Prices as an N x T matrix from the solver's flat vector (product-major)
/// and back.
Matrix unflatten_prices(const Vector& x, Eigen::Index products, Eigen::Index periods);
Vector flatten_prices(const Matrix& prices);

struct ProblemOptions {
  double ridge = 1e-6;
  NoiseModel noise{.kind = NoiseKind::kMinibatch, .stddev = 0.0, .batch_size = 32};
  /// Drop theta0 >= 0 even when sensitivity_sign = +1.
  bool free_theta = false;
  /// Report (mu_h, L_h) so the solver can clamp beta0.
  bool report_constants = true;
};

/// Outer variable: N*T prices in [rho_low_i, rho_upp_i]. Inner variable: 2N
/// logit parameters. Throws Error(kInstanceInvalid).
JointProblem build_problem(const RetailInstance& instance, const ProblemOptions& options = {});

}  // namespace jolopt::retail
