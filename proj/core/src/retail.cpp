#include "jolopt/retail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/Dense>

#include "jolopt/error.hpp"

namespace jolopt::retail {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kInstanceInvalid, msg); }

double log_odds(double y) { return std::log(y) - std::log1p(-y); }

void check_shape(const RetailInstance& instance, const LogitParams& params) {
  if (params.coef.rows() != instance.products() || params.coef.cols() != 2) {
    throw Error(ErrorCode::kDimMismatch, "logit parameters do not match the product count");
  }
}

void check_shape(const RetailInstance& instance, const Matrix& prices) {
  if (prices.rows() != instance.products() || prices.cols() != instance.periods_count()) {
    throw Error(ErrorCode::kDimMismatch, "price matrix does not match N x T");
  }
}

// Eigenvalues of [[p, q], [q, r]].
std::pair<double, double> sym2_eigen(double p, double q, double r) {
  const double mean = 0.5 * (p + r);
  const double rad = std::hypot(0.5 * (p - r), q);
  return {mean - rad, mean + rad};
}

}  // namespace

RetailInstance make_instance(std::vector<std::string> product_ids, std::vector<long> periods,
                             Matrix prices, Matrix sales, Vector market_size, Vector price_lower,
                             Vector price_upper, int sensitivity_sign) {
  const Eigen::Index n = prices.rows();
  const Eigen::Index t = prices.cols();
  if (n < 1 || t < 1) invalid("instance needs at least one product and one period");
  if (sales.rows() != n || sales.cols() != t) invalid("sales matrix shape differs from prices");
  if (sensitivity_sign != 1 && sensitivity_sign != -1) invalid("sensitivity sign must be +1 or -1");
  if (product_ids.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) product_ids.push_back("p" + std::to_string(i));
  }
  if (periods.empty()) {
    for (Eigen::Index k = 0; k < t; ++k) periods.push_back(static_cast<long>(k));
  }
  if (static_cast<Eigen::Index>(product_ids.size()) != n ||
      static_cast<Eigen::Index>(periods.size()) != t) {
    invalid("product or period labels do not match the matrix shape");
  }
  if (!prices.allFinite() || (prices.array() <= 0.0).any()) invalid("prices must be positive");
  if (!sales.allFinite() || (sales.array() < 0.0).any()) invalid("sales must be nonnegative");

  if (market_size.size() == 0) {
    market_size.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double peak = sales.row(i).maxCoeff();
      market_size[i] = peak > 0.0 ? 1.05 * peak : 1.0;
    }
  }
  if (market_size.size() != n || !market_size.allFinite() || (market_size.array() <= 0.0).any()) {
    invalid("market sizes must be positive, one per product");
  }
  if (price_lower.size() == 0) price_lower = 0.5 * prices.rowwise().minCoeff();
  if (price_upper.size() == 0) price_upper = 1.5 * prices.rowwise().maxCoeff();
  if (price_lower.size() != n || price_upper.size() != n) invalid("one price bound pair per product");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(price_lower[i] > 0.0) || !(price_lower[i] <= price_upper[i]) ||
        !std::isfinite(price_upper[i])) {
      std::ostringstream os;
      os << "price bounds for product " << i << " must satisfy 0 < low <= upp";
      invalid(os.str());
    }
  }

  RetailInstance out;
  out.product_ids = std::move(product_ids);
  out.periods = std::move(periods);
  out.sales_frac.resize(n, t);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < t; ++k) {
      out.sales_frac(i, k) = std::clamp(sales(i, k) / market_size[i], kFracFloor, 1.0 - kFracFloor);
    }
  }
  out.prices = std::move(prices);
  out.sales = std::move(sales);
  out.market_size = std::move(market_size);
  out.price_lower = std::move(price_lower);
  out.price_upper = std::move(price_upper);
  out.sensitivity_sign = sensitivity_sign;
  return out;
}

Vector LogitParams::flatten() const {
  Vector theta(2 * coef.rows());
  for (Eigen::Index i = 0; i < coef.rows(); ++i) {
    theta[2 * i] = coef(i, 0);
    theta[2 * i + 1] = coef(i, 1);
  }
  return theta;
}

LogitParams LogitParams::unflatten(const Vector& theta) {
  if (theta.size() % 2 != 0) throw Error(ErrorCode::kDimMismatch, "logit vector length is odd");
  LogitParams p;
  p.coef.resize(theta.size() / 2, 2);
  for (Eigen::Index i = 0; i < p.coef.rows(); ++i) {
    p.coef(i, 0) = theta[2 * i];
    p.coef(i, 1) = theta[2 * i + 1];
  }
  return p;
}

double utility(const LogitParams& params, Eigen::Index product, double price, int sign) {
  return sign * params.coef(product, 0) * price + params.coef(product, 1);
}

double demand(const LogitParams& params, Eigen::Index product, double price, int sign) {
  const double u = utility(params, product, price, sign);
  double d;
  if (u >= 0.0) {
    d = 1.0 / (1.0 + std::exp(-u));
  } else {
    const double e = std::exp(u);
    d = e / (1.0 + e);
  }
  return std::clamp(d, kDemandFloor, 1.0 - kDemandFloor);
}

double revenue_objective(const RetailInstance& instance, const LogitParams& params,
                         const Matrix& prices) {
  check_shape(instance, params);
  check_shape(instance, prices);
  double total = 0.0;
  for (Eigen::Index i = 0; i < prices.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index t = 0; t < prices.cols(); ++t) {
      row += prices(i, t) * demand(params, i, prices(i, t), instance.sensitivity_sign);
    }
    total -= instance.market_size[i] * row;
  }
  return total;
}

Matrix revenue_gradient(const RetailInstance& instance, const LogitParams& params,
                        const Matrix& prices) {
  check_shape(instance, params);
  check_shape(instance, prices);
  const int s = instance.sensitivity_sign;
  Matrix g(prices.rows(), prices.cols());
  for (Eigen::Index i = 0; i < prices.rows(); ++i) {
    const double slope = s * params.coef(i, 0);
    for (Eigen::Index t = 0; t < prices.cols(); ++t) {
      const double p = prices(i, t);
      const double d = demand(params, i, p, s);
      g(i, t) = -instance.market_size[i] * (d + p * slope * d * (1.0 - d));
    }
  }
  return g;
}

double logit_loss(const RetailInstance& instance, const LogitParams& params, double ridge) {
  check_shape(instance, params);
  const int s = instance.sensitivity_sign;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < instance.products(); ++i) {
    for (Eigen::Index t = 0; t < instance.periods_count(); ++t) {
      const double r = utility(params, i, instance.prices(i, t), s) -
                       log_odds(instance.sales_frac(i, t));
      sum += r * r;
    }
  }
  const double n_obs = static_cast<double>(instance.products() * instance.periods_count());
  return sum / n_obs + ridge * params.coef.squaredNorm();
}

LogitParams logit_loss_gradient(const RetailInstance& instance, const LogitParams& params,
                                double ridge) {
  check_shape(instance, params);
  const int s = instance.sensitivity_sign;
  const double scale =
      2.0 / static_cast<double>(instance.products() * instance.periods_count());
  LogitParams g;
  g.coef = 2.0 * ridge * params.coef;
  for (Eigen::Index i = 0; i < instance.products(); ++i) {
    for (Eigen::Index t = 0; t < instance.periods_count(); ++t) {
      const double p = instance.prices(i, t);
      const double r = utility(params, i, p, s) - log_odds(instance.sales_frac(i, t));
      g.coef(i, 0) += scale * r * s * p;
      g.coef(i, 1) += scale * r;
    }
  }
  return g;
}

LogitParams fit_closed_form(const RetailInstance& instance, double ridge) {
  const int s = instance.sensitivity_sign;
  const double n_obs = static_cast<double>(instance.products() * instance.periods_count());
  LogitParams out;
  out.coef.resize(instance.products(), 2);
  for (Eigen::Index i = 0; i < instance.products(); ++i) {
    Eigen::Matrix2d lhs = Eigen::Matrix2d::Zero();
    Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
    for (Eigen::Index t = 0; t < instance.periods_count(); ++t) {
      const Eigen::Vector2d a(s * instance.prices(i, t), 1.0);
      lhs += a * a.transpose();
      rhs += a * log_odds(instance.sales_frac(i, t));
    }
    lhs += ridge * n_obs * Eigen::Matrix2d::Identity();
    out.coef.row(i) = lhs.ldlt().solve(rhs).transpose();
  }
  return out;
}

std::pair<double, double> loss_curvature(const RetailInstance& instance, double ridge) {
  const double scale =
      2.0 / static_cast<double>(instance.products() * instance.periods_count());
  double mu = std::numeric_limits<double>::infinity();
  double lip = 0.0;
  for (Eigen::Index i = 0; i < instance.products(); ++i) {
    const double spp = instance.prices.row(i).squaredNorm();
    const double sp = instance.sensitivity_sign * instance.prices.row(i).sum();
    const double cnt = static_cast<double>(instance.periods_count());
    const auto [lo, hi] = sym2_eigen(scale * spp, scale * sp, scale * cnt);
    mu = std::min(mu, lo + 2.0 * ridge);
    lip = std::max(lip, hi + 2.0 * ridge);
  }
  return {std::max(mu, 0.0), lip};
}

Matrix unflatten_prices(const Vector& x, Eigen::Index products, Eigen::Index periods) {
  if (x.size() != products * periods) throw Error(ErrorCode::kDimMismatch, "price vector length");
  return Eigen::Map<const RowMajor>(x.data(), products, periods);
}

Vector flatten_prices(const Matrix& prices) {
  const RowMajor rm = prices;
  return Eigen::Map<const Vector>(rm.data(), rm.size());
}

JointProblem build_problem(const RetailInstance& instance, const ProblemOptions& options) {
  if (instance.products() < 1 || instance.periods_count() < 1) invalid("empty instance");
  if (instance.sales_frac.rows() != instance.products() ||
      instance.sales_frac.cols() != instance.periods_count()) {
    invalid("instance was not built through make_instance");
  }
  if (!(options.ridge >= 0.0)) invalid("ridge weight must be nonnegative");
  if (options.noise.kind == NoiseKind::kMinibatch && options.noise.batch_size < 1) {
    invalid("mini-batch size must be positive");
  }

  auto inst = std::make_shared<const RetailInstance>(instance);
  const Eigen::Index n = inst->products();
  const Eigen::Index t = inst->periods_count();
  const double ridge = options.ridge;
  const NoiseModel noise = options.noise;

  Vector lo(n * t);
  Vector hi(n * t);
  for (Eigen::Index i = 0; i < n; ++i) {
    lo.segment(i * t, t).setConstant(inst->price_lower[i]);
    hi.segment(i * t, t).setConstant(inst->price_upper[i]);
  }

  const double inf = std::numeric_limits<double>::infinity();
  Vector theta_lo = Vector::Constant(2 * n, -inf);
  if (inst->sensitivity_sign == 1 && !options.free_theta) {
    for (Eigen::Index i = 0; i < n; ++i) theta_lo[2 * i] = 0.0;
  }

  JointProblem problem;
  problem.region_x = FeasibleRegion::box(lo, hi);
  problem.region_theta = FeasibleRegion::box(theta_lo, Vector::Constant(2 * n, inf));

  problem.outer_value = [inst](const Vector& x, const Vector& theta) {
    return revenue_objective(*inst, LogitParams::unflatten(theta),
                             unflatten_prices(x, inst->products(), inst->periods_count()));
  };
  problem.outer_grad = [inst](const Vector& x, const Vector& theta) {
    return flatten_prices(revenue_gradient(
        *inst, LogitParams::unflatten(theta),
        unflatten_prices(x, inst->products(), inst->periods_count())));
  };
  problem.inner_value = [inst, ridge](const Vector& theta) {
    return logit_loss(*inst, LogitParams::unflatten(theta), ridge);
  };
  problem.inner_grad_exact = [inst, ridge](const Vector& theta) {
    return logit_loss_gradient(*inst, LogitParams::unflatten(theta), ridge).flatten();
  };
  problem.inner_grad = [inst, ridge, noise](const Vector& theta, Rng& rng) -> Vector {
    if (noise.kind != NoiseKind::kMinibatch) {
      Vector g = logit_loss_gradient(*inst, LogitParams::unflatten(theta), ridge).flatten();
      if (noise.kind == NoiseKind::kGaussian) add_gaussian_noise(g, noise.stddev, rng);
      return g;
    }
    // Uniform (i, t) pairs with replacement: unbiased for the mean loss.
    const Eigen::Index periods = inst->periods_count();
    const int s = inst->sensitivity_sign;
    std::uniform_int_distribution<Eigen::Index> pick(0, inst->products() * periods - 1);
    Vector g = 2.0 * ridge * theta;
    const double scale = 2.0 / static_cast<double>(noise.batch_size);
    for (std::size_t b = 0; b < noise.batch_size; ++b) {
      const Eigen::Index cell = pick(rng);
      const Eigen::Index i = cell / periods;
      const Eigen::Index k = cell % periods;
      const double p = inst->prices(i, k);
      const double r =
          s * theta[2 * i] * p + theta[2 * i + 1] - log_odds(inst->sales_frac(i, k));
      g[2 * i] += scale * r * s * p;
      g[2 * i + 1] += scale * r;
    }
    return g;
  };

  if (options.report_constants) {
    const auto [mu, lip] = loss_curvature(*inst, ridge);
    if (mu > 0.0) {
      problem.constants = ProblemConstants{.mu_h = mu,
                                           .lipschitz_h = lip,
                                           .lipschitz_f = {},
                                           .lipschitz_theta = {},
                                           .grad_bound = {}};
    }
  }
  return problem;
}

}  // namespace jolopt::retail
