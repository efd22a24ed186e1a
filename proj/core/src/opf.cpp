#include "jolopt/opf.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/Dense>

#include "jolopt/error.hpp"

namespace jolopt::opf {
namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kInstanceInvalid, msg); }

void check_dispatch(const OpfInstance& instance, const Vector& dispatch) {
  if (dispatch.size() != instance.outer_dim()) {
    std::ostringstream os;
    os << "dispatch has length " << dispatch.size() << ", expected " << instance.outer_dim();
    throw Error(ErrorCode::kDimMismatch, os.str());
  }
}

void check_theta(const OpfInstance& instance, const Vector& theta) {
  if (theta.size() != instance.inner_dim()) {
    throw Error(ErrorCode::kDimMismatch, "solar parameter vector length differs from F + 1");
  }
}

Matrix design_matrix(const OpfInstance& instance) {
  Matrix a(instance.steps(), instance.inner_dim());
  a.leftCols(instance.feature_count()) = instance.features;
  a.col(instance.feature_count()).setOnes();
  return a;
}

}  // namespace

OpfInstance make_instance(OpfInstance raw) {
  const Eigen::Index t = raw.demand.size();
  if (t < 1) invalid("instance needs at least one time step");
  if (raw.caps.rows() < 1 || raw.caps.cols() != t) invalid("caps must be N2 x T");
  if (raw.features.rows() != t) invalid("feature rows must equal the step count");
  if (raw.solar_true.size() != t) invalid("solar series length must equal the step count");
  if (!(raw.a1 > 0.0) || !(raw.a2 > 0.0)) invalid("cost coefficients a1, a2 must be positive");
  if (!(raw.ramp_delta > 0.0)) invalid("ramp delta must be positive");
  if (!raw.caps.allFinite() || (raw.caps.array() < 0.0).any()) invalid("capacities must be >= 0");
  if (!raw.demand.allFinite() || (raw.demand.array() < 0.0).any()) invalid("demand must be >= 0");
  if (!raw.solar_true.allFinite() || (raw.solar_true.array() < 0.0).any()) {
    invalid("solar generation must be >= 0");
  }
  if (!raw.features.allFinite()) invalid("features must be finite");
  if (!raw.timestamps.empty() && static_cast<Eigen::Index>(raw.timestamps.size()) != t) {
    invalid("timestamp count must equal the step count");
  }
  if (!(raw.eps_den > 0.0)) raw.eps_den = 1e-6 * raw.demand.sum();
  if (!(raw.eps_den > 0.0)) raw.eps_den = 1e-6;
  return raw;
}

Vector SolarModel::flatten() const {
  Vector theta(weights.size() + 1);
  theta.head(weights.size()) = weights;
  theta[weights.size()] = intercept;
  return theta;
}

SolarModel SolarModel::unflatten(const Vector& theta) {
  if (theta.size() < 1) throw Error(ErrorCode::kDimMismatch, "empty solar parameter vector");
  return SolarModel{.weights = theta.head(theta.size() - 1), .intercept = theta[theta.size() - 1]};
}

Vector predict(const OpfInstance& instance, const Vector& theta) {
  check_theta(instance, theta);
  const Eigen::Index f = instance.feature_count();
  return (instance.features * theta.head(f)).array() + theta[f];
}

Vector renewable_profile(const OpfInstance& instance, const Vector& theta) {
  return predict(instance, theta).cwiseMax(0.0);
}

double cost_objective(const OpfInstance& instance, const Vector& dispatch) {
  check_dispatch(instance, dispatch);
  return instance.a1 * dispatch.sum() + instance.a2 * dispatch.squaredNorm();
}

double penetration_objective(const OpfInstance& instance, const Vector& theta,
                             const Vector& dispatch) {
  check_dispatch(instance, dispatch);
  const double renewables = renewable_profile(instance, theta).sum();
  return renewables / std::max(instance.eps_den, dispatch.sum());
}

Scalarized scalarized_objective(const OpfInstance& instance, const Vector& theta,
                                const Vector& dispatch, double w1, double w2) {
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || std::abs(w1 + w2 - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "weights (" << w1 << ", " << w2 << ") must be nonnegative and sum to 1";
    throw Error(ErrorCode::kWeightsInvalid, os.str());
  }
  check_dispatch(instance, dispatch);
  const double renewables = renewable_profile(instance, theta).sum();
  const double total = dispatch.sum();
  const double denom = std::max(instance.eps_den, total);

  Scalarized out;
  out.value = w1 * cost_objective(instance, dispatch) - w2 * renewables / denom;
  out.gradient = (w1 * (instance.a1 + 2.0 * instance.a2 * dispatch.array())).matrix();
  if (total > instance.eps_den) {
    out.gradient.array() += w2 * renewables / (total * total);
  }
  return out;
}

std::vector<double> objective_pair(const OpfInstance& instance, const Vector& theta,
                                   const Vector& dispatch) {
  return {cost_objective(instance, dispatch), -penetration_objective(instance, theta, dispatch)};
}

double solar_loss(const OpfInstance& instance, const Vector& theta, double ridge) {
  const Vector resid = predict(instance, theta) - instance.solar_true;
  return resid.squaredNorm() / static_cast<double>(instance.steps()) + ridge * theta.squaredNorm();
}

Vector solar_loss_gradient(const OpfInstance& instance, const Vector& theta, double ridge) {
  const Vector resid = predict(instance, theta) - instance.solar_true;
  const double scale = 2.0 / static_cast<double>(instance.steps());
  const Eigen::Index f = instance.feature_count();
  Vector g(instance.inner_dim());
  g.head(f) = scale * (instance.features.transpose() * resid);
  g[f] = scale * resid.sum();
  g += 2.0 * ridge * theta;
  return g;
}

Vector fit_solar_closed_form(const OpfInstance& instance, double ridge) {
  const Matrix a = design_matrix(instance);
  const double t = static_cast<double>(instance.steps());
  Matrix lhs = a.transpose() * a;
  lhs.diagonal().array() += ridge * t;
  return lhs.ldlt().solve(a.transpose() * instance.solar_true);
}

std::pair<double, double> loss_curvature(const OpfInstance& instance, double ridge) {
  const Matrix a = design_matrix(instance);
  const Matrix hess = (2.0 / static_cast<double>(instance.steps())) * (a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hess, Eigen::EigenvaluesOnly);
  const double lo = std::max(0.0, eig.eigenvalues().minCoeff()) + 2.0 * ridge;
  const double hi = eig.eigenvalues().maxCoeff() + 2.0 * ridge;
  return {lo, hi};
}

FeasibleRegion dispatch_region(const OpfInstance& instance, const Vector& theta,
                               const ProjectionOptions& check) {
  const Eigen::Index n = instance.units();
  const Eigen::Index t = instance.steps();
  const Vector renewables = renewable_profile(instance, theta);

  std::vector<Halfspace> rows;
  rows.reserve(static_cast<std::size_t>(t + 2 * n * std::max<Eigen::Index>(t - 1, 0)));
  for (Eigen::Index k = 0; k < t; ++k) {
    const double residual = instance.demand[k] - renewables[k];
    if (residual > instance.caps.col(k).sum() + 1e-12) {
      std::ostringstream os;
      os << "demand " << instance.demand[k] << " at step " << k
         << " exceeds capacity plus predicted renewables";
      throw Error(ErrorCode::kInfeasibleRegion, os.str());
    }
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i * t + k;
    rows.emplace_back(std::move(idx), std::vector<double>(static_cast<std::size_t>(n), -1.0),
                      renewables[k] - instance.demand[k]);
  }
  const double d = instance.ramp_delta;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 1; k < t; ++k) {
      const Eigen::Index now = i * t + k;
      const Eigen::Index prev = now - 1;
      rows.emplace_back(std::vector<Eigen::Index>{now, prev}, std::vector<double>{1.0, -(1.0 + d)},
                        0.0);
      rows.emplace_back(std::vector<Eigen::Index>{now, prev}, std::vector<double>{-1.0, 1.0 - d},
                        0.0);
    }
  }

  Vector upper(n * t);
  for (Eigen::Index i = 0; i < n; ++i) upper.segment(i * t, t) = instance.caps.row(i).transpose();
  return FeasibleRegion(Vector::Zero(n * t), upper, std::move(rows), check);
}

JointProblem build_problem(const OpfInstance& instance, double w1, double w2,
                           const ProblemOptions& options) {
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || std::abs(w1 + w2 - 1.0) > 1e-9) {
    throw Error(ErrorCode::kWeightsInvalid, "weights must be nonnegative and sum to 1");
  }
  if (!(options.ridge > 0.0)) invalid("solar ridge weight must be positive");
  if (options.noise.kind == NoiseKind::kMinibatch && options.noise.batch_size < 1) {
    invalid("mini-batch size must be positive");
  }
  auto inst = std::make_shared<const OpfInstance>(make_instance(instance));
  const double ridge = options.ridge;
  const NoiseModel noise = options.noise;
  const ProjectionOptions projection = options.projection;

  JointProblem problem;
  problem.region_theta = FeasibleRegion::whole_space(inst->inner_dim());
  problem.region_x = dispatch_region(*inst, Vector::Zero(inst->inner_dim()), projection);
  problem.refresh_region_x = [inst, projection](const Vector& theta) {
    return dispatch_region(*inst, theta, projection);
  };
  problem.outer_value = [inst, w1, w2](const Vector& x, const Vector& theta) {
    return scalarized_objective(*inst, theta, x, w1, w2).value;
  };
  problem.outer_grad = [inst, w1, w2](const Vector& x, const Vector& theta) {
    return scalarized_objective(*inst, theta, x, w1, w2).gradient;
  };
  problem.inner_value = [inst, ridge](const Vector& theta) {
    return solar_loss(*inst, theta, ridge);
  };
  problem.inner_grad_exact = [inst, ridge](const Vector& theta) {
    return solar_loss_gradient(*inst, theta, ridge);
  };
  problem.inner_grad = [inst, ridge, noise](const Vector& theta, Rng& rng) -> Vector {
    if (noise.kind != NoiseKind::kMinibatch) {
      Vector g = solar_loss_gradient(*inst, theta, ridge);
      if (noise.kind == NoiseKind::kGaussian) add_gaussian_noise(g, noise.stddev, rng);
      return g;
    }
    const Eigen::Index f = inst->feature_count();
    std::uniform_int_distribution<Eigen::Index> pick(0, inst->steps() - 1);
    Vector g = 2.0 * ridge * theta;
    const double scale = 2.0 / static_cast<double>(noise.batch_size);
    for (std::size_t b = 0; b < noise.batch_size; ++b) {
      const Eigen::Index k = pick(rng);
      const double r = inst->features.row(k).dot(theta.head(f)) + theta[f] - inst->solar_true[k];
      g.head(f) += scale * r * inst->features.row(k).transpose();
      g[f] += scale * r;
    }
    return g;
  };
  if (options.report_constants) {
    const auto [mu, lip] = loss_curvature(*inst, ridge);
    problem.constants = ProblemConstants{.mu_h = mu,
                                          .lipschitz_h = lip,
                                          .lipschitz_f = {},
                                          .lipschitz_theta = {},
                                          .grad_bound = {}};
  }
  return problem;
}

}  // namespace jolopt::opf
