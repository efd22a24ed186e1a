#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "jolopt/data.hpp"
#include "jolopt/error.hpp"
#include "jolopt/retail.hpp"
#include "oracles.hpp"

using namespace jolopt;
namespace oracle = jolopt::testing;
using namespace jolopt::retail;

namespace {

LogitParams params(std::initializer_list<std::pair<double, double>> rows) {
  LogitParams p;
  p.coef.resize(static_cast<Eigen::Index>(rows.size()), 2);
  Eigen::Index i = 0;
  for (const auto& [t0, t1] : rows) {
    p.coef(i, 0) = t0;
    p.coef(i, 1) = t1;
    ++i;
  }
  return p;
}

RetailInstance single(double price, double frac, int sign = -1) {
  return make_instance({}, {}, Matrix::Constant(1, 1, price), Matrix::Constant(1, 1, frac),
                       Vector::Ones(1), Vector::Constant(1, 0.5 * price),
                       Vector::Constant(1, 2.0 * price), sign);
}

RetailInstance random_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index t) {
  std::uniform_real_distribution<double> price(1.0, 5.0);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  Matrix p(n, t);
  Matrix s(n, t);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < t; ++k) {
      p(i, k) = price(rng);
      s(i, k) = frac(rng) * 10.0;
    }
  }
  return make_instance({}, {}, p, s, Vector::Constant(n, 10.0));
}

Vector random_theta(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Vector th(2 * n);
  for (Eigen::Index i = 0; i < th.size(); ++i) th[i] = u(rng);
  return th;
}

}  // namespace

TEST(Demand, Examples) {
  EXPECT_DOUBLE_EQ(demand(params({{0, 0}}), 0, 3.7), 0.5);
  EXPECT_NEAR(demand(params({{0, std::log(3.0)}}), 0, 1.0), 0.75, 1e-15);
  EXPECT_NEAR(demand(params({{1, 0}}), 0, std::log(9.0), -1), 0.1, 1e-15);
}

TEST(Demand, SaturatesInsideOpenInterval) {
  const auto hi = demand(params({{0, 800}}), 0, 1.0);
  const auto lo = demand(params({{0, -800}}), 0, 1.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_GT(lo, 0.0);
  EXPECT_DOUBLE_EQ(lo, kDemandFloor);
  EXPECT_TRUE(std::isfinite(demand(params({{0, 700}}), 0, 1.0)));
}

TEST(Revenue, Examples) {
  EXPECT_DOUBLE_EQ(revenue_objective(single(4, 0.5), params({{0, 0}}), Matrix::Constant(1, 1, 4)),
                   -2.0);

  const auto two = make_instance({}, {}, Matrix::Constant(2, 1, 3.0), Matrix::Constant(2, 1, 0.5),
                                 Vector::Ones(2), Vector::Constant(2, 1.0),
                                 Vector::Constant(2, 10.0));
  Matrix p(2, 1);
  p << 2, 6;
  EXPECT_DOUBLE_EQ(revenue_objective(two, params({{0, 0}, {0, 0}}), p), -4.0);

  const double ln9 = std::log(9.0);
  EXPECT_NEAR(revenue_objective(single(ln9, 0.5), params({{1, 0}}), Matrix::Constant(1, 1, ln9)),
              -ln9 * 0.1, 1e-15);
}

TEST(Revenue, DimMismatch) {
  try {
    (void)revenue_objective(single(2, 0.5), params({{0, 0}}), Matrix::Constant(2, 1, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimMismatch);
  }
}

TEST(RevenueGradient, Examples) {
  const auto inst = single(2, 0.5);
  const Matrix g = revenue_gradient(inst, params({{0, 0}}), Matrix::Constant(1, 1, 3.0));
  EXPECT_DOUBLE_EQ(g(0, 0), -0.5);
  const Matrix g0 = revenue_gradient(inst, params({{1, 0}}), Matrix::Constant(1, 1, 0.0));
  EXPECT_DOUBLE_EQ(g0(0, 0), -0.5);
}

TEST(RevenueGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng, dim(rng), dim(rng));
    const auto th = LogitParams::unflatten(random_theta(rng, inst.products()));
    const Vector x = flatten_prices(random_instance(rng, inst.products(), inst.periods_count()).prices);
    const auto f = [&](const Vector& v) {
      return revenue_objective(inst, th, unflatten_prices(v, inst.products(), inst.periods_count()));
    };
    const Vector analytic = flatten_prices(
        revenue_gradient(inst, th, unflatten_prices(x, inst.products(), inst.periods_count())));
    EXPECT_LE(oracle::relative_error(analytic, oracle::central_gradient(f, x)), 1e-5);
  }
}

TEST(LogitLoss, Examples) {
  EXPECT_DOUBLE_EQ(logit_loss(single(3, 0.5), params({{0, 0}})), 0.0);
  EXPECT_DOUBLE_EQ(logit_loss(single(2, 0.5, +1), params({{1, 1}})), 9.0);
  // same residual magnitude under the default sign: -2 + 1 = -1
  EXPECT_DOUBLE_EQ(logit_loss(single(2, 0.5), params({{1, 1}})), 1.0);
}

TEST(LogitLoss, RidgeTerm) {
  EXPECT_DOUBLE_EQ(logit_loss(single(3, 0.5), params({{1, 0}}), 0.5) -
                       logit_loss(single(3, 0.5), params({{1, 0}})),
                   0.5);
}

TEST(LogitLoss, ClosedFormBeatsRandomParams) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_instance(rng, 3, 8);
    const auto best = fit_closed_form(inst);
    const double floor = logit_loss(inst, best);
    for (int j = 0; j < 100; ++j) {
      EXPECT_LE(floor, logit_loss(inst, LogitParams::unflatten(random_theta(rng, 3))));
    }
  }
}

TEST(LogitLossGradient, ZeroAtClosedForm) {
  std::mt19937_64 rng(5);
  for (int sign : {-1, 1}) {
    auto inst = random_instance(rng, 4, 6);
    inst.sensitivity_sign = sign;
    const auto g = logit_loss_gradient(inst, fit_closed_form(inst));
    EXPECT_LE(g.coef.cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(LogitLossGradient, ZeroAtRidgeClosedForm) {
  std::mt19937_64 rng(6);
  const auto inst = random_instance(rng, 2, 5);
  const auto g = logit_loss_gradient(inst, fit_closed_form(inst, 0.3), 0.3);
  EXPECT_LE(g.coef.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LogitLossGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng, 3, 5);
    const Vector th = random_theta(rng, 3);
    const auto f = [&](const Vector& v) {
      return logit_loss(inst, LogitParams::unflatten(v), 1e-3);
    };
    const Vector analytic = logit_loss_gradient(inst, LogitParams::unflatten(th), 1e-3).flatten();
    EXPECT_LE(oracle::relative_error(analytic, oracle::central_gradient(f, th)), 1e-5);
  }
}

TEST(LogitLossGradient, DuplicatedPeriodsLeaveGradientUnchanged) {
  std::mt19937_64 rng(9);
  const auto inst = random_instance(rng, 3, 4);
  Matrix p2(3, 8);
  Matrix s2(3, 8);
  p2 << inst.prices, inst.prices;
  s2 << inst.sales, inst.sales;
  const auto doubled = make_instance({}, {}, p2, s2, inst.market_size);
  const auto th = LogitParams::unflatten(random_theta(rng, 3));
  const Matrix a = logit_loss_gradient(inst, th).coef;
  const Matrix b = logit_loss_gradient(doubled, th).coef;
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LossCurvature, MatchesDenseHessian) {
  std::mt19937_64 rng(10);
  const auto inst = random_instance(rng, 3, 6);
  const auto [mu, lip] = loss_curvature(inst, 1e-3);
  // Hessian of the quadratic by central differences of its gradient
  const Eigen::Index d = 6;
  Eigen::MatrixXd hess(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vector e = Vector::Zero(d);
    e[j] = 1.0;
    hess.col(j) = logit_loss_gradient(inst, LogitParams::unflatten(e), 1e-3).flatten() -
                  logit_loss_gradient(inst, LogitParams::unflatten(Vector::Zero(d)), 1e-3).flatten();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (hess + hess.transpose()));
  EXPECT_NEAR(mu, eig.eigenvalues().minCoeff(), 1e-10);
  EXPECT_NEAR(lip, eig.eigenvalues().maxCoeff(), 1e-10);
  EXPECT_GT(mu, 0.0);
}

TEST(Instance, DefaultsAndValidation) {
  Matrix p(1, 3);
  p << 2, 4, 3;
  Matrix s(1, 3);
  s << 10, 20, 0;
  const auto inst = make_instance({}, {}, p, s);
  EXPECT_DOUBLE_EQ(inst.market_size[0], 21.0);
  EXPECT_DOUBLE_EQ(inst.price_lower[0], 1.0);
  EXPECT_DOUBLE_EQ(inst.price_upper[0], 6.0);
  EXPECT_DOUBLE_EQ(inst.sales_frac(0, 2), kFracFloor);

  const auto expect_invalid = [](auto&& fn) {
    try {
      fn();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInstanceInvalid);
    }
  };
  expect_invalid([&] { make_instance({}, {}, -p, s); });
  expect_invalid([&] { make_instance({}, {}, p, -s); });
  expect_invalid([&] { make_instance({}, {}, p, s, {}, Vector::Constant(1, 5.0), Vector::Constant(1, 4.0)); });
  expect_invalid([&] { make_instance({}, {}, p, s, {}, {}, {}, 0); });
  expect_invalid([&] { make_instance({}, {}, Matrix(0, 0), Matrix(0, 0)); });
}

TEST(BuildProblem, Dimensions) {
  data::LogitGenSpec spec;
  const auto ds = data::generate_logit_dataset(spec);
  const auto p = build_problem(ds.instance);
  EXPECT_EQ(p.outer_dim(), 2500);
  EXPECT_EQ(p.inner_dim(), 100);

  spec.products = 44;
  spec.weeks = 98;
  const auto cohen = build_problem(data::generate_logit_dataset(spec).instance);
  EXPECT_EQ(cohen.outer_dim(), 4312);
  EXPECT_EQ(cohen.inner_dim(), 88);

  const auto toy = build_problem(single(2, 0.3));
  EXPECT_EQ(toy.outer_dim(), 1);
  EXPECT_EQ(toy.inner_dim(), 2);
}

TEST(BuildProblem, ThetaRegionBySignMode) {
  const auto literal = build_problem(single(2, 0.3, +1));
  Vector th(2);
  th << -1.0, -1.0;
  EXPECT_DOUBLE_EQ(literal.region_theta.project(th)[0], 0.0);
  EXPECT_DOUBLE_EQ(literal.region_theta.project(th)[1], -1.0);

  const auto freed = build_problem(single(2, 0.3, +1), {.free_theta = true});
  EXPECT_EQ(freed.region_theta.project(th), th);
  EXPECT_EQ(build_problem(single(2, 0.3)).region_theta.project(th), th);
}

TEST(BuildProblem, MinibatchGradientIsUnbiased) {
  std::mt19937_64 gen(12);
  const auto inst = random_instance(gen, 2, 3);
  const auto p = build_problem(inst, {.ridge = 1e-3, .noise = {.kind = NoiseKind::kMinibatch, .stddev = 0, .batch_size = 4}});
  const Vector th = random_theta(gen, 2);
  Rng rng(1);
  Vector mean = Vector::Zero(4);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) mean += p.inner_grad(th, rng);
  mean /= draws;
  EXPECT_LE((mean - p.inner_grad_exact(th)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(BuildProblem, NoiselessGradientIsExact) {
  std::mt19937_64 gen(13);
  const auto inst = random_instance(gen, 2, 3);
  const auto p = build_problem(inst, {.noise = {}});
  const Vector th = random_theta(gen, 2);
  Rng rng(0);
  EXPECT_EQ(p.inner_grad(th, rng), p.inner_grad_exact(th));
  ASSERT_TRUE(p.constants.has_value());
  EXPECT_GT(p.constants->mu_h, 0.0);
}

TEST(BuildProblem, InvalidOptions) {
  try {
    (void)build_problem(single(2, 0.3), {.ridge = -1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInstanceInvalid);
  }
}

TEST(Transform, NoiselessFitRecoversGenerator) {
  for (int sign : {-1, 1}) {
    data::LogitGenSpec spec;
    spec.products = 10;
    spec.weeks = 20;
    spec.sensitivity_sign = sign;
    spec.seed = 4;
    const auto ds = data::generate_logit_dataset(spec);
    const auto fit = fit_closed_form(ds.instance);
    EXPECT_LE((fit.coef - ds.truth.coef).cwiseAbs().maxCoeff(), 1e-6) << "sign " << sign;
    for (Eigen::Index i = 0; i < 10; ++i) {
      for (Eigen::Index t = 0; t < 20; ++t) {
        EXPECT_NEAR(demand(fit, i, ds.instance.prices(i, t), sign), ds.instance.sales_frac(i, t),
                    1e-6);
      }
    }
  }
}

TEST(Flatten, RoundTrip) {
  Matrix p(2, 3);
  p << 1, 2, 3, 4, 5, 6;
  const Vector x = flatten_prices(p);
  EXPECT_DOUBLE_EQ(x[3], 4.0);
  EXPECT_EQ(unflatten_prices(x, 2, 3), p);
  Vector th(4);
  th << 1, 2, 3, 4;
  EXPECT_EQ(LogitParams::unflatten(th).flatten(), th);
  EXPECT_DOUBLE_EQ(LogitParams::unflatten(th).coef(1, 0), 3.0);
}
