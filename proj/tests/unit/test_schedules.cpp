#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "jolopt/error.hpp"
#include "jolopt/schedules.hpp"

using jolopt::clamp_beta0;
using jolopt::default_schedule;
using jolopt::Error;
using jolopt::ErrorCode;
using jolopt::StepSchedule;
using jolopt::validate_schedule;

namespace {

ErrorCode code_of(double g0, double b0, double a, double b, double tau) {
  try {
    (void)validate_schedule(g0, b0, a, b, tau);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;  // sentinel: accepted
}

std::string message_of(double a, double b, double tau) {
  try {
    (void)validate_schedule(1.0, 1.0, a, b, tau);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Schedule, AcceptsDefaultExponents) {
  const StepSchedule s = validate_schedule(1.0, 1.0, 1.0, 0.6, 0.75);
  EXPECT_TRUE(s.validated());
  EXPECT_DOUBLE_EQ(s.a(), 1.0);
  EXPECT_DOUBLE_EQ(s.b(), 0.6);
  EXPECT_DOUBLE_EQ(s.tau(), 0.75);
}

TEST(Schedule, RejectsBAboveATau) {
  EXPECT_EQ(code_of(1.0, 1.0, 1.0, 0.8, 0.75), ErrorCode::kScheduleInvalid);
  EXPECT_NE(message_of(1.0, 0.8, 0.75).find("b < a*tau"), std::string::npos);
}

TEST(Schedule, RejectsBoundaryExponents) {
  EXPECT_EQ(code_of(1.0, 1.0, 0.5, 0.4, 0.9), ErrorCode::kScheduleInvalid);
  EXPECT_NE(message_of(0.5, 0.4, 0.9).find("0.5 < a"), std::string::npos);
}

TEST(Schedule, RejectsNonpositiveBasesAndNonfinite) {
  EXPECT_EQ(code_of(0.0, 1.0, 1.0, 0.6, 0.75), ErrorCode::kScheduleInvalid);
  EXPECT_EQ(code_of(1.0, -1.0, 1.0, 0.6, 0.75), ErrorCode::kScheduleInvalid);
  EXPECT_EQ(code_of(NAN, 1.0, 1.0, 0.6, 0.75), ErrorCode::kScheduleInvalid);
  EXPECT_EQ(code_of(1.0, 1.0, 1.0, 0.6, INFINITY), ErrorCode::kScheduleInvalid);
}

TEST(Schedule, InclusiveUpperBounds) {
  EXPECT_NO_THROW(validate_schedule(1.0, 1.0, 1.0, 0.7, 0.75));
  // b = 1 needs a*tau > 1, impossible with tau < 1 and a <= 1
  EXPECT_EQ(code_of(1.0, 1.0, 1.0, 1.0, 0.99), ErrorCode::kScheduleInvalid);
}

TEST(Schedule, GammaValues) {
  const auto s = default_schedule(1.0, 1.0);
  EXPECT_DOUBLE_EQ(s.gamma_at(0), 1.0);
  EXPECT_DOUBLE_EQ(s.gamma_at(9), 0.1);
  EXPECT_DOUBLE_EQ(default_schedule(0.5, 1.0).gamma_at(4), 0.1);
}

TEST(Schedule, BetaValues) {
  const auto s = default_schedule(1.0, 1.0);
  EXPECT_DOUBLE_EQ(s.beta_at(0), 1.0);
  EXPECT_NEAR(s.beta_at(1023), 0.015625, 1e-15);
  const auto half = validate_schedule(1.0, 1.0, 1.0, 0.55, 0.75);
  EXPECT_NEAR(half.beta_at(3), std::pow(4.0, -0.55), 1e-15);
  const auto raw = StepSchedule::unchecked(1.0, 1.0, 1.0, 0.5, 0.75);
  EXPECT_DOUBLE_EQ(raw.beta_at(3), 0.5);
}

TEST(Schedule, StrictlyDecreasing) {
  const auto s = default_schedule(1.0, 1.0);
  for (std::uint64_t k = 0; k < 10000; ++k) {
    ASSERT_LT(s.gamma_at(k + 1), s.gamma_at(k));
    ASSERT_LT(s.beta_at(k + 1), s.beta_at(k));
  }
}

TEST(Schedule, SummabilityTails) {
  const auto s = default_schedule(1.0, 1.0);
  const double tau = s.tau();
  double g_head = 0, g2_head = 0, g2t_head = 0, b2_head = 0;
  double g_tail = 0, g2_tail = 0, g2t_tail = 0, b2_tail = 0;
  for (std::uint64_t k = 0; k < 1000000; ++k) {
    const double g = s.gamma_at(k);
    const double b = s.beta_at(k);
    const bool tail = k >= 100000;
    (tail ? g_tail : g_head) += g;
    (tail ? g2_tail : g2_head) += g * g;
    (tail ? g2t_tail : g2t_head) += std::pow(g, 2.0 - tau);
    (tail ? b2_tail : b2_head) += b * b;
  }
  // gamma: harmonic, the tail keeps adding ln(10)
  EXPECT_GT(g_tail, 2.0);
  EXPECT_LT(g2_tail, 0.01 * g2_head);
  EXPECT_LT(g2t_tail, 0.1 * g2t_head);  // exponent 1.25 converges slowly
  EXPECT_LT(b2_tail, 0.05 * b2_head);  // exponent 1.2
}

TEST(Schedule, GammaTauOverBetaVanishes) {
  const auto s = default_schedule(1.0, 1.0);
  auto ratio = [&](std::uint64_t k) { return std::pow(s.gamma_at(k), s.tau()) / s.beta_at(k); };
  for (std::uint64_t k = 1; k < 100000; k *= 2) EXPECT_LT(ratio(2 * k), ratio(k));
  // (k+1)^(a tau - b) decays like k^-0.15: about 0.126 at k = 10^6
  EXPECT_NEAR(ratio(999999), std::pow(1e6, -0.15), 1e-12);
}

TEST(Schedule, WithBasesRevalidates) {
  const auto s = default_schedule(1.0, 1.0);
  const auto t = s.with_bases(0.1, 0.2);
  EXPECT_DOUBLE_EQ(t.gamma0(), 0.1);
  EXPECT_DOUBLE_EQ(t.beta0(), 0.2);
  EXPECT_THROW((void)s.with_bases(-1.0, 0.2), Error);
}

TEST(Schedule, RandomViolationsOfEachInequality) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double tau = 0.6 + 0.39 * u(rng);
    EXPECT_EQ(code_of(1, 1, 0.5 * u(rng), 0.55, tau), ErrorCode::kScheduleInvalid);
    EXPECT_EQ(code_of(1, 1, 1.0 + u(rng), 0.55, tau), ErrorCode::kScheduleInvalid);
    EXPECT_EQ(code_of(1, 1, 1.0, 0.5 * u(rng), tau), ErrorCode::kScheduleInvalid);
    EXPECT_EQ(code_of(1, 1, 1.0, 1.0 + u(rng), tau), ErrorCode::kScheduleInvalid);
  }
}

TEST(ClampBeta0, Examples) {
  EXPECT_DOUBLE_EQ(clamp_beta0(1.0, 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(clamp_beta0(5.0, 1.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(clamp_beta0(0.1, 1.0, 2.0), 0.1);
}

TEST(ClampBeta0, RejectsBadConstants) {
  for (auto [mu, L] : {std::pair{0.0, 1.0}, std::pair{-1.0, 1.0}, std::pair{2.0, 1.0}}) {
    try {
      (void)clamp_beta0(1.0, mu, L);
      ADD_FAILURE() << "accepted mu=" << mu << " L=" << L;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConstantsInvalid);
    }
  }
}
