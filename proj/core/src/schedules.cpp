#include "jolopt/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jolopt/error.hpp"

namespace jolopt {
namespace {

[[noreturn]] void reject(const std::string& what, double gamma0, double beta0, double a, double b,
                         double tau) {
  std::ostringstream os;
  os << what << " (gamma0=" << gamma0 << ", beta0=" << beta0 << ", a=" << a << ", b=" << b
     << ", tau=" << tau << ")";
  throw Error(ErrorCode::kScheduleInvalid, os.str());
}

}  // namespace

double StepSchedule::gamma_at(std::uint64_t k) const noexcept {
  return gamma0_ / std::pow(static_cast<double>(k) + 1.0, a_);
}

double StepSchedule::beta_at(std::uint64_t k) const noexcept {
  return beta0_ / std::pow(static_cast<double>(k) + 1.0, b_);
}

StepSchedule StepSchedule::with_bases(double gamma0, double beta0) const {
  if (!validated_) return unchecked(gamma0, beta0, a_, b_, tau_);
  return validate_schedule(gamma0, beta0, a_, b_, tau_);
}

StepSchedule StepSchedule::unchecked(double gamma0, double beta0, double a, double b, double tau) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) reject("gamma0 > 0 violated", gamma0, beta0, a, b, tau);
  if (!(beta0 > 0.0) || !std::isfinite(beta0)) reject("beta0 > 0 violated", gamma0, beta0, a, b, tau);
  return StepSchedule(gamma0, beta0, a, b, tau, false);
}

StepSchedule validate_schedule(double gamma0, double beta0, double a, double b, double tau) {
  for (double v : {gamma0, beta0, a, b, tau}) {
    if (!std::isfinite(v)) reject("all parameters must be finite", gamma0, beta0, a, b, tau);
  }
  if (!(gamma0 > 0.0)) reject("gamma0 > 0 violated", gamma0, beta0, a, b, tau);
  if (!(beta0 > 0.0)) reject("beta0 > 0 violated", gamma0, beta0, a, b, tau);
  if (!(tau > 0.0)) reject("0 < tau violated", gamma0, beta0, a, b, tau);
  if (!(tau < 1.0)) reject("tau < 1 violated (a*tau < a)", gamma0, beta0, a, b, tau);
  if (!(a > 0.5)) reject("0.5 < a violated", gamma0, beta0, a, b, tau);
  if (!(a <= 1.0)) reject("a <= 1 violated", gamma0, beta0, a, b, tau);
  if (!(b > 0.5)) reject("0.5 < b violated", gamma0, beta0, a, b, tau);
  if (!(b <= 1.0)) reject("b <= 1 violated", gamma0, beta0, a, b, tau);
  if (!(b < a * tau)) reject("b < a*tau violated", gamma0, beta0, a, b, tau);
  if (!((2.0 - tau) * a > 1.0)) reject("(2 - tau)*a > 1 violated", gamma0, beta0, a, b, tau);
  return StepSchedule(gamma0, beta0, a, b, tau, true);
}

StepSchedule default_schedule(double gamma0, double beta0) {
  return validate_schedule(gamma0, beta0, 1.0, 0.6, 0.75);
}

double clamp_beta0(double beta0, double mu_h, double lipschitz_h) {
  if (!(mu_h > 0.0) || !std::isfinite(mu_h)) {
    throw Error(ErrorCode::kConstantsInvalid, "strong convexity modulus must be positive");
  }
  if (!(lipschitz_h >= mu_h) || !std::isfinite(lipschitz_h)) {
    throw Error(ErrorCode::kConstantsInvalid, "gradient Lipschitz constant must be >= modulus");
  }
  return std::min(beta0, 2.0 * mu_h / (lipschitz_h * lipschitz_h));
}

}  // namespace jolopt
