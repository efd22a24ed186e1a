#pragma once

#include <cstdint>

namespace jolopt {

/// Polynomially decaying step sizes for the outer (gamma) and inner (beta)
/// updates: gamma_k = gamma0 / (k+1)^a, beta_k = beta0 / (k+1)^b.
///
/// A schedule built through validate_schedule() satisfies
///   0.5 < a <= 1,  (2 - tau) a > 1,  0.5 < b <= 1,  b < a tau,  0 < tau < 1.
///
/// Instances are immutable and safe to share between concurrent runs.
class StepSchedule {
 public:
  double gamma0() const noexcept { return gamma0_; }
  double beta0() const noexcept { return beta0_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double tau() const noexcept { return tau_; }

  double gamma_at(std::uint64_t k) const noexcept;
  double beta_at(std::uint64_t k) const noexcept;

  /// Same exponents, different base steps. The result is validated again.
  StepSchedule with_bases(double gamma0, double beta0) const;

  /// Debug-only constructor that skips the admissibility checks (e.g. for
  /// constant steps with a = b = 0). Positivity of the bases is still required.
  static StepSchedule unchecked(double gamma0, double beta0, double a, double b, double tau);

  bool validated() const noexcept { return validated_; }

 private:
  friend StepSchedule validate_schedule(double, double, double, double, double);
  StepSchedule(double gamma0, double beta0, double a, double b, double tau, bool validated)
      : gamma0_(gamma0), beta0_(beta0), a_(a), b_(b), tau_(tau), validated_(validated) {}

  double gamma0_;
  double beta0_;
  double a_;
  double b_;
  double tau_;
  bool validated_;
};

/// Throws Error(kScheduleInvalid) naming the first violated inequality.
StepSchedule validate_schedule(double gamma0, double beta0, double a, double b, double tau);

/// Exponents (a, b, tau) = (1, 0.6, 0.75).
StepSchedule default_schedule(double gamma0 = 1.0, double beta0 = 1.0);

/// min(beta0, 2 mu_h / L_h^2). Throws Error(kConstantsInvalid) unless 0 < mu_h <= L_h.
double clamp_beta0(double beta0, double mu_h, double lipschitz_h);

}  // namespace jolopt
