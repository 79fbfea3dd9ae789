#pragma once

#include <span>
#include <string>
#include <string_view>

#include "gpo/rng.hpp"

namespace gpo {

enum class Family { gaussian, bernoulli, exponential, poisson };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

/// One-parameter exponential family p(x|eta) = h(x) exp(eta*x - A(eta)),
/// together with a compact parameter window [eta_lo, eta_hi] on which the
/// variance A'' is bounded away from zero and infinity.
class ExpFamilySpec {
 public:
  static ExpFamilySpec gaussian(double sigma2 = 1.0, double eta_lo = -10.0, double eta_hi = 10.0);
  static ExpFamilySpec bernoulli(double eta_lo = -3.0, double eta_hi = 3.0);
  static ExpFamilySpec exponential(double eta_lo = -3.0, double eta_hi = -0.2);
  static ExpFamilySpec poisson(double eta_lo = -2.0, double eta_hi = 4.0);
  static ExpFamilySpec make(Family f);

  Family family() const noexcept { return family_; }
  double sigma2() const noexcept { return sigma2_; }
  double eta_lo() const noexcept { return eta_lo_; }
  double eta_hi() const noexcept { return eta_hi_; }
  double v_min() const noexcept { return v_min_; }
  double v_max() const noexcept { return v_max_; }

  /// Whether eta lies in the family's full natural-parameter space.
  bool natural(double eta) const noexcept;
  bool in_window(double eta) const noexcept { return eta >= eta_lo_ && eta <= eta_hi_; }

  double A(double eta) const;
  double mean(double eta) const;      // A'(eta)
  double variance(double eta) const;  // A''(eta)

  /// Closed-form inverse of A'. Throws MeanOutOfRange.
  double eta_from_mean(double mean) const;

  bool in_support(double x) const noexcept;
  double log_h(double x) const;

  /// Pr[X < a] + Pr[X > b] under p(.|eta); each side evaluated directly.
  double mass_outside(double eta, double a, double b) const;

  double sample(double eta, Rng& rng) const;

 private:
  ExpFamilySpec(Family f, double sigma2, double lo, double hi);

  Family family_;
  double sigma2_;
  double eta_lo_;
  double eta_hi_;
  double v_min_ = 0.0;
  double v_max_ = 0.0;
};

/// eta solving A'(eta) = mean(samples). Throws EmptySampleSet, MeanOutOfRange.
double mle_expfam(const ExpFamilySpec& spec, std::span<const double> samples);

/// ln h(x) + eta*x - A(eta). Throws UnsupportedPoint or BadRange.
double expfam_log_density(const ExpFamilySpec& spec, double eta, double x);

}  // namespace gpo
