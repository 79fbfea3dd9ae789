#include "gpo/expfam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "gpo/errors.hpp"

namespace gpo {

namespace {

constexpr int kVarianceGrid = 1001;

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Pr[X <= k] and Pr[X > k] for Poisson(lambda), k >= 0 integer.
double poisson_cdf(double k, double lambda) { return boost::math::gamma_q(k + 1.0, lambda); }
double poisson_sf(double k, double lambda) { return boost::math::gamma_p(k + 1.0, lambda); }

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::bernoulli: return "bernoulli";
    case Family::exponential: return "exponential";
    case Family::poisson: return "poisson";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::gaussian, Family::bernoulli, Family::exponential, Family::poisson}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::ConfigError, "unknown family '" + std::string(name) + "'");
}

ExpFamilySpec::ExpFamilySpec(Family f, double sigma2, double lo, double hi)
    : family_(f), sigma2_(sigma2), eta_lo_(lo), eta_hi_(hi) {
  if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_)) throw Error(ErrorCode::BadRange, "variance must be positive");
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::BadRange, "parameter window must be a finite interval");
  }
  if (!natural(lo) || !natural(hi)) throw Error(ErrorCode::BadRange, "parameter window leaves the natural domain");
  v_min_ = std::numeric_limits<double>::infinity();
  v_max_ = 0.0;
  for (int i = 0; i < kVarianceGrid; ++i) {
    const double eta = lo + (hi - lo) * static_cast<double>(i) / (kVarianceGrid - 1);
    const double v = variance(eta);
    v_min_ = std::min(v_min_, v);
    v_max_ = std::max(v_max_, v);
  }
  if (!(v_min_ > 0.0) || !std::isfinite(v_max_)) {
    throw Error(ErrorCode::BadRange, "variance not bounded on the parameter window");
  }
}

ExpFamilySpec ExpFamilySpec::gaussian(double sigma2, double lo, double hi) {
  return ExpFamilySpec(Family::gaussian, sigma2, lo, hi);
}
ExpFamilySpec ExpFamilySpec::bernoulli(double lo, double hi) { return ExpFamilySpec(Family::bernoulli, 1.0, lo, hi); }
ExpFamilySpec ExpFamilySpec::exponential(double lo, double hi) {
  return ExpFamilySpec(Family::exponential, 1.0, lo, hi);
}
ExpFamilySpec ExpFamilySpec::poisson(double lo, double hi) { return ExpFamilySpec(Family::poisson, 1.0, lo, hi); }

ExpFamilySpec ExpFamilySpec::make(Family f) {
  switch (f) {
    case Family::gaussian: return gaussian();
    case Family::bernoulli: return bernoulli();
    case Family::exponential: return exponential();
    case Family::poisson: return poisson();
  }
  throw Error(ErrorCode::ConfigError, "unknown family");
}

bool ExpFamilySpec::natural(double eta) const noexcept {
  if (!std::isfinite(eta)) return false;
  return family_ != Family::exponential || eta < 0.0;
}

double ExpFamilySpec::A(double eta) const {
  switch (family_) {
    case Family::gaussian: return 0.5 * sigma2_ * eta * eta;
    case Family::bernoulli: return softplus(eta);
    case Family::exponential: return -std::log(-eta);
    case Family::poisson: return std::exp(eta);
  }
  return 0.0;
}

double ExpFamilySpec::mean(double eta) const {
  switch (family_) {
    case Family::gaussian: return sigma2_ * eta;
    case Family::bernoulli: return sigmoid(eta);
    case Family::exponential: return -1.0 / eta;
    case Family::poisson: return std::exp(eta);
  }
  return 0.0;
}

double ExpFamilySpec::variance(double eta) const {
  switch (family_) {
    case Family::gaussian: return sigma2_;
    case Family::bernoulli: {
      const double p = sigmoid(eta);
      return p * (1.0 - p);
    }
    case Family::exponential: return 1.0 / (eta * eta);
    case Family::poisson: return std::exp(eta);
  }
  return 0.0;
}

double ExpFamilySpec::eta_from_mean(double mu) const {
  auto bad = [&] {
    return Error(ErrorCode::MeanOutOfRange,
                 std::string(to_string(family_)) + " mean " + std::to_string(mu) + " has no natural parameter");
  };
  if (!std::isfinite(mu)) throw bad();
  switch (family_) {
    case Family::gaussian: return mu / sigma2_;
    case Family::bernoulli:
      if (!(mu > 0.0 && mu < 1.0)) throw bad();
      return std::log(mu / (1.0 - mu));
    case Family::exponential:
      if (!(mu > 0.0)) throw bad();
      return -1.0 / mu;
    case Family::poisson:
      if (!(mu > 0.0)) throw bad();
      return std::log(mu);
  }
  throw bad();
}

bool ExpFamilySpec::in_support(double x) const noexcept {
  if (!std::isfinite(x)) return false;
  switch (family_) {
    case Family::gaussian: return true;
    case Family::bernoulli: return x == 0.0 || x == 1.0;
    case Family::exponential: return x >= 0.0;
    case Family::poisson: return x >= 0.0 && x == std::floor(x);
  }
  return false;
}

double ExpFamilySpec::log_h(double x) const {
  switch (family_) {
    case Family::gaussian: return -x * x / (2.0 * sigma2_) - 0.5 * std::log(2.0 * std::numbers::pi * sigma2_);
    case Family::bernoulli: return 0.0;
    case Family::exponential: return 0.0;
    case Family::poisson: return -std::lgamma(x + 1.0);
  }
  return 0.0;
}

double ExpFamilySpec::mass_outside(double eta, double a, double b) const {
  if (a > b) return 1.0;
  double below = 0.0;
  double above = 0.0;
  switch (family_) {
    case Family::gaussian: {
      const double mu = mean(eta);
      const double scale = std::sqrt(2.0 * sigma2_);
      below = 0.5 * std::erfc((mu - a) / scale);
      above = 0.5 * std::erfc((b - mu) / scale);
      break;
    }
    case Family::bernoulli: {
      const double p = sigmoid(eta);
      if (a > 0.0) below += 1.0 - p;
      if (a > 1.0) below += p;
      if (b < 1.0) above += p;
      if (b < 0.0) above += 1.0 - p;
      break;
    }
    case Family::exponential: {
      const double rate = -eta;
      below = a > 0.0 ? -std::expm1(-rate * a) : 0.0;
      above = b >= 0.0 ? std::exp(-rate * b) : 1.0;
      break;
    }
    case Family::poisson: {
      const double lambda = std::exp(eta);
      const double k_below = std::ceil(a) - 1.0;  // largest integer < a
      if (k_below >= 0.0) below = std::isfinite(k_below) ? poisson_cdf(k_below, lambda) : 1.0;
      if (b < 0.0) {
        above = 1.0;
      } else if (std::isfinite(b)) {
        above = poisson_sf(std::floor(b), lambda);
      }
      break;
    }
  }
  return std::min(1.0, below + above);
}

double ExpFamilySpec::sample(double eta, Rng& rng) const {
  switch (family_) {
    case Family::gaussian: return std::normal_distribution<double>(mean(eta), std::sqrt(sigma2_))(rng);
    case Family::bernoulli: return std::bernoulli_distribution(mean(eta))(rng) ? 1.0 : 0.0;
    case Family::exponential: return std::exponential_distribution<double>(-eta)(rng);
    case Family::poisson: return static_cast<double>(std::poisson_distribution<long long>(std::exp(eta))(rng));
  }
  return 0.0;
}

double mle_expfam(const ExpFamilySpec& spec, std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleSet, "no samples to fit");
  double sum = 0.0;
  for (double x : samples) sum += x;
  return spec.eta_from_mean(sum / static_cast<double>(samples.size()));
}

double expfam_log_density(const ExpFamilySpec& spec, double eta, double x) {
  if (!spec.natural(eta)) throw Error(ErrorCode::BadRange, "eta outside the natural parameter space");
  if (!spec.in_support(x)) throw Error(ErrorCode::UnsupportedPoint, "x = " + std::to_string(x) + " not in support");
  return spec.log_h(x) + eta * x - spec.A(eta);
}

}  // namespace gpo
