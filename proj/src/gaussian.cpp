#include "gpo/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gpo/errors.hpp"

namespace gpo {

double GaussianParams::log_density(double x) const {
  const double z = x - mean;
  return -z * z / (2.0 * variance) - 0.5 * std::log(2.0 * std::numbers::pi * variance);
}

GaussianParams mle_gaussian(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::TooFewSamples, "need at least two samples");
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mu = sum / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mu) * (x - mu);
  const double var = ss / n;
  if (!(var > 0.0)) throw Error(ErrorCode::DegenerateVariance, "all samples are equal");
  return {mu, var};
}

GaussianMixture::GaussianMixture(std::vector<double> means, double width) : means_(std::move(means)) {
  if (means_.empty()) throw Error(ErrorCode::BadRange, "mixture needs at least one component");
  double spread = 0.0;
  for (double m : means_) {
    if (!std::isfinite(m)) throw Error(ErrorCode::BadRange, "component means must be finite");
    spread = std::max(spread, std::abs(m));
  }
  width_ = width > 0.0 ? width : std::max(1.0, 2.0 * spread);
  if (spread > width_ / 2.0) throw Error(ErrorCode::BadRange, "component mean outside [-width/2, width/2]");
  const double k = static_cast<double>(means_.size());
  double sum = 0.0;
  for (double m : means_) sum += m;
  mean_ = sum / k;
  double ss = 0.0;
  for (double m : means_) ss += (m - mean_) * (m - mean_);
  variance_ = 1.0 + ss / k;
}

double GaussianMixture::density(double x) const {
  double total = 0.0;
  for (double m : means_) total += std::exp(-0.5 * (x - m) * (x - m));
  return total / (static_cast<double>(means_.size()) * std::sqrt(2.0 * std::numbers::pi));
}

double GaussianMixture::sample(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, means_.size() - 1);
  const double mu = means_[pick(rng)];
  return std::normal_distribution<double>(mu, 1.0)(rng);
}

}  // namespace gpo
