#pragma once

#include <span>
#include <vector>

#include "gpo/rng.hpp"

namespace gpo {

struct GaussianParams {
  double mean = 0.0;
  double variance = 1.0;

  double log_density(double x) const;
};

/// Sample mean and biased (1/m) variance. Throws TooFewSamples, DegenerateVariance.
GaussianParams mle_gaussian(std::span<const double> samples);

/// Equal-weight mixture of unit-variance Gaussians.
class GaussianMixture {
 public:
  /// width <= 0 selects max(1, 2 max|mu_i|). Throws BadRange if some
  /// |mu_i| > width / 2.
  explicit GaussianMixture(std::vector<double> means, double width = 0.0);

  std::size_t k() const noexcept { return means_.size(); }
  const std::vector<double>& means() const noexcept { return means_; }
  double width() const noexcept { return width_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

  double density(double x) const;
  double sample(Rng& rng) const;

 private:
  std::vector<double> means_;
  double width_;
  double mean_;
  double variance_;
};

}  // namespace gpo
