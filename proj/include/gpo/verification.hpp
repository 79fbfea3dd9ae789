#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpo/expfam.hpp"
#include "gpo/gaussian.hpp"
#include "gpo/learners.hpp"
#include "gpo/problems.hpp"

namespace gpo {

/// Probability vector over the enumeration order of a space.
struct DistTable {
  SolutionSpace space;
  std::vector<double> p;
  double log_z = 0.0;  // ln of the normalizer when built from weights

  std::size_t size() const noexcept { return p.size(); }
  double operator[](std::size_t i) const { return p[i]; }
  double at(const Solution& s) const { return p[static_cast<std::size_t>(space.index_of(s))]; }
};

/// p(s) proportional to L(s) exp(-tau d(s)) by log-sum-exp over the space.
DistTable exact_target(const SolutionSpace& space, const GenerativeModel& base, const CostOracle& oracle, double tau,
                       std::uint64_t budget = kDefaultEnumerationBudget);

/// The model's own probabilities, exp(log_density).
DistTable model_table(const GenerativeModel& model, std::uint64_t budget = kDefaultEnumerationBudget);

/// Half the L1 distance. Throws SpaceMismatch.
double tv_distance(const DistTable& p, const DistTable& q);

/// Frequencies of the samples. Throws EmptySampleSet.
DistTable empirical_dist(std::span<const Solution> samples, const SolutionSpace& space);

struct CoverageReport {
  double K = 0.0;
  double tail_mass = 0.0;  // Pr_{s~p}[p(s)/L(s) > K]
  double max_ratio = 0.0;
  Solution argmax;
};

CoverageReport coverage_tail(const DistTable& p, const GenerativeModel& model, double K);

/// 2 (1 - 1/R)^M evaluated in log space.
double imh_tv_bound(double R, std::int64_t M);

struct TheoryParams {
  double beta = 0.5;
  double gamma = 0.1;
  double slack_sigmas = 3.0;

  void validate() const;
};

struct VerifyReport {
  std::string kind;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
};

struct MixingSetup {
  double tau = 0.0;
  std::int64_t M = 0;
  std::int64_t n_chains = 100000;
  double K = 0.0;  // typical-set threshold; 0 selects the exact max ratio
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double slack_sigmas = 3.0;
  std::int64_t min_chains = 10000;
};

/// Runs n_chains chains of M steps and compares the empirical final-state
/// distribution with the exact target. bound = imh_tv_bound(min(R, K), M) + e*eta.
VerifyReport check_mixing(const SolutionSpace& space, const ModelPtr& base, const CostOracle& oracle,
                          const GenerativeModel& proposal, const MixingSetup& setup);

struct ComponentSup {
  double x_star;
  double sup;
};

/// Closed-form maximizer and maximum of N(x; mu_i, 1) / N(x; mu_hat, s2_hat).
/// Throws VarianceTooSmall when s2_hat <= 1.
ComponentSup gmm_component_sup(const GaussianMixture& mix, const GaussianParams& fit, std::size_t i);

/// Ratio p(x) / L(x) for the mixture against a fitted Gaussian.
double gmm_ratio(const GaussianMixture& mix, const GaussianParams& fit, double x);

struct GmmSetup {
  std::int64_t m = 10000;
  std::uint64_t seed = 0;
  double C = 2.0;
  double window = 4.0;           // grid covers [-window*width, window*width]
  std::int64_t grid_points = 200001;
  std::int64_t min_samples = 10000;
};

/// measured = grid sup of p / L_MLE, bound = C * width * e^k. details
/// carries the per-component envelope and whether it dominates the grid sup.
VerifyReport gmm_coverage_check(const GaussianMixture& mix, const GmmSetup& setup);

struct ExpfamSetup {
  double eta0 = 0.0;
  std::int64_t m = 10000;
  double gamma = 0.1;
  std::int64_t trials = 200;
  std::uint64_t seed = 0;
  double min_frequency = 0.9;
  double moment_tolerance = 1e-10;
  unsigned threads = 0;
};

/// Second-moment proxy for a sub-Gaussian fit: max over a lambda grid of
/// 2 ln(mean exp(lambda (x - xbar))) / lambda^2.
double estimate_nu2(std::span<const double> samples);

/// measured = fraction of trials with typical-set tail <= e^{-m^gamma}.
VerifyReport expfam_tail_check(const ExpFamilySpec& spec, const ExpfamSetup& setup);

/// Mass outside W = {x : |R(x)| <= thr} with R(x) = slope*x + offset.
double typical_set_tail(const ExpFamilySpec& spec, double eta0, double slope, double offset, double thr);

}  // namespace gpo
