#include "gpo/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gpo/errors.hpp"
#include "gpo/sampler.hpp"

namespace gpo {

namespace {

double log_sum_exp(const std::vector<double>& x) {
  const double hi = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double v : x) s += std::exp(v - hi);
  return hi + std::log(s);
}

DistTable normalize(const SolutionSpace& space, std::vector<double> logw) {
  const double lz = log_sum_exp(logw);
  std::vector<double> p(logw.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(logw[i] - lz);
  return {space, std::move(p), lz};
}

std::uint64_t checked_size(const SolutionSpace& space, std::uint64_t budget) {
  const auto card = space.cardinality();
  if (!card || *card > budget) throw Error(ErrorCode::CardinalityExceeded, "space too large to enumerate");
  return *card;
}

}  // namespace

DistTable exact_target(const SolutionSpace& space, const GenerativeModel& base, const CostOracle& oracle, double tau,
                       std::uint64_t budget) {
  std::vector<double> logw(checked_size(space, budget));
  for_each_solution(space, budget, [&](std::uint64_t i, const Solution& s) {
    logw[i] = base.log_density(s) - tau * oracle(s);
  });
  return normalize(space, std::move(logw));
}

DistTable model_table(const GenerativeModel& model, std::uint64_t budget) {
  const auto& space = model.space();
  std::vector<double> p(checked_size(space, budget));
  for_each_solution(space, budget, [&](std::uint64_t i, const Solution& s) { p[i] = std::exp(model.log_density(s)); });
  return {space, std::move(p), 0.0};
}

double tv_distance(const DistTable& p, const DistTable& q) {
  if (!(p.space == q.space) || p.size() != q.size()) {
    throw Error(ErrorCode::SpaceMismatch, "tables are over different spaces");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * s);
}

DistTable empirical_dist(std::span<const Solution> samples, const SolutionSpace& space) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleSet, "no samples");
  std::vector<double> p(checked_size(space, kDefaultEnumerationBudget), 0.0);
  for (const auto& s : samples) p[static_cast<std::size_t>(space.index_of(s))] += 1.0;
  for (double& x : p) x /= static_cast<double>(samples.size());
  return {space, std::move(p), 0.0};
}

CoverageReport coverage_tail(const DistTable& p, const GenerativeModel& model, double K) {
  if (!(K > 0.0)) throw Error(ErrorCode::BadRange, "threshold must be positive");
  if (!(model.space() == p.space)) throw Error(ErrorCode::SpaceMismatch, "model and table spaces differ");
  CoverageReport r;
  r.K = K;
  r.max_ratio = -1.0;
  for_each_solution(p.space, kDefaultEnumerationBudget, [&](std::uint64_t i, const Solution& s) {
    const double ratio = p[i] > 0.0 ? std::exp(std::log(p[i]) - model.log_density(s)) : 0.0;
    if (ratio > K) r.tail_mass += p[i];
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.argmax = s;
    }
  });
  r.tail_mass = std::min(1.0, r.tail_mass);
  return r;
}

double imh_tv_bound(double R, std::int64_t M) {
  if (!(R >= 1.0)) throw Error(ErrorCode::BadRange, "ratio bound must be >= 1");
  if (M < 0) throw Error(ErrorCode::BadRange, "M must be non-negative");
  if (M == 0) return 2.0;
  return 2.0 * std::exp(static_cast<double>(M) * std::log1p(-1.0 / R));
}

void TheoryParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0) || !(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::BadRange, "beta and gamma must lie in (0, 1)");
  }
}

nlohmann::json VerifyReport::to_json() const {
  return nlohmann::json{{"kind", kind},     {"measured", measured}, {"bound", bound}, {"pass", pass},
                        {"params", params}, {"seed", seed},         {"details", details}};
}

// ---------------------------------------------------------------- mixing

VerifyReport check_mixing(const SolutionSpace& space, const ModelPtr& base, const CostOracle& oracle,
                          const GenerativeModel& proposal, const MixingSetup& setup) {
  if (setup.n_chains < setup.min_chains) {
    throw Error(ErrorCode::BadRange, "need at least " + std::to_string(setup.min_chains) + " chains");
  }
  if (!(proposal.space() == space)) throw Error(ErrorCode::SpaceMismatch, "proposal is over another space");
  const DistTable p = exact_target(space, *base, oracle, setup.tau);

  double R = 0.0;
  std::vector<double> ratio(p.size());
  for_each_solution(space, kDefaultEnumerationBudget, [&](std::uint64_t i, const Solution& s) {
    ratio[i] = std::exp(std::log(p[i]) - proposal.log_density(s));
    R = std::max(R, ratio[i]);
  });
  R = std::max(R, 1.0);
  const double K = setup.K > 0.0 ? setup.K : R;
  double eta = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (ratio[i] > K) eta += p[i];

  TargetSpec target{base, oracle, setup.tau, setup.tau, oracle.upper_bound()};
  const auto batch = draw_batch(proposal, target, setup.n_chains, setup.M, setup.seed, 0, setup.threads);
  const double measured = tv_distance(empirical_dist(batch.finals, space), p);
  const double slack = setup.slack_sigmas * std::sqrt(static_cast<double>(p.size()) / static_cast<double>(setup.n_chains));

  VerifyReport r;
  r.kind = "mixing";
  r.measured = measured;
  r.bound = imh_tv_bound(std::min(R, K), setup.M) + std::numbers::e * eta;
  r.pass = measured <= r.bound + slack;
  r.seed = setup.seed;
  r.params = {{"tau", setup.tau}, {"M", setup.M}, {"n_chains", setup.n_chains}, {"K", K}};
  r.details = {{"R", R}, {"eta", eta}, {"slack", slack}, {"space_size", p.size()},
               {"accept_rate", batch.accept_rate()}};
  return r;
}

// ---------------------------------------------------------------- gaussian mixture

ComponentSup gmm_component_sup(const GaussianMixture& mix, const GaussianParams& fit, std::size_t i) {
  if (!(fit.variance > 1.0)) throw Error(ErrorCode::VarianceTooSmall, "fitted variance must exceed 1");
  const double mu = mix.means().at(i);
  const double s2 = fit.variance;
  const double x_star = (s2 * mu - fit.mean) / (s2 - 1.0);
  const double E = (mu - fit.mean) * (mu - fit.mean) / (2.0 * (s2 - 1.0));
  return {x_star, std::sqrt(s2) * std::exp(E)};
}

double gmm_ratio(const GaussianMixture& mix, const GaussianParams& fit, double x) {
  const double q = (x - fit.mean) * (x - fit.mean) / (2.0 * fit.variance);
  double s = 0.0;
  for (double mu : mix.means()) s += std::exp(q - 0.5 * (x - mu) * (x - mu));
  return std::sqrt(fit.variance) * s / static_cast<double>(mix.k());
}

VerifyReport gmm_coverage_check(const GaussianMixture& mix, const GmmSetup& setup) {
  if (mix.variance() < 2.0) {
    throw Error(ErrorCode::RegimeViolation, "population variance " + std::to_string(mix.variance()) + " < 2");
  }
  if (setup.m < setup.min_samples) {
    throw Error(ErrorCode::RegimeViolation, "need at least " + std::to_string(setup.min_samples) + " samples");
  }
  if (setup.grid_points < 2) throw Error(ErrorCode::BadRange, "grid needs at least two points");
  Rng rng = make_stream(setup.seed, {0x6A55});
  std::vector<double> xs(static_cast<std::size_t>(setup.m));
  for (double& x : xs) x = mix.sample(rng);
  const GaussianParams fit = mle_gaussian(xs);
  if (!(fit.variance > 1.0)) throw Error(ErrorCode::RegimeViolation, "fitted variance <= 1");

  double envelope = 0.0;
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t i = 0; i < mix.k(); ++i) {
    const auto c = gmm_component_sup(mix, fit, i);
    envelope += c.sup;
    comps.push_back({{"x_star", c.x_star}, {"sup", c.sup}});
  }
  envelope /= static_cast<double>(mix.k());

  const double lo = -setup.window * mix.width();
  const double hi = setup.window * mix.width();
  double numeric = 0.0;
  double argmax = lo;
  for (std::int64_t j = 0; j < setup.grid_points; ++j) {
    const double x = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(setup.grid_points - 1);
    const double r = gmm_ratio(mix, fit, x);
    if (r > numeric) numeric = r, argmax = x;
  }

  VerifyReport r;
  r.kind = "gmm";
  r.measured = numeric;
  r.bound = setup.C * mix.width() * std::exp(static_cast<double>(mix.k()));
  r.pass = numeric <= r.bound;
  r.seed = setup.seed;
  r.params = {{"means", mix.means()}, {"width", mix.width()}, {"m", setup.m}, {"C", setup.C},
              {"window", setup.window}, {"grid_points", setup.grid_points}};
  r.details = {{"mu_hat", fit.mean},
               {"sigma2_hat", fit.variance},
               {"population_variance", mix.variance()},
               {"envelope", envelope},
               {"envelope_dominates", envelope * (1.0 + 1e-12) >= numeric},
               {"argmax", argmax},
               {"components", comps}};
  return r;
}

// ---------------------------------------------------------------- exponential families

double estimate_nu2(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::TooFewSamples, "need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= n;
  if (!(var > 0.0)) return 0.0;
  const double sd = std::sqrt(var);
  constexpr int kGrid = 20;
  double nu2 = 0.0;
  for (int k = 1; k <= kGrid; ++k) {
    for (double sign : {-1.0, 1.0}) {
      const double lambda = sign * static_cast<double>(k) / (kGrid * sd);
      std::vector<double> e(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) e[i] = lambda * (samples[i] - mean);
      const double log_mgf = log_sum_exp(e) - std::log(n);
      nu2 = std::max(nu2, 2.0 * log_mgf / (lambda * lambda));
    }
  }
  return nu2;
}

double typical_set_tail(const ExpFamilySpec& spec, double eta0, double slope, double offset, double thr) {
  if (slope == 0.0) return std::abs(offset) <= thr ? 0.0 : 1.0;
  double a = (-thr - offset) / slope;
  double b = (thr - offset) / slope;
  if (a > b) std::swap(a, b);
  return spec.mass_outside(eta0, a, b);
}

VerifyReport expfam_tail_check(const ExpFamilySpec& spec, const ExpfamSetup& setup) {
  if (setup.m < 2 || setup.trials < 1) throw Error(ErrorCode::BadRange, "need m >= 2 and trials >= 1");
  if (!(setup.gamma > 0.0 && setup.gamma < 1.0)) throw Error(ErrorCode::BadRange, "gamma must lie in (0, 1)");
  const double eta0 = setup.eta0;
  if (!(eta0 > spec.eta_lo() && eta0 < spec.eta_hi())) {
    throw Error(ErrorCode::RegimeViolation, "eta0 is not interior to the parameter window");
  }
  const double m = static_cast<double>(setup.m);
  const double eps = std::pow(m, -1.0 / 3.0);
  const double radius = std::min(eta0 - spec.eta_lo(), spec.eta_hi() - eta0);
  if (eps / spec.v_min() > radius) {
    throw Error(ErrorCode::RegimeViolation, "m too small: m^{-1/3}/v_min exceeds the window radius");
  }
  const double thr = std::pow(m, -1.0 / 3.0 + setup.gamma);
  const double tail_bound = std::exp(-std::pow(m, setup.gamma));
  const double mu0 = spec.mean(eta0);

  struct Trial {
    double mean, eta_hat, moment_error, tail;
    double nu2 = 0.0;
  };
  std::vector<Trial> trials(static_cast<std::size_t>(setup.trials));
  parallel_for(trials.size(), setup.threads, [&](std::size_t t) {
    Rng rng = make_stream(setup.seed, {0xE7F, t});
    std::vector<double> xs(static_cast<std::size_t>(setup.m));
    for (double& x : xs) x = spec.sample(eta0, rng);
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double xbar = sum / m;
    const double eta_hat = mle_expfam(spec, xs);
    Trial tr{xbar, eta_hat, std::abs(spec.mean(eta_hat) - xbar), 0.0};
    tr.tail = typical_set_tail(spec, eta0, eta0 - eta_hat, spec.A(eta_hat) - spec.A(eta0), thr);
    if (t == 0) tr.nu2 = estimate_nu2(xs);
    trials[t] = tr;
  });

  std::int64_t tail_ok = 0, conc_ok = 0;
  double max_moment = 0.0, max_tail = 0.0, max_dev = 0.0;
  for (const auto& tr : trials) {
    tail_ok += tr.tail <= tail_bound ? 1 : 0;
    conc_ok += std::abs(tr.mean - mu0) <= eps ? 1 : 0;
    max_moment = std::max(max_moment, tr.moment_error);
    max_tail = std::max(max_tail, tr.tail);
    max_dev = std::max(max_dev, std::abs(tr.eta_hat - eta0));
  }
  const double n = static_cast<double>(trials.size());
  const double nu2 = trials.front().nu2;
  const bool moments_ok = max_moment <= setup.moment_tolerance;

  VerifyReport r;
  r.kind = "expfam";
  r.measured = static_cast<double>(tail_ok) / n;
  r.bound = setup.min_frequency;
  r.pass = r.measured >= r.bound && moments_ok;
  r.seed = setup.seed;
  r.params = {{"family", std::string(to_string(spec.family()))}, {"eta0", eta0}, {"m", setup.m},
              {"gamma", setup.gamma}, {"trials", setup.trials}};
  r.details = {{"tail_threshold", tail_bound},
               {"typical_radius", thr},
               {"max_tail", max_tail},
               {"concentration_frequency", static_cast<double>(conc_ok) / n},
               {"concentration_radius", eps},
               {"nu2", nu2},
               {"concentration_bound", nu2 > 0.0 ? 2.0 * std::exp(-std::cbrt(m) / (2.0 * nu2)) : 0.0},
               {"max_moment_error", max_moment},
               {"moments_ok", moments_ok},
               {"max_abs_eta_error", max_dev},
               {"v_min", spec.v_min()},
               {"v_max", spec.v_max()}};
  return r;
}

}  // namespace gpo
