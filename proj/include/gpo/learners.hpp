#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gpo/rng.hpp"
#include "gpo/solution_space.hpp"

namespace gpo {

/// A distribution over a SolutionSpace that can be sampled and whose exact
/// natural-log density is available.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual const SolutionSpace& space() const noexcept = 0;
  virtual Solution sample(Rng& rng) const = 0;
  virtual double log_density(const Solution& s) const = 0;
};

using ModelPtr = std::shared_ptr<const GenerativeModel>;

/// Probability vector with a cumulative table for inverse-CDF sampling.
class Categorical {
 public:
  Categorical() = default;
  explicit Categorical(std::vector<double> probs);

  static Categorical uniform(std::size_t n);

  std::size_t size() const noexcept { return probs_.size(); }
  double prob(std::size_t k) const { return probs_[k]; }
  double log_prob(std::size_t k) const { return log_probs_[k]; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  Token draw(Rng& rng) const;

 private:
  std::vector<double> probs_;
  std::vector<double> log_probs_;
  std::vector<double> cdf_;
};

struct FitOptions {
  double alpha = 1.0;    // additive smoothing
  double lambda = 0.5;   // warm-start weight
  bool share_positions = false;  // categorical only: one vector tied across positions
  int order = 1;         // n-gram only
};

/// Independent per-position categorical distributions.
class CategoricalModel final : public GenerativeModel {
 public:
  CategoricalModel(SolutionSpace space, std::vector<std::vector<double>> probs, double alpha = 0.0);

  static CategoricalModel uniform(SolutionSpace space);
  static CategoricalModel point_mass(SolutionSpace space, const Solution& s);

  const SolutionSpace& space() const noexcept override { return space_; }
  Solution sample(Rng& rng) const override;
  double log_density(const Solution& s) const override;

  const std::vector<double>& probabilities(std::size_t position) const { return dists_.at(position).probs(); }
  double smoothing() const noexcept { return alpha_; }

 private:
  SolutionSpace space_;
  std::vector<Categorical> dists_;
  double alpha_;
};

/// Per-position conditionals P(token_i | previous order-1 tokens). Contexts
/// absent from the table use the position's fallback distribution (uniform
/// for a fresh fit).
class NGramModel final : public GenerativeModel {
 public:
  using Context = std::vector<Token>;
  using Table = std::map<Context, Categorical>;

  NGramModel(SolutionSpace space, int order, std::vector<Categorical> fallback, std::vector<Table> tables,
             double alpha = 0.0);

  /// Same distribution as a categorical model, expressed with empty tables.
  static NGramModel from_categorical(const CategoricalModel& m, int order);

  const SolutionSpace& space() const noexcept override { return space_; }
  Solution sample(Rng& rng) const override;
  double log_density(const Solution& s) const override;

  int order() const noexcept { return order_; }
  double smoothing() const noexcept { return alpha_; }
  const Categorical& conditional(std::size_t position, const Context& ctx) const;
  const Categorical& fallback(std::size_t position) const { return fallback_.at(position); }
  const Table& table(std::size_t position) const { return tables_.at(position); }
  Context context_of(const Solution& s, std::size_t position) const;

 private:
  SolutionSpace space_;
  int order_;
  std::vector<Categorical> fallback_;
  std::vector<Table> tables_;
  double alpha_;
};

/// Smoothed MLE per position, (count + alpha) / (n + alpha * A), optionally
/// mixed as lambda * warm_start + (1 - lambda) * estimate.
CategoricalModel fit_categorical(std::span<const Solution> samples, const SolutionSpace& space,
                                 const FitOptions& opts, const CategoricalModel* warm_start = nullptr);

NGramModel fit_ngram(std::span<const Solution> samples, const SolutionSpace& space, const FitOptions& opts,
                     const NGramModel* warm_start = nullptr);

enum class LearnerKind { categorical, ngram };

struct LearnerSettings {
  LearnerKind kind = LearnerKind::categorical;
  FitOptions fit;
};

/// Refit dispatcher used by the drivers. A categorical warm start is
/// promoted when the learner is an n-gram.
ModelPtr refit(const LearnerSettings& settings, std::span<const Solution> samples, const SolutionSpace& space,
               const ModelPtr& warm_start);

// Text serialization with 17-significant-digit reals.
void write_model(std::ostream& out, const GenerativeModel& model);
ModelPtr read_model(std::istream& in);

}  // namespace gpo
