#include "gpo/learners.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "gpo/errors.hpp"
#include "gpo/text.hpp"

namespace gpo {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_samples(std::span<const Solution> samples, const SolutionSpace& space) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleSet, "cannot fit on an empty sample set");
  for (const auto& s : samples) space.validate(s);
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::BadRange, "warm-start weight must lie in [0,1]");
}

std::vector<double> smoothed(const std::vector<double>& counts, double total, double alpha) {
  std::vector<double> p(counts.size());
  const double denom = total + alpha * static_cast<double>(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) p[k] = (counts[k] + alpha) / denom;
  return p;
}

std::vector<double> mix(const std::vector<double>& warm, const std::vector<double>& fresh, double lambda) {
  std::vector<double> p(warm.size());
  for (std::size_t k = 0; k < warm.size(); ++k) p[k] = lambda * warm[k] + (1.0 - lambda) * fresh[k];
  return p;
}

}  // namespace

Categorical::Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw Error(ErrorCode::BadModel, "empty probability vector");
  double total = 0.0;
  cdf_.resize(probs_.size());
  log_probs_.resize(probs_.size());
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    if (!(probs_[k] >= 0.0) || !std::isfinite(probs_[k])) {
      throw Error(ErrorCode::BadModel, "probabilities must be finite and non-negative");
    }
    total += probs_[k];
    cdf_[k] = total;
    log_probs_[k] = probs_[k] > 0.0 ? std::log(probs_[k]) : -std::numeric_limits<double>::infinity();
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::BadModel, "probabilities sum to " + text::format_double(total));
  }
}

Categorical Categorical::uniform(std::size_t n) {
  return Categorical(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Token Categorical::draw(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) {
    // u landed on the rounding gap at the top; take the last supported token
    auto k = probs_.size();
    while (k > 0 && probs_[k - 1] == 0.0) --k;
    return static_cast<Token>(k - 1);
  }
  return static_cast<Token>(it - cdf_.begin());
}

// ---------------------------------------------------------------- categorical

CategoricalModel::CategoricalModel(SolutionSpace space, std::vector<std::vector<double>> probs, double alpha)
    : space_(std::move(space)), alpha_(alpha) {
  if (probs.size() != space_.num_positions()) {
    throw Error(ErrorCode::DimensionMismatch, "one probability vector per position required");
  }
  dists_.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i].size() != space_.alphabet_size(i)) {
      throw Error(ErrorCode::DimensionMismatch, "probability vector length != alphabet size at position " +
                                                    std::to_string(i));
    }
    dists_.emplace_back(std::move(probs[i]));
  }
}

CategoricalModel CategoricalModel::uniform(SolutionSpace space) {
  std::vector<std::vector<double>> probs;
  for (std::size_t a : space.alphabet_sizes()) probs.emplace_back(a, 1.0 / static_cast<double>(a));
  return CategoricalModel(std::move(space), std::move(probs));
}

CategoricalModel CategoricalModel::point_mass(SolutionSpace space, const Solution& s) {
  space.validate(s);
  std::vector<std::vector<double>> probs;
  for (std::size_t i = 0; i < space.num_positions(); ++i) {
    std::vector<double> p(space.alphabet_size(i), 0.0);
    p[static_cast<std::size_t>(s.tokens[i])] = 1.0;
    probs.push_back(std::move(p));
  }
  return CategoricalModel(std::move(space), std::move(probs));
}

Solution CategoricalModel::sample(Rng& rng) const {
  std::vector<Token> t(dists_.size());
  for (std::size_t i = 0; i < dists_.size(); ++i) t[i] = dists_[i].draw(rng);
  return Solution(std::move(t));
}

double CategoricalModel::log_density(const Solution& s) const {
  space_.validate(s);
  double lp = 0.0;
  for (std::size_t i = 0; i < dists_.size(); ++i) lp += dists_[i].log_prob(static_cast<std::size_t>(s.tokens[i]));
  return lp;
}

CategoricalModel fit_categorical(std::span<const Solution> samples, const SolutionSpace& space,
                                 const FitOptions& opts, const CategoricalModel* warm_start) {
  check_samples(samples, space);
  check_lambda(opts.lambda);
  if (!(opts.alpha >= 0.0)) throw Error(ErrorCode::BadRange, "smoothing must be non-negative");
  if (warm_start && !(warm_start->space() == space)) {
    throw Error(ErrorCode::SpaceMismatch, "warm start defined on a different space");
  }
  const std::size_t P = space.num_positions();
  std::vector<std::vector<double>> fresh(P);
  const double n = static_cast<double>(samples.size());

  if (opts.share_positions) {
    const std::size_t A = space.alphabet_size(0);
    for (std::size_t a : space.alphabet_sizes()) {
      if (a != A) throw Error(ErrorCode::BadModel, "tied positions need equal alphabet sizes");
    }
    std::vector<double> counts(A, 0.0);
    for (const auto& s : samples)
      for (Token t : s.tokens) counts[static_cast<std::size_t>(t)] += 1.0;
    auto p = smoothed(counts, n * static_cast<double>(P), opts.alpha);
    for (auto& f : fresh) f = p;
  } else {
    for (std::size_t i = 0; i < P; ++i) {
      std::vector<double> counts(space.alphabet_size(i), 0.0);
      for (const auto& s : samples) counts[static_cast<std::size_t>(s.tokens[i])] += 1.0;
      fresh[i] = smoothed(counts, n, opts.alpha);
    }
  }

  if (warm_start) {
    for (std::size_t i = 0; i < P; ++i) fresh[i] = mix(warm_start->probabilities(i), fresh[i], opts.lambda);
  }
  return CategoricalModel(space, std::move(fresh), opts.alpha);
}

// ---------------------------------------------------------------- n-gram

NGramModel::NGramModel(SolutionSpace space, int order, std::vector<Categorical> fallback,
                       std::vector<Table> tables, double alpha)
    : space_(std::move(space)), order_(order), fallback_(std::move(fallback)), tables_(std::move(tables)),
      alpha_(alpha) {
  if (order_ < 1) throw Error(ErrorCode::BadModel, "n-gram order must be >= 1");
  const std::size_t P = space_.num_positions();
  if (fallback_.size() != P || tables_.size() != P) {
    throw Error(ErrorCode::DimensionMismatch, "n-gram tables must cover every position");
  }
  for (std::size_t i = 0; i < P; ++i) {
    const std::size_t ctx_len = std::min<std::size_t>(i, static_cast<std::size_t>(order_ - 1));
    if (fallback_[i].size() != space_.alphabet_size(i)) {
      throw Error(ErrorCode::DimensionMismatch, "fallback size mismatch at position " + std::to_string(i));
    }
    for (const auto& [ctx, dist] : tables_[i]) {
      if (ctx.size() != ctx_len || dist.size() != space_.alphabet_size(i)) {
        throw Error(ErrorCode::DimensionMismatch, "bad context entry at position " + std::to_string(i));
      }
    }
  }
}

NGramModel NGramModel::from_categorical(const CategoricalModel& m, int order) {
  std::vector<Categorical> fallback;
  for (std::size_t i = 0; i < m.space().num_positions(); ++i) fallback.emplace_back(m.probabilities(i));
  return NGramModel(m.space(), order, std::move(fallback), std::vector<Table>(m.space().num_positions()),
                    m.smoothing());
}

NGramModel::Context NGramModel::context_of(const Solution& s, std::size_t position) const {
  const std::size_t len = std::min<std::size_t>(position, static_cast<std::size_t>(order_ - 1));
  return Context(s.tokens.begin() + static_cast<std::ptrdiff_t>(position - len),
                 s.tokens.begin() + static_cast<std::ptrdiff_t>(position));
}

const Categorical& NGramModel::conditional(std::size_t position, const Context& ctx) const {
  const auto& table = tables_.at(position);
  auto it = table.find(ctx);
  return it == table.end() ? fallback_[position] : it->second;
}

Solution NGramModel::sample(Rng& rng) const {
  const std::size_t P = space_.num_positions();
  Solution s(std::vector<Token>(P, 0));
  Context ctx;
  for (std::size_t i = 0; i < P; ++i) {
    ctx = context_of(s, i);
    s.tokens[i] = conditional(i, ctx).draw(rng);
  }
  return s;
}

double NGramModel::log_density(const Solution& s) const {
  space_.validate(s);
  double lp = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    lp += conditional(i, context_of(s, i)).log_prob(static_cast<std::size_t>(s.tokens[i]));
  }
  return lp;
}

NGramModel fit_ngram(std::span<const Solution> samples, const SolutionSpace& space, const FitOptions& opts,
                     const NGramModel* warm_start) {
  check_samples(samples, space);
  check_lambda(opts.lambda);
  if (!(opts.alpha >= 0.0)) throw Error(ErrorCode::BadRange, "smoothing must be non-negative");
  if (opts.order < 1) throw Error(ErrorCode::BadModel, "n-gram order must be >= 1");
  if (warm_start && (warm_start->order() != opts.order || !(warm_start->space() == space))) {
    throw Error(ErrorCode::BadModel, "warm start must share order and space");
  }
  const std::size_t P = space.num_positions();
  std::vector<Categorical> fallback;
  std::vector<NGramModel::Table> tables(P);
  NGramModel shape(space, opts.order, [&] {
    std::vector<Categorical> u;
    for (std::size_t i = 0; i < P; ++i) u.push_back(Categorical::uniform(space.alphabet_size(i)));
    return u;
  }(), std::vector<NGramModel::Table>(P));

  for (std::size_t i = 0; i < P; ++i) {
    const std::size_t A = space.alphabet_size(i);
    std::map<NGramModel::Context, std::vector<double>> counts;
    for (const auto& s : samples) {
      auto& c = counts[shape.context_of(s, i)];
      if (c.empty()) c.assign(A, 0.0);
      c[static_cast<std::size_t>(s.tokens[i])] += 1.0;
    }
    const auto uniform = Categorical::uniform(A).probs();
    std::map<NGramModel::Context, std::vector<double>> fresh;
    for (auto& [ctx, c] : counts) {
      double total = 0.0;
      for (double x : c) total += x;
      fresh.emplace(ctx, smoothed(c, total, opts.alpha));
    }
    if (!warm_start) {
      fallback.emplace_back(uniform);
      for (auto& [ctx, p] : fresh) tables[i].emplace(ctx, Categorical(std::move(p)));
      continue;
    }
    fallback.emplace_back(mix(warm_start->fallback(i).probs(), uniform, opts.lambda));
    std::set<NGramModel::Context> keys;
    for (const auto& [ctx, _] : fresh) keys.insert(ctx);
    for (const auto& [ctx, _] : warm_start->table(i)) keys.insert(ctx);
    for (const auto& ctx : keys) {
      auto it = fresh.find(ctx);
      const auto& est = it == fresh.end() ? uniform : it->second;
      tables[i].emplace(ctx, Categorical(mix(warm_start->conditional(i, ctx).probs(), est, opts.lambda)));
    }
  }
  return NGramModel(space, opts.order, std::move(fallback), std::move(tables), opts.alpha);
}

// ---------------------------------------------------------------- dispatch

ModelPtr refit(const LearnerSettings& settings, std::span<const Solution> samples, const SolutionSpace& space,
               const ModelPtr& warm_start) {
  if (settings.kind == LearnerKind::categorical) {
    const CategoricalModel* warm = nullptr;
    if (warm_start) {
      warm = dynamic_cast<const CategoricalModel*>(warm_start.get());
      if (!warm) throw Error(ErrorCode::BadModel, "categorical learner needs a categorical warm start");
    }
    return std::make_shared<CategoricalModel>(fit_categorical(samples, space, settings.fit, warm));
  }
  if (!warm_start) return std::make_shared<NGramModel>(fit_ngram(samples, space, settings.fit, nullptr));
  if (auto* ng = dynamic_cast<const NGramModel*>(warm_start.get())) {
    return std::make_shared<NGramModel>(fit_ngram(samples, space, settings.fit, ng));
  }
  if (auto* cat = dynamic_cast<const CategoricalModel*>(warm_start.get())) {
    auto promoted = NGramModel::from_categorical(*cat, settings.fit.order);
    return std::make_shared<NGramModel>(fit_ngram(samples, space, settings.fit, &promoted));
  }
  throw Error(ErrorCode::BadModel, "unsupported warm-start model type");
}

// ---------------------------------------------------------------- text format
//
//   model categorical|ngram
//   alphabet a0,a1,...
//   encoding generic|duration_vector|edge_subset
//   alpha <real>
//   order <int>                       (ngram only)
//   p <pos> <probs...>                (categorical)
//   fallback <pos> <probs...>         (ngram)
//   context <pos> <ctx|-> <probs...>  (ngram; ctx comma-separated)

namespace {

std::string encoding_name(EncodingKind k) {
  switch (k) {
    case EncodingKind::duration_vector: return "duration_vector";
    case EncodingKind::edge_subset: return "edge_subset";
    case EncodingKind::generic: return "generic";
  }
  return "generic";
}

EncodingKind parse_encoding(std::string_view s) {
  if (s == "duration_vector") return EncodingKind::duration_vector;
  if (s == "edge_subset") return EncodingKind::edge_subset;
  if (s == "generic") return EncodingKind::generic;
  throw Error(ErrorCode::ParseError, "unknown encoding '" + std::string(s) + "'");
}

void write_probs(std::ostream& out, const std::vector<double>& p) {
  for (double x : p) out << ' ' << text::format_double17(x);
}

void write_header(std::ostream& out, const char* kind, const SolutionSpace& space, double alpha) {
  std::vector<int> alphabet(space.alphabet_sizes().begin(), space.alphabet_sizes().end());
  out << "model " << kind << '\n'
      << "alphabet " << text::join_ints(alphabet) << '\n'
      << "encoding " << encoding_name(space.encoding_kind()) << '\n'
      << "alpha " << text::format_double17(alpha) << '\n';
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> w;
  for (std::string x; ss >> x;) w.push_back(x);
  return w;
}

std::vector<double> tail_probs(const std::vector<std::string>& w, std::size_t from) {
  std::vector<double> p;
  for (std::size_t k = from; k < w.size(); ++k) p.push_back(text::parse_double(w[k]));
  return p;
}

}  // namespace

void write_model(std::ostream& out, const GenerativeModel& model) {
  if (auto* cat = dynamic_cast<const CategoricalModel*>(&model)) {
    write_header(out, "categorical", cat->space(), cat->smoothing());
    for (std::size_t i = 0; i < cat->space().num_positions(); ++i) {
      out << "p " << i;
      write_probs(out, cat->probabilities(i));
      out << '\n';
    }
    return;
  }
  if (auto* ng = dynamic_cast<const NGramModel*>(&model)) {
    write_header(out, "ngram", ng->space(), ng->smoothing());
    out << "order " << ng->order() << '\n';
    for (std::size_t i = 0; i < ng->space().num_positions(); ++i) {
      out << "fallback " << i;
      write_probs(out, ng->fallback(i).probs());
      out << '\n';
      for (const auto& [ctx, dist] : ng->table(i)) {
        std::vector<int> c(ctx.begin(), ctx.end());
        out << "context " << i << ' ' << (c.empty() ? std::string("-") : text::join_ints(c));
        write_probs(out, dist.probs());
        out << '\n';
      }
    }
    return;
  }
  throw Error(ErrorCode::BadModel, "model type has no serialization");
}

ModelPtr read_model(std::istream& in) {
  std::string line;
  std::vector<std::vector<std::string>> lines;
  while (std::getline(in, line)) {
    auto w = words(line);
    if (!w.empty()) lines.push_back(std::move(w));
  }
  auto expect = [&](std::size_t idx, const char* key) -> const std::vector<std::string>& {
    if (idx >= lines.size() || lines[idx][0] != key || lines[idx].size() != 2) {
      throw Error(ErrorCode::ParseError, std::string("model file: expected '") + key + "' on record " +
                                             std::to_string(idx + 1));
    }
    return lines[idx];
  };
  const std::string kind = expect(0, "model")[1];
  std::vector<std::size_t> alphabet;
  for (int a : text::parse_int_list(expect(1, "alphabet")[1])) alphabet.push_back(static_cast<std::size_t>(a));
  SolutionSpace space(alphabet, parse_encoding(expect(2, "encoding")[1]));
  const double alpha = text::parse_double(expect(3, "alpha")[1]);
  const std::size_t P = space.num_positions();

  if (kind == "categorical") {
    std::vector<std::vector<double>> probs(P);
    for (std::size_t k = 4; k < lines.size(); ++k) {
      const auto& w = lines[k];
      if (w[0] != "p" || w.size() < 3) throw Error(ErrorCode::ParseError, "model file: bad categorical record");
      auto pos = static_cast<std::size_t>(text::parse_int(w[1]));
      if (pos >= P) throw Error(ErrorCode::ParseError, "model file: position out of range");
      probs[pos] = tail_probs(w, 2);
    }
    return std::make_shared<CategoricalModel>(space, std::move(probs), alpha);
  }
  if (kind == "ngram") {
    const int order = static_cast<int>(text::parse_int(expect(4, "order")[1]));
    std::vector<Categorical> fallback(P);
    std::vector<NGramModel::Table> tables(P);
    for (std::size_t k = 5; k < lines.size(); ++k) {
      const auto& w = lines[k];
      if (w.size() < 3) throw Error(ErrorCode::ParseError, "model file: short n-gram record");
      auto pos = static_cast<std::size_t>(text::parse_int(w[1]));
      if (pos >= P) throw Error(ErrorCode::ParseError, "model file: position out of range");
      if (w[0] == "fallback") {
        fallback[pos] = Categorical(tail_probs(w, 2));
      } else if (w[0] == "context" && w.size() >= 4) {
        NGramModel::Context ctx;
        if (w[2] != "-") {
          for (int t : text::parse_int_list(w[2])) ctx.push_back(t);
        }
        tables[pos].emplace(std::move(ctx), Categorical(tail_probs(w, 3)));
      } else {
        throw Error(ErrorCode::ParseError, "model file: unknown record '" + w[0] + "'");
      }
    }
    return std::make_shared<NGramModel>(space, order, std::move(fallback), std::move(tables), alpha);
  }
  throw Error(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
}

}  // namespace gpo
