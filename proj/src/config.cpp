#include "gpo/config.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>

#include "gpo/errors.hpp"
#include "gpo/text.hpp"

namespace gpo {

namespace {

template <class Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view name, const Enum (&values)[N]) {
  for (Enum v : values)
    if (to_string(v) == name) return v;
  return std::nullopt;
}

constexpr ProblemKind kProblems[] = {ProblemKind::scheduling_fixed, ProblemKind::scheduling_random,
                                     ProblemKind::spanning_tree, ProblemKind::synthetic_enum};
constexpr MethodKind kMethods[] = {MethodKind::aldrift, MethodKind::topift, MethodKind::topift_softmin,
                                   MethodKind::best_of_model, MethodKind::best_of_alg};

std::vector<std::uint64_t> parse_seeds(std::string_view s) {
  std::vector<std::uint64_t> out;
  if (auto pos = s.find(".."); pos != std::string_view::npos) {
    const long long a = text::parse_int(s.substr(0, pos));
    const long long b = text::parse_int(s.substr(pos + 2));
    if (a < 0 || b < a) throw Error(ErrorCode::ParseError, "seed range must be 'a..b' with 0 <= a <= b");
    for (long long x = a; x <= b; ++x) out.push_back(static_cast<std::uint64_t>(x));
    return out;
  }
  for (auto part : text::split(s, ',')) {
    const long long x = text::parse_int(part);
    if (x < 0) throw Error(ErrorCode::ParseError, "seeds must be non-negative");
    out.push_back(static_cast<std::uint64_t>(x));
  }
  return out;
}

}  // namespace

std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::scheduling_fixed: return "scheduling_fixed";
    case ProblemKind::scheduling_random: return "scheduling_random";
    case ProblemKind::spanning_tree: return "spanning_tree";
    case ProblemKind::synthetic_enum: return "synthetic_enum";
  }
  return "?";
}

std::string_view to_string(MethodKind k) {
  switch (k) {
    case MethodKind::aldrift: return "aldrift";
    case MethodKind::topift: return "topift";
    case MethodKind::topift_softmin: return "topift_softmin";
    case MethodKind::best_of_model: return "best_of_model";
    case MethodKind::best_of_alg: return "best_of_alg";
  }
  return "?";
}

// ---------------------------------------------------------------- ConfigFile

ConfigFile ConfigFile::parse(std::istream& in, std::string source) {
  ConfigFile cfg;
  cfg.source_ = std::move(source);
  std::string section;
  std::string raw;
  int lineno = 0;
  auto err = [&](const std::string& msg) {
    return Error(ErrorCode::ConfigError, cfg.source_ + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw err("unterminated section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw err("empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw err("expected 'key = value'");
    if (section.empty()) throw err("key outside of any section");
    const std::string key(text::trim(line.substr(0, eq)));
    if (key.empty()) throw err("empty key");
    auto [it, fresh] = cfg.entries_.try_emplace({section, key}, Entry{std::string(text::trim(line.substr(eq + 1))), lineno});
    if (!fresh) {
      throw err("duplicate key " + section + "." + key + " (first at line " + std::to_string(it->second.line) + ")");
    }
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path.string() + ": cannot open");
  return parse(in, path.string());
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section, const std::string& key) const {
  auto it = entries_.find({section, key});
  if (it == entries_.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return entries_.count({section, key}) > 0;
}

void ConfigFile::fail(const std::string& section, const std::string& key, const std::string& msg) const {
  auto it = entries_.find({section, key});
  const std::string where = it == entries_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
  throw Error(ErrorCode::ConfigError, where + ": " + section + "." + key + ": " + msg);
}

namespace {

template <class T, class Parse>
std::optional<T> typed(const ConfigFile& cfg, const ConfigFile::Entry* e, const std::string& section,
                       const std::string& key, Parse parse) {
  if (!e) return std::nullopt;
  try {
    return parse(e->value);
  } catch (const Error& ex) {
    cfg.fail(section, key, ex.what());
  }
}

}  // namespace

std::optional<std::string> ConfigFile::get_string(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return e->value;
}

std::optional<long long> ConfigFile::get_int(const std::string& section, const std::string& key) const {
  return typed<long long>(*this, find(section, key), section, key, [](const std::string& v) { return text::parse_int(v); });
}

std::optional<double> ConfigFile::get_double(const std::string& section, const std::string& key) const {
  return typed<double>(*this, find(section, key), section, key, [](const std::string& v) { return text::parse_double(v); });
}

std::optional<bool> ConfigFile::get_bool(const std::string& section, const std::string& key) const {
  return typed<bool>(*this, find(section, key), section, key, [](const std::string& v) { return text::parse_bool(v); });
}

std::optional<std::vector<int>> ConfigFile::get_int_list(const std::string& section, const std::string& key) const {
  return typed<std::vector<int>>(*this, find(section, key), section, key,
                                 [](const std::string& v) { return text::parse_int_list(v); });
}

void ConfigFile::reject_unused() const {
  const Entry* first = nullptr;
  const std::pair<std::string, std::string>* name = nullptr;
  for (const auto& [k, e] : entries_) {
    if (!e.used && (!first || e.line < first->line)) first = &e, name = &k;
  }
  if (first) fail(name->first, name->second, "unknown key");
}

// ---------------------------------------------------------------- experiment

ExperimentConfig parse_experiment(const ConfigFile& f) {
  ExperimentConfig c;
  const std::string ex = "experiment", me = "method", le = "learner", pr = "problem";

  auto problem = f.get_string(ex, "problem");
  if (!problem) f.fail(ex, "problem", "required");
  if (auto k = lookup(*problem, kProblems)) c.problem = *k;
  else f.fail(ex, "problem", "unknown problem '" + *problem + "'");

  auto method = f.get_string(ex, "method");
  if (!method) f.fail(ex, "method", "required");
  if (auto k = lookup(*method, kMethods)) c.method = *k;
  else f.fail(ex, "method", "unknown method '" + *method + "'");

  if (auto s = f.get_string(ex, "seeds")) {
    try {
      c.seeds = parse_seeds(*s);
    } catch (const Error& e) {
      f.fail(ex, "seeds", e.what());
    }
  }
  if (c.seeds.empty()) f.fail(ex, "seeds", "at least one seed required");
  c.output_dir = f.get_string(ex, "output_dir").value_or("");
  c.timing = f.get_bool(ex, "timing").value_or(false);
  if (auto t = f.get_int(ex, "threads")) {
    if (*t < 0) f.fail(ex, "threads", "must be >= 0");
    c.threads = static_cast<unsigned>(*t);
  }

  // method parameters
  auto positive = [&](const char* key) -> std::int64_t {
    auto v = f.get_int(me, key);
    if (!v) return 0;
    if (*v < 1) f.fail(me, key, "must be >= 1");
    return *v;
  };
  c.m = positive("m");
  c.M = positive("M");
  c.Q = positive("Q");
  c.N = positive("N");
  if (auto T = f.get_double(me, "T")) {
    if (!(*T > 0.0)) f.fail(me, "T", "must be positive");
    c.T = *T;
  }
  if (auto d = f.get_double(me, "D_hat")) {
    if (!(*d > 0.0)) f.fail(me, "D_hat", "must be positive");
    c.d_hat = *d;
  }
  if (auto chain = f.get_string(me, "chain")) {
    if (*chain == "square") c.cubic_chain = false;
    else if (*chain == "cube") c.cubic_chain = true;
    else f.fail(me, "chain", "expected 'square' or 'cube'");
  }
  if (auto t = f.get_double(me, "tau_r")) {
    if (!(*t >= 0.0)) f.fail(me, "tau_r", "must be >= 0");
    c.tau_r = *t;
  }
  c.stop_at_zero = f.get_bool(me, "stop_at_zero").value_or(false);

  auto require = [&](const char* key, bool present) {
    if (!present) f.fail(me, key, std::string("required for method ") + std::string(to_string(c.method)));
  };
  switch (c.method) {
    case MethodKind::aldrift:
      require("m", c.m > 0);
      require("T", c.T > 0.0);
      break;
    case MethodKind::topift:
    case MethodKind::topift_softmin:
      require("m", c.m > 0);
      require("M", c.M > 0);
      require("Q", c.Q > 0);
      break;
    case MethodKind::best_of_model:
    case MethodKind::best_of_alg:
      require("N", c.N > 0);
      break;
  }
  if (c.method == MethodKind::best_of_alg && c.problem != ProblemKind::spanning_tree) {
    f.fail(ex, "method", "best_of_alg needs a feasible sampler; only spanning_tree provides one");
  }

  // learner
  if (auto kind = f.get_string(le, "kind")) {
    if (*kind == "categorical") c.learner.kind = LearnerKind::categorical;
    else if (*kind == "ngram") c.learner.kind = LearnerKind::ngram;
    else f.fail(le, "kind", "expected 'categorical' or 'ngram'");
  }
  if (auto a = f.get_double(le, "alpha")) {
    if (!(*a >= 0.0)) f.fail(le, "alpha", "must be >= 0");
    c.learner.fit.alpha = *a;
  }
  if (auto l = f.get_double(le, "lambda")) {
    if (!(*l >= 0.0 && *l <= 1.0)) f.fail(le, "lambda", "must lie in [0, 1]");
    c.learner.fit.lambda = *l;
  }
  if (auto o = f.get_int(le, "order")) {
    if (*o < 1) f.fail(le, "order", "must be >= 1");
    c.learner.fit.order = static_cast<int>(*o);
  }
  c.learner.fit.share_positions = f.get_bool(le, "share_positions").value_or(false);
  const bool iterative = c.method == MethodKind::aldrift || c.method == MethodKind::topift ||
                         c.method == MethodKind::topift_softmin;
  if (iterative && c.problem == ProblemKind::spanning_tree && c.learner.kind == LearnerKind::categorical &&
      c.learner.fit.lambda > 0.0) {
    f.fail(le, "kind", "spanning_tree base model is an n-gram; warm starts need kind = ngram or lambda = 0");
  }

  // problem
  auto int_key = [&](const char* key, int& dst) {
    if (auto v = f.get_int(pr, key)) dst = static_cast<int>(*v);
  };
  int_key("K", c.K);
  int_key("travel", c.travel);
  int_key("lower", c.lower);
  int_key("upper", c.upper);
  if (auto v = f.get_int(pr, "min_duration")) c.min_duration = static_cast<int>(*v);
  if (auto v = f.get_int(pr, "max_duration")) c.max_duration = static_cast<int>(*v);
  int_key("lo", c.lo);
  int_key("hi", c.hi);
  if (auto v = f.get_int(pr, "instance_seed")) {
    if (*v < 0) f.fail(pr, "instance_seed", "must be >= 0");
    c.instance_seed = static_cast<std::uint64_t>(*v);
  }
  int_key("n", c.n);
  if (auto v = f.get_double(pr, "p")) c.p = *v;
  int_key("forests", c.forests);
  int_key("base_order", c.base_order);
  if (auto v = f.get_double(pr, "base_alpha")) c.base_alpha = *v;
  int_key("positions", c.positions);
  int_key("alphabet", c.alphabet);
  if (auto v = f.get_int_list(pr, "target")) c.target = *v;
  if (auto v = f.get_string(pr, "instance_file")) {
    if (c.problem == ProblemKind::synthetic_enum) f.fail(pr, "instance_file", "not used by synthetic_enum");
    std::filesystem::path path(*v);
    if (path.is_relative()) path = std::filesystem::path(f.source()).parent_path() / path;
    c.instance_file = path.string();
  }

  if (c.K < 1) f.fail(pr, "K", "must be >= 1");
  if (c.n < 2) f.fail(pr, "n", "must be >= 2");
  if (!(c.p >= 0.0 && c.p <= 1.0)) f.fail(pr, "p", "must lie in [0, 1]");
  if (c.forests < 1) f.fail(pr, "forests", "must be >= 1");
  if (c.base_order < 1) f.fail(pr, "base_order", "must be >= 1");
  if (c.positions < 1) f.fail(pr, "positions", "must be >= 1");
  if (c.alphabet < 1) f.fail(pr, "alphabet", "must be >= 1");
  if (!c.target.empty() && c.target.size() != static_cast<std::size_t>(c.positions)) {
    f.fail(pr, "target", "length must equal positions");
  }
  if (iterative && c.problem == ProblemKind::spanning_tree && c.learner.kind == LearnerKind::ngram &&
      c.learner.fit.lambda > 0.0) {
    if (!f.has(le, "order")) c.learner.fit.order = c.base_order;
    else if (c.learner.fit.order != c.base_order) f.fail(le, "order", "must equal problem.base_order for warm starts");
  }

  f.reject_unused();
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) { return parse_experiment(ConfigFile::load(path)); }

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("GPO_OUTPUT_DIR"); env && *env) return env;
  return "gpo_out";
}

}  // namespace gpo
