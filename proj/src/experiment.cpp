#include "gpo/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gpo/errors.hpp"
#include "gpo/text.hpp"

namespace gpo {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBaselineStream = 0xB0F;

std::vector<int> token_vector(const Solution& s) { return {s.tokens.begin(), s.tokens.end()}; }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
  out << content;
}

std::string stem_of(const fs::path& trace) {
  std::string name = trace.filename().string();
  const std::string suffix = ".trace.csv";
  if (name.size() > suffix.size() && name.ends_with(suffix)) return name.substr(0, name.size() - suffix.size());
  return trace.stem().string();
}

SchedulingInstance scheduling_instance_for(const ExperimentConfig& cfg, std::uint64_t inst_seed) {
  if (!cfg.instance_file.empty()) {
    std::ifstream in(cfg.instance_file);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open instance file " + cfg.instance_file);
    return read_scheduling_instance(in);
  }
  return cfg.problem == ProblemKind::scheduling_fixed ? fixed_scheduling_instance(cfg.K, cfg.travel, cfg.lower, cfg.upper)
                                                      : gen_scheduling_instance(inst_seed, cfg.K, cfg.lo, cfg.hi);
}

Graph graph_for(const ExperimentConfig& cfg, std::uint64_t inst_seed) {
  if (!cfg.instance_file.empty()) {
    std::ifstream in(cfg.instance_file);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open graph file " + cfg.instance_file);
    return read_graph(in);
  }
  return gen_planted_graph(inst_seed, cfg.n, cfg.p);
}

}  // namespace

Problem build_problem(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::uint64_t inst_seed = cfg.instance_seed.value_or(seed);
  auto with_bound = [&](CostOracle o) {
    return cfg.d_hat ? CostOracle(o.name(), [o](const Solution& s) { return o(s); }, *cfg.d_hat) : o;
  };
  switch (cfg.problem) {
    case ProblemKind::scheduling_fixed:
    case ProblemKind::scheduling_random: {
      const bool fixed = cfg.problem == ProblemKind::scheduling_fixed;
      auto inst = scheduling_instance_for(cfg, inst_seed);
      const int lo = cfg.min_duration.value_or(fixed ? cfg.lower : cfg.lo);
      const int hi = cfg.max_duration.value_or(fixed ? cfg.upper : cfg.hi);
      auto space = duration_space(inst.K, lo, hi);
      auto base = std::make_shared<CategoricalModel>(CategoricalModel::uniform(space));
      return Problem{space, base, with_bound(scheduling_oracle(inst, lo)), inst, lo, std::nullopt};
    }
    case ProblemKind::spanning_tree: {
      Graph g = graph_for(cfg, inst_seed);
      LearnerSettings base_settings{LearnerKind::ngram, FitOptions{cfg.base_alpha, 0.0, false, cfg.base_order}};
      auto base = forest_base_model(g, cfg.forests, base_settings, inst_seed);
      return Problem{g.subset_space(), base, with_bound(spanning_tree_oracle(g)), std::nullopt, 0, g};
    }
    case ProblemKind::synthetic_enum: {
      auto space = SolutionSpace::uniform(static_cast<std::size_t>(cfg.positions), static_cast<std::size_t>(cfg.alphabet));
      std::vector<Token> target(static_cast<std::size_t>(cfg.positions), 0);
      for (std::size_t i = 0; i < cfg.target.size(); ++i) target[i] = cfg.target[i];
      Solution t(std::move(target));
      space.validate(t);
      auto base = std::make_shared<CategoricalModel>(CategoricalModel::uniform(space));
      return Problem{space, base, with_bound(hamming_oracle(t)), std::nullopt, 0, std::nullopt};
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown problem");
}

nlohmann::json SeedOutcome::to_json(const ExperimentConfig& cfg) const {
  return nlohmann::json{{"problem", std::string(to_string(cfg.problem))},
                        {"method", std::string(to_string(cfg.method))},
                        {"seed", seed},
                        {"best_cost", best_cost},
                        {"oracle_calls", oracle_calls},
                        {"wall_ms", wall_ms},
                        {"best_solution", token_vector(best)},
                        {"extra", extra}};
}

SeedOutcome run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  Problem prob = build_problem(cfg, seed);
  SeedOutcome out;
  out.seed = seed;

  switch (cfg.method) {
    case MethodKind::aldrift: {
      AnnealConfig ac;
      ac.m = cfg.m;
      ac.M = cfg.M;
      ac.cubic_chain = cfg.cubic_chain;
      ac.T = cfg.T;
      ac.d_hat = prob.oracle.upper_bound();
      ac.learner = cfg.learner;
      ac.seed = seed;
      ac.threads = cfg.threads;
      ac.timing = cfg.timing;
      auto r = aldrift(ac, prob.base, prob.oracle);
      out.trace = std::move(r.trace);
      break;
    }
    case MethodKind::topift:
    case MethodKind::topift_softmin: {
      TopiftConfig tc;
      tc.m = cfg.m;
      tc.M = cfg.M;
      tc.Q = cfg.Q;
      tc.learner = cfg.learner;
      tc.seed = seed;
      tc.softmin = cfg.method == MethodKind::topift_softmin;
      tc.tau_r = cfg.tau_r;
      tc.stop_at_zero = cfg.stop_at_zero;
      tc.timing = cfg.timing;
      auto r = topift(tc, prob.base, prob.oracle);
      out.trace = std::move(r.trace);
      break;
    }
    case MethodKind::best_of_model:
    case MethodKind::best_of_alg: {
      Rng rng = make_stream(seed, {kBaselineStream});
      std::vector<double> costs;
      const CostOracle& inner = prob.oracle;
      CostOracle recording(inner.name(), [&](const Solution& s) {
        const double c = inner(s);
        costs.push_back(c);
        return c;
      }, inner.upper_bound());
      std::pair<Solution, double> best;
      if (cfg.method == MethodKind::best_of_model) {
        best = best_of_model(*prob.base, recording, cfg.N, rng);
      } else {
        const Graph& g = *prob.graph;
        best = best_of_alg([&g](Rng& r) { return random_spanning_tree(g, r); }, recording, *prob.base, cfg.N, rng);
        out.extra["log_density"] = best.second;
        best.second = inner(best.first);
      }
      auto& t = out.trace;
      TraceRecord rec;
      rec.phase = "baseline";
      rec.index = 1;
      rec.tau_or_round = 1.0;
      rec.batch_costs = costs;
      rec.elite_costs = {best.second};
      const auto b = summarize(costs);
      rec.batch_min = b.min, rec.batch_med = b.med, rec.batch_max = b.max;
      rec.elite_min = rec.elite_med = rec.elite_max = best.second;
      rec.accept_rate = 1.0 / static_cast<double>(costs.size());
      rec.best_cost = best.second;
      rec.oracle_calls = static_cast<std::int64_t>(costs.size());
      t.records.push_back(std::move(rec));
      t.best_state = best.first;
      t.best_cost = best.second;
      t.oracle_calls = static_cast<std::int64_t>(costs.size());
      break;
    }
  }

  out.best = out.trace.best_state;
  out.best_cost = out.trace.best_cost;
  out.oracle_calls = out.trace.oracle_calls;
  if (prob.instance) {
    const auto durations = decode_durations(out.best, prob.min_duration);
    out.extra["durations"] = durations;
    out.extra["visit_violation"] = visit_violation(*prob.instance, durations);
  }
  if (prob.graph) {
    out.extra["tree_cost"] = tree_cost(*prob.graph, out.best);
    out.extra["degree_violation"] = degree_violation(*prob.graph, out.best);
    int edges = 0;
    for (Token t : out.best.tokens) edges += t;
    out.extra["edges"] = edges;
  }
  if (cfg.timing) {
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

std::vector<SeedOutcome> run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  fs::create_directories(out_dir);
  std::vector<SeedOutcome> outcomes;
  const std::string method(to_string(cfg.method));
  for (std::uint64_t seed : cfg.seeds) {
    auto o = run_seed(cfg, seed);
    const std::string stem = method + "_seed" + std::to_string(seed);
    std::ostringstream trace, costs;
    write_trace_csv(trace, o.trace);
    write_cost_csv(costs, o.trace);
    write_file(out_dir / (stem + ".trace.csv"), trace.str());
    write_file(out_dir / (stem + ".costs.csv"), costs.str());
    write_file(out_dir / (stem + ".summary.json"), o.to_json(cfg).dump(2) + "\n");
    const std::uint64_t inst_seed = cfg.instance_seed.value_or(seed);
    std::ostringstream instance;
    if (cfg.problem == ProblemKind::spanning_tree) {
      write_graph(instance, graph_for(cfg, inst_seed));
      write_file(out_dir / (stem + ".graph.txt"), instance.str());
    } else if (cfg.problem != ProblemKind::synthetic_enum) {
      write_scheduling_instance(instance, scheduling_instance_for(cfg, inst_seed));
      write_file(out_dir / (stem + ".instance.txt"), instance.str());
    }
    log << "seed " << seed << ": best_cost " << text::format_double(o.best_cost) << ", oracle_calls "
        << o.oracle_calls << '\n';
    outcomes.push_back(std::move(o));
  }

  std::vector<double> best;
  std::ostringstream csv;
  csv << "seed,best_cost,oracle_calls,wall_ms\n";
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& o : outcomes) {
    best.push_back(o.best_cost);
    csv << o.seed << ',' << text::format_double(o.best_cost) << ',' << o.oracle_calls << ','
        << text::format_double(o.wall_ms) << '\n';
    runs.push_back(o.to_json(cfg));
  }
  const double median = summarize(best).med;
  nlohmann::json summary{{"problem", std::string(to_string(cfg.problem))},
                         {"method", method},
                         {"seeds", cfg.seeds},
                         {"median_best_cost", median},
                         {"runs", runs}};
  write_file(out_dir / "summary.csv", csv.str());
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  log << "median best_cost " << text::format_double(median) << " over " << outcomes.size() << " seeds\n";
  return outcomes;
}

void emit_boxplot_data(const std::vector<fs::path>& traces, std::ostream& out) {
  out << "run_id,round,series,cost\n";
  for (const auto& path : traces) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    RunTrace trace = read_trace_csv(in);
    const std::string run_id = stem_of(path);
    const fs::path companion = path.parent_path() / (run_id + ".costs.csv");
    std::ifstream costs(companion);
    if (costs) {
      std::string line;
      std::getline(costs, line);
      if (text::trim(line) != "phase,index,series,cost") {
        throw Error(ErrorCode::SchemaMismatch, companion.string() + ": unexpected header");
      }
      while (std::getline(costs, line)) {
        const auto f = text::split(text::trim(line), ',');
        if (f.size() != 4) continue;
        out << run_id << ',' << f[1] << ',' << f[2] << ',' << f[3] << '\n';
      }
      continue;
    }
    for (const auto& r : trace.records) {
      for (double c : {r.batch_min, r.batch_med, r.batch_max})
        out << run_id << ',' << r.index << ",batch," << text::format_double(c) << '\n';
      for (double c : {r.elite_min, r.elite_med, r.elite_max})
        out << run_id << ',' << r.index << ",elite," << text::format_double(c) << '\n';
    }
  }
}

}  // namespace gpo
