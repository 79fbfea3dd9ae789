#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpo/config.hpp"
#include "gpo/errors.hpp"
#include "gpo/experiment.hpp"
#include "gpo/text.hpp"
#include "gpo/verification.hpp"

namespace fs = std::filesystem;
using namespace gpo;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct VerifyArgs {
  std::string kind;
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 0;

  // mixing / coverage
  int positions = 1;
  int alphabet = 2;
  double tau = std::numbers::ln2;
  std::int64_t M = 20;
  std::int64_t chains = 100000;
  double K = 0.0;
  std::int64_t m = 0;
  double beta = 0.5;

  // gmm
  std::string means = "-3,3";
  double C = 2.0;

  // expfam
  std::string family = "poisson";
  double mean = std::nan("");
  double gamma = 0.1;
  std::int64_t trials = 200;
};

Problem synthetic(int positions, int alphabet) {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::synthetic_enum;
  cfg.positions = positions;
  cfg.alphabet = alphabet;
  return build_problem(cfg, 0);
}

VerifyReport run_verify(const VerifyArgs& a) {
  if (a.kind == "mixing") {
    Problem p = synthetic(a.positions, a.alphabet);
    MixingSetup s;
    s.tau = a.tau;
    s.M = a.M;
    s.n_chains = a.chains;
    s.K = a.K;
    s.seed = a.seed;
    s.threads = a.threads;
    return check_mixing(p.space, p.base, p.oracle, *p.base, s);
  }
  if (a.kind == "coverage") {
    // Learner fitted on m exact draws from p_tau; tail above K = m against e^{-m^beta}.
    TheoryParams theory;
    theory.beta = a.beta;
    theory.validate();
    Problem p = synthetic(a.positions, a.alphabet);
    const std::int64_t m = a.m > 0 ? a.m : 1000;
    const DistTable target = exact_target(p.space, *p.base, p.oracle, a.tau);
    std::discrete_distribution<std::size_t> pick(target.p.begin(), target.p.end());
    Rng rng = make_stream(a.seed, {0xC0F});
    std::vector<Solution> xs;
    for (std::int64_t i = 0; i < m; ++i) xs.push_back(p.space.solution_at(pick(rng)));
    const auto model = fit_categorical(xs, p.space, FitOptions{1.0, 0.0, false, 1});
    const double K = a.K > 0.0 ? a.K : static_cast<double>(m);
    const auto cov = coverage_tail(target, model, K);
    VerifyReport r;
    r.kind = "coverage";
    r.measured = cov.tail_mass;
    r.bound = std::exp(-std::pow(static_cast<double>(m), theory.beta));
    r.pass = r.measured <= r.bound;
    r.seed = a.seed;
    r.params = {{"positions", a.positions}, {"alphabet", a.alphabet}, {"tau", a.tau}, {"m", m}, {"K", K},
                {"beta", theory.beta}};
    std::vector<int> arg(cov.argmax.tokens.begin(), cov.argmax.tokens.end());
    r.details = {{"max_ratio", cov.max_ratio}, {"argmax", arg}};
    return r;
  }
  if (a.kind == "gmm") {
    GaussianMixture mix(text::parse_double_list(a.means));
    GmmSetup s;
    s.m = a.m > 0 ? a.m : 10000;
    s.seed = a.seed;
    s.C = a.C;
    return gmm_coverage_check(mix, s);
  }
  if (a.kind == "expfam") {
    const Family fam = parse_family(a.family);
    const auto spec = ExpFamilySpec::make(fam);
    double mu = a.mean;
    if (std::isnan(mu)) {
      switch (fam) {
        case Family::gaussian: mu = 0.0; break;
        case Family::bernoulli: mu = 0.5; break;
        case Family::exponential: mu = 1.0; break;
        case Family::poisson: mu = 5.0; break;
      }
    }
    ExpfamSetup s;
    s.eta0 = spec.eta_from_mean(mu);
    s.m = a.m > 0 ? a.m : 10000;
    s.gamma = a.gamma;
    s.trials = a.trials;
    s.seed = a.seed;
    s.threads = a.threads;
    return expfam_tail_check(spec, s);
  }
  throw Error(ErrorCode::ConfigError, "unknown verify kind '" + a.kind + "'");
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::RegimeViolation:
      return kExitConfig;
    default:
      return kExitFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generative-prior optimization experiments and verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--out", out_override, "Output directory (overrides config and GPO_OUTPUT_DIR)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a verification check and write its JSON report");
  verify->add_option("kind", va.kind, "mixing | coverage | gmm | expfam")
      ->required()
      ->check(CLI::IsMember({"mixing", "coverage", "gmm", "expfam"}));
  verify->add_option("--seed", va.seed);
  verify->add_option("--out", va.out, "Report path");
  verify->add_option("--threads", va.threads);
  verify->add_option("--positions", va.positions);
  verify->add_option("--alphabet", va.alphabet);
  verify->add_option("--tau", va.tau);
  verify->add_option("--M", va.M);
  verify->add_option("--chains", va.chains);
  verify->add_option("--K", va.K);
  verify->add_option("--m", va.m);
  verify->add_option("--beta", va.beta);
  verify->add_option("--means", va.means, "Comma-separated component means");
  verify->add_option("--C", va.C);
  verify->add_option("--family", va.family);
  verify->add_option("--mean", va.mean, "Population mean; selects eta0");
  verify->add_option("--gamma", va.gamma);
  verify->add_option("--trials", va.trials);

  std::vector<std::string> traces;
  std::string boxplot_out;
  auto* boxplot = app.add_subcommand("boxplot", "Long-format box-plot data from trace files");
  boxplot->add_option("traces", traces, "Trace CSV files");
  boxplot->add_option("--out", boxplot_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = load_experiment(config_path);
      const fs::path out = out_override.empty() ? resolve_output_dir(cfg) : fs::path(out_override);
      run_experiment(cfg, out, std::cout);
      return 0;
    }
    if (*verify) {
      const VerifyReport r = run_verify(va);
      fs::path out = va.out;
      if (out.empty()) {
        ExperimentConfig none;
        out = resolve_output_dir(none) / ("verify_" + va.kind + ".json");
      }
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      std::ofstream f(out);
      if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + out.string());
      f << r.to_json().dump(2) << '\n';
      std::cout << va.kind << ": measured " << r.measured << " bound " << r.bound << " -> "
                << (r.pass ? "pass" : "FAIL") << '\n';
      return r.pass ? 0 : kExitFail;
    }
    if (*boxplot) {
      std::vector<fs::path> paths(traces.begin(), traces.end());
      const fs::path out(boxplot_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      std::ofstream f(out);
      if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + out.string());
      emit_boxplot_data(paths, f);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return 0;
}
