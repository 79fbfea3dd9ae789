#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "gpo/config.hpp"
#include "gpo/drivers.hpp"
#include "gpo/problems.hpp"

namespace gpo {

struct Problem {
  SolutionSpace space;
  ModelPtr base;
  CostOracle oracle;
  std::optional<SchedulingInstance> instance;
  int min_duration = 0;
  std::optional<Graph> graph;
};

/// Instance, base model and oracle for one seed. Instances are drawn from
/// instance_seed when set, otherwise from the run seed.
Problem build_problem(const ExperimentConfig& cfg, std::uint64_t seed);

struct SeedOutcome {
  std::uint64_t seed = 0;
  double best_cost = 0.0;
  std::int64_t oracle_calls = 0;
  double wall_ms = 0.0;
  Solution best;
  RunTrace trace;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json(const ExperimentConfig& cfg) const;
};

SeedOutcome run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// Runs every seed and writes <method>_seed<s>.{trace.csv,costs.csv,summary.json}
/// plus summary.csv and summary.json into out_dir.
std::vector<SeedOutcome> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                        std::ostream& log);

/// Long-format box-plot rows (run_id,round,series,cost) from trace files.
/// Uses the companion .costs.csv when present, else min/med/max per series.
void emit_boxplot_data(const std::vector<std::filesystem::path>& traces, std::ostream& out);

}  // namespace gpo
