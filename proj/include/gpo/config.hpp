#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpo/learners.hpp"

namespace gpo {

/// Flat sectioned key/value text:
///
///   # comment
///   [section]
///   key = value
///
/// Keys are unique per section. Lookups record which keys were consumed so
/// unknown keys can be reported with their line.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };

  static ConfigFile parse(std::istream& in, std::string source = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get_string(const std::string& section, const std::string& key) const;
  std::optional<long long> get_int(const std::string& section, const std::string& key) const;
  std::optional<double> get_double(const std::string& section, const std::string& key) const;
  std::optional<bool> get_bool(const std::string& section, const std::string& key) const;
  std::optional<std::vector<int>> get_int_list(const std::string& section, const std::string& key) const;

  /// Throws ConfigError naming the first entry never looked up.
  void reject_unused() const;

  /// "source:line: section.key: msg" as a ConfigError.
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const;

  const std::string& source() const noexcept { return source_; }

 private:
  const Entry* find(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::pair<std::string, std::string>, Entry> entries_;
};

enum class ProblemKind { scheduling_fixed, scheduling_random, spanning_tree, synthetic_enum };
enum class MethodKind { aldrift, topift, topift_softmin, best_of_model, best_of_alg };

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::scheduling_fixed;
  MethodKind method = MethodKind::best_of_model;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;
  bool timing = false;
  unsigned threads = 0;

  // method
  std::int64_t m = 0, M = 0, Q = 0, N = 0;
  double T = 0.0;
  std::optional<double> d_hat;
  bool cubic_chain = false;
  double tau_r = 0.0;
  bool stop_at_zero = false;

  LearnerSettings learner;

  // problem
  int K = 10, travel = 10, lower = 1, upper = 20;
  std::optional<int> min_duration, max_duration;
  int lo = 1, hi = 20;
  std::optional<std::uint64_t> instance_seed;
  std::string instance_file;  // scheduling instance or graph; overrides generation
  int n = 16;
  double p = 0.4;
  int forests = 200;
  int base_order = 2;
  double base_alpha = 1.0;
  int positions = 4, alphabet = 3;
  std::vector<int> target;
};

std::string_view to_string(ProblemKind k);
std::string_view to_string(MethodKind k);

/// Reads and validates an experiment. Throws ConfigError with a
/// line-anchored message.
ExperimentConfig parse_experiment(const ConfigFile& file);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Output directory from the config, else $GPO_OUTPUT_DIR, else "gpo_out".
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg);

}  // namespace gpo
