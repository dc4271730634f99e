#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcn/config.hpp"
#include "hcn/optimize.hpp"

namespace hcn {

enum class Algorithm { PA, CGA, RO, RA, CCGA, OS };

std::string algorithm_name(Algorithm a);
// Throws ConfigError on an unknown name.
Algorithm parse_algorithm(const std::string& name);

struct AlgorithmSettings {
  BcdOptions bcd;
  int ra_draws = 100;
  TraversalOptions traversal;
};

struct RunRecord {
  std::size_t value_index = 0;
  double value = 0.0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::PA;
  Solution solution;
  double runtime_ms = 0.0;
  int iterations = 0;
};

/// Runs one algorithm on a built scenario; `seed` drives its random start.
RunRecord run_algorithm(const Scenario& scenario, Algorithm algorithm, std::uint64_t seed,
                        const AlgorithmSettings& settings);

inline const std::vector<std::string> kSweepAxes = {"user_group", "subchannel_group",   "users_per_bs", "ris_N",
                                                    "ris_e",      "outage_beta",        "beamwidth_theta3db",
                                                    "thz_enabled"};

/// Config with one sweep axis set to `value`. Throws ConfigError.
ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis, double value);

struct SweepSpec {
  std::string name = "sweep";
  std::string axis;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::vector<Algorithm> algorithms;
  int parallelism = 1;
  // Zero runtime and trace timing fields so reruns are byte-identical.
  bool omit_timing = false;

  void validate() const;
};

/// Reads the optional "sweep" block of a config document.
SweepSpec sweep_from_json(const nlohmann::json& doc);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Every (value, seed, algorithm) run, sorted by value order, seed and
/// algorithm. Throws TraversalRefused before running anything when an OS
/// instance is too large.
std::vector<RunRecord> run_sweep(const SweepSpec& spec, const ScenarioConfig& base, const AlgorithmSettings& settings);

std::string results_csv(const SweepSpec& spec, const std::vector<RunRecord>& runs);
std::string summary_csv(const SweepSpec& spec, const std::vector<RunRecord>& runs);
nlohmann::json runs_json(const SweepSpec& spec, const std::vector<RunRecord>& runs);

/// results.csv, summary.csv, runs.json and config.json under `dir`.
void write_sweep_outputs(const std::filesystem::path& dir, const SweepSpec& spec, const ScenarioConfig& base,
                         const std::vector<RunRecord>& runs);

/// `root`/`name`/<UTC timestamp>, created.
std::filesystem::path timestamped_dir(const std::filesystem::path& root, const std::string& name);

std::string format_number(double v);

}  // namespace hcn
