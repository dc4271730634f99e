// hcnsim: build scenarios from a JSON config, run the optimizers and write
// CSV/JSON results.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hcn/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTraversal = 3;

struct Common {
  std::string config_path;
  std::string out = "results";
  std::string name;
  bool omit_timing = false;
  double epsilon = 1e-3;
  double xi = 3e-3;
  bool literal_thresholds = false;
  double max_enum = 1e6;
  bool exhaustive_phases = false;
};

hcn::AlgorithmSettings settings_from(const Common& c) {
  hcn::AlgorithmSettings s;
  s.bcd.phase.epsilon = c.literal_thresholds ? std::exp(-3.0) : c.epsilon;
  s.bcd.xi = c.literal_thresholds ? 3.0 * std::exp(-3.0) : c.xi;
  s.traversal.max_enum = c.max_enum;
  s.traversal.exhaustive_phases = c.exhaustive_phases;
  s.traversal.phase = s.bcd.phase;
  return s;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw hcn::ConfigError("cannot open config file " + path);
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw hcn::ConfigError("cannot parse " + path + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Scenario config (JSON)")->required();
  cmd->add_option("--out", c.out, "Output root directory")->capture_default_str();
  cmd->add_option("--name", c.name, "Run name (defaults to the config name)");
  cmd->add_flag("--omit-timing", c.omit_timing, "Write zero for every wall-clock field");
  cmd->add_option("--epsilon", c.epsilon, "Phase search sweep threshold (bit/s)")->capture_default_str();
  cmd->add_option("--xi", c.xi, "Relative outer-iteration threshold")->capture_default_str();
  cmd->add_flag("--literal-thresholds", c.literal_thresholds, "Use epsilon = e^-3 and xi = 3 e^-3");
  cmd->add_option("--max-enum", c.max_enum, "Traversal enumeration cap")->capture_default_str();
  cmd->add_flag("--exhaustive-phases", c.exhaustive_phases, "Traversal enumerates phases too");
}

int run_sweep_cmd(const Common& c, const std::string& axis, const std::string& values, const std::string& seeds,
                  const std::string& algorithms, int parallelism) {
  const nlohmann::json doc = read_json(c.config_path);
  const hcn::ScenarioConfig base = hcn::parse_config(doc);
  hcn::SweepSpec spec = hcn::sweep_from_json(doc);
  if (!c.name.empty()) spec.name = c.name;
  if (!axis.empty()) spec.axis = axis;
  if (!values.empty()) {
    spec.values.clear();
    std::stringstream ss(values);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        spec.values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw hcn::ConfigError("bad axis value '" + item + "'");
      }
    }
  }
  if (!seeds.empty()) spec.seeds = hcn::parse_seed_list(seeds);
  if (!algorithms.empty()) {
    spec.algorithms.clear();
    std::stringstream ss(algorithms);
    std::string item;
    while (std::getline(ss, item, ',')) {
      spec.algorithms.push_back(hcn::parse_algorithm(item));
    }
  }
  if (spec.algorithms.empty()) {
    spec.algorithms = {hcn::Algorithm::PA, hcn::Algorithm::CGA, hcn::Algorithm::RO, hcn::Algorithm::RA,
                       hcn::Algorithm::CCGA};
  }
  spec.parallelism = parallelism;
  spec.omit_timing = c.omit_timing;
  spec.validate();

  const auto runs = hcn::run_sweep(spec, base, settings_from(c));
  const auto dir = hcn::timestamped_dir(c.out, spec.name);
  hcn::write_sweep_outputs(dir, spec, base, runs);
  std::cout << "wrote " << runs.size() << " runs to " << dir.string() << "\n";
  return 0;
}

int run_single_cmd(const Common& c, const std::string& algorithm, std::uint64_t seed) {
  const hcn::ScenarioConfig cfg = hcn::load_config(c.config_path);
  const hcn::Algorithm algo = hcn::parse_algorithm(algorithm);
  const hcn::Scenario scenario = hcn::build_scenario(cfg, seed);
  const hcn::AlgorithmSettings settings = settings_from(c);
  if (algo == hcn::Algorithm::OS) {
    const double count = hcn::association_count(scenario);
    if (count > settings.traversal.max_enum) {
      throw hcn::TraversalRefused(count);
    }
  }
  hcn::RunRecord rec = hcn::run_algorithm(scenario, algo, seed, settings);
  if (c.omit_timing) {
    rec.runtime_ms = 0.0;
    rec.solution.trace.clear_timing();
  }
  const auto dir = hcn::timestamped_dir(c.out, c.name.empty() ? cfg.name : c.name);
  nlohmann::json report = {{"algorithm", algorithm},
                           {"seed", seed},
                           {"runtime_ms", rec.runtime_ms},
                           {"iterations", rec.iterations},
                           {"report", hcn::to_json(rec.solution.report)},
                           {"assignment", hcn::to_json(rec.solution.assignment)},
                           {"phases", hcn::to_json(rec.solution.phases)}};
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_text(dir / "trace.json", rec.solution.trace.to_json().dump(2) + "\n");
  write_text(dir / "scenario.json", scenario.to_json().dump() + "\n");
  write_text(dir / "config.json", hcn::config_to_json(cfg).dump(2) + "\n");
  std::cout << algorithm << " seed " << seed << ": sum_rate " << hcn::format_number(rec.solution.report.sum_rate)
            << " bit/s, fairness " << hcn::format_number(rec.solution.report.fairness) << "\n"
            << "wrote " << dir.string() << "\n";
  return 0;
}

int run_validate_cmd(const std::string& path, std::uint64_t seed) {
  const nlohmann::json doc = read_json(path);
  const hcn::ScenarioConfig cfg = hcn::parse_config(doc);
  hcn::sweep_from_json(doc);
  const hcn::Scenario scenario = hcn::build_scenario(cfg, seed);
  std::cout << cfg.name << ": " << scenario.num_bs() << " BSs, " << scenario.num_users() << " users, "
            << hcn::format_number(hcn::association_count(scenario)) << " feasible associations, "
            << scenario.clamped_links() << " clamped links\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted multi-band HCN simulator"};
  app.require_subcommand(1);

  Common sweep_opts;
  std::string axis, values, seeds, algorithms;
  int parallelism = 1;
  CLI::App* sweep = app.add_subcommand("sweep", "Run algorithms across one parameter axis");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "Sweep axis");
  sweep->add_option("--values", values, "Comma-separated axis values");
  sweep->add_option("--seeds,--seed", seeds, "Seeds, e.g. 1-20 or 1,4,7");
  sweep->add_option("--algorithms", algorithms, "Comma-separated subset of PA,CGA,RO,RA,CCGA,OS");
  sweep->add_option("--parallelism", parallelism, "Worker threads")->capture_default_str();

  Common single_opts;
  std::string algorithm = "PA";
  std::uint64_t seed = 1;
  CLI::App* single = app.add_subcommand("single", "Run one algorithm on one scenario");
  add_common(single, single_opts);
  single->add_option("--algorithm,--algorithms", algorithm, "PA, CGA, RO, RA, CCGA or OS")->capture_default_str();
  single->add_option("--seed", seed, "Scenario and algorithm seed")->capture_default_str();

  std::string validate_path;
  std::uint64_t validate_seed = 1;
  CLI::App* validate = app.add_subcommand("validate-config", "Parse a config and build one scenario");
  validate->add_option("--config", validate_path, "Scenario config (JSON)")->required();
  validate->add_option("--seed", validate_seed, "Seed used for the trial build")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sweep) return run_sweep_cmd(sweep_opts, axis, values, seeds, algorithms, parallelism);
    if (*single) return run_single_cmd(single_opts, algorithm, seed);
    if (*validate) return run_validate_cmd(validate_path, validate_seed);
  } catch (const hcn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hcn::TraversalRefused& e) {
    std::cerr << e.what() << "\n";
    return kExitTraversal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
