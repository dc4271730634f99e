#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "hcn/experiment.hpp"

using namespace hcn;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.name = "t";
  s.axis = "user_group";
  s.values = {0, 1};
  s.seeds = {1, 2};
  s.algorithms = {Algorithm::PA, Algorithm::CGA, Algorithm::RO, Algorithm::RA, Algorithm::CCGA};
  s.omit_timing = true;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a : {Algorithm::PA, Algorithm::CGA, Algorithm::RO, Algorithm::RA, Algorithm::CCGA, Algorithm::OS}) {
    CHECK(parse_algorithm(algorithm_name(a)) == a);
  }
  CHECK_THROWS_AS(parse_algorithm("XYZ"), ConfigError);
}

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("1-3") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(parse_seed_list("4,7,9") == std::vector<std::uint64_t>{4, 7, 9});
  CHECK(parse_seed_list("1-2,5") == std::vector<std::uint64_t>{1, 2, 5});
  CHECK_THROWS_AS(parse_seed_list("3-1"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("a"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list(""), ConfigError);
}

TEST_CASE("axes rewrite the config") {
  const auto base = fixtures::overlap_config();
  auto c = apply_axis(base, "user_group", 2);
  CHECK(c.base_stations[0].users == 5);
  CHECK(c.base_stations[1].users == 3);
  c = apply_axis(base, "subchannel_group", 1);
  CHECK(c.base_stations[0].num_subchannels == 4);
  CHECK(c.base_stations[2].num_subchannels == 2);
  c = apply_axis(base, "users_per_bs", 6);
  CHECK(c.base_stations[0].users == 6);
  CHECK(c.base_stations[2].users == 6);
  CHECK(apply_axis(base, "ris_N", 6).ris.rows_cols == 6);
  CHECK(apply_axis(base, "ris_e", 2).ris.quant_bits == 2);
  CHECK(apply_axis(base, "outage_beta", 0.01).outage_beta == 0.01);
  CHECK(apply_axis(base, "beamwidth_theta3db", 40).half_power_beamwidth_deg == 40.0);
  CHECK(apply_axis(base, "thz_enabled", 1).base_stations[2].band == "THz340");
  CHECK(apply_axis(base, "thz_enabled", 0).base_stations[2].band == "mmW26");
  CHECK_THROWS_AS(apply_axis(base, "ris_N", 1.5), ConfigError);
  CHECK_THROWS_AS(apply_axis(base, "colour", 1), ConfigError);
  CHECK_THROWS_AS(apply_axis(base, "ris_e", 0), ConfigError);
}

TEST_CASE("sweep block parsing") {
  const auto doc = nlohmann::json::parse(R"({"name": "x", "sweep": {"axis": "ris_N", "values": [2, 4],
    "seeds": "1-3", "algorithms": ["PA", "RA"]}})");
  const auto s = sweep_from_json(doc);
  CHECK(s.name == "x");
  CHECK(s.axis == "ris_N");
  CHECK(s.seeds.size() == 3);
  CHECK(s.algorithms == std::vector<Algorithm>{Algorithm::PA, Algorithm::RA});
  CHECK_THROWS_AS(sweep_from_json(nlohmann::json::parse(R"({"sweep": {"axes": "x"}})")), ConfigError);
  SweepSpec bad = s;
  bad.axis = "nope";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.parallelism = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sweeps are ordered, complete and independent of parallelism") {
  const auto base = fixtures::overlap_config(1);
  auto spec = small_spec();
  const AlgorithmSettings settings;
  const auto serial = run_sweep(spec, base, settings);
  CHECK(serial.size() == 2 * 2 * 5);
  CHECK(serial.front().algorithm == Algorithm::PA);
  CHECK(serial[5].seed == 2);
  CHECK(serial.back().value_index == 1);
  spec.parallelism = 3;
  const auto parallel = run_sweep(spec, base, settings);
  CHECK(results_csv(spec, serial) == results_csv(spec, parallel));
  CHECK(runs_json(spec, serial) == runs_json(spec, parallel));
}

TEST_CASE("sweep outputs") {
  const auto base = fixtures::overlap_config(1);
  const auto spec = small_spec();
  const auto runs = run_sweep(spec, base, AlgorithmSettings{});
  const auto dir = fixtures::temp_dir("sweep");
  write_sweep_outputs(dir, spec, base, runs);
  const std::string results = slurp(dir / "results.csv");
  CHECK(results.rfind("sweep,axis,value,seed,algorithm,sum_rate,fairness,runtime_ms,iterations,bs0_utility,"
                      "bs1_utility,bs2_utility\n",
                      0) == 0);
  CHECK(std::count(results.begin(), results.end(), '\n') == 21);
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.rfind("sweep,axis,value,algorithm,runs,sum_rate_mean,sum_rate_std,fairness_mean,fairness_std,"
                      "runtime_ms_mean\n",
                      0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 11);
  const auto cfg = nlohmann::json::parse(slurp(dir / "config.json"));
  CHECK(parse_config(cfg).base_stations.size() == 3);
  CHECK(sweep_from_json(cfg).seeds == spec.seeds);
  CHECK(nlohmann::json::parse(slurp(dir / "runs.json")).size() == 20);

  // omit_timing makes reruns byte-identical.
  const auto dir2 = fixtures::temp_dir("sweep2");
  write_sweep_outputs(dir2, spec, base, run_sweep(spec, base, AlgorithmSettings{}));
  CHECK(slurp(dir2 / "results.csv") == results);
  CHECK(slurp(dir2 / "runs.json") == slurp(dir / "runs.json"));
}

TEST_CASE("oversized traversal is refused before any run") {
  auto spec = small_spec();
  spec.algorithms = {Algorithm::OS};
  AlgorithmSettings settings;
  settings.traversal.max_enum = 1.0;
  CHECK_THROWS_AS(run_sweep(spec, fixtures::overlap_config(3), settings), TraversalRefused);
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1e9)) == 1e9);
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("timestamped directories never collide") {
  const auto root = fixtures::temp_dir("stamp");
  const auto a = timestamped_dir(root, "n");
  const auto b = timestamped_dir(root, "n");
  CHECK(a != b);
  CHECK(std::filesystem::is_directory(a));
  CHECK(a.parent_path() == root / "n");
}

}  // TEST_SUITE
