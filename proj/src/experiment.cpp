#include "hcn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace hcn {
namespace {

const std::vector<Algorithm> kAllAlgorithms = {Algorithm::PA, Algorithm::CGA, Algorithm::RO,
                                               Algorithm::RA, Algorithm::CCGA, Algorithm::OS};

int as_int(const std::string& axis, double value) {
  if (value != std::floor(value) || std::abs(value) > 1e6) {
    throw ConfigError("axis " + axis + " needs integer values, got " + format_number(value));
  }
  return static_cast<int>(value);
}

int iterations_of(Algorithm a, const Solution& s) {
  switch (a) {
    case Algorithm::RA:
    case Algorithm::OS:
      return s.trace.entries.empty() ? 0 : s.trace.entries.back().iteration;
    default:
      // Entry 0 records the starting point.
      return static_cast<int>(s.trace.entries.size()) - 1;
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) {
    return 0.0;
  }
  double acc = 0.0;
  for (const double x : xs) {
    acc += (x - mean) * (x - mean);
  }
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::PA: return "PA";
    case Algorithm::CGA: return "CGA";
    case Algorithm::RO: return "RO";
    case Algorithm::RA: return "RA";
    case Algorithm::CCGA: return "CCGA";
    case Algorithm::OS: return "OS";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (const Algorithm a : kAllAlgorithms) {
    if (algorithm_name(a) == name) {
      return a;
    }
  }
  throw ConfigError("unknown algorithm '" + name + "' (expected PA, CGA, RO, RA, CCGA or OS)");
}

RunRecord run_algorithm(const Scenario& scenario, Algorithm algorithm, std::uint64_t seed,
                        const AlgorithmSettings& settings) {
  RunRecord rec;
  rec.seed = seed;
  rec.algorithm = algorithm;
  const auto start = std::chrono::steady_clock::now();
  switch (algorithm) {
    case Algorithm::PA: rec.solution = bcd_optimize(scenario, seed, settings.bcd); break;
    case Algorithm::CGA: rec.solution = baseline_cga(scenario, seed, settings.bcd.game); break;
    case Algorithm::RO: rec.solution = baseline_ro(scenario, seed, settings.bcd.phase); break;
    case Algorithm::RA: rec.solution = baseline_ra(scenario, seed, settings.ra_draws); break;
    case Algorithm::CCGA: rec.solution = baseline_ccga(scenario, seed, settings.bcd.game); break;
    case Algorithm::OS: rec.solution = traversal_optimal(scenario, settings.traversal); break;
  }
  rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rec.iterations = iterations_of(algorithm, rec.solution);
  return rec;
}

ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis, double value) {
  ScenarioConfig cfg = base;
  if (axis == "user_group" || axis == "subchannel_group") {
    const int g = as_int(axis, value);
    if (g < 0) {
      throw ConfigError(axis + " values must be >= 0");
    }
    for (BsSpec& s : cfg.base_stations) {
      // 4G cells carry two more users / sub-channels than the others.
      const int n = (s.band == "4G" ? 3 : 1) + g;
      if (axis == "user_group") {
        s.users = n;
      } else {
        s.num_subchannels = n;
      }
    }
  } else if (axis == "users_per_bs") {
    const int n = as_int(axis, value);
    if (n < 0) {
      throw ConfigError(axis + " values must be >= 0");
    }
    for (BsSpec& s : cfg.base_stations) {
      s.users = n;
    }
  } else if (axis == "ris_N") {
    cfg.ris.rows_cols = as_int(axis, value);
  } else if (axis == "ris_e") {
    cfg.ris.quant_bits = as_int(axis, value);
  } else if (axis == "outage_beta") {
    cfg.outage_beta = value;
  } else if (axis == "beamwidth_theta3db") {
    cfg.half_power_beamwidth_deg = value;
  } else if (axis == "thz_enabled") {
    if (as_int(axis, value) != 0) {
      cfg.band("THz340");
      auto it = std::find_if(cfg.base_stations.begin(), cfg.base_stations.end(),
                             [&](const BsSpec& s) { return cfg.band(s.band).is_mmwave; });
      if (it == cfg.base_stations.end()) {
        throw ConfigError("thz_enabled needs a directional BS to convert");
      }
      it->band = "THz340";
    }
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
  cfg.validate();
  return cfg;
}

void SweepSpec::validate() const {
  if (std::find(kSweepAxes.begin(), kSweepAxes.end(), axis) == kSweepAxes.end()) {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
  if (values.empty()) throw ConfigError("sweep needs at least one axis value");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  if (algorithms.empty()) throw ConfigError("sweep needs at least one algorithm");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
}

SweepSpec sweep_from_json(const nlohmann::json& doc) {
  SweepSpec spec;
  if (auto name = doc.find("name"); name != doc.end()) {
    spec.name = name->get<std::string>();
  }
  const auto it = doc.find("sweep");
  if (it == doc.end()) {
    return spec;
  }
  try {
    for (const auto& [key, v] : it->items()) {
      if (key == "axis") {
        spec.axis = v.get<std::string>();
      } else if (key == "values") {
        spec.values = v.get<std::vector<double>>();
      } else if (key == "seeds") {
        spec.seeds = v.is_string() ? parse_seed_list(v.get<std::string>()) : v.get<std::vector<std::uint64_t>>();
      } else if (key == "algorithms") {
        for (const auto& a : v) {
          spec.algorithms.push_back(parse_algorithm(a.get<std::string>()));
        }
      } else {
        throw ConfigError("unknown key '" + key + "' in sweep");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed sweep block: ") + e.what());
  }
  return spec;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
      throw ConfigError("bad seed '" + s + "'");
    }
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(number(item));
      continue;
    }
    const std::uint64_t lo = number(item.substr(0, dash));
    const std::uint64_t hi = number(item.substr(dash + 1));
    if (hi < lo || hi - lo > 1000000) {
      throw ConfigError("bad seed range '" + item + "'");
    }
    for (std::uint64_t s = lo; s <= hi; ++s) {
      seeds.push_back(s);
    }
  }
  if (seeds.empty()) {
    throw ConfigError("empty seed list");
  }
  return seeds;
}

std::vector<RunRecord> run_sweep(const SweepSpec& spec, const ScenarioConfig& base, const AlgorithmSettings& settings) {
  spec.validate();
  std::vector<ScenarioConfig> configs;
  for (const double v : spec.values) {
    configs.push_back(apply_axis(base, spec.axis, v));
  }
  const bool wants_os = std::find(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::OS) != spec.algorithms.end();

  struct Task {
    std::size_t value_index;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t vi = 0; vi < configs.size(); ++vi) {
    for (const std::uint64_t seed : spec.seeds) {
      tasks.push_back({vi, seed});
      if (wants_os) {
        const double count = association_count(build_scenario(configs[vi], seed));
        if (count > settings.traversal.max_enum) {
          throw TraversalRefused(count);
        }
      }
    }
  }

  const std::size_t per_task = spec.algorithms.size();
  std::vector<RunRecord> runs(tasks.size() * per_task);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) {
        return;
      }
      try {
        const Scenario scenario = build_scenario(configs[tasks[t].value_index], tasks[t].seed);
        for (std::size_t a = 0; a < per_task; ++a) {
          RunRecord rec = run_algorithm(scenario, spec.algorithms[a], tasks[t].seed, settings);
          rec.value_index = tasks[t].value_index;
          rec.value = spec.values[tasks[t].value_index];
          if (spec.omit_timing) {
            rec.runtime_ms = 0.0;
            rec.solution.trace.clear_timing();
          }
          runs[t * per_task + a] = std::move(rec);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next = tasks.size();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::min<int>(spec.parallelism, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& th : pool) {
    th.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  auto algo_rank = [&](Algorithm a) {
    return std::find(kAllAlgorithms.begin(), kAllAlgorithms.end(), a) - kAllAlgorithms.begin();
  };
  std::stable_sort(runs.begin(), runs.end(), [&](const RunRecord& x, const RunRecord& y) {
    if (x.value_index != y.value_index) return x.value_index < y.value_index;
    if (x.seed != y.seed) return x.seed < y.seed;
    return algo_rank(x.algorithm) < algo_rank(y.algorithm);
  });
  return runs;
}

std::string results_csv(const SweepSpec& spec, const std::vector<RunRecord>& runs) {
  std::size_t num_bs = 0;
  for (const auto& r : runs) {
    num_bs = std::max(num_bs, r.solution.report.per_bs_utility.size());
  }
  std::string out = "sweep,axis,value,seed,algorithm,sum_rate,fairness,runtime_ms,iterations";
  for (std::size_t b = 0; b < num_bs; ++b) {
    out += ",bs" + std::to_string(b) + "_utility";
  }
  out += "\n";
  for (const auto& r : runs) {
    out += spec.name + "," + spec.axis + "," + format_number(r.value) + "," + std::to_string(r.seed) + "," +
           algorithm_name(r.algorithm) + "," + format_number(r.solution.report.sum_rate) + "," +
           format_number(r.solution.report.fairness) + "," + format_number(r.runtime_ms) + "," +
           std::to_string(r.iterations);
    for (std::size_t b = 0; b < num_bs; ++b) {
      const auto& u = r.solution.report.per_bs_utility;
      out += "," + (b < u.size() ? format_number(u[b]) : std::string());
    }
    out += "\n";
  }
  return out;
}

std::string summary_csv(const SweepSpec& spec, const std::vector<RunRecord>& runs) {
  struct Acc {
    std::vector<double> rate;
    std::vector<double> fairness;
    std::vector<double> runtime;
  };
  std::map<std::pair<std::size_t, int>, Acc> groups;
  for (const auto& r : runs) {
    Acc& acc = groups[{r.value_index, static_cast<int>(r.algorithm)}];
    acc.rate.push_back(r.solution.report.sum_rate);
    acc.fairness.push_back(r.solution.report.fairness);
    acc.runtime.push_back(r.runtime_ms);
  }
  auto mean = [](const std::vector<double>& xs) {
    double s = 0.0;
    for (const double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  };
  std::string out =
      "sweep,axis,value,algorithm,runs,sum_rate_mean,sum_rate_std,fairness_mean,fairness_std,runtime_ms_mean\n";
  for (const auto& [key, acc] : groups) {
    const double rm = mean(acc.rate);
    const double fm = mean(acc.fairness);
    out += spec.name + "," + spec.axis + "," + format_number(spec.values[key.first]) + "," +
           algorithm_name(static_cast<Algorithm>(key.second)) + "," + std::to_string(acc.rate.size()) + "," +
           format_number(rm) + "," + format_number(sample_std(acc.rate, rm)) + "," + format_number(fm) + "," +
           format_number(sample_std(acc.fairness, fm)) + "," + format_number(mean(acc.runtime)) + "\n";
  }
  return out;
}

nlohmann::json runs_json(const SweepSpec& spec, const std::vector<RunRecord>& runs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : runs) {
    arr.push_back({{"sweep", spec.name},
                   {"axis", spec.axis},
                   {"value", r.value},
                   {"seed", r.seed},
                   {"algorithm", algorithm_name(r.algorithm)},
                   {"runtime_ms", r.runtime_ms},
                   {"iterations", r.iterations},
                   {"report", to_json(r.solution.report)},
                   {"trace", r.solution.trace.to_json()},
                   {"assignment", to_json(r.solution.assignment)},
                   {"phases", to_json(r.solution.phases)}});
  }
  return arr;
}

void write_sweep_outputs(const std::filesystem::path& dir, const SweepSpec& spec, const ScenarioConfig& base,
                         const std::vector<RunRecord>& runs) {
  std::filesystem::create_directories(dir);
  write_file(dir / "results.csv", results_csv(spec, runs));
  write_file(dir / "summary.csv", summary_csv(spec, runs));
  write_file(dir / "runs.json", runs_json(spec, runs).dump(1) + "\n");
  nlohmann::json cfg = config_to_json(base);
  std::vector<std::string> algorithms;
  for (const Algorithm a : spec.algorithms) {
    algorithms.push_back(algorithm_name(a));
  }
  cfg["sweep"] = {{"axis", spec.axis}, {"values", spec.values}, {"seeds", spec.seeds}, {"algorithms", algorithms}};
  write_file(dir / "config.json", cfg.dump(2) + "\n");
}

std::filesystem::path timestamped_dir(const std::filesystem::path& root, const std::string& name) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  std::filesystem::path dir = root / name / stamp;
  for (int i = 1; std::filesystem::exists(dir); ++i) {
    dir = root / name / (std::string(stamp) + "-" + std::to_string(i));
  }
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace hcn
