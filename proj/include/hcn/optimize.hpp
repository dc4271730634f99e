#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcn/rate.hpp"
#include "hcn/scenario.hpp"

namespace hcn {

/// Coalitions: users per BS, ascending ids. Users in no coalition are
/// unassigned.
struct Partition {
  std::vector<std::vector<UserId>> members;

  static Partition empty(std::size_t num_bs);
  static Partition from_assignment(const Scenario& scenario, const Assignment& assignment);
  /// Coalition holding u, or -1.
  BsId coalition_of(UserId u) const;
  void move(UserId u, BsId from, BsId to);

  bool operator==(const Partition&) const = default;
};

/// Round-robin sub-channels in user-id order inside every coalition.
Assignment derive_assignment(const Scenario& scenario, const Partition& partition);

/// Every covered user joins a uniformly random candidate (init_association
/// stream, `stream` distinguishes repeated draws under one seed).
Partition random_partition(const Scenario& scenario, std::uint64_t seed, std::uint64_t stream = 0);

struct TraceEntry {
  int iteration = 0;
  double sum_rate = 0.0;
  // Switch operations for the game, changed elements for the phase search.
  int changes = 0;
  double elapsed_ms = 0.0;
};

struct OptimizerTrace {
  std::vector<TraceEntry> entries;
  std::string termination;

  // Zero every wall-clock field (byte-stable outputs).
  void clear_timing();
  nlohmann::json to_json() const;
};

/// Smallest utility gain accepted as an improvement.
double improvement_threshold(double reference_rate);

/// Change of total system utility when user p leaves its coalition for
/// `target`. Only coalitions whose rates can change are recomputed: source,
/// target and every cellular coalition sharing their carrier. Throws
/// std::invalid_argument for an inadmissible target.
double switch_gain(const RateModel& model, const Partition& partition, UserId p, BsId target);

struct GameOptions {
  int history_window = 5;
  int max_rounds = 1000;
};

struct GameResult {
  Partition partition;
  Assignment assignment;
  OptimizerTrace trace;
};

GameResult coalition_game(const RateModel& model, Partition init, const GameOptions& options = {});

/// True when no user has a gain above the threshold for any candidate.
bool is_nash_stable(const RateModel& model, const Partition& partition);

struct PhaseSearchOptions {
  // Absolute sweep-to-sweep change of the panel's BS sum rate (bit/s).
  double epsilon = 1e-3;
  int max_sweeps = 100;
};

struct PhaseSearchResult {
  PhaseConfig phases;
  OptimizerTrace trace;
};

PhaseSearchResult phase_search(const Scenario& scenario, const Assignment& assignment, PhaseConfig init,
                               const PhaseSearchOptions& options = {});

/// Every index combination of each panel (panels are independent). For
/// tiny panels only.
PhaseConfig exhaustive_phases(const Scenario& scenario, const Assignment& assignment);

struct BcdOptions {
  // Relative outer-iteration improvement threshold.
  double xi = 3e-3;
  int max_iterations = 50;
  GameOptions game;
  PhaseSearchOptions phase;
};

struct Solution {
  Assignment assignment;
  PhaseConfig phases;
  RateReport report;
  OptimizerTrace trace;
};

Solution bcd_optimize(const Scenario& scenario, std::uint64_t seed, const BcdOptions& options = {});

/// Coalition game without panels, from the same random start as PA.
Solution baseline_cga(const Scenario& scenario, std::uint64_t seed, const GameOptions& options = {});
/// Random association, phase search only.
Solution baseline_ro(const Scenario& scenario, std::uint64_t seed, const PhaseSearchOptions& options = {});
/// Mean over `draws` random associations without panels. The returned
/// assignment is the first draw; the report holds the averages.
Solution baseline_ra(const Scenario& scenario, std::uint64_t seed, int draws = 100);
/// Coalition game with directional BSs out of service and no panels.
Solution baseline_ccga(const Scenario& scenario, std::uint64_t seed, const GameOptions& options = {});

class TraversalRefused : public std::runtime_error {
 public:
  explicit TraversalRefused(double product);
  double product() const { return product_; }

 private:
  double product_;
};

struct TraversalOptions {
  double max_enum = 1e6;
  // Enumerate every phase configuration instead of the local search.
  bool exhaustive_phases = false;
  PhaseSearchOptions phase;
};

/// Number of feasible associations (product of candidate-set sizes).
double association_count(const Scenario& scenario);

Solution traversal_optimal(const Scenario& scenario, const TraversalOptions& options = {});

}  // namespace hcn
