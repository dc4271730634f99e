#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcn/scenario.hpp"

namespace hcn {

/// User association (X) and sub-channel choice (S).
struct Assignment {
  std::vector<std::optional<BsId>> serving_bs;
  // -1 for unassigned users.
  std::vector<int> subchannel;

  static Assignment unassigned(std::size_t num_users);
  bool assigned(UserId u) const { return serving_bs[static_cast<std::size_t>(u)].has_value(); }
  BsId bs_of(UserId u) const { return *serving_bs[static_cast<std::size_t>(u)]; }
  int subchannel_of(UserId u) const { return subchannel[static_cast<std::size_t>(u)]; }

  bool operator==(const Assignment&) const = default;
};

/// Quantised phase indices per panel, row-major; empty for BSs without one.
struct PhaseConfig {
  std::vector<std::vector<int>> indices;

  static PhaseConfig zeros(const Scenario& scenario);
  // Uniform indices drawn from the init_phases stream of `seed`.
  static PhaseConfig random(const Scenario& scenario, std::uint64_t seed);

  bool operator==(const PhaseConfig&) const = default;
};

struct RateReport {
  std::vector<double> per_user_rate;
  std::vector<double> per_bs_utility;
  double sum_rate = 0.0;
  double fairness = 1.0;
};

class InfeasibleAssignment : public std::invalid_argument {
 public:
  InfeasibleAssignment(UserId user, const std::string& why);
  UserId user() const { return user_; }

 private:
  UserId user_;
};

/// Throws InfeasibleAssignment naming the first violating user.
void check_feasible(const Scenario& scenario, const Assignment& assignment);
/// Throws std::out_of_range on a malformed phase configuration.
void check_phases(const Scenario& scenario, const PhaseConfig& phases);

/// Users grouped by serving BS and by (frequency group, sub-channel).
class Occupancy {
 public:
  Occupancy(const Scenario& scenario, const Assignment& assignment);

  // Ascending user ids.
  const std::vector<UserId>& members(BsId b) const { return members_[static_cast<std::size_t>(b)]; }
  // Every user on the carrier/sub-channel of u, u included.
  const std::vector<UserId>& channel_of(UserId u) const;

 private:
  const Assignment* assignment_;
  std::vector<int> group_of_bs_;
  std::vector<std::vector<UserId>> members_;
  // [group][subchannel]
  std::vector<std::vector<std::vector<UserId>>> channels_;
};

// Per-link building blocks, linear scale.
namespace terms {
/// A |h0|^2 G_u G_b l^-u P for cellular BS b and user u (desired when u is
/// served by b, interference otherwise).
double cellular_received_power(const Scenario& scenario, BsId b, UserId u);
/// k0 G0^2 P: multiplies |F|^2 in the directional desired term.
double mmwave_signal_scale(const Scenario& scenario, BsId b);
/// rho k0 G_t G_r l^-u P of interferer j on victim u at directional BS b.
double mmwave_direct_interference(const Scenario& scenario, BsId b, UserId u, UserId j);
/// G_t G_r P (times k0 when enabled); multiplies |sum H_j|^2.
double mmwave_ris_interference_weight(const Scenario& scenario, BsId b, UserId u, UserId j);
/// 1 - P_out over the user-BS distance.
double link_availability(const Scenario& scenario, BsId b, UserId u);
/// B log2(1 + sinr).
double shannon_rate(double bandwidth_hz, double sinr);
}  // namespace terms

/// Rate evaluation with the reflected sums of one phase configuration
/// cached per (BS, user).
class RateModel {
 public:
  RateModel(const Scenario& scenario, const PhaseConfig& phases);

  const Scenario& scenario() const { return *scenario_; }
  const PhaseConfig& phases() const { return phases_; }

  /// sum_k h_k q_k for user u via BS b's panel; 0 without an active panel.
  Complex reflected(BsId b, UserId u) const;
  /// Overwrite the cached reflected sum (phase search trial moves).
  void set_reflected(BsId b, UserId u, Complex value);
  /// Change one index and refresh the cached sums of every user at b.
  void set_phase(BsId b, int element, int index);

  double sinr(const Assignment& a, const Occupancy& occ, UserId u) const;
  double user_rate(const Assignment& a, const Occupancy& occ, UserId u) const;
  /// Sum of member rates of BS b.
  double bs_utility(const Assignment& a, const Occupancy& occ, BsId b) const;
  RateReport evaluate(const Assignment& a) const;

 private:
  void refresh(BsId b);

  const Scenario* scenario_;
  PhaseConfig phases_;
  // [bs][user]
  std::vector<std::vector<Complex>> reflected_;
};

std::vector<UserId> cochannel_interferers(const Scenario& scenario, const Assignment& assignment, UserId u);
double cellular_sinr(const Scenario& scenario, const Assignment& assignment, UserId u);
double mmwave_sinr(const Scenario& scenario, const Assignment& assignment, const PhaseConfig& phases, UserId u);
double user_rate(const Scenario& scenario, const Assignment& assignment, const PhaseConfig& phases, UserId u);
RateReport evaluate(const Scenario& scenario, const Assignment& assignment, const PhaseConfig& phases);

/// (sum R)^2 / (n sum R^2); 1 when every entry is zero.
double jain_fairness(std::span<const double> utilities);
/// Mean of (optimal - method) / optimal.
double average_deviation(std::span<const double> optimal, std::span<const double> method);

nlohmann::json to_json(const RateReport& report);
nlohmann::json to_json(const Assignment& assignment);
nlohmann::json to_json(const PhaseConfig& phases);
std::string report_csv_header(std::size_t num_bs);
std::string report_csv_row(const std::string& scenario_id, const std::string& algorithm, const RateReport& report);

}  // namespace hcn
