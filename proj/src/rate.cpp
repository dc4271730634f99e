#include "hcn/rate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "hcn/rng.hpp"

namespace hcn {
namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

}  // namespace

Assignment Assignment::unassigned(std::size_t num_users) {
  Assignment a;
  a.serving_bs.assign(num_users, std::nullopt);
  a.subchannel.assign(num_users, -1);
  return a;
}

PhaseConfig PhaseConfig::zeros(const Scenario& scenario) {
  PhaseConfig p;
  p.indices.resize(scenario.num_bs());
  for (const auto& bs : scenario.base_stations()) {
    if (bs.ris) {
      p.indices[static_cast<std::size_t>(bs.bs_id)].assign(static_cast<std::size_t>(bs.ris->num_elements()), 0);
    }
  }
  return p;
}

PhaseConfig PhaseConfig::random(const Scenario& scenario, std::uint64_t seed) {
  PhaseConfig p = zeros(scenario);
  for (const auto& bs : scenario.base_stations()) {
    if (!bs.ris) {
      continue;
    }
    KeyedRng rng(seed, DrawKind::init_phases, {static_cast<std::uint64_t>(bs.bs_id)});
    const auto levels = static_cast<std::size_t>(bs.ris->num_phase_indices());
    for (int& m : p.indices[static_cast<std::size_t>(bs.bs_id)]) {
      m = static_cast<int>(rng.below(levels));
    }
  }
  return p;
}

InfeasibleAssignment::InfeasibleAssignment(UserId user, const std::string& why)
    : std::invalid_argument("infeasible assignment for user " + std::to_string(user) + ": " + why), user_(user) {}

void check_feasible(const Scenario& scenario, const Assignment& assignment) {
  if (assignment.serving_bs.size() != scenario.num_users() || assignment.subchannel.size() != scenario.num_users()) {
    throw std::invalid_argument("assignment size does not match the number of users");
  }
  for (std::size_t i = 0; i < scenario.num_users(); ++i) {
    const auto u = static_cast<UserId>(i);
    if (!assignment.assigned(u)) {
      continue;
    }
    const BsId b = assignment.bs_of(u);
    if (!scenario.is_candidate(u, b)) {
      throw InfeasibleAssignment(u, "BS " + std::to_string(b) + " is not a candidate");
    }
    const int s = assignment.subchannel_of(u);
    if (s < 0 || s >= scenario.bs(b).num_subchannels) {
      throw InfeasibleAssignment(u, "sub-channel " + std::to_string(s) + " out of range");
    }
  }
}

void check_phases(const Scenario& scenario, const PhaseConfig& phases) {
  if (phases.indices.size() != scenario.num_bs()) {
    throw std::out_of_range("phase configuration does not cover every BS");
  }
  for (const auto& bs : scenario.base_stations()) {
    const auto& row = phases.indices[static_cast<std::size_t>(bs.bs_id)];
    if (!bs.ris) {
      if (!row.empty()) {
        throw std::out_of_range("phase indices given for BS " + std::to_string(bs.bs_id) + " without a panel");
      }
      continue;
    }
    if (row.size() != static_cast<std::size_t>(bs.ris->num_elements())) {
      throw std::out_of_range("wrong element count for the panel of BS " + std::to_string(bs.bs_id));
    }
    for (const int m : row) {
      if (m < 0 || m >= bs.ris->num_phase_indices()) {
        throw std::out_of_range("phase index " + std::to_string(m) + " out of range at BS " + std::to_string(bs.bs_id));
      }
    }
  }
}

Occupancy::Occupancy(const Scenario& scenario, const Assignment& assignment) : assignment_(&assignment) {
  const std::size_t nb = scenario.num_bs();
  members_.assign(nb, {});
  group_of_bs_.resize(nb);
  int groups = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    group_of_bs_[b] = scenario.radio(static_cast<BsId>(b)).frequency_group;
    groups = std::max(groups, group_of_bs_[b] + 1);
  }
  channels_.assign(static_cast<std::size_t>(groups), {});
  for (std::size_t b = 0; b < nb; ++b) {
    auto& group = channels_[static_cast<std::size_t>(group_of_bs_[b])];
    const auto subs = static_cast<std::size_t>(scenario.bs(static_cast<BsId>(b)).num_subchannels);
    if (group.size() < subs) {
      group.resize(subs);
    }
  }
  for (std::size_t i = 0; i < assignment.serving_bs.size(); ++i) {
    const auto u = static_cast<UserId>(i);
    if (!assignment.assigned(u)) {
      continue;
    }
    const auto b = static_cast<std::size_t>(assignment.bs_of(u));
    members_[b].push_back(u);
    channels_[static_cast<std::size_t>(group_of_bs_[b])][static_cast<std::size_t>(assignment.subchannel_of(u))].push_back(u);
  }
}

const std::vector<UserId>& Occupancy::channel_of(UserId u) const {
  const auto b = static_cast<std::size_t>(assignment_->bs_of(u));
  return channels_[static_cast<std::size_t>(group_of_bs_[b])][static_cast<std::size_t>(assignment_->subchannel_of(u))];
}

namespace terms {

double cellular_received_power(const Scenario& scenario, BsId b, UserId u) {
  const BsRadio& r = scenario.radio(b);
  const LinkBudget& l = scenario.link(b, u);
  return l.direct_power * r.fixed_gain * l.path_gain * r.tx_power_w;
}

double mmwave_signal_scale(const Scenario& scenario, BsId b) {
  const BsRadio& r = scenario.radio(b);
  const double g0 = channel::db_to_linear(scenario.beam().max_gain_db());
  return r.wavelength_factor * g0 * g0 * r.tx_power_w;
}

double mmwave_direct_interference(const Scenario& scenario, BsId b, UserId u, UserId j) {
  const BsRadio& r = scenario.radio(b);
  return scenario.params().mui_factor * r.wavelength_factor * scenario.pair_gain(b, u, j) *
         scenario.link(b, j).path_gain * r.tx_power_w;
}

double mmwave_ris_interference_weight(const Scenario& scenario, BsId b, UserId u, UserId j) {
  const BsRadio& r = scenario.radio(b);
  const double w = scenario.pair_gain(b, u, j) * r.tx_power_w;
  return scenario.params().ris_interference_k0 ? w * r.wavelength_factor : w;
}

double link_availability(const Scenario& scenario, BsId b, UserId u) {
  return 1.0 - channel::outage_probability(scenario.link(b, u).distance_m, scenario.params().outage_beta);
}

double shannon_rate(double bandwidth_hz, double sinr) { return bandwidth_hz * std::log1p(sinr) / std::numbers::ln2; }

}  // namespace terms

RateModel::RateModel(const Scenario& scenario, const PhaseConfig& phases) : scenario_(&scenario), phases_(phases) {
  check_phases(scenario, phases);
  reflected_.assign(scenario.num_bs(), {});
  for (std::size_t b = 0; b < scenario.num_bs(); ++b) {
    refresh(static_cast<BsId>(b));
  }
}

void RateModel::refresh(BsId b) {
  auto& row = reflected_[static_cast<std::size_t>(b)];
  if (!scenario_->has_active_ris(b)) {
    row.clear();
    return;
  }
  const RisPanel& panel = *scenario_->bs(b).ris;
  const auto& idx = phases_.indices[static_cast<std::size_t>(b)];
  row.resize(scenario_->num_users());
  for (std::size_t u = 0; u < row.size(); ++u) {
    row[u] = channel::ris_effective_sum(panel, idx, scenario_->reflect_channels(b, static_cast<UserId>(u)));
  }
}

Complex RateModel::reflected(BsId b, UserId u) const {
  const auto& row = reflected_[static_cast<std::size_t>(b)];
  return row.empty() ? Complex{} : row[static_cast<std::size_t>(u)];
}

void RateModel::set_reflected(BsId b, UserId u, Complex value) {
  reflected_.at(static_cast<std::size_t>(b)).at(static_cast<std::size_t>(u)) = value;
}

void RateModel::set_phase(BsId b, int element, int index) {
  const auto& bs = scenario_->bs(b);
  if (!bs.ris || element < 0 || element >= bs.ris->num_elements() || index < 0 ||
      index >= bs.ris->num_phase_indices()) {
    throw std::out_of_range("set_phase: bad element or index");
  }
  phases_.indices[static_cast<std::size_t>(b)][static_cast<std::size_t>(element)] = index;
  refresh(b);
}

double RateModel::sinr(const Assignment& a, const Occupancy& occ, UserId u) const {
  const Scenario& sc = *scenario_;
  const BsId b = a.bs_of(u);
  const BsRadio& r = sc.radio(b);
  double interference = 0.0;
  if (!r.directional) {
    const double signal = terms::cellular_received_power(sc, b, u);
    for (const UserId j : occ.channel_of(u)) {
      if (j != u) {
        interference += terms::cellular_received_power(sc, b, j);
      }
    }
    return signal / (interference + r.noise_w);
  }
  const Complex f = std::sqrt(sc.link(b, u).path_gain) + reflected(b, u);
  const double signal = std::norm(f) * terms::mmwave_signal_scale(sc, b);
  double ris_interference = 0.0;
  for (const UserId j : occ.channel_of(u)) {
    if (j == u) {
      continue;
    }
    interference += terms::mmwave_direct_interference(sc, b, u, j);
    ris_interference += std::norm(reflected(b, j)) * terms::mmwave_ris_interference_weight(sc, b, u, j);
  }
  return signal / (ris_interference + interference + r.noise_w);
}

double RateModel::user_rate(const Assignment& a, const Occupancy& occ, UserId u) const {
  if (!a.assigned(u)) {
    return 0.0;
  }
  const BsId b = a.bs_of(u);
  const BsRadio& r = scenario_->radio(b);
  const double rate = terms::shannon_rate(r.bandwidth_hz, sinr(a, occ, u));
  return r.directional ? terms::link_availability(*scenario_, b, u) * rate : rate;
}

double RateModel::bs_utility(const Assignment& a, const Occupancy& occ, BsId b) const {
  double total = 0.0;
  for (const UserId u : occ.members(b)) {
    total += user_rate(a, occ, u);
  }
  return total;
}

RateReport RateModel::evaluate(const Assignment& a) const {
  check_feasible(*scenario_, a);
  const Occupancy occ(*scenario_, a);
  RateReport rep;
  rep.per_user_rate.resize(scenario_->num_users());
  rep.per_bs_utility.assign(scenario_->num_bs(), 0.0);
  for (std::size_t i = 0; i < rep.per_user_rate.size(); ++i) {
    const auto u = static_cast<UserId>(i);
    const double rate = user_rate(a, occ, u);
    rep.per_user_rate[i] = rate;
    rep.sum_rate += rate;
    if (a.assigned(u)) {
      rep.per_bs_utility[static_cast<std::size_t>(a.bs_of(u))] += rate;
    }
  }
  rep.fairness = jain_fairness(rep.per_bs_utility);
  return rep;
}

std::vector<UserId> cochannel_interferers(const Scenario& scenario, const Assignment& assignment, UserId u) {
  check_feasible(scenario, assignment);
  if (!assignment.assigned(u)) {
    return {};
  }
  const Occupancy occ(scenario, assignment);
  std::vector<UserId> out;
  for (const UserId j : occ.channel_of(u)) {
    if (j != u) {
      out.push_back(j);
    }
  }
  return out;
}

double cellular_sinr(const Scenario& scenario, const Assignment& assignment, UserId u) {
  check_feasible(scenario, assignment);
  if (!assignment.assigned(u) || scenario.radio(assignment.bs_of(u)).directional) {
    throw std::invalid_argument("cellular_sinr: user is not served by a cellular BS");
  }
  const RateModel model(scenario, PhaseConfig::zeros(scenario));
  return model.sinr(assignment, Occupancy(scenario, assignment), u);
}

double mmwave_sinr(const Scenario& scenario, const Assignment& assignment, const PhaseConfig& phases, UserId u) {
  check_feasible(scenario, assignment);
  if (!assignment.assigned(u) || !scenario.radio(assignment.bs_of(u)).directional) {
    throw std::invalid_argument("mmwave_sinr: user is not served by a directional BS");
  }
  const RateModel model(scenario, phases);
  return model.sinr(assignment, Occupancy(scenario, assignment), u);
}

double user_rate(const Scenario& scenario, const Assignment& assignment, const PhaseConfig& phases, UserId u) {
  check_feasible(scenario, assignment);
  const RateModel model(scenario, phases);
  return model.user_rate(assignment, Occupancy(scenario, assignment), u);
}

RateReport evaluate(const Scenario& scenario, const Assignment& assignment, const PhaseConfig& phases) {
  return RateModel(scenario, phases).evaluate(assignment);
}

double jain_fairness(std::span<const double> utilities) {
  if (utilities.empty()) {
    throw std::invalid_argument("jain_fairness: no utilities");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double r : utilities) {
    if (r < 0.0) {
      throw std::invalid_argument("jain_fairness: negative utility");
    }
    sum += r;
    sum_sq += r * r;
  }
  if (sum_sq == 0.0) {
    return 1.0;
  }
  return (sum * sum) / (static_cast<double>(utilities.size()) * sum_sq);
}

double average_deviation(std::span<const double> optimal, std::span<const double> method) {
  if (optimal.size() != method.size()) {
    throw std::invalid_argument("average_deviation: length mismatch");
  }
  if (optimal.empty()) {
    throw std::invalid_argument("average_deviation: empty input");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < optimal.size(); ++i) {
    if (!(optimal[i] > 0.0)) {
      throw std::invalid_argument("average_deviation: optimal values must be > 0");
    }
    total += (optimal[i] - method[i]) / optimal[i];
  }
  return total / static_cast<double>(optimal.size());
}

nlohmann::json to_json(const RateReport& report) {
  return {{"sum_rate", report.sum_rate},
          {"fairness", report.fairness},
          {"per_bs_utility", report.per_bs_utility},
          {"per_user_rate", report.per_user_rate}};
}

nlohmann::json to_json(const Assignment& assignment) {
  nlohmann::json users = nlohmann::json::array();
  for (std::size_t i = 0; i < assignment.serving_bs.size(); ++i) {
    const auto& s = assignment.serving_bs[i];
    users.push_back({{"user_id", i},
                     {"serving_bs", s ? nlohmann::json(*s) : nlohmann::json(nullptr)},
                     {"subchannel", assignment.subchannel[i]}});
  }
  return users;
}

nlohmann::json to_json(const PhaseConfig& phases) { return phases.indices; }

std::string report_csv_header(std::size_t num_bs) {
  std::string h = "scenario,algorithm,sum_rate,fairness";
  for (std::size_t b = 0; b < num_bs; ++b) {
    h += ",bs" + std::to_string(b) + "_utility";
  }
  return h;
}

std::string report_csv_row(const std::string& scenario_id, const std::string& algorithm, const RateReport& report) {
  std::string row = scenario_id + "," + algorithm + "," + shortest(report.sum_rate) + "," + shortest(report.fairness);
  for (const double v : report.per_bs_utility) {
    row += "," + shortest(v);
  }
  return row;
}

}  // namespace hcn
