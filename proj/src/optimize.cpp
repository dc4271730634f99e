#include "hcn/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "hcn/rng.hpp"

namespace hcn {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// BSs whose utility can change when users move between `a` and `b`.
std::vector<BsId> affected_coalitions(const Scenario& sc, BsId a, BsId b) {
  std::set<int> groups;
  for (const BsId x : {a, b}) {
    if (x >= 0) {
      groups.insert(sc.radio(x).frequency_group);
    }
  }
  std::vector<BsId> out;
  for (std::size_t i = 0; i < sc.num_bs(); ++i) {
    if (groups.contains(sc.radio(static_cast<BsId>(i)).frequency_group)) {
      out.push_back(static_cast<BsId>(i));
    }
  }
  return out;
}

double utility_of(const RateModel& model, const Partition& partition, const std::vector<BsId>& coalitions) {
  const Assignment a = derive_assignment(model.scenario(), partition);
  const Occupancy occ(model.scenario(), a);
  double total = 0.0;
  for (const BsId b : coalitions) {
    total += model.bs_utility(a, occ, b);
  }
  return total;
}

int total_changes(const OptimizerTrace& trace) {
  int n = 0;
  for (const auto& e : trace.entries) {
    n += e.changes;
  }
  return n;
}

// Sweep bookkeeping of one panel.
struct PanelOutcome {
  int sweeps = 0;
  bool capped = false;
};

}  // namespace

Partition Partition::empty(std::size_t num_bs) {
  Partition p;
  p.members.assign(num_bs, {});
  return p;
}

Partition Partition::from_assignment(const Scenario& scenario, const Assignment& assignment) {
  Partition p = empty(scenario.num_bs());
  for (std::size_t i = 0; i < assignment.serving_bs.size(); ++i) {
    if (assignment.serving_bs[i]) {
      p.members.at(static_cast<std::size_t>(*assignment.serving_bs[i])).push_back(static_cast<UserId>(i));
    }
  }
  return p;
}

BsId Partition::coalition_of(UserId u) const {
  for (std::size_t b = 0; b < members.size(); ++b) {
    if (std::binary_search(members[b].begin(), members[b].end(), u)) {
      return static_cast<BsId>(b);
    }
  }
  return -1;
}

void Partition::move(UserId u, BsId from, BsId to) {
  if (from >= 0) {
    auto& src = members.at(static_cast<std::size_t>(from));
    const auto it = std::lower_bound(src.begin(), src.end(), u);
    if (it == src.end() || *it != u) {
      throw std::invalid_argument("Partition::move: user not in source coalition");
    }
    src.erase(it);
  }
  auto& dst = members.at(static_cast<std::size_t>(to));
  dst.insert(std::lower_bound(dst.begin(), dst.end(), u), u);
}

Assignment derive_assignment(const Scenario& scenario, const Partition& partition) {
  Assignment a = Assignment::unassigned(scenario.num_users());
  for (std::size_t b = 0; b < partition.members.size(); ++b) {
    const int subs = scenario.bs(static_cast<BsId>(b)).num_subchannels;
    const auto& m = partition.members[b];
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto u = static_cast<std::size_t>(m[i]);
      a.serving_bs[u] = static_cast<BsId>(b);
      a.subchannel[u] = static_cast<int>(i % static_cast<std::size_t>(subs));
    }
  }
  return a;
}

Partition random_partition(const Scenario& scenario, std::uint64_t seed, std::uint64_t stream) {
  Partition p = Partition::empty(scenario.num_bs());
  for (const User& u : scenario.users()) {
    if (u.candidate_bs.empty()) {
      continue;
    }
    KeyedRng rng(seed, DrawKind::init_association, {stream, u.key});
    const BsId b = u.candidate_bs[rng.below(u.candidate_bs.size())];
    p.members[static_cast<std::size_t>(b)].push_back(u.user_id);
  }
  return p;
}

void OptimizerTrace::clear_timing() {
  for (auto& e : entries) {
    e.elapsed_ms = 0.0;
  }
}

nlohmann::json OptimizerTrace::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    rows.push_back({{"iteration", e.iteration}, {"sum_rate", e.sum_rate}, {"switches", e.changes}, {"elapsed_ms", e.elapsed_ms}});
  }
  return {{"termination", termination}, {"iterations", rows}};
}

double improvement_threshold(double reference_rate) { return 1e-10 * std::max(std::abs(reference_rate), 1.0); }

double switch_gain(const RateModel& model, const Partition& partition, UserId p, BsId target) {
  const Scenario& sc = model.scenario();
  const BsId source = partition.coalition_of(p);
  if (target == source) {
    throw std::invalid_argument("switch_gain: target is the current coalition");
  }
  if (!sc.is_candidate(p, target)) {
    throw std::invalid_argument("switch_gain: BS " + std::to_string(target) + " is not a candidate of user " +
                                std::to_string(p));
  }
  const std::vector<BsId> touched = affected_coalitions(sc, source, target);
  const double before = utility_of(model, partition, touched);
  Partition moved = partition;
  moved.move(p, source, target);
  const double after = utility_of(model, moved, touched);
  return after - before;
}

GameResult coalition_game(const RateModel& model, Partition init, const GameOptions& options) {
  const Scenario& sc = model.scenario();
  const auto start = Clock::now();
  GameResult out;
  out.partition = std::move(init);
  double rate = model.evaluate(derive_assignment(sc, out.partition)).sum_rate;
  out.trace.entries.push_back({0, rate, 0, ms_since(start)});
  std::vector<double> history{rate};
  out.trace.termination = "round cap";

  for (int round = 1; round <= options.max_rounds; ++round) {
    const double tau = improvement_threshold(rate);
    int switches = 0;
    for (const User& user : sc.users()) {
      const BsId current = out.partition.coalition_of(user.user_id);
      BsId best = -1;
      double best_gain = tau;
      for (const BsId target : user.candidate_bs) {
        if (target == current) {
          continue;
        }
        const double g = switch_gain(model, out.partition, user.user_id, target);
        if (g > best_gain) {
          best_gain = g;
          best = target;
        }
      }
      if (best >= 0) {
        out.partition.move(user.user_id, current, best);
        ++switches;
      }
    }
    rate = model.evaluate(derive_assignment(sc, out.partition)).sum_rate;
    out.trace.entries.push_back({round, rate, switches, ms_since(start)});

    const auto window = static_cast<std::ptrdiff_t>(std::min<std::size_t>(history.size(),
                                                                           static_cast<std::size_t>(options.history_window)));
    const double best_recent = *std::max_element(history.end() - window, history.end());
    history.push_back(rate);
    if (switches == 0) {
      out.trace.termination = "no improving switch";
      break;
    }
    if (rate <= best_recent) {
      out.trace.termination = "no improvement over recent rounds";
      break;
    }
  }
  out.assignment = derive_assignment(sc, out.partition);
  return out;
}

bool is_nash_stable(const RateModel& model, const Partition& partition) {
  const Scenario& sc = model.scenario();
  const double tau = improvement_threshold(model.evaluate(derive_assignment(sc, partition)).sum_rate);
  for (const User& user : sc.users()) {
    const BsId current = partition.coalition_of(user.user_id);
    for (const BsId target : user.candidate_bs) {
      if (target != current && switch_gain(model, partition, user.user_id, target) > tau) {
        return false;
      }
    }
  }
  return true;
}

PhaseSearchResult phase_search(const Scenario& scenario, const Assignment& assignment, PhaseConfig init,
                               const PhaseSearchOptions& options) {
  check_feasible(scenario, assignment);
  const auto start = Clock::now();
  RateModel model(scenario, init);
  const Occupancy occ(scenario, assignment);

  PhaseSearchResult out;
  int iteration = 0;
  out.trace.entries.push_back({iteration, model.evaluate(assignment).sum_rate, 0, ms_since(start)});
  bool capped = false;

  for (std::size_t bi = 0; bi < scenario.num_bs(); ++bi) {
    const auto b = static_cast<BsId>(bi);
    const auto& members = occ.members(b);
    if (!scenario.has_active_ris(b) || members.empty()) {
      continue;
    }
    const RisPanel& panel = *scenario.bs(b).ris;
    const int levels = panel.num_phase_indices();
    std::vector<Complex> q(static_cast<std::size_t>(levels));
    for (int m = 0; m < levels; ++m) {
      q[static_cast<std::size_t>(m)] = channel::phase_coefficient(m, panel.quant_bits);
    }
    std::vector<Complex> saved(members.size());

    double utility = model.bs_utility(assignment, occ, b);
    PanelOutcome outcome;
    for (;;) {
      if (outcome.sweeps == options.max_sweeps) {
        outcome.capped = true;
        break;
      }
      ++outcome.sweeps;
      const double sweep_start = utility;
      int changes = 0;
      for (int k = 0; k < panel.num_elements(); ++k) {
        const int current = model.phases().indices[bi][static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < members.size(); ++i) {
          saved[i] = model.reflected(b, members[i]);
        }
        // Trial values use incremental sums; the winner is re-scored
        // exactly before it is committed.
        int best_m = current;
        double best_value = utility;
        for (int m = 0; m < levels; ++m) {
          if (m == current) {
            continue;
          }
          const Complex delta = q[static_cast<std::size_t>(m)] - q[static_cast<std::size_t>(current)];
          for (std::size_t i = 0; i < members.size(); ++i) {
            const Complex h = scenario.reflect_channels(b, members[i])[static_cast<std::size_t>(k)];
            model.set_reflected(b, members[i], saved[i] + h * delta);
          }
          const double value = model.bs_utility(assignment, occ, b);
          if (value > best_value + improvement_threshold(best_value)) {
            best_value = value;
            best_m = m;
          }
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
          model.set_reflected(b, members[i], saved[i]);
        }
        if (best_m == current) {
          continue;
        }
        model.set_phase(b, k, best_m);
        const double exact = model.bs_utility(assignment, occ, b);
        if (exact > utility) {
          utility = exact;
          ++changes;
        } else {
          model.set_phase(b, k, current);
        }
      }
      ++iteration;
      out.trace.entries.push_back({iteration, model.evaluate(assignment).sum_rate, changes, ms_since(start)});
      if (std::abs(utility - sweep_start) < options.epsilon) {
        break;
      }
    }
    capped = capped || outcome.capped;
  }
  out.trace.termination = capped ? "sweep cap" : "converged";
  out.phases = model.phases();
  return out;
}

PhaseConfig exhaustive_phases(const Scenario& scenario, const Assignment& assignment) {
  check_feasible(scenario, assignment);
  PhaseConfig best = PhaseConfig::zeros(scenario);
  RateModel model(scenario, best);
  const Occupancy occ(scenario, assignment);
  for (std::size_t bi = 0; bi < scenario.num_bs(); ++bi) {
    const auto b = static_cast<BsId>(bi);
    const auto& members = occ.members(b);
    if (!scenario.has_active_ris(b) || members.empty()) {
      continue;
    }
    const RisPanel& panel = *scenario.bs(b).ris;
    const int levels = panel.num_phase_indices();
    const double combos = std::pow(static_cast<double>(levels), panel.num_elements());
    if (combos > 1e7) {
      throw std::invalid_argument("exhaustive_phases: panel too large to enumerate");
    }
    std::vector<int> idx(static_cast<std::size_t>(panel.num_elements()), 0);
    std::vector<int> argmax = idx;
    double best_value = -1.0;
    for (;;) {
      for (const UserId u : members) {
        model.set_reflected(b, u, channel::ris_effective_sum(panel, idx, scenario.reflect_channels(b, u)));
      }
      const double value = model.bs_utility(assignment, occ, b);
      if (value > best_value) {
        best_value = value;
        argmax = idx;
      }
      std::size_t pos = 0;
      while (pos < idx.size() && ++idx[pos] == levels) {
        idx[pos++] = 0;
      }
      if (pos == idx.size()) {
        break;
      }
    }
    best.indices[bi] = argmax;
  }
  return best;
}

Solution bcd_optimize(const Scenario& scenario, std::uint64_t seed, const BcdOptions& options) {
  const auto start = Clock::now();
  Solution out;
  Partition partition = random_partition(scenario, seed);
  out.phases = PhaseConfig::random(scenario, seed);
  out.assignment = derive_assignment(scenario, partition);
  double rate = evaluate(scenario, out.assignment, out.phases).sum_rate;
  out.trace.entries.push_back({0, rate, 0, ms_since(start)});
  out.trace.termination = "iteration cap";

  for (int it = 1; it <= options.max_iterations; ++it) {
    const RateModel model(scenario, out.phases);
    GameResult game = coalition_game(model, std::move(partition), options.game);
    partition = std::move(game.partition);
    out.assignment = std::move(game.assignment);
    PhaseSearchResult ps = phase_search(scenario, out.assignment, out.phases, options.phase);
    out.phases = std::move(ps.phases);

    const double next = evaluate(scenario, out.assignment, out.phases).sum_rate;
    out.trace.entries.push_back({it, next, total_changes(game.trace) + total_changes(ps.trace), ms_since(start)});
    const double previous = rate;
    rate = next;
    if (previous > 0.0 ? std::abs(next - previous) / previous < options.xi : next == previous) {
      out.trace.termination = "converged";
      break;
    }
  }
  out.report = evaluate(scenario, out.assignment, out.phases);
  return out;
}

Solution baseline_cga(const Scenario& scenario, std::uint64_t seed, const GameOptions& options) {
  const Scenario plain = scenario.without_ris();
  Solution out;
  out.phases = PhaseConfig::zeros(plain);
  const RateModel model(plain, out.phases);
  GameResult game = coalition_game(model, random_partition(plain, seed), options);
  out.assignment = std::move(game.assignment);
  out.trace = std::move(game.trace);
  out.report = model.evaluate(out.assignment);
  return out;
}

Solution baseline_ro(const Scenario& scenario, std::uint64_t seed, const PhaseSearchOptions& options) {
  Solution out;
  out.assignment = derive_assignment(scenario, random_partition(scenario, seed));
  PhaseSearchResult ps = phase_search(scenario, out.assignment, PhaseConfig::random(scenario, seed), options);
  out.phases = std::move(ps.phases);
  out.trace = std::move(ps.trace);
  out.report = evaluate(scenario, out.assignment, out.phases);
  return out;
}

Solution baseline_ra(const Scenario& scenario, std::uint64_t seed, int draws) {
  if (draws < 1) {
    throw std::invalid_argument("baseline_ra: draws must be >= 1");
  }
  const auto start = Clock::now();
  const Scenario plain = scenario.without_ris();
  Solution out;
  out.phases = PhaseConfig::zeros(plain);
  const RateModel model(plain, out.phases);
  RateReport mean;
  mean.per_user_rate.assign(plain.num_users(), 0.0);
  mean.per_bs_utility.assign(plain.num_bs(), 0.0);
  mean.fairness = 0.0;
  for (int d = 0; d < draws; ++d) {
    // Stream 0 is the shared start of the other algorithms.
    const Assignment a = derive_assignment(plain, random_partition(plain, seed, static_cast<std::uint64_t>(d) + 1));
    const RateReport r = model.evaluate(a);
    for (std::size_t u = 0; u < r.per_user_rate.size(); ++u) {
      mean.per_user_rate[u] += r.per_user_rate[u];
    }
    for (std::size_t b = 0; b < r.per_bs_utility.size(); ++b) {
      mean.per_bs_utility[b] += r.per_bs_utility[b];
    }
    mean.sum_rate += r.sum_rate;
    mean.fairness += r.fairness;
    if (d == 0) {
      out.assignment = a;
    }
    out.trace.entries.push_back({d + 1, r.sum_rate, 0, ms_since(start)});
  }
  const double n = static_cast<double>(draws);
  for (double& v : mean.per_user_rate) v /= n;
  for (double& v : mean.per_bs_utility) v /= n;
  mean.sum_rate /= n;
  mean.fairness /= n;
  out.report = std::move(mean);
  out.trace.termination = "fixed draws";
  return out;
}

Solution baseline_ccga(const Scenario& scenario, std::uint64_t seed, const GameOptions& options) {
  const Scenario cellular = scenario.without_mmwave_service();
  Solution out;
  out.phases = PhaseConfig::zeros(cellular);
  const RateModel model(cellular, out.phases);
  GameResult game = coalition_game(model, random_partition(cellular, seed), options);
  out.assignment = std::move(game.assignment);
  out.trace = std::move(game.trace);
  out.report = model.evaluate(out.assignment);
  return out;
}

TraversalRefused::TraversalRefused(double product)
    : std::runtime_error("traversal refused: " + std::to_string(static_cast<long double>(product)) +
                         " associations exceed the enumeration cap"),
      product_(product) {}

double association_count(const Scenario& scenario) {
  double product = 1.0;
  for (const User& u : scenario.users()) {
    if (!u.candidate_bs.empty()) {
      product *= static_cast<double>(u.candidate_bs.size());
    }
  }
  return product;
}

Solution traversal_optimal(const Scenario& scenario, const TraversalOptions& options) {
  const double count = association_count(scenario);
  if (count > options.max_enum) {
    throw TraversalRefused(count);
  }
  const auto start = Clock::now();
  std::vector<UserId> free_users;
  for (const User& u : scenario.users()) {
    if (!u.candidate_bs.empty()) {
      free_users.push_back(u.user_id);
    }
  }
  std::vector<std::size_t> digit(free_users.size(), 0);

  Solution best;
  best.report.sum_rate = -1.0;
  long long visited = 0;
  for (;;) {
    Partition p = Partition::empty(scenario.num_bs());
    for (std::size_t i = 0; i < free_users.size(); ++i) {
      const User& u = scenario.user(free_users[i]);
      p.members[static_cast<std::size_t>(u.candidate_bs[digit[i]])].push_back(u.user_id);
    }
    const Assignment a = derive_assignment(scenario, p);
    PhaseConfig phases = options.exhaustive_phases
                             ? exhaustive_phases(scenario, a)
                             : phase_search(scenario, a, PhaseConfig::zeros(scenario), options.phase).phases;
    RateReport r = evaluate(scenario, a, phases);
    ++visited;
    if (r.sum_rate > best.report.sum_rate) {
      best.assignment = a;
      best.phases = std::move(phases);
      best.report = std::move(r);
    }
    std::size_t pos = 0;
    while (pos < digit.size() && ++digit[pos] == scenario.user(free_users[pos]).candidate_bs.size()) {
      digit[pos++] = 0;
    }
    if (pos == digit.size()) {
      break;
    }
  }
  best.trace.entries.push_back({static_cast<int>(visited), best.report.sum_rate, 0, ms_since(start)});
  best.trace.termination = "enumerated";
  return best;
}

}  // namespace hcn
