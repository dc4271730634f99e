#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "hcn/optimize.hpp"
#include "oracle.hpp"

using namespace hcn;
using doctest::Approx;

TEST_SUITE("optimize") {

TEST_CASE("partition bookkeeping") {
  const auto sc = build_scenario(fixtures::overlap_config(), 1);
  Partition p = random_partition(sc, 3);
  std::size_t placed = 0;
  for (std::size_t b = 0; b < p.members.size(); ++b) {
    CHECK(std::is_sorted(p.members[b].begin(), p.members[b].end()));
    for (UserId u : p.members[b]) {
      CHECK(sc.is_candidate(u, static_cast<BsId>(b)));
      CHECK(p.coalition_of(u) == static_cast<BsId>(b));
    }
    placed += p.members[b].size();
  }
  CHECK(placed == sc.num_users());
  CHECK(random_partition(sc, 3) == p);
  CHECK(random_partition(sc, 3, 1) != p);

  const BsId from = p.coalition_of(6);
  const BsId to = from == 0 ? 2 : 0;
  p.move(6, from, to);
  CHECK(p.coalition_of(6) == to);
  CHECK(std::is_sorted(p.members[static_cast<std::size_t>(to)].begin(), p.members[static_cast<std::size_t>(to)].end()));
  CHECK(Partition::from_assignment(sc, derive_assignment(sc, p)) == p);
}

TEST_CASE("sub-channels are dealt round-robin in user order") {
  auto cfg = fixtures::base_config();
  fixtures::add_bs(cfg, "5G1", 0, 0, 2, 5);
  const auto sc = build_scenario(cfg, 1);
  Partition p = Partition::empty(1);
  p.members[0] = {0, 1, 2, 3, 4};
  const auto a = derive_assignment(sc, p);
  CHECK(a.subchannel == std::vector<int>{0, 1, 0, 1, 0});
  check_feasible(sc, a);
}

TEST_CASE("switch gain equals the exact change in system utility") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto sc = build_scenario(fixtures::random_config(seed, 8, 30), seed);
    const RateModel model(sc, PhaseConfig::random(sc, seed));
    const Partition p = random_partition(sc, seed);
    const double base = model.evaluate(derive_assignment(sc, p)).sum_rate;
    for (const auto& u : sc.users()) {
      const BsId from = p.coalition_of(u.user_id);
      for (BsId to : u.candidate_bs) {
        if (to == from) continue;
        Partition q = p;
        q.move(u.user_id, from, to);
        const double after = model.evaluate(derive_assignment(sc, q)).sum_rate;
        CHECK(switch_gain(model, p, u.user_id, to) == Approx(after - base).epsilon(1e-9).scale(base));
      }
    }
  }
}

TEST_CASE("switch gain rejects non-candidates") {
  const auto sc = build_scenario(fixtures::overlap_config(), 1);
  const RateModel model(sc, PhaseConfig::zeros(sc));
  const Partition p = random_partition(sc, 1);
  for (const auto& u : sc.users()) {
    if (!sc.is_candidate(u.user_id, 2)) {
      CHECK_THROWS_AS(switch_gain(model, p, u.user_id, 2), std::invalid_argument);
      break;
    }
  }
}

TEST_CASE("coalition game ends Nash-stable and never lowers the sum rate") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto sc = build_scenario(fixtures::random_config(seed + 100, 10, 40), seed);
    const RateModel model(sc, PhaseConfig::random(sc, seed));
    const Partition init = random_partition(sc, seed);
    const double start = model.evaluate(derive_assignment(sc, init)).sum_rate;
    const GameResult g = coalition_game(model, init);
    CHECK(is_nash_stable(model, g.partition));
    CHECK(g.assignment == derive_assignment(sc, g.partition));
    const double end = model.evaluate(g.assignment).sum_rate;
    CHECK(end >= start);
    double last = start;
    for (const auto& e : g.trace.entries) {
      CHECK(e.sum_rate >= last);
      last = e.sum_rate;
    }
    CHECK(!g.trace.termination.empty());
  }
}

TEST_CASE("phase search is monotone and single-flip stable") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto cfg = fixtures::single_mmwave_config(seed, 2, 4);
    const auto sc = build_scenario(cfg, seed);
    const auto a = derive_assignment(sc, random_partition(sc, seed));
    const auto init = PhaseConfig::random(sc, seed);
    const double start = evaluate(sc, a, init).sum_rate;
    const auto res = phase_search(sc, a, init);
    const double end = evaluate(sc, a, res.phases).sum_rate;
    CHECK(end >= start);
    CHECK(res.trace.termination == "converged");
    // No single element change improves by more than the acceptance threshold.
    const auto& panel = *sc.bs(0).ris;
    for (int k = 0; k < panel.num_elements(); ++k) {
      for (int m = 0; m < panel.num_phase_indices(); ++m) {
        auto trial = res.phases;
        trial.indices[0][static_cast<std::size_t>(k)] = m;
        CHECK(evaluate(sc, a, trial).sum_rate <= end + improvement_threshold(end) + 1e-9 * end);
      }
    }
  }
}

TEST_CASE("exhaustive phases dominate the local search") {
  const auto sc = build_scenario(fixtures::single_mmwave_config(3, 1, 3), 3);
  const auto a = derive_assignment(sc, random_partition(sc, 3));
  const auto ex = exhaustive_phases(sc, a);
  const auto ls = phase_search(sc, a, PhaseConfig::zeros(sc)).phases;
  CHECK(evaluate(sc, a, ex).sum_rate >= evaluate(sc, a, ls).sum_rate * (1.0 - 1e-12));
  double best = 0.0;
  for (int m = 0; m < 8; ++m) {
    auto ph = PhaseConfig::zeros(sc);
    ph.indices[0][0] = m;
    best = std::max(best, oracle::sum_rate(sc, a, ph));
  }
  CHECK(evaluate(sc, a, ex).sum_rate == Approx(best).epsilon(1e-9));
}

TEST_CASE("bcd trace starts at the random point and never decreases") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto sc = build_scenario(fixtures::random_config(seed + 200, 10, 40), seed);
    const Solution s = bcd_optimize(sc, seed);
    REQUIRE(s.trace.entries.size() >= 2);
    CHECK(s.trace.entries.front().iteration == 0);
    CHECK(s.trace.entries.front().sum_rate ==
          evaluate(sc, derive_assignment(sc, random_partition(sc, seed)), PhaseConfig::random(sc, seed)).sum_rate);
    for (std::size_t i = 1; i < s.trace.entries.size(); ++i) {
      CHECK(s.trace.entries[i].sum_rate >= s.trace.entries[i - 1].sum_rate);
    }
    CHECK(s.report.sum_rate == s.trace.entries.back().sum_rate);
    CHECK(s.report.sum_rate == evaluate(sc, s.assignment, s.phases).sum_rate);
  }
}

TEST_CASE("bcd is deterministic per seed") {
  const auto sc = build_scenario(fixtures::overlap_config(), 2);
  auto a = bcd_optimize(sc, 9);
  auto b = bcd_optimize(sc, 9);
  a.trace.clear_timing();
  b.trace.clear_timing();
  CHECK(a.assignment == b.assignment);
  CHECK(a.phases == b.phases);
  CHECK(a.trace.to_json() == b.trace.to_json());
}

TEST_CASE("baselines") {
  const auto sc = build_scenario(fixtures::overlap_config(4), 5);
  const auto cga = baseline_cga(sc, 5);
  CHECK(cga.report.sum_rate == Approx(evaluate(sc.without_ris(), cga.assignment, PhaseConfig::zeros(sc)).sum_rate));
  const auto ro = baseline_ro(sc, 5);
  CHECK(ro.assignment == derive_assignment(sc, random_partition(sc, 5)));
  CHECK(ro.report.sum_rate >= evaluate(sc, ro.assignment, PhaseConfig::random(sc, 5)).sum_rate);
  const auto ra = baseline_ra(sc, 5, 10);
  CHECK(ra.trace.entries.size() == 10);
  double mean = 0.0;
  for (const auto& e : ra.trace.entries) mean += e.sum_rate;
  CHECK(ra.report.sum_rate == Approx(mean / 10.0));
  CHECK_THROWS(baseline_ra(sc, 5, 0));
  const auto ccga = baseline_ccga(sc, 5);
  for (UserId u = 0; u < static_cast<UserId>(sc.num_users()); ++u) {
    CHECK((!ccga.assignment.assigned(u) || !sc.radio(ccga.assignment.bs_of(u)).directional));
  }
  CHECK(ccga.report.per_bs_utility.size() == sc.num_bs());
  CHECK(ccga.report.per_bs_utility[2] == 0.0);
}

TEST_CASE("traversal is the best association and refuses big instances") {
  const auto sc = build_scenario(fixtures::overlap_config(2), 3);
  const double count = association_count(sc);
  CHECK(count >= 2.0);
  TraversalOptions opt;
  opt.exhaustive_phases = true;
  const auto os = traversal_optimal(sc, opt);
  CHECK(os.trace.entries.back().iteration == static_cast<int>(count));
  const auto pa = bcd_optimize(sc, 3);
  CHECK(os.report.sum_rate >= pa.report.sum_rate * (1.0 - 1e-9));
  opt.max_enum = count - 1;
  try {
    traversal_optimal(sc, opt);
    FAIL("expected refusal");
  } catch (const TraversalRefused& e) {
    CHECK(e.product() == count);
  }
}

TEST_CASE("trace json") {
  OptimizerTrace t;
  t.entries = {{0, 1.0, 0, 2.5}, {1, 2.0, 3, 4.0}};
  t.termination = "converged";
  t.clear_timing();
  const auto j = t.to_json();
  CHECK(j["termination"] == "converged");
  CHECK(j["iterations"].size() == 2);
  CHECK(j["iterations"][1]["switches"] == 3);
  CHECK(j["iterations"][1]["elapsed_ms"] == 0.0);
}

}  // TEST_SUITE
