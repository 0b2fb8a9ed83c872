#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "csilp/baselines.hpp"
#include "csilp/evaluator.hpp"
#include "csilp/state.hpp"

using namespace csilp;

namespace {

const CutsetOracle& sys5() {
  static CutsetOracle ev = CutsetOracle::from_lists(5, {{1}, {2, 3}, {3, 4}, {2, 4, 5}});
  return ev;
}

ComponentReliability sys5_rel() { return ComponentReliability::uniform(5, 0.1); }

}  // namespace

TEST_CASE("plain enumeration sweeps the whole lattice") {
  Criteria crit;
  crit.max_level = 5;
  EnumerationResult r = enumerate_assess(sys5(), sys5_rel(), crit);
  REQUIRE(r.evaluations == 32);  // includes the base state
  REQUIRE(r.deepest_level == 5);
  REQUIRE(r.stop_reason == StopReason::Exhausted);
  REQUIRE(r.lolp_lower == Catch::Approx(0.11791).margin(1e-12));
  REQUIRE(r.lolp_upper == Catch::Approx(0.11791).margin(1e-12));
  REQUIRE(r.gap() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("enumeration bounds by level, worked by hand") {
  Criteria crit;
  crit.max_level = 2;
  EnumerationResult r = enumerate_assess(sys5(), sys5_rel(), crit);
  REQUIRE(r.evaluations == 16);  // 1 + 5 + 10
  REQUIRE(r.deepest_level == 2);
  REQUIRE(r.stop_reason == StopReason::LevelExceeded);
  // failures by level 2: {1} and the pairs {1,*}, {2,3}, {3,4}
  REQUIRE(r.lolp_lower == Catch::Approx(0.10935).margin(1e-12));
  REQUIRE(r.lolp_upper == Catch::Approx(0.11791).margin(1e-12));

  // trace rows land at level boundaries
  REQUIRE(r.trace.size() == 3);
  REQUIRE(r.trace[0].evaluations == 1);
  REQUIRE(r.trace[1].evaluations == 6);
  REQUIRE(r.trace[2].evaluations == 16);
}

TEST_CASE("enumeration honors an exact evaluation budget") {
  Criteria crit;
  crit.max_evaluations = 7;
  EnumerationResult r = enumerate_assess(sys5(), sys5_rel(), crit);
  REQUIRE(r.evaluations == 7);  // 1 base + 5 singles + {1,2}
  REQUIRE(r.stop_reason == StopReason::BudgetReached);
  REQUIRE(r.lolp_lower == Catch::Approx(0.06561 + 0.00729).margin(1e-12));
  REQUIRE(r.lolp_upper == Catch::Approx(0.14707).margin(1e-12));
  REQUIRE(r.trace.back().evaluations == 7);
}

TEST_CASE("enumeration gap criterion applies at level boundaries") {
  Criteria crit;
  crit.min_gap = 0.05;
  EnumerationResult r = enumerate_assess(sys5(), sys5_rel(), crit);
  REQUIRE(r.stop_reason == StopReason::GapReached);
  REQUIRE(r.evaluations == 16);
  REQUIRE(r.gap() <= 0.05);

  Criteria none;
  REQUIRE_THROWS_AS(enumerate_assess(sys5(), sys5_rel(), none), std::invalid_argument);
}

TEST_CASE("enumeration surrounds the exact value on random systems") {
  std::mt19937 rng(2718);
  for (int trial = 0; trial < 20; ++trial) {
    std::uint32_t n = 5 + rng() % 4;
    std::vector<SystemState> kept;
    for (int attempt = 0; attempt < 30 && kept.size() < 4; ++attempt) {
      SystemState c(n);
      std::uint32_t lev = 1 + rng() % 3;
      while (level(c) < lev) c.set(1 + rng() % n);
      bool ok = true;
      for (const SystemState& k : kept)
        if (leq(k, c) || leq(c, k)) ok = false;
      if (ok) kept.push_back(c);
    }
    CutsetOracle ev(n, kept);
    ComponentReliability rel = ComponentReliability::uniform(n, 0.05);
    BruteForceResult bf = brute_force_oracle(ev, rel);

    for (std::uint32_t k : {1u, 2u, 3u}) {
      Criteria crit;
      crit.max_level = k;
      EnumerationResult r = enumerate_assess(ev, rel, crit);
      INFO("trial " << trial << " depth " << k);
      REQUIRE(r.lolp_lower <= bf.lolp + 1e-12);
      REQUIRE(r.lolp_upper >= bf.lolp - 1e-12);
    }
  }
}

TEST_CASE("monte carlo sampling is deterministic in seed, not in threads") {
  McsSettings s;
  s.target_cov = 0.02;
  s.max_samples = 200000;
  s.seed = 42;

  McsResult a = monte_carlo_assess(sys5(), sys5_rel(), s);
  McsResult b = monte_carlo_assess(sys5(), sys5_rel(), s);
  REQUIRE(a.lolp_estimate == b.lolp_estimate);
  REQUIRE(a.samples == b.samples);
  REQUIRE(a.failures == b.failures);
  REQUIRE(a.cov == b.cov);
  REQUIRE(a.converged == b.converged);

  McsSettings threaded = s;
  threaded.workers = 4;
  McsResult c = monte_carlo_assess(sys5(), sys5_rel(), threaded);
  REQUIRE(c.lolp_estimate == a.lolp_estimate);
  REQUIRE(c.samples == a.samples);
  REQUIRE(c.failures == a.failures);

  // converged run lands within its own three-sigma band of the exact value
  REQUIRE(a.converged);
  REQUIRE(a.cov <= 0.02);
  double sigma = a.cov * a.lolp_estimate;
  REQUIRE(std::abs(a.lolp_estimate - 0.11791) <= 3.0 * sigma);
}

TEST_CASE("monte carlo respects the sample budget") {
  McsSettings s;
  s.target_cov = 0.0001;  // unreachable in this budget
  s.max_samples = 3000;
  s.seed = 9;
  McsResult r = monte_carlo_assess(sys5(), sys5_rel(), s);
  REQUIRE_FALSE(r.converged);
  REQUIRE(r.samples == 3000);  // final short batch still runs
  REQUIRE(r.failures <= r.samples);

  McsSettings fast = s;
  fast.target_cov = 0.5;
  McsResult q = monte_carlo_assess(sys5(), sys5_rel(), fast);
  REQUIRE(q.converged);
  REQUIRE(q.samples == 1024);  // first batch boundary

  McsSettings bad = s;
  bad.target_cov = 0.0;
  REQUIRE_THROWS_AS(monte_carlo_assess(sys5(), sys5_rel(), bad), std::invalid_argument);
  bad = s;
  bad.max_samples = 0;
  REQUIRE_THROWS_AS(monte_carlo_assess(sys5(), sys5_rel(), bad), std::invalid_argument);
}

TEST_CASE("sample streams are counter-addressable") {
  ComponentReliability rel({0.5, 0.5, 0.5});
  // the same (seed, index) pair always yields the same state
  SystemState a = detail::sample_state(7, 123, rel);
  SystemState b = detail::sample_state(7, 123, rel);
  REQUIRE(a == b);
  // empirical mean of a fair component is near one half
  int hits = 0;
  for (std::uint64_t i = 0; i < 4000; ++i)
    if (detail::sample_state(1, i, rel).test(1)) ++hits;
  REQUIRE(std::abs(hits / 4000.0 - 0.5) < 0.05);
}

TEST_CASE("exhaustive oracle on the worked example") {
  BruteForceResult r = brute_force_oracle(sys5(), sys5_rel());
  REQUIRE(r.evaluations == 32);
  REQUIRE(r.lolp == Catch::Approx(0.11791).margin(1e-12));
  REQUIRE(r.minimal_cut_sets.size() == 4);
  REQUIRE(r.minimal_cut_sets[0].components() == std::vector<ComponentId>{1});
  REQUIRE(r.minimal_cut_sets[1].components() == std::vector<ComponentId>{2, 3});
  REQUIRE(r.minimal_cut_sets[2].components() == std::vector<ComponentId>{3, 4});
  REQUIRE(r.minimal_cut_sets[3].components() == std::vector<ComponentId>{2, 4, 5});

  REQUIRE(r.failure.size() == 32);
  REQUIRE(r.failure[0] == 0);
  REQUIRE(r.failure[0b00001] == 1);  // {1}
  REQUIRE(r.failure[0b00110] == 1);  // {2,3}
  REQUIRE(r.failure[0b10010] == 0);  // {2,5}
}

TEST_CASE("exhaustive oracle on a capacity threshold") {
  ThresholdOracle ev({5.0, 4.0, 3.0}, 6.0);
  ComponentReliability rel({0.1, 0.2, 0.3});
  BruteForceResult r = brute_force_oracle(ev, rel);
  // any two losses drop the surviving capacity below demand
  REQUIRE(r.minimal_cut_sets.size() == 3);
  for (const SystemState& s : r.minimal_cut_sets) REQUIRE(level(s) == 2);
  REQUIRE(r.lolp == Catch::Approx(0.014 + 0.024 + 0.054 + 0.006).margin(1e-12));

  // replaying the recovered cut sets reproduces the oracle exactly
  std::vector<std::vector<ComponentId>> lists;
  for (const SystemState& s : r.minimal_cut_sets) lists.push_back(s.components());
  CutsetOracle replay = CutsetOracle::from_lists(3, lists);
  BruteForceResult again = brute_force_oracle(replay, rel);
  REQUIRE(again.failure == r.failure);
  REQUIRE(again.lolp == Catch::Approx(r.lolp).margin(1e-15));
  REQUIRE(again.minimal_cut_sets.size() == r.minimal_cut_sets.size());
}

TEST_CASE("exhaustive oracle refuses oversized universes") {
  CutsetOracle big = CutsetOracle::from_lists(25, {{1}});
  REQUIRE_THROWS_AS(brute_force_oracle(big, ComponentReliability::uniform(25, 0.1)),
                    std::invalid_argument);
}
