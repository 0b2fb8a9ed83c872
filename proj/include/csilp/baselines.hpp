#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "csilp/assess.hpp"
#include "csilp/evaluator.hpp"
#include "csilp/state.hpp"

namespace csilp {

struct EnumerationResult {
  double lolp_lower = 0.0;
  double lolp_upper = 1.0;
  std::uint64_t evaluations = 0;  // includes the base state
  std::uint32_t deepest_level = 0;
  StopReason stop_reason = StopReason::Exhausted;
  std::vector<TraceRow> trace;

  double gap() const { return lolp_upper - lolp_lower; }
};

// Plain state enumeration baseline: walks levels 0,1,2,... in lexicographic
// order within each level, evaluating every state. Bounds take the same form
// as the lattice search but grow one state at a time. The budget criterion is
// exact; gap and level criteria apply at level boundaries.
inline EnumerationResult enumerate_assess(const Evaluator& ev, const ComponentReliability& rel,
                                          const Criteria& crit) {
  crit.validate();
  const std::uint32_t n = ev.component_count();
  if (rel.n() != n) throw std::invalid_argument("reliability vector does not match component count");
  auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };

  EnumerationResult res;
  double failure_mass = 0.0;
  double normal_mass = 0.0;
  Lattice full{SystemState(n), complement(SystemState(n))};
  auto push_row = [&] {
    if (!res.trace.empty() && res.trace.back().evaluations == res.evaluations) return;
    res.trace.push_back(TraceRow{res.evaluations, failure_mass, 1.0 - normal_mass, elapsed_ms()});
  };

  for (std::uint32_t k = 0; k <= n; ++k) {
    if (crit.max_level && k > *crit.max_level) {
      res.stop_reason = StopReason::LevelExceeded;
      push_row();
      break;
    }
    for (SystemState& s : lattice_members(full, k)) {
      if (crit.max_evaluations && res.evaluations >= *crit.max_evaluations) {
        res.stop_reason = StopReason::BudgetReached;
        push_row();
        goto done;
      }
      EvaluationOutcome out = ev.evaluate(s);
      ++res.evaluations;
      if (out.status == StateStatus::Failure) {
        if (k == 0) throw BaseStateError("the base state itself fails; loss of load probability is 1");
        failure_mass += state_probability(s, rel);
      } else {
        normal_mass += state_probability(s, rel);
      }
    }
    res.deepest_level = k;
    push_row();
    if (k == n) {
      res.stop_reason = StopReason::Exhausted;
      break;
    }
    if (crit.min_gap && (1.0 - normal_mass) - failure_mass <= *crit.min_gap) {
      res.stop_reason = StopReason::GapReached;
      break;
    }
  }
done:
  res.lolp_lower = failure_mass;
  res.lolp_upper = 1.0 - normal_mass;
  return res;
}

// Counter-based splitmix64 sampling (scheme "splitmix64-v1"): sample i draws
// from a stream whose state is derived from (seed, i) alone, so results do not
// depend on batching or thread count.
namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_next(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  return mix64(s);
}

inline double unit_double(std::uint64_t u) { return double(u >> 11) * 0x1.0p-53; }

inline SystemState sample_state(std::uint64_t seed, std::uint64_t index, const ComponentReliability& rel) {
  std::uint64_t s = mix64(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  SystemState st(std::uint32_t(rel.n()));
  for (ComponentId c = 1; c <= rel.n(); ++c)
    if (unit_double(splitmix64_next(s)) < rel.p[c - 1]) st.set(c);
  return st;
}

}  // namespace detail

struct McsSettings {
  double target_cov = 0.01;
  std::uint64_t max_samples = 1'000'000;
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;
};

struct McsResult {
  double lolp_estimate = 0.0;
  double cov = std::numeric_limits<double>::infinity();
  std::uint64_t samples = 0;
  std::uint64_t failures = 0;
  bool converged = false;
};

// Crude Monte Carlo LOLP estimate with the usual coefficient-of-variation
// stopping rule, checked at 1024-sample batch boundaries.
inline McsResult monte_carlo_assess(const Evaluator& ev, const ComponentReliability& rel,
                                    const McsSettings& settings) {
  const std::uint32_t n = ev.component_count();
  if (rel.n() != n) throw std::invalid_argument("reliability vector does not match component count");
  if (settings.target_cov <= 0.0) throw std::invalid_argument("target cov must be positive");
  if (settings.max_samples == 0) throw std::invalid_argument("sample budget must be positive");
  constexpr std::uint64_t kBatch = 1024;

  EvaluationCache cache;
  McsResult res;
  while (res.samples < settings.max_samples) {
    std::uint64_t batch = std::min(kBatch, settings.max_samples - res.samples);
    std::vector<std::uint8_t> fail(batch, 0);
    std::uint32_t workers = std::uint32_t(std::min<std::uint64_t>(settings.workers ? settings.workers : 1, batch));
    auto body = [&](std::uint32_t w) {
      for (std::uint64_t i = w; i < batch; i += workers) {
        SystemState s = detail::sample_state(settings.seed, res.samples + i, rel);
        fail[i] = evaluate_cached(ev, cache, s).status == StateStatus::Failure ? 1 : 0;
      }
    };
    if (workers <= 1) {
      body(0);
    } else {
      std::vector<std::thread> pool;
      for (std::uint32_t w = 1; w < workers; ++w) pool.emplace_back(body, w);
      body(0);
      for (auto& t : pool) t.join();
    }
    for (std::uint64_t i = 0; i < batch; ++i) res.failures += fail[i];
    res.samples += batch;

    double est = double(res.failures) / double(res.samples);
    res.lolp_estimate = est;
    if (res.failures > 0) {
      res.cov = std::sqrt((1.0 - est) / (double(res.samples) * est));
      if (res.cov <= settings.target_cov) {
        res.converged = true;
        break;
      }
    }
  }
  return res;
}

struct BruteForceResult {
  double lolp = 0.0;
  std::uint64_t evaluations = 0;
  std::vector<SystemState> minimal_cut_sets;  // sorted by level, then lexicographically
  std::vector<std::uint8_t> failure;          // indexed by component bitmask
};

// Exhaustive reference oracle; exponential, guarded to small universes.
inline BruteForceResult brute_force_oracle(const Evaluator& ev, const ComponentReliability& rel) {
  const std::uint32_t n = ev.component_count();
  if (n > 24) throw std::invalid_argument("brute force oracle is limited to 24 components");
  if (rel.n() != n) throw std::invalid_argument("reliability vector does not match component count");

  const std::uint64_t count = std::uint64_t(1) << n;
  BruteForceResult res;
  res.failure.assign(count, 0);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    SystemState s(n);
    s.words[0] = mask;
    EvaluationOutcome out = ev.evaluate(s);
    ++res.evaluations;
    if (out.status == StateStatus::Failure) {
      res.failure[mask] = 1;
      res.lolp += state_probability(s, rel);
    }
  }
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    if (!res.failure[mask]) continue;
    bool minimal = true;
    for (std::uint32_t b = 0; b < n && minimal; ++b)
      if ((mask >> b) & 1)
        if (res.failure[mask & ~(std::uint64_t(1) << b)]) minimal = false;
    if (minimal) {
      SystemState s(n);
      s.words[0] = mask;
      res.minimal_cut_sets.push_back(std::move(s));
    }
  }
  std::sort(res.minimal_cut_sets.begin(), res.minimal_cut_sets.end(), [](const SystemState& a, const SystemState& b) {
    std::uint32_t la = level(a), lb = level(b);
    return la != lb ? la < lb : lex_less(a, b);
  });
  return res;
}

}  // namespace csilp
