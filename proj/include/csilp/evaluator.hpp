#pragma once

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "state.hpp"

namespace csilp {

enum class StateStatus { Normal, Failure };
enum class EvaluationVia { Solver, Dominance, Cache };

struct EvaluationOutcome {
  StateStatus status = StateStatus::Normal;
  std::optional<double> shed_mw;  // absent when classified without a solve
  EvaluationVia via = EvaluationVia::Solver;
};

// Thrown when the all-components-up state evaluates as failure.
struct BaseStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Evaluator-internal breakdown (e.g. the dispatch LP could not be solved).
struct EvaluatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Status function over system states. Implementations must be deterministic,
// coherent (failure states are upward closed) and safe for concurrent calls.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual std::uint32_t component_count() const = 0;
  virtual EvaluationOutcome evaluate(const SystemState& s) const = 0;
};

// Synthetic oracle: failure iff the state covers one of the given cut sets.
// Shed magnitude is 1 MW per covered cut set, so minimality is visible in tests.
class CutsetOracle : public Evaluator {
 public:
  CutsetOracle(std::uint32_t n, std::vector<SystemState> cutsets) : n_(n), cutsets_(std::move(cutsets)) {
    for (const SystemState& c : cutsets_) {
      if (c.n != n_) throw std::invalid_argument("cut set universe mismatch");
    }
    for (std::size_t i = 0; i < cutsets_.size(); ++i)
      for (std::size_t j = 0; j < cutsets_.size(); ++j)
        if (i != j && leq(cutsets_[i], cutsets_[j]))
          throw std::invalid_argument("cut sets must form an antichain");
  }

  static CutsetOracle from_lists(std::uint32_t n, const std::vector<std::vector<ComponentId>>& lists) {
    std::vector<SystemState> sets;
    sets.reserve(lists.size());
    for (const auto& ids : lists) sets.push_back(SystemState::from_components(n, ids));
    return CutsetOracle(n, std::move(sets));
  }

  std::uint32_t component_count() const override { return n_; }

  EvaluationOutcome evaluate(const SystemState& s) const override {
    check_same_universe(s, SystemState(n_));
    double covered = 0.0;
    for (const SystemState& c : cutsets_)
      if (leq(c, s)) covered += 1.0;
    EvaluationOutcome out;
    out.status = covered > 0.0 ? StateStatus::Failure : StateStatus::Normal;
    out.shed_mw = covered;
    out.via = EvaluationVia::Solver;
    return out;
  }

  const std::vector<SystemState>& cutsets() const { return cutsets_; }

 private:
  std::uint32_t n_;
  std::vector<SystemState> cutsets_;
};

// Synthetic oracle: failure iff surviving capacity drops below demand.
class ThresholdOracle : public Evaluator {
 public:
  ThresholdOracle(std::vector<double> capacities, double demand)
      : capacities_(std::move(capacities)), demand_(demand) {
    if (capacities_.empty()) throw std::invalid_argument("threshold oracle needs at least one component");
    for (double c : capacities_)
      if (c < 0.0) throw std::invalid_argument("component capacity must be nonnegative");
    if (demand_ < 0.0) throw std::invalid_argument("demand must be nonnegative");
  }

  std::uint32_t component_count() const override { return std::uint32_t(capacities_.size()); }

  EvaluationOutcome evaluate(const SystemState& s) const override {
    if (s.n != capacities_.size()) throw std::invalid_argument("state universe mismatch");
    double surviving = 0.0;
    for (std::uint32_t i = 1; i <= s.n; ++i)
      if (!s.test(i)) surviving += capacities_[i - 1];
    EvaluationOutcome out;
    out.status = surviving < demand_ ? StateStatus::Failure : StateStatus::Normal;
    out.shed_mw = surviving < demand_ ? demand_ - surviving : 0.0;
    out.via = EvaluationVia::Solver;
    return out;
  }

  double demand() const { return demand_; }

 private:
  std::vector<double> capacities_;
  double demand_;
};

// Identified critical states, bucketed by level. Members form an antichain;
// sequence numbers record discovery order.
class CriticalSet {
 public:
  struct Entry {
    SystemState state;
    std::uint64_t seq;
  };

  bool empty() const { return count_ == 0; }
  std::size_t size() const { return count_; }

  // True iff s strictly contains some member (s itself being a member does not count).
  bool dominated(const SystemState& s) const {
    std::uint32_t lev = level(s);
    for (std::uint32_t k = 1; k < lev && k < buckets_.size(); ++k)
      for (const Entry& e : buckets_[k])
        if (leq(e.state, s)) return true;
    return false;
  }

  bool contains(const SystemState& s) const {
    std::uint32_t lev = level(s);
    if (lev >= buckets_.size()) return false;
    for (const Entry& e : buckets_[lev])
      if (e.state == s) return true;
    return false;
  }

  void insert(const SystemState& s) {
    std::uint32_t lev = level(s);
    if (lev == 0) throw std::invalid_argument("the base state cannot be critical");
    if (dominated(s)) throw std::invalid_argument("inserting " + to_string(s) + " would break the antichain (dominated)");
    if (lev < buckets_.size())
      for (const Entry& e : buckets_[lev])
        if (e.state == s) throw std::invalid_argument("critical state " + to_string(s) + " inserted twice");
    for (std::uint32_t k = lev + 1; k < buckets_.size(); ++k)
      for (const Entry& e : buckets_[k])
        if (leq(s, e.state))
          throw std::invalid_argument("inserting " + to_string(s) + " would break the antichain (dominates member)");
    if (buckets_.size() <= lev) buckets_.resize(lev + 1);
    buckets_[lev].push_back(Entry{s, next_seq_++});
    ++count_;
  }

  // Members sorted by discovery sequence.
  std::vector<Entry> in_discovery_order() const {
    std::vector<Entry> all;
    all.reserve(count_);
    for (const auto& b : buckets_)
      for (const Entry& e : b) all.push_back(e);
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.seq < b.seq; });
    return all;
  }

  // Earliest-discovered member strictly below s; nullptr when none exists.
  const Entry* earliest_below(const SystemState& s) const {
    const Entry* best = nullptr;
    std::uint32_t lev = level(s);
    for (std::uint32_t k = 1; k < lev && k < buckets_.size(); ++k)
      for (const Entry& e : buckets_[k])
        if (leq(e.state, s) && (!best || e.seq < best->seq)) best = &e;
    return best;
  }

  std::uint32_t max_level() const { return buckets_.empty() ? 0 : std::uint32_t(buckets_.size() - 1); }

  const std::vector<Entry>& bucket(std::uint32_t lev) const {
    static const std::vector<Entry> kEmpty;
    return lev < buckets_.size() ? buckets_[lev] : kEmpty;
  }

 private:
  std::vector<std::vector<Entry>> buckets_;
  std::uint64_t next_seq_ = 0;
  std::size_t count_ = 0;
};

inline bool dominated(const SystemState& s, const CriticalSet& c) { return c.dominated(s); }

// Unbounded memo of solver outcomes keyed by state. Reads and inserts may race
// from worker threads; first insert wins and later ones must agree.
class EvaluationCache {
 public:
  std::optional<EvaluationOutcome> lookup(const SystemState& s) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(s);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  EvaluationOutcome insert_if_absent(const SystemState& s, const EvaluationOutcome& out) {
    std::unique_lock lock(mu_);
    auto [it, fresh] = map_.emplace(s, out);
    (void)fresh;
    return it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return map_.size();
  }

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<SystemState, EvaluationOutcome, StateHash> map_;
};

// Cache-interposed evaluation; replays return the stored outcome with via=Cache.
inline EvaluationOutcome evaluate_cached(const Evaluator& ev, EvaluationCache& cache, const SystemState& s,
                                         bool* was_hit = nullptr) {
  if (auto hit = cache.lookup(s)) {
    if (was_hit) *was_hit = true;
    EvaluationOutcome out = *hit;
    out.via = EvaluationVia::Cache;
    return out;
  }
  if (was_hit) *was_hit = false;
  EvaluationOutcome out = ev.evaluate(s);
  return cache.insert_if_absent(s, out);
}

}  // namespace csilp
