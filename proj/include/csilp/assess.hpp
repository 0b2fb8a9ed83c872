#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "csilp/evaluator.hpp"
#include "csilp/partition.hpp"
#include "csilp/state.hpp"

namespace csilp {

// Stopping rules; the run halts at a round boundary once any engaged rule is
// met. At least one must be engaged.
struct Criteria {
  std::optional<std::uint64_t> max_evaluations;  // solver-call budget
  std::optional<double> min_gap;                 // target bound width
  std::optional<std::uint32_t> max_level;        // deepest outage level to probe

  void validate() const {
    if (!max_evaluations && !min_gap && !max_level)
      throw std::invalid_argument("at least one stopping criterion must be set");
    if (min_gap && (*min_gap < 0.0 || *min_gap >= 1.0))
      throw std::invalid_argument("gap criterion must lie in [0,1)");
  }
};

struct RunOptions {
  std::uint32_t workers = 1;
  bool tight_upper = false;
};

enum class StopReason { Exhausted, BudgetReached, GapReached, LevelExceeded, Aborted };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Exhausted: return "exhausted";
    case StopReason::BudgetReached: return "budget_reached";
    case StopReason::GapReached: return "gap_reached";
    case StopReason::LevelExceeded: return "level_exceeded";
    case StopReason::Aborted: return "aborted";
  }
  return "unknown";
}

struct TraceRow {
  std::uint64_t evaluations = 0;
  double lower = 0.0;
  double upper = 1.0;
  double elapsed_ms = 0.0;  // wall time; kept out of the canonical report
};

struct CriticalRecord {
  SystemState state;
  std::uint32_t level = 0;
  double shed_mw = 0.0;
  double probability = 0.0;
  double risk = 0.0;        // probability * shed
  double delta_lolp = 0.0;  // failure mass first certified through this state
  double lolp_at_identification = 0.0;
  std::uint64_t evaluations_at_identification = 0;
};

struct AssessResult {
  double lolp_lower = 0.0;
  double lolp_upper = 1.0;
  std::uint64_t evaluations = 0;      // solver calls, base state excluded
  std::uint64_t dominance_skips = 0;  // candidates classified against known criticals
  std::uint64_t cache_hits = 0;
  std::uint32_t deepest_level = 0;    // highest candidate level processed
  StopReason stop_reason = StopReason::Exhausted;
  bool aborted = false;
  std::string abort_message;
  std::vector<CriticalRecord> criticals;  // discovery order
  std::vector<TraceRow> trace;
  std::vector<Lattice> failure_lattices;  // certified failure regions
  std::vector<Lattice> normal_cells;      // certified normal regions
  std::vector<Lattice> frontier;          // unresolved sublattices at stop

  double gap() const { return lolp_upper - lolp_lower; }
  bool exact() const { return !aborted && frontier.empty(); }
};

namespace detail {

class AssessEngine {
 public:
  AssessEngine(const Evaluator& ev, const ComponentReliability& rel, const Criteria& crit,
               const RunOptions& opt)
      : ev_(ev), rel_(rel), crit_(crit), opt_(opt), n_(ev.component_count()) {
    crit_.validate();
    if (rel_.n() != n_) throw std::invalid_argument("reliability vector does not match component count");
    if (opt_.workers == 0) throw std::invalid_argument("worker count must be positive");
    start_ = std::chrono::steady_clock::now();
  }

  AssessResult run() {
    try {
      bootstrap_base();
      bootstrap_singles();
      while (!stopped_) round();
    } catch (const EvaluatorError& e) {
      res_.aborted = true;
      res_.abort_message = e.what();
      res_.stop_reason = StopReason::Aborted;
    }
    finalize();
    return std::move(res_);
  }

 private:
  struct Candidate {
    SystemState state;
    std::size_t lattice;  // index into the round batch
  };

  const Evaluator& ev_;
  ComponentReliability rel_;
  Criteria crit_;
  RunOptions opt_;
  std::uint32_t n_;
  std::chrono::steady_clock::time_point start_;

  std::vector<Lattice> x_;  // unresolved 1-normal sublattices, queue order
  CriticalSet criticals_;
  EvaluationCache cache_;
  std::unordered_map<SystemState, std::uint64_t, StateHash> record_of_;  // state -> seq
  std::unordered_set<SystemState, StateHash> wprime_;                    // solver-confirmed normal states
  double wprime_mass_ = 0.0;
  double lower_mass_ = 0.0;
  double uncovered_normal_mass_ = 0.0;  // certified-normal cell mass outside wprime
  std::uint64_t evals_ = 0;
  bool stopped_ = false;
  AssessResult res_;

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

  double upper_value() const {
    double u = 1.0 - wprime_mass_;
    if (opt_.tight_upper) u -= uncovered_normal_mass_;
    return u;
  }

  void note_normal_solver(const SystemState& s) {
    if (wprime_.insert(s).second) wprime_mass_ += state_probability(s, rel_);
  }

  void retire_normal_cell(const Lattice& cell) {
    for (std::uint32_t k = 0; k <= cell.dimension(); ++k)
      for (const SystemState& m : lattice_members(cell, k))
        if (!wprime_.count(m)) uncovered_normal_mass_ += state_probability(m, rel_);
    res_.normal_cells.push_back(cell);
  }

  // Attributes a certified failure cell to the earliest critical at or below
  // its minimal element and grows the lower bound.
  void retire_failure_cell(const Lattice& cell) {
    double mass = lattice_probability(cell, rel_);
    lower_mass_ += mass;
    std::uint64_t seq;
    auto it = record_of_.find(cell.lower);
    if (it != record_of_.end()) {
      seq = it->second;
    } else {
      const CriticalSet::Entry* e = criticals_.earliest_below(cell.lower);
      if (!e) throw std::logic_error("failure cell with no critical at or below its minimum");
      seq = e->seq;
    }
    res_.criticals[seq].delta_lolp += mass;
    res_.failure_lattices.push_back(cell);
  }

  void add_critical(const SystemState& s, double shed, std::uint64_t eval_no) {
    criticals_.insert(s);
    CriticalRecord rec;
    rec.state = s;
    rec.level = level(s);
    rec.shed_mw = shed;
    rec.probability = state_probability(s, rel_);
    rec.risk = rec.probability * shed;
    rec.evaluations_at_identification = eval_no;
    record_of_.emplace(s, res_.criticals.size());
    res_.criticals.push_back(std::move(rec));
  }

  void trace_row() {
    if (!res_.trace.empty() && res_.trace.back().evaluations == evals_) return;
    res_.trace.push_back(TraceRow{evals_, lower_mass_, upper_value(), elapsed_ms()});
  }

  // Runs f over [0,count) split by index stride; rethrows the failure with the
  // lowest index so outcomes do not depend on worker count.
  template <typename F>
  void parallel_for(std::size_t count, F&& f) {
    std::uint32_t workers = std::uint32_t(std::min<std::size_t>(opt_.workers, count));
    if (workers <= 1) {
      for (std::size_t i = 0; i < count; ++i) f(i);
      return;
    }
    std::vector<std::pair<std::size_t, std::string>> errors(workers, {count, std::string()});
    auto body = [&](std::uint32_t w) {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          f(i);
        } catch (const std::exception& e) {
          errors[w] = {i, e.what()};
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::uint32_t w = 1; w < workers; ++w) pool.emplace_back(body, w);
    body(0);
    for (auto& t : pool) t.join();
    const std::pair<std::size_t, std::string>* first = nullptr;
    for (const auto& e : errors)
      if (e.first < count && (!first || e.first < first->first)) first = &e;
    if (first) throw EvaluatorError(first->second);
  }

  void bootstrap_base() {
    SystemState base(n_);
    EvaluationOutcome out = evaluate_cached(ev_, cache_, base);
    if (out.status == StateStatus::Failure)
      throw BaseStateError("the base state itself fails; loss of load probability is 1");
    note_normal_solver(base);
  }

  void bootstrap_singles() {
    std::vector<SystemState> singles;
    singles.reserve(n_);
    for (ComponentId c = 1; c <= n_; ++c) singles.push_back(SystemState::from_components(n_, {c}));
    std::vector<EvaluationOutcome> outs(n_);
    parallel_for(n_, [&](std::size_t i) { outs[i] = ev_.evaluate(singles[i]); });
    for (std::size_t i = 0; i < n_; ++i) cache_.insert_if_absent(singles[i], outs[i]);
    evals_ += n_;

    std::vector<ComponentId> failed;
    for (std::size_t i = 0; i < n_; ++i) {
      if (outs[i].status == StateStatus::Failure)
        failed.push_back(ComponentId(i + 1));
      else
        note_normal_solver(singles[i]);
    }
    for (std::size_t i = 0; i < failed.size(); ++i)
      add_critical(singles[failed[i] - 1], outs[failed[i] - 1].shed_mw.value_or(0.0),
                   /*eval_no=*/failed[i]);

    Lattice full{SystemState(n_), complement(SystemState(n_))};
    if (failed.empty()) {
      enqueue_or_retire(full);
    } else {
      ColumnOrder ord = bootstrap_order(failed);
      PartitionResult part = partition_by_level1(full, ord, std::uint32_t(failed.size()));
      for (const Lattice& cell : part.failure_lattices) retire_failure_cell(cell);
      for (const Lattice& cell : part.one_normal_lattices) enqueue_or_retire(cell);
      for (const Lattice& cell : part.normal_lattices) retire_normal_cell(cell);
    }
    res_.deepest_level = 1;
    trace_row();
    check_stop();
  }

  // Failed components first, ascending id; failure-free follow ascending.
  ColumnOrder bootstrap_order(const std::vector<ComponentId>& failed) const {
    std::vector<char> is_failed(n_ + 1, 0);
    for (ComponentId c : failed) is_failed[c] = 1;
    std::vector<ComponentId> cols(failed);
    for (ComponentId c = 1; c <= n_; ++c)
      if (!is_failed[c]) cols.push_back(c);
    return make_column_order(std::move(cols));
  }

  // 1-normal cells of width >= 2 stay on the frontier; narrower ones are fully
  // evaluated already and retire as certified normal.
  void enqueue_or_retire(const Lattice& cell) {
    if (cell.dimension() >= 2)
      x_.push_back(cell);
    else
      retire_normal_cell(cell);
  }

  std::uint32_t candidate_level(const Lattice& l) const { return level(l.lower) + 2; }

  void round() {
    if (x_.empty()) {
      stopped_ = true;
      res_.stop_reason = StopReason::Exhausted;
      return;
    }
    std::uint32_t k = candidate_level(x_[0]);
    for (const Lattice& l : x_) k = std::min(k, candidate_level(l));

    // x_ is left untouched until the barrier so an evaluator abort mid-round
    // still reports a faithful frontier
    std::vector<Lattice> batch;
    std::vector<Lattice> rest;
    for (const Lattice& l : x_) {
      if (candidate_level(l) == k)
        batch.push_back(l);
      else
        rest.push_back(l);
    }

    // candidate pairs in batch order, lexicographic within each lattice
    std::vector<Candidate> cands;
    for (std::size_t li = 0; li < batch.size(); ++li)
      for (SystemState& s : lattice_members(batch[li], 2)) cands.push_back(Candidate{std::move(s), li});

    // classify: known-critical containment first, then replay, then solve
    std::vector<EvaluationOutcome> outs(cands.size());
    std::vector<std::size_t> need_solve;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (criticals_.dominated(cands[i].state)) {
        outs[i] = EvaluationOutcome{StateStatus::Failure, std::nullopt, EvaluationVia::Dominance};
        ++res_.dominance_skips;
      } else if (auto hit = cache_.lookup(cands[i].state)) {
        outs[i] = *hit;
        outs[i].via = EvaluationVia::Cache;
        ++res_.cache_hits;
      } else {
        need_solve.push_back(i);
      }
    }
    parallel_for(need_solve.size(), [&](std::size_t j) {
      std::size_t i = need_solve[j];
      outs[i] = ev_.evaluate(cands[i].state);
      cache_.insert_if_absent(cands[i].state, outs[i]);
    });

    // barrier: counter slots follow candidate order, new criticals insert in
    // lexicographic order, then every lattice of the batch is partitioned
    x_ = std::move(rest);
    res_.deepest_level = std::max(res_.deepest_level, k);
    std::uint64_t base_count = evals_;
    evals_ += need_solve.size();
    std::vector<std::pair<SystemState, std::uint64_t>> confirmed;  // state, eval slot
    for (std::size_t j = 0; j < need_solve.size(); ++j) {
      std::size_t i = need_solve[j];
      if (outs[i].status == StateStatus::Failure)
        confirmed.emplace_back(cands[i].state, base_count + j + 1);
      else
        note_normal_solver(cands[i].state);
    }
    std::sort(confirmed.begin(), confirmed.end(),
              [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
    for (const auto& [state, slot] : confirmed) {
      auto it = std::find_if(cands.begin(), cands.end(), [&](const Candidate& c) { return c.state == state; });
      std::size_t i = std::size_t(it - cands.begin());
      add_critical(state, outs[i].shed_mw.value_or(0.0), slot);
    }

    std::size_t ci = 0;
    for (std::size_t li = 0; li < batch.size(); ++li) {
      std::vector<SystemState> failure_pairs;
      for (; ci < cands.size() && cands[ci].lattice == li; ++ci)
        if (outs[ci].status == StateStatus::Failure) failure_pairs.push_back(cands[ci].state);
      partition_lattice(batch[li], failure_pairs);
    }

    trace_row();
    check_stop();
  }

  void partition_lattice(const Lattice& l, const std::vector<SystemState>& failure_pairs) {
    if (failure_pairs.empty() && l.dimension() <= 2) {
      retire_normal_cell(l);
      return;
    }
    ColumnOrder ord = choose_order(l, failure_pairs);
    PartitionResult part = partition_by_level2(l, ord, failure_pairs);
    for (const Lattice& cell : part.failure_lattices) retire_failure_cell(cell);
    for (const Lattice& cell : part.one_normal_lattices) enqueue_or_retire(cell);
    for (const Lattice& cell : part.normal_lattices) retire_normal_cell(cell);
  }

  void check_stop() {
    if (x_.empty()) {
      stopped_ = true;
      res_.stop_reason = StopReason::Exhausted;
      return;
    }
    if (crit_.max_evaluations && evals_ >= *crit_.max_evaluations) {
      stopped_ = true;
      res_.stop_reason = StopReason::BudgetReached;
      return;
    }
    if (crit_.min_gap && upper_value() - lower_mass_ <= *crit_.min_gap) {
      stopped_ = true;
      res_.stop_reason = StopReason::GapReached;
      return;
    }
    if (crit_.max_level) {
      std::uint32_t next = candidate_level(x_[0]);
      for (const Lattice& l : x_) next = std::min(next, candidate_level(l));
      if (next > *crit_.max_level) {
        stopped_ = true;
        res_.stop_reason = StopReason::LevelExceeded;
      }
    }
  }

  void finalize() {
    res_.lolp_lower = lower_mass_;
    res_.lolp_upper = upper_value();
    res_.evaluations = evals_;
    res_.frontier = x_;
    double running = 0.0;
    for (CriticalRecord& rec : res_.criticals) {
      running += rec.delta_lolp;
      rec.lolp_at_identification = running;
    }
  }
};

}  // namespace detail

// Critical-state search over the outage lattice. Starts from the base state
// and single outages, then repeatedly evaluates the two-level frontier of each
// unresolved sublattice, splits around confirmed failures and accumulates
// certified failure and normal regions into converging LOLP bounds.
inline AssessResult assess(const Evaluator& ev, const ComponentReliability& rel, const Criteria& crit,
                           const RunOptions& opt = RunOptions{}) {
  return detail::AssessEngine(ev, rel, crit, opt).run();
}

}  // namespace csilp
