#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "csilp/evaluator.hpp"
#include "csilp/simplex.hpp"
#include "csilp/state.hpp"

namespace csilp {

struct Bus {
  std::uint32_t id = 0;
  double demand = 0.0;
};

struct Generator {
  std::uint32_t id = 0;
  std::uint32_t bus = 0;
  double capacity = 0.0;
  double failure_prob = 0.0;
};

struct Line {
  std::uint32_t id = 0;
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double capacity = 0.0;
  double susceptance = 0.0;
  double failure_prob = 0.0;
};

// Components are numbered generators first (in listed order), then lines.
struct NetworkModel {
  std::string name;
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Line> lines;

  std::uint32_t component_count() const {
    return std::uint32_t(generators.size() + lines.size());
  }

  double total_demand() const {
    double d = 0.0;
    for (const auto& b : buses) d += b.demand;
    return d;
  }

  ComponentReliability reliability() const {
    std::vector<double> p;
    p.reserve(component_count());
    for (const auto& g : generators) p.push_back(g.failure_prob);
    for (const auto& l : lines) p.push_back(l.failure_prob);
    return ComponentReliability{std::move(p)};
  }

  std::unordered_map<std::uint32_t, std::uint32_t> bus_index() const {
    std::unordered_map<std::uint32_t, std::uint32_t> idx;
    for (std::uint32_t i = 0; i < buses.size(); ++i) idx.emplace(buses[i].id, i);
    return idx;
  }

  void validate() const {
    if (buses.empty()) throw std::invalid_argument("network has no buses");
    auto idx = bus_index();
    if (idx.size() != buses.size()) throw std::invalid_argument("duplicate bus id");
    for (const auto& b : buses)
      if (b.demand < 0.0) throw std::invalid_argument("negative demand at bus " + std::to_string(b.id));
    for (const auto& g : generators) {
      if (!idx.count(g.bus))
        throw std::invalid_argument("generator " + std::to_string(g.id) + " references unknown bus");
      if (g.capacity < 0.0) throw std::invalid_argument("negative generator capacity");
      if (g.failure_prob < 0.0 || g.failure_prob > 1.0)
        throw std::invalid_argument("generator failure probability outside [0,1]");
    }
    for (const auto& l : lines) {
      if (!idx.count(l.from) || !idx.count(l.to))
        throw std::invalid_argument("line " + std::to_string(l.id) + " references unknown bus");
      if (l.from == l.to) throw std::invalid_argument("line endpoints coincide");
      if (l.capacity < 0.0) throw std::invalid_argument("negative line capacity");
      if (l.susceptance <= 0.0) throw std::invalid_argument("susceptance must be positive");
      if (l.failure_prob < 0.0 || l.failure_prob > 1.0)
        throw std::invalid_argument("line failure probability outside [0,1]");
    }
  }
};

struct ShedLpLayout {
  LinearProgram lp;
  std::vector<std::uint32_t> gen_var;      // per generator
  std::vector<std::uint32_t> curtail_var;  // per bus
  std::vector<std::int64_t> flow_var;      // per line, -1 when the line is out
  std::vector<std::uint32_t> angle_var;    // per bus
};

// DC load-shedding LP for a given outage state. Failed generators keep their
// variable with capacity 0; failed lines are removed outright. The curtailment
// plus zero-flow point is a basic feasible solution, passed as a warm start.
inline ShedLpLayout build_shed_lp(const NetworkModel& model, const SystemState& state) {
  if (state.n != model.component_count())
    throw std::invalid_argument("state universe does not match network component count");
  auto bus_row = model.bus_index();
  const std::uint32_t nb = std::uint32_t(model.buses.size());
  const std::uint32_t ng = std::uint32_t(model.generators.size());

  ShedLpLayout out;
  LinearProgram& lp = out.lp;

  for (std::uint32_t k = 0; k < ng; ++k) {
    bool failed = state.test(ComponentId(k + 1));
    double cap = failed ? 0.0 : model.generators[k].capacity;
    out.gen_var.push_back(lp.add_variable(0.0, 0.0, cap));
  }
  for (std::uint32_t b = 0; b < nb; ++b)
    out.curtail_var.push_back(lp.add_variable(1.0, 0.0, model.buses[b].demand));
  std::vector<std::uint32_t> live_lines;
  out.flow_var.assign(model.lines.size(), -1);
  for (std::uint32_t l = 0; l < model.lines.size(); ++l) {
    if (state.test(ComponentId(ng + l + 1))) continue;
    double cap = model.lines[l].capacity;
    out.flow_var[l] = lp.add_variable(0.0, -cap, cap);
    live_lines.push_back(l);
  }
  for (std::uint32_t b = 0; b < nb; ++b)
    out.angle_var.push_back(lp.add_variable(0.0, -kLpInf, kLpInf));

  // bus balance: generation + curtailment + net inflow = demand
  for (std::uint32_t b = 0; b < nb; ++b) {
    std::vector<double> row(lp.num_vars, 0.0);
    for (std::uint32_t k = 0; k < ng; ++k)
      if (bus_row.at(model.generators[k].bus) == b) row[out.gen_var[k]] = 1.0;
    row[out.curtail_var[b]] = 1.0;
    for (std::uint32_t l : live_lines) {
      if (bus_row.at(model.lines[l].to) == b) row[std::uint32_t(out.flow_var[l])] += 1.0;
      if (bus_row.at(model.lines[l].from) == b) row[std::uint32_t(out.flow_var[l])] -= 1.0;
    }
    lp.add_constraint(std::move(row), model.buses[b].demand);
  }
  // flow definition: f = susceptance * (angle_from - angle_to)
  for (std::uint32_t l : live_lines) {
    std::vector<double> row(lp.num_vars, 0.0);
    row[std::uint32_t(out.flow_var[l])] = 1.0;
    row[out.angle_var[bus_row.at(model.lines[l].from)]] = -model.lines[l].susceptance;
    row[out.angle_var[bus_row.at(model.lines[l].to)]] = model.lines[l].susceptance;
    lp.add_constraint(std::move(row), 0.0);
  }

  for (std::uint32_t b = 0; b < nb; ++b) lp.basis_hint.push_back(out.curtail_var[b]);
  for (std::uint32_t l : live_lines) lp.basis_hint.push_back(std::uint32_t(out.flow_var[l]));
  return out;
}

inline double min_load_shed(const NetworkModel& model, const SystemState& state) {
  ShedLpLayout built = build_shed_lp(model, state);
  LpSolution sol = solve_lp(built.lp);
  if (sol.status != LpStatus::Optimal)
    throw EvaluatorError("load shedding LP did not solve to optimality for state " + to_string(state));
  return sol.objective < 0.0 ? 0.0 : sol.objective;
}

// Grid adequacy oracle: a state fails when the cheapest DC dispatch still has
// to curtail more than a vanishing fraction of total demand.
class DcopfEvaluator final : public Evaluator {
 public:
  explicit DcopfEvaluator(NetworkModel model) : model_(std::move(model)) {
    model_.validate();
    eps_ = 1e-6 * model_.total_demand();
  }

  std::uint32_t component_count() const override { return model_.component_count(); }

  EvaluationOutcome evaluate(const SystemState& state) const override {
    double shed;
    try {
      shed = min_load_shed(model_, state);
    } catch (const EvaluatorError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvaluatorError(std::string("dcopf evaluation failed: ") + e.what());
    }
    EvaluationOutcome out;
    out.status = shed > eps_ ? StateStatus::Failure : StateStatus::Normal;
    out.shed_mw = shed;
    out.via = EvaluationVia::Solver;
    return out;
  }

  const NetworkModel& model() const { return model_; }

 private:
  NetworkModel model_;
  double eps_ = 0.0;
};

}  // namespace csilp
