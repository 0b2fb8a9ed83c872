#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "csilp/dcopf.hpp"
#include "csilp/simplex.hpp"
#include "csilp/state.hpp"

using namespace csilp;

namespace {

// One generator feeding two load buses over a triangle of equal lines.
// Components: 1 = generator, 2 = line 1-2, 3 = line 1-3, 4 = line 2-3.
NetworkModel triangle() {
  NetworkModel m;
  m.name = "triangle";
  m.buses = {{1, 0.0}, {2, 50.0}, {3, 50.0}};
  m.generators = {{1, 1, 100.0, 0.02}};
  m.lines = {{1, 1, 2, 60.0, 1.0, 0.001}, {2, 1, 3, 60.0, 1.0, 0.001}, {3, 2, 3, 60.0, 1.0, 0.001}};
  return m;
}

void require_balanced(const NetworkModel& model, const SystemState& state, double tol = 1e-8) {
  ShedLpLayout built = build_shed_lp(model, state);
  LpSolution sol = solve_lp(built.lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  for (std::size_t i = 0; i < built.lp.rows.size(); ++i) {
    double r = built.lp.rhs[i];
    for (std::uint32_t j = 0; j < built.lp.num_vars; ++j) r -= built.lp.rows[i][j] * sol.x[j];
    REQUIRE(std::abs(r) <= tol);
  }
  for (std::uint32_t j = 0; j < built.lp.num_vars; ++j) {
    REQUIRE(sol.x[j] >= built.lp.lower[j] - tol);
    REQUIRE(sol.x[j] <= built.lp.upper[j] + tol);
  }
}

}  // namespace

TEST_CASE("triangle network shed values, worked by hand") {
  NetworkModel m = triangle();
  auto shed = [&](std::vector<ComponentId> failed) {
    return min_load_shed(m, SystemState::from_components(4, failed));
  };

  // intact: 50/50 down the two feeders
  REQUIRE(shed({}) == Catch::Approx(0.0).margin(1e-8));
  // one feeder out: the survivor carries its 60 MW limit of the 100 MW load
  REQUIRE(shed({2}) == Catch::Approx(40.0).margin(1e-8));
  REQUIRE(shed({3}) == Catch::Approx(40.0).margin(1e-8));
  // the tie line is redundant when both feeders live
  REQUIRE(shed({4}) == Catch::Approx(0.0).margin(1e-8));
  // the only generator: everything drops
  REQUIRE(shed({1}) == Catch::Approx(100.0).margin(1e-8));

  // full 2^4 table, monotone by construction
  std::map<std::vector<ComponentId>, double> want{
      {{}, 0},        {{1}, 100},      {{2}, 40},        {{3}, 40},       {{4}, 0},
      {{1, 2}, 100},  {{1, 3}, 100},   {{1, 4}, 100},    {{2, 3}, 100},   {{2, 4}, 50},
      {{3, 4}, 50},   {{1, 2, 3}, 100}, {{1, 2, 4}, 100}, {{1, 3, 4}, 100}, {{2, 3, 4}, 100},
      {{1, 2, 3, 4}, 100}};
  std::map<std::uint64_t, double> got;
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    SystemState s(4);
    s.words[0] = mask;
    got[mask] = min_load_shed(m, s);
    INFO("state " << to_string(s));
    REQUIRE(got[mask] == Catch::Approx(want.at(s.components())).margin(1e-8));
  }
  // deeper outages never shed less
  for (std::uint64_t mask = 0; mask < 16; ++mask)
    for (std::uint32_t b = 0; b < 4; ++b)
      if (!((mask >> b) & 1)) REQUIRE(got[mask] <= got[mask | (1ull << b)] + 1e-9);
}

TEST_CASE("dispatch solutions balance every bus") {
  NetworkModel m = triangle();
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    SystemState s(4);
    s.words[0] = mask;
    require_balanced(m, s);
  }
}

TEST_CASE("islanded buses only lose their own demand") {
  // chain 1 - 2 - 3 with all generation at bus 1
  NetworkModel m;
  m.buses = {{1, 0.0}, {2, 30.0}, {3, 20.0}};
  m.generators = {{1, 1, 100.0, 0.01}};
  m.lines = {{1, 1, 2, 100.0, 1.0, 0.001}, {2, 2, 3, 100.0, 1.0, 0.001}};

  REQUIRE(min_load_shed(m, SystemState::from_components(3, {})) == Catch::Approx(0.0).margin(1e-8));
  // cutting 2-3 strands exactly bus 3
  REQUIRE(min_load_shed(m, SystemState::from_components(3, {3})) == Catch::Approx(20.0).margin(1e-8));
  // cutting 1-2 strands both load buses
  REQUIRE(min_load_shed(m, SystemState::from_components(3, {2})) == Catch::Approx(50.0).margin(1e-8));
  require_balanced(m, SystemState::from_components(3, {3}));
  require_balanced(m, SystemState::from_components(3, {2, 3}));
}

TEST_CASE("flows divide by susceptance, not by capacity") {
  // two parallel circuits, one three times stiffer than the other
  NetworkModel m;
  m.buses = {{1, 0.0}, {2, 80.0}};
  m.generators = {{1, 1, 100.0, 0.01}};
  m.lines = {{1, 1, 2, 100.0, 1.0, 0.001}, {2, 1, 2, 100.0, 3.0, 0.001}};

  SystemState intact(3);
  ShedLpLayout built = build_shed_lp(m, intact);
  LpSolution sol = solve_lp(built.lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  REQUIRE(sol.objective == Catch::Approx(0.0).margin(1e-8));
  REQUIRE(sol.x[std::uint32_t(built.flow_var[0])] == Catch::Approx(20.0).margin(1e-6));
  REQUIRE(sol.x[std::uint32_t(built.flow_var[1])] == Catch::Approx(60.0).margin(1e-6));

  // congestion on the stiff circuit forces curtailment the soft one cannot absorb
  m.lines[1].capacity = 45.0;
  // f2 = 3 f1 and f2 <= 45 cap the deliverable power at 60
  REQUIRE(min_load_shed(m, intact) == Catch::Approx(20.0).margin(1e-6));
}

TEST_CASE("lp layout mirrors the outage state") {
  NetworkModel m = triangle();
  SystemState s = SystemState::from_components(4, {2});  // line 1 out
  ShedLpLayout built = build_shed_lp(m, s);
  REQUIRE(built.gen_var.size() == 1);
  REQUIRE(built.curtail_var.size() == 3);
  REQUIRE(built.angle_var.size() == 3);
  REQUIRE(built.flow_var.size() == 3);
  REQUIRE(built.flow_var[0] == -1);  // removed outright
  REQUIRE(built.flow_var[1] >= 0);
  REQUIRE(built.flow_var[2] >= 0);
  // rows: one balance per bus plus one flow definition per live line
  REQUIRE(built.lp.rows.size() == 3 + 2);
  // warm-start basis: curtailments and live flows
  REQUIRE(built.lp.basis_hint.size() == 3 + 2);
  // only curtailment carries cost
  for (std::uint32_t v : built.gen_var) REQUIRE(built.lp.objective[v] == 0.0);
  for (std::uint32_t v : built.curtail_var) REQUIRE(built.lp.objective[v] == 1.0);

  // failed generators stay as zero-capacity columns
  ShedLpLayout genout = build_shed_lp(m, SystemState::from_components(4, {1}));
  REQUIRE(genout.lp.upper[genout.gen_var[0]] == 0.0);

  REQUIRE_THROWS_AS(build_shed_lp(m, SystemState(5)), std::invalid_argument);
}

TEST_CASE("grid adequacy evaluator wraps the dispatch") {
  DcopfEvaluator ev(triangle());
  REQUIRE(ev.component_count() == 4);

  EvaluationOutcome base = ev.evaluate(SystemState(4));
  REQUIRE(base.status == StateStatus::Normal);
  REQUIRE(base.shed_mw.value() == Catch::Approx(0.0).margin(1e-8));

  EvaluationOutcome out = ev.evaluate(SystemState::from_components(4, {2}));
  REQUIRE(out.status == StateStatus::Failure);
  REQUIRE(out.shed_mw.value() == Catch::Approx(40.0).margin(1e-8));
  REQUIRE(out.via == EvaluationVia::Solver);

  // internal errors surface as evaluator failures, not generic exceptions
  REQUIRE_THROWS_AS(ev.evaluate(SystemState(7)), EvaluatorError);
}

TEST_CASE("network validation rejects inconsistent models") {
  NetworkModel ok = triangle();
  REQUIRE_NOTHROW(ok.validate());
  REQUIRE(ok.component_count() == 4);
  REQUIRE(ok.total_demand() == Catch::Approx(100.0));
  ComponentReliability rel = ok.reliability();
  REQUIRE(rel.n() == 4);
  REQUIRE(rel.p[0] == 0.02);
  REQUIRE(rel.p[3] == 0.001);

  NetworkModel bad = triangle();
  bad.buses.clear();
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = triangle();
  bad.buses.push_back({1, 5.0});
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = triangle();
  bad.generators[0].bus = 9;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = triangle();
  bad.lines[0].to = 1;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = triangle();
  bad.lines[0].susceptance = 0.0;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = triangle();
  bad.generators[0].failure_prob = 1.5;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = triangle();
  bad.buses[1].demand = -1.0;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}
