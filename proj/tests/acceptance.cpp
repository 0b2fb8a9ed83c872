// End-to-end acceptance battery. Usage: acceptance <cli-binary> <data-dir>
// Each numbered criterion prints one PASS/FAIL line; the process exits
// nonzero when any non-stretch criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csilp/assess.hpp"
#include "csilp/baselines.hpp"
#include "csilp/dcopf.hpp"
#include "csilp/evaluator.hpp"
#include "csilp/io.hpp"
#include "csilp/simplex.hpp"
#include "csilp/state.hpp"

namespace fs = std::filesystem;
using namespace csilp;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void verdict(int id, bool ok, const std::string& detail, bool stretch = false) {
  std::printf("%s  criterion %d%s: %s\n", ok ? "PASS" : "FAIL", id, stretch ? " (stretch)" : "",
              detail.c_str());
  std::fflush(stdout);
  if (!ok && !stretch) ++g_failures;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int run_cli(const std::string& cmd) {
  int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Pinned synthetic corpus: reproducible mixed bag of cut-set and capacity
// systems small enough for the exhaustive oracle.

struct CorpusSystem {
  std::shared_ptr<Evaluator> evaluator;
  ComponentReliability rel;
  std::uint32_t n = 0;
  BruteForceResult oracle;
};

std::vector<CorpusSystem> build_corpus(std::size_t count, std::uint64_t seed) {
  std::mt19937 rng{std::uint32_t(seed)};
  std::vector<CorpusSystem> out;
  while (out.size() < count) {
    CorpusSystem sys;
    sys.n = 5 + rng() % 10;  // 5..14
    std::vector<double> p;
    for (std::uint32_t i = 0; i < sys.n; ++i) p.push_back(0.01 + 0.24 * double(rng() % 1000) / 999.0);
    sys.rel = ComponentReliability(p);

    if (rng() % 4 == 0) {
      std::vector<double> caps;
      double total = 0.0;
      for (std::uint32_t i = 0; i < sys.n; ++i) {
        caps.push_back(1.0 + double(rng() % 25));
        total += caps.back();
      }
      double demand = total * (0.5 + 0.35 * double(rng() % 100) / 99.0);
      sys.evaluator = std::make_shared<ThresholdOracle>(std::move(caps), demand);
    } else {
      std::vector<SystemState> kept;
      std::uint32_t want = 1 + rng() % 6;
      for (int attempt = 0; attempt < 60 && kept.size() < want; ++attempt) {
        std::uint32_t lev = 1 + rng() % 4;
        SystemState c(sys.n);
        while (level(c) < lev) c.set(1 + rng() % sys.n);
        bool ok = true;
        for (const SystemState& k : kept)
          if (leq(k, c) || leq(c, k)) ok = false;
        if (ok) kept.push_back(c);
      }
      sys.evaluator = std::make_shared<CutsetOracle>(sys.n, std::move(kept));
    }
    sys.oracle = brute_force_oracle(*sys.evaluator, sys.rel);
    out.push_back(std::move(sys));
  }
  return out;
}

std::set<std::vector<ComponentId>> critical_sets(const AssessResult& r) {
  std::set<std::vector<ComponentId>> out;
  for (const CriticalRecord& c : r.criticals) out.insert(c.state.components());
  return out;
}

std::set<std::vector<ComponentId>> oracle_cuts(const BruteForceResult& bf, std::uint32_t max_level) {
  std::set<std::vector<ComponentId>> out;
  for (const SystemState& s : bf.minimal_cut_sets)
    if (level(s) <= max_level) out.insert(s.components());
  return out;
}

// Every state of the universe must fall into exactly one reported cell.
bool exact_cover(std::uint32_t n, const AssessResult& r, std::string& why) {
  std::vector<const Lattice*> cells;
  for (const Lattice& c : r.failure_lattices) cells.push_back(&c);
  for (const Lattice& c : r.normal_cells) cells.push_back(&c);
  for (const Lattice& c : r.frontier) cells.push_back(&c);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    SystemState s(n);
    s.words[0] = mask;
    int owners = 0;
    for (const Lattice* c : cells)
      if (c->contains(s)) ++owners;
    if (owners != 1) {
      why = "state " + to_string(s) + " covered " + std::to_string(owners) + " times";
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

void criterion1_cli_worked_example(const std::string& cli, const fs::path& data, const fs::path& work) {
  fs::path out = work / "c1";
  fs::create_directories(out);
  std::string cmd = cli + " assess --system " + (data / "sys5.json").string() + " --k-max 5 --out " +
                    out.string() + " --format json";
  if (run_cli(cmd) != 0) {
    verdict(1, false, "command line run failed: " + cmd);
    return;
  }
  Report rep;
  try {
    rep = read_report(out / "report.json");
  } catch (const std::exception& e) {
    verdict(1, false, std::string("report unreadable: ") + e.what());
    return;
  }
  bool ok = rep.method == "csilp" && rep.evaluation_count == 12 && rep.stop_reason == "exhausted" &&
            near(rep.lolp_lower, 0.11791, 1e-12) && near(rep.lolp_upper, 0.11791, 1e-12) &&
            rep.criticals.size() == 4;
  if (ok) {
    const std::vector<std::vector<ComponentId>> states{{1}, {2, 3}, {3, 4}, {2, 4, 5}};
    const std::vector<std::uint64_t> at{1, 6, 9, 12};
    for (std::size_t i = 0; i < 4; ++i)
      ok = ok && rep.criticals[i].components == states[i] &&
           rep.criticals[i].evaluations_at_identification == at[i];
  }
  verdict(1, ok,
          "five-component worked example through the command line (12 evaluations, bounds " +
              fmt(rep.lolp_lower) + " / " + fmt(rep.lolp_upper) + ")");
}

void criterion2_exhaustive_match(const std::vector<CorpusSystem>& corpus) {
  auto t0 = Clock::now();
  std::size_t bad = 0;
  std::string first;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusSystem& sys = corpus[i];
    Criteria crit;
    crit.max_level = sys.n;
    AssessResult r = assess(*sys.evaluator, sys.rel, crit);
    bool ok = r.exact() && near(r.lolp_lower, sys.oracle.lolp, 1e-12) &&
              near(r.lolp_upper, sys.oracle.lolp, 1e-12) &&
              critical_sets(r) == oracle_cuts(sys.oracle, sys.n);
    if (!ok) {
      ++bad;
      if (first.empty())
        first = "system " + std::to_string(i) + ": got " + fmt(r.lolp_lower) + ", oracle " +
                fmt(sys.oracle.lolp);
    }
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  bool ok = bad == 0 && secs < 120.0;
  verdict(2, ok,
          "exhaustive runs on " + std::to_string(corpus.size()) + " random systems match the oracle (" +
              std::to_string(bad) + " mismatches, " + fmt(secs) + " s)" +
              (first.empty() ? "" : "; first: " + first));
}

void criterion3_truncation(const std::vector<CorpusSystem>& corpus) {
  std::size_t bad = 0;
  std::string first;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusSystem& sys = corpus[i];
    for (std::uint32_t k : {2u, 3u, 4u}) {
      Criteria crit;
      crit.max_level = k;
      AssessResult r = assess(*sys.evaluator, sys.rel, crit);
      bool ok = r.lolp_lower <= sys.oracle.lolp + 1e-12 && r.lolp_upper >= sys.oracle.lolp - 1e-12 &&
                r.lolp_upper - r.lolp_lower >= -1e-12 && critical_sets(r) == oracle_cuts(sys.oracle, k);
      RunOptions tight;
      tight.tight_upper = true;
      AssessResult t = assess(*sys.evaluator, sys.rel, crit, tight);
      ok = ok && t.lolp_upper <= r.lolp_upper + 1e-15 && t.lolp_upper >= sys.oracle.lolp - 1e-12;
      if (!ok) {
        ++bad;
        if (first.empty()) first = "system " + std::to_string(i) + " at depth " + std::to_string(k);
      }
    }
  }
  verdict(3, bad == 0,
          "truncated runs sandwich the exact value and recover every cut set within reach (" +
              std::to_string(bad) + " violations)" + (first.empty() ? "" : "; first: " + first));
}

void criterion4_evaluation_economy(const std::vector<CorpusSystem>& corpus) {
  std::size_t violations = 0, shallow = 0, strictly = 0;
  for (const CorpusSystem& sys : corpus) {
    std::uint32_t k = std::min(4u, sys.n);
    Criteria crit;
    crit.max_level = k;
    AssessResult lat = assess(*sys.evaluator, sys.rel, crit);
    EnumerationResult se = enumerate_assess(*sys.evaluator, sys.rel, crit);
    // the enumeration counter includes the base state; add it to ours
    std::uint64_t lat_calls = lat.evaluations + 1;
    if (lat_calls > se.evaluations) ++violations;
    bool has_shallow = false;
    for (const SystemState& s : sys.oracle.minimal_cut_sets)
      if (level(s) <= 2) has_shallow = true;
    if (has_shallow) {
      ++shallow;
      if (lat_calls < se.evaluations) ++strictly;
    }
  }
  bool ok = violations == 0 && shallow > 0 && strictly * 10 >= shallow * 9;
  verdict(4, ok,
          "lattice search never needs more status evaluations than enumeration (" +
              std::to_string(violations) + " violations; strictly fewer on " + std::to_string(strictly) +
              "/" + std::to_string(shallow) + " systems with shallow failures)");
}

void criterion5_tiling(const std::vector<CorpusSystem>& corpus) {
  std::size_t checked = 0, bad = 0;
  std::string first;
  for (const CorpusSystem& sys : corpus) {
    if (sys.n > 10) continue;
    ++checked;
    for (std::uint32_t k : {2u, sys.n}) {
      Criteria crit;
      crit.max_level = k;
      AssessResult r = assess(*sys.evaluator, sys.rel, crit);

      std::string why;
      bool cover = exact_cover(sys.n, r, why);

      double mass = 0.0;
      for (const Lattice& c : r.failure_lattices) mass += lattice_probability(c, sys.rel);
      for (const Lattice& c : r.normal_cells) mass += lattice_probability(c, sys.rel);
      for (const Lattice& c : r.frontier) mass += lattice_probability(c, sys.rel);
      bool ok = cover && near(mass, 1.0, 1e-12);
      if (!ok) {
        ++bad;
        if (first.empty())
          first = (cover ? "mass " + fmt(mass) : why) + " at depth " + std::to_string(k);
      }
    }
  }
  verdict(5, bad == 0 && checked > 0,
          "reported cells tile the state space exactly on " + std::to_string(checked) +
              " small systems (" + std::to_string(bad) + " defects)" +
              (first.empty() ? "" : "; first: " + first));
}

void criterion6_dispatch_goldens(const fs::path& data) {
  LoadedSystem sys;
  try {
    sys = load_system(data / "test3.json");
  } catch (const std::exception& e) {
    verdict(6, false, std::string("cannot load dispatch example: ") + e.what());
    return;
  }
  if (!sys.network) {
    verdict(6, false, "dispatch example did not come back as a network model");
    return;
  }
  const NetworkModel& m = *sys.network;
  struct Case {
    std::vector<ComponentId> outage;
    double shed;
  };
  const std::vector<Case> cases{{{}, 0.0}, {{2}, 40.0}, {{1}, 100.0}};
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    SystemState s = SystemState::from_components(m.component_count(), c.outage);
    ShedLpLayout built = build_shed_lp(m, s);
    LpSolution sol = solve_lp(built.lp);
    double shed = sol.status == LpStatus::Optimal ? std::max(0.0, sol.objective) : -1.0;
    double resid = 0.0;
    if (sol.status == LpStatus::Optimal) {
      for (std::size_t i = 0; i < built.lp.rows.size(); ++i) {
        double r = built.lp.rhs[i];
        for (std::uint32_t j = 0; j < built.lp.num_vars; ++j) r -= built.lp.rows[i][j] * sol.x[j];
        resid = std::max(resid, std::abs(r));
      }
    }
    bool case_ok = sol.status == LpStatus::Optimal && near(shed, c.shed, 1e-8) && resid <= 1e-8;
    ok = ok && case_ok;
    detail += (detail.empty() ? "" : ", ") + to_string(s) + "->" + fmt(shed);
  }
  verdict(6, ok, "three-bus dispatch sheds " + detail + " with balanced buses");
}

void criterion7_sampling(const fs::path& data) {
  LoadedSystem sys;
  try {
    sys = load_system(data / "sys5.json");
  } catch (const std::exception& e) {
    verdict(7, false, std::string("cannot load sampling example: ") + e.what());
    return;
  }
  const double exact = 0.11791;
  int within = 0, converged = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    McsSettings s;
    s.target_cov = 0.01;
    s.max_samples = 400000;
    s.seed = seed;
    McsResult r = monte_carlo_assess(*sys.evaluator, sys.reliability, s);
    if (r.converged) ++converged;
    double sigma = r.cov * r.lolp_estimate;
    if (std::abs(r.lolp_estimate - exact) <= 3.0 * sigma) ++within;
  }
  bool ok = within >= 47;
  verdict(7, ok,
          "sampling estimate within three sigma of the exact value on " + std::to_string(within) +
              "/50 seeds (" + std::to_string(converged) + " converged)");
}

void criterion8_benchmark(const fs::path& data) {
  auto t0 = Clock::now();
  LoadedSystem sys;
  try {
    sys = load_system(data / "rbts.json");
  } catch (const std::exception& e) {
    verdict(8, false, std::string("cannot load benchmark: ") + e.what(), /*stretch=*/true);
    return;
  }
  const double published = 0.009475169361176;
  const std::map<std::uint32_t, std::size_t> published_levels{{1, 1}, {2, 19}, {3, 15}, {4, 10}, {5, 17}};

  Criteria crit;
  crit.max_level = sys.evaluator->component_count();
  RunOptions opt;
  opt.workers = 4;
  AssessResult r;
  try {
    r = assess(*sys.evaluator, sys.reliability, crit, opt);
  } catch (const std::exception& e) {
    verdict(8, false, std::string("benchmark run failed: ") + e.what(), /*stretch=*/true);
    return;
  }

  std::map<std::uint32_t, std::size_t> levels;
  for (const CriticalRecord& c : r.criticals) ++levels[c.level];
  bool level_ok = true;
  for (const auto& [lev, cnt] : published_levels) {
    std::size_t got = levels.count(lev) ? levels.at(lev) : 0;
    if (got + 2 < cnt || got > cnt + 2) level_ok = false;
  }
  double rel_err = std::abs(r.lolp_lower - published) / published;

  // independent exhaustive cross-check of the same network
  bool oracle_ok = true;
  std::string oracle_note;
  try {
    BruteForceResult bf = brute_force_oracle(*sys.evaluator, sys.reliability);
    oracle_ok = near(r.lolp_lower, bf.lolp, 1e-12) && critical_sets(r) == oracle_cuts(bf, sys.evaluator->component_count());
    oracle_note = ", oracle agreement " + std::string(oracle_ok ? "exact" : "BROKEN");
  } catch (const std::exception& e) {
    oracle_ok = false;
    oracle_note = std::string(", oracle crashed: ") + e.what();
  }

  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  bool ok = r.exact() && rel_err <= 0.05 && level_ok && oracle_ok && secs <= 1800.0;
  std::string lv;
  for (std::uint32_t k = 1; k <= 5; ++k) lv += (k > 1 ? "/" : "") + std::to_string(levels.count(k) ? levels[k] : 0);
  verdict(8, ok,
          "six-bus benchmark: probability " + fmt(r.lolp_lower) + " (published " + fmt(published) +
              ", relative error " + fmt(rel_err) + "), " + std::to_string(r.criticals.size()) +
              " criticals by level " + lv + oracle_note + ", " + fmt(secs) + " s",
          /*stretch=*/true);
}

void criterion9_reproducible_reports(const std::string& cli, const fs::path& data, const fs::path& work) {
  struct Job {
    const char* label;
    std::string args;
  };
  const std::vector<Job> jobs{
      {"sys5 exhaustive", "assess --system " + (data / "sys5.json").string() + " --k-max 5"},
      {"rbts depth 3", "assess --system " + (data / "rbts.json").string() + " --k-max 3"},
      {"sys5 sampling", "mcs --system " + (data / "sys5.json").string() + " --cov 0.02 --seed 11"},
  };
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    fs::path a = work / ("c9_" + std::to_string(i) + "_w1");
    fs::path b = work / ("c9_" + std::to_string(i) + "_w4");
    fs::create_directories(a);
    fs::create_directories(b);
    int rc1 = run_cli(cli + " " + jobs[i].args + " --workers 1 --out " + a.string());
    int rc4 = run_cli(cli + " " + jobs[i].args + " --workers 4 --out " + b.string());
    bool same = rc1 == 0 && rc4 == 0 && slurp(a / "report.json") == slurp(b / "report.json") &&
                !slurp(a / "report.json").empty();
    ok = ok && same;
    detail += (i ? ", " : "") + std::string(jobs[i].label) + (same ? " identical" : " DIFFERS");
  }
  verdict(9, ok, "reports are byte-identical across worker counts: " + detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: acceptance <cli-binary> <data-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path data = argv[2];
  fs::path work = fs::temp_directory_path() / "csilp-acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  std::printf("building pinned corpus...\n");
  std::vector<CorpusSystem> corpus = build_corpus(200, 0xC51197);

  criterion1_cli_worked_example(cli, data, work);
  criterion2_exhaustive_match(corpus);
  criterion3_truncation(corpus);
  criterion4_evaluation_economy(corpus);
  criterion5_tiling(corpus);
  criterion6_dispatch_goldens(data);
  criterion7_sampling(data);
  criterion8_benchmark(data);
  criterion9_reproducible_reports(cli, data, work);

  if (g_failures == 0) {
    std::printf("acceptance: all non-stretch criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
