// Command-line driver. Subcommands: assess (lattice search), enumerate
// (sequential state enumeration), mcs (Monte Carlo), oracle (exhaustive
// reference, small systems only), report (pretty-print a saved report).
//
// Exit codes: 0 success, 2 input error, 3 base-state failure, 4 evaluator
// error. An aborted assess run still writes its partial report before
// exiting with 4.
//
// Stored reports hold plain probabilities; percentages and wall times appear
// only here, on stdout.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csilp/assess.hpp"
#include "csilp/baselines.hpp"
#include "csilp/io.hpp"

namespace fs = std::filesystem;
using namespace csilp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBaseState = 3;
constexpr int kExitEvaluator = 4;

struct OutputOptions {
  std::string dir;            // empty: stdout only
  std::string format = "json";  // csv additionally writes trace.csv / criticals.csv
};

std::string pct(double p) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g%%", 100.0 * p);
  return buf;
}

std::string ids_to_string(const std::vector<ComponentId>& ids) {
  std::string s = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(ids[i]);
  }
  return s + "}";
}

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void print_report(const Report& rep) {
  std::printf("method       %s\n", rep.method.c_str());
  std::printf("system       %s\n", rep.system_name.c_str());
  if (!rep.rng.empty()) std::printf("rng          %s\n", rep.rng.c_str());

  std::string params;
  auto add = [&params](const std::string& piece) {
    if (!params.empty()) params += "  ";
    params += piece;
  };
  const ReportParameters& p = rep.parameters;
  if (p.k_max) add("k_max=" + std::to_string(*p.k_max));
  if (p.max_evals) add("max_evals=" + std::to_string(*p.max_evals));
  if (p.delta) add("delta=" + detail::fmt_double(*p.delta));
  if (rep.method == "csilp") add(std::string("tight_upper=") + (p.tight_upper ? "on" : "off"));
  if (p.target_cov) add("target_cov=" + detail::fmt_double(*p.target_cov));
  if (p.max_samples) add("max_samples=" + std::to_string(*p.max_samples));
  if (p.seed) add("seed=" + std::to_string(*p.seed));
  if (!params.empty()) std::printf("parameters   %s\n", params.c_str());

  std::printf("stop         %s after %llu evaluations%s\n", rep.stop_reason.c_str(),
              (unsigned long long)rep.evaluation_count, rep.aborted ? " (ABORTED)" : "");
  if (rep.aborted) std::printf("abort        %s\n", rep.abort_message.c_str());

  if (rep.method == "mcs") {
    std::printf("estimate     %s", pct(rep.estimate.value_or(0.0)).c_str());
    if (rep.cov) std::printf("  cov %.4g", *rep.cov);
    std::printf("\n");
    std::printf("3-sigma      [%s, %s]\n", pct(rep.lolp_lower).c_str(), pct(rep.lolp_upper).c_str());
    std::printf("samples      %llu (failures %llu), %s\n", (unsigned long long)rep.samples.value_or(0),
                (unsigned long long)rep.failures.value_or(0),
                rep.converged.value_or(false) ? "converged" : "sample budget exhausted");
  } else if (rep.method == "oracle") {
    std::printf("exact LOLP   %s\n", pct(rep.exact_lolp.value_or(rep.lolp_lower)).c_str());
  } else {
    std::printf("LOLP         [%s, %s]  gap %.6g\n", pct(rep.lolp_lower).c_str(), pct(rep.lolp_upper).c_str(),
                rep.gap);
  }

  if (rep.method == "csilp") {
    std::printf("lattice      failure_cells=%llu normal_cells=%llu dominance_skips=%llu cache_hits=%llu deepest_level=%u\n",
                (unsigned long long)rep.failure_lattice_count, (unsigned long long)rep.normal_cell_count,
                (unsigned long long)rep.dominance_skips, (unsigned long long)rep.cache_hits, rep.deepest_level);
    std::printf("criticals    %zu\n", rep.criticals.size());
    constexpr std::size_t kShow = 40;
    for (std::size_t i = 0; i < rep.criticals.size() && i < kShow; ++i) {
      const ReportCritical& c = rep.criticals[i];
      std::printf("  %-16s level %u  shed %.3f  risk %.3g  dLOLP %s  at eval %llu\n",
                  ids_to_string(c.components).c_str(), c.level, c.shed_mw, c.risk, pct(c.delta_lolp).c_str(),
                  (unsigned long long)c.evaluations_at_identification);
    }
    if (rep.criticals.size() > kShow)
      std::printf("  ... %zu more (full list in report.json)\n", rep.criticals.size() - kShow);
  }

  if (rep.method == "oracle") {
    std::printf("minimal cut sets  %zu\n", rep.minimal_cut_sets.size());
    constexpr std::size_t kShow = 40;
    for (std::size_t i = 0; i < rep.minimal_cut_sets.size() && i < kShow; ++i)
      std::printf("  %s\n", ids_to_string(rep.minimal_cut_sets[i]).c_str());
    if (rep.minimal_cut_sets.size() > kShow)
      std::printf("  ... %zu more (full list in report.json)\n", rep.minimal_cut_sets.size() - kShow);
  }

  if (!rep.trace.empty()) std::printf("trace        %zu rows\n", rep.trace.size());
}

void emit(const Report& rep, const OutputOptions& out, const std::vector<TraceRow>* trace,
          const std::vector<CriticalRecord>* criticals) {
  if (out.dir.empty()) return;
  fs::create_directories(out.dir);
  write_report(fs::path(out.dir) / "report.json", rep);
  if (out.format == "csv") {
    if (trace) write_trace_csv(fs::path(out.dir) / "trace.csv", *trace);
    if (criticals) write_criticals_csv(fs::path(out.dir) / "criticals.csv", *criticals);
  }
}

struct StopFlags {
  std::optional<std::uint32_t> k_max;
  std::optional<std::uint64_t> max_evals;
  std::optional<double> delta;

  // Default: run until the bounds close, i.e. to exhaustion of the frontier.
  Criteria to_criteria() const {
    Criteria crit;
    crit.max_level = k_max;
    crit.max_evaluations = max_evals;
    crit.min_gap = delta;
    if (!k_max && !max_evals && !delta) crit.min_gap = 0.0;
    return crit;
  }
};

int run_assess(const std::string& system, const StopFlags& stop, const RunOptions& opt, const OutputOptions& out) {
  LoadedSystem sys = load_system(system);
  Criteria crit = stop.to_criteria();
  Stopwatch watch;
  AssessResult r = assess(*sys.evaluator, sys.reliability, crit, opt);
  double ms = watch.ms();
  Report rep = make_csilp_report(sys.name, crit, opt, r);
  emit(rep, out, &r.trace, &r.criticals);
  print_report(rep);
  std::printf("workers      %u\n", opt.workers);
  std::printf("wall         %.1f ms\n", ms);
  if (r.aborted) {
    std::fprintf(stderr, "csilp: evaluator failed mid-run: %s\n", r.abort_message.c_str());
    return kExitEvaluator;
  }
  return kExitOk;
}

int run_enumerate(const std::string& system, const StopFlags& stop, const OutputOptions& out) {
  LoadedSystem sys = load_system(system);
  Criteria crit = stop.to_criteria();
  Stopwatch watch;
  EnumerationResult r = enumerate_assess(*sys.evaluator, sys.reliability, crit);
  double ms = watch.ms();
  Report rep = make_se_report(sys.name, crit, r);
  emit(rep, out, &r.trace, nullptr);
  print_report(rep);
  std::printf("wall         %.1f ms\n", ms);
  return kExitOk;
}

int run_mcs(const std::string& system, const McsSettings& settings, const OutputOptions& out) {
  LoadedSystem sys = load_system(system);
  Stopwatch watch;
  McsResult r = monte_carlo_assess(*sys.evaluator, sys.reliability, settings);
  double ms = watch.ms();
  Report rep = make_mcs_report(sys.name, settings, r);
  emit(rep, out, nullptr, nullptr);
  print_report(rep);
  std::printf("workers      %u\n", settings.workers);
  std::printf("wall         %.1f ms\n", ms);
  return kExitOk;
}

int run_oracle(const std::string& system, const OutputOptions& out) {
  LoadedSystem sys = load_system(system);
  Stopwatch watch;
  BruteForceResult r = brute_force_oracle(*sys.evaluator, sys.reliability);
  double ms = watch.ms();
  Report rep = make_oracle_report(sys.name, r);
  emit(rep, out, nullptr, nullptr);
  print_report(rep);
  std::printf("wall         %.1f ms\n", ms);
  return kExitOk;
}

int run_show(const std::string& path) {
  print_report(read_report(path));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical-state identification and LOLP bounds by boolean-lattice partition"};
  app.require_subcommand(1);

  std::string system;
  std::string report_path;
  StopFlags stop;
  RunOptions run_opt;
  McsSettings mcs;
  OutputOptions out;

  auto add_output = [&out](CLI::App* cmd) {
    cmd->add_option("--out", out.dir, "directory for report.json (created if missing)");
    cmd->add_option("--format", out.format, "output flavor: csv additionally writes trace/critical tables")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_system = [&system](CLI::App* cmd) {
    cmd->add_option("--system", system, "system description JSON file")->required();
  };
  auto add_stop = [&stop](CLI::App* cmd) {
    cmd->add_option("--k-max", stop.k_max, "stop after finishing this outage level");
    cmd->add_option("--max-evals", stop.max_evals, "solver evaluation budget");
    cmd->add_option("--delta", stop.delta, "stop once upper-lower gap reaches this value");
  };

  CLI::App* assess_cmd = app.add_subcommand("assess", "lattice-partition search for critical states");
  add_system(assess_cmd);
  add_stop(assess_cmd);
  assess_cmd->add_flag("--tight-upper", run_opt.tight_upper,
                       "subtract certified-normal lattice mass from the upper bound");
  assess_cmd->add_option("--workers", run_opt.workers, "parallel evaluation threads")
      ->check(CLI::PositiveNumber);
  add_output(assess_cmd);

  CLI::App* enum_cmd = app.add_subcommand("enumerate", "sequential state enumeration baseline");
  add_system(enum_cmd);
  add_stop(enum_cmd);
  add_output(enum_cmd);

  CLI::App* mcs_cmd = app.add_subcommand("mcs", "crude Monte Carlo estimate");
  add_system(mcs_cmd);
  mcs_cmd->add_option("--cov", mcs.target_cov, "coefficient-of-variation convergence target")
      ->check(CLI::PositiveNumber);
  mcs_cmd->add_option("--seed", mcs.seed, "sampling seed");
  mcs_cmd->add_option("--max-samples", mcs.max_samples, "sample budget")->check(CLI::PositiveNumber);
  mcs_cmd->add_option("--workers", mcs.workers, "parallel evaluation threads")->check(CLI::PositiveNumber);
  add_output(mcs_cmd);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "exhaustive reference (up to 24 components)");
  add_system(oracle_cmd);
  add_output(oracle_cmd);

  CLI::App* show_cmd = app.add_subcommand("report", "pretty-print a saved report.json");
  show_cmd->add_option("path", report_path, "report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (assess_cmd->parsed()) return run_assess(system, stop, run_opt, out);
    if (enum_cmd->parsed()) return run_enumerate(system, stop, out);
    if (mcs_cmd->parsed()) return run_mcs(system, mcs, out);
    if (oracle_cmd->parsed()) return run_oracle(system, out);
    if (show_cmd->parsed()) return run_show(report_path);
  } catch (const BaseStateError& e) {
    std::fprintf(stderr, "csilp: base state fails: %s\n", e.what());
    return kExitBaseState;
  } catch (const EvaluatorError& e) {
    std::fprintf(stderr, "csilp: evaluator error: %s\n", e.what());
    return kExitEvaluator;
  } catch (const InputFileError& e) {
    std::fprintf(stderr, "csilp: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "csilp: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "csilp: internal error: %s\n", e.what());
    return 1;
  }
  return kExitInput;
}
