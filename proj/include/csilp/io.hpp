#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csilp/assess.hpp"
#include "csilp/baselines.hpp"
#include "csilp/dcopf.hpp"
#include "csilp/evaluator.hpp"
#include "csilp/state.hpp"

namespace csilp {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kMcsRngName = "splitmix64-v1";

// Malformed or inconsistent input file; messages carry the offending field path.
struct InputFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedSystem {
  std::string name;
  std::string evaluator_type;  // "cutsets" | "threshold" | "dcopf"
  std::shared_ptr<const Evaluator> evaluator;
  ComponentReliability reliability;
  std::optional<NetworkModel> network;  // dcopf only
};

namespace detail {

// Shortest round-trip decimal form, so emitted numbers are reproducible.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

inline std::string indexed(const char* stem, std::size_t i) {
  return std::string(stem) + "[" + std::to_string(i) + "]";
}

[[noreturn]] inline void fail_field(const std::string& path, const std::string& what) {
  throw InputFileError(path + ": " + what);
}

inline const ordered_json& need(const ordered_json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) fail_field(path + "." + key, "missing required field");
  return obj.at(key);
}

inline double need_number(const ordered_json& obj, const char* key, const std::string& path) {
  const ordered_json& v = need(obj, key, path);
  if (!v.is_number()) fail_field(path + "." + key, "expected a number");
  return v.get<double>();
}

inline std::uint64_t need_uint(const ordered_json& obj, const char* key, const std::string& path) {
  const ordered_json& v = need(obj, key, path);
  if (!v.is_number_unsigned()) fail_field(path + "." + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline std::string need_string(const ordered_json& obj, const char* key, const std::string& path) {
  const ordered_json& v = need(obj, key, path);
  if (!v.is_string()) fail_field(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline const ordered_json& need_array(const ordered_json& obj, const char* key, const std::string& path) {
  const ordered_json& v = need(obj, key, path);
  if (!v.is_array()) fail_field(path + "." + key, "expected an array");
  return v;
}

// Base probabilities: scalar or per-component array under "failure_prob",
// then per-component overrides.
inline ComponentReliability parse_reliability(const ordered_json& root, std::uint32_t n) {
  std::vector<double> p(n, 0.0);
  const ordered_json& fp = need(root, "failure_prob", "system");
  if (fp.is_number()) {
    std::fill(p.begin(), p.end(), fp.get<double>());
  } else if (fp.is_array()) {
    if (fp.size() != n) fail_field("system.failure_prob", "array length must equal component count");
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!fp[i].is_number()) fail_field(indexed("system.failure_prob", i), "expected a number");
      p[i] = fp[i].get<double>();
    }
  } else {
    fail_field("system.failure_prob", "expected a number or an array of numbers");
  }
  if (root.contains("overrides")) {
    const ordered_json& ov = root.at("overrides");
    if (!ov.is_array()) fail_field("system.overrides", "expected an array");
    for (std::size_t i = 0; i < ov.size(); ++i) {
      std::string path = indexed("system.overrides", i);
      std::uint64_t c = need_uint(ov[i], "component", path);
      if (c < 1 || c > n) fail_field(path + ".component", "component id outside 1..n");
      p[c - 1] = need_number(ov[i], "failure_prob", path);
    }
  }
  try {
    return ComponentReliability(std::move(p));
  } catch (const std::invalid_argument& e) {
    fail_field("system.failure_prob", e.what());
  }
}

inline NetworkModel parse_network(const ordered_json& ev) {
  NetworkModel model;
  const ordered_json& buses = need_array(ev, "buses", "evaluator");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    std::string path = indexed("evaluator.buses", i);
    Bus b;
    b.id = std::uint32_t(need_uint(buses[i], "id", path));
    b.demand = need_number(buses[i], "demand", path);
    model.buses.push_back(b);
  }
  const ordered_json& gens = need_array(ev, "generators", "evaluator");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::string path = indexed("evaluator.generators", i);
    Generator g;
    g.id = std::uint32_t(need_uint(gens[i], "id", path));
    g.bus = std::uint32_t(need_uint(gens[i], "bus", path));
    g.capacity = need_number(gens[i], "capacity", path);
    g.failure_prob = need_number(gens[i], "failure_prob", path);
    model.generators.push_back(g);
  }
  const ordered_json& lines = need_array(ev, "lines", "evaluator");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string path = indexed("evaluator.lines", i);
    Line l;
    l.id = std::uint32_t(need_uint(lines[i], "id", path));
    l.from = std::uint32_t(need_uint(lines[i], "from", path));
    l.to = std::uint32_t(need_uint(lines[i], "to", path));
    l.capacity = need_number(lines[i], "capacity", path);
    l.susceptance = need_number(lines[i], "susceptance", path);
    l.failure_prob = need_number(lines[i], "failure_prob", path);
    model.lines.push_back(l);
  }
  return model;
}

}  // namespace detail

inline LoadedSystem load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputFileError("cannot open system file: " + path.string());
  ordered_json root;
  try {
    root = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputFileError("system file is not valid JSON: " + std::string(e.what()));
  }
  if (!root.is_object()) detail::fail_field("system", "top level must be an object");
  if (detail::need_uint(root, "schema_version", "system") != kSchemaVersion)
    detail::fail_field("system.schema_version", "unsupported schema version");

  LoadedSystem sys;
  sys.name = detail::need_string(root, "name", "system");
  const ordered_json& ev = detail::need(root, "evaluator", "system");
  sys.evaluator_type = detail::need_string(ev, "type", "system.evaluator");

  try {
    if (sys.evaluator_type == "cutsets") {
      std::uint32_t n = std::uint32_t(detail::need_uint(ev, "n", "evaluator"));
      if (n == 0) detail::fail_field("evaluator.n", "component count must be positive");
      const ordered_json& sets = detail::need_array(ev, "cutsets", "evaluator");
      std::vector<std::vector<ComponentId>> lists;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        std::string p = detail::indexed("evaluator.cutsets", i);
        if (!sets[i].is_array() || sets[i].empty()) detail::fail_field(p, "each cut set is a nonempty array of component ids");
        std::vector<ComponentId> ids;
        for (const auto& x : sets[i]) {
          if (!x.is_number_unsigned()) detail::fail_field(p, "component ids are positive integers");
          std::uint64_t id = x.get<std::uint64_t>();
          if (id < 1 || id > n)
            detail::fail_field(p, "component id " + std::to_string(id) + " outside 1.." + std::to_string(n));
          ids.push_back(ComponentId(id));
        }
        lists.push_back(std::move(ids));
      }
      sys.evaluator = std::make_shared<CutsetOracle>(CutsetOracle::from_lists(n, lists));
      sys.reliability = detail::parse_reliability(root, n);
    } else if (sys.evaluator_type == "threshold") {
      const ordered_json& caps = detail::need_array(ev, "capacities", "evaluator");
      std::vector<double> capacities;
      for (std::size_t i = 0; i < caps.size(); ++i) {
        if (!caps[i].is_number()) detail::fail_field(detail::indexed("evaluator.capacities", i), "expected a number");
        capacities.push_back(caps[i].get<double>());
      }
      double demand = detail::need_number(ev, "demand", "evaluator");
      sys.evaluator = std::make_shared<ThresholdOracle>(std::move(capacities), demand);
      sys.reliability = detail::parse_reliability(root, sys.evaluator->component_count());
    } else if (sys.evaluator_type == "dcopf") {
      NetworkModel model = detail::parse_network(ev);
      model.name = sys.name;
      if (root.contains("failure_prob"))
        detail::fail_field("system.failure_prob", "dcopf systems carry probabilities on generators and lines");
      auto dc = std::make_shared<DcopfEvaluator>(std::move(model));
      sys.reliability = dc->model().reliability();
      if (root.contains("overrides")) {
        ordered_json shim;
        shim["failure_prob"] = sys.reliability.p;
        shim["overrides"] = root.at("overrides");
        sys.reliability = detail::parse_reliability(shim, std::uint32_t(sys.reliability.n()));
      }
      sys.network = dc->model();
      sys.evaluator = std::move(dc);
    } else {
      detail::fail_field("system.evaluator.type", "unknown evaluator type '" + sys.evaluator_type + "'");
    }
  } catch (const InputFileError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InputFileError("system.evaluator: " + std::string(e.what()));
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Reports

struct ReportParameters {
  std::optional<std::uint32_t> k_max;
  std::optional<std::uint64_t> max_evals;
  std::optional<double> delta;
  bool tight_upper = false;
  std::optional<double> target_cov;
  std::optional<std::uint64_t> max_samples;
  std::optional<std::uint64_t> seed;

  bool operator==(const ReportParameters&) const = default;
};

struct ReportCritical {
  std::vector<ComponentId> components;
  std::uint32_t level = 0;
  double shed_mw = 0.0;
  double probability = 0.0;
  double risk = 0.0;
  double delta_lolp = 0.0;
  double lolp_at_identification = 0.0;
  std::uint64_t evaluations_at_identification = 0;

  bool operator==(const ReportCritical&) const = default;
};

struct ReportTraceRow {
  std::uint64_t evaluations = 0;
  double lower = 0.0;
  double upper = 1.0;

  bool operator==(const ReportTraceRow&) const = default;
};

// Canonical run record. Serializes without wall-clock or worker-count fields
// so replays and different --workers settings emit byte-identical files;
// timing lives in the trace CSV and on stdout.
struct Report {
  std::string method;  // "csilp" | "se" | "mcs" | "oracle"
  std::string system_name;
  std::string rng;  // sampling methods only
  ReportParameters parameters;

  double lolp_lower = 0.0;
  double lolp_upper = 1.0;
  double gap = 1.0;
  std::uint64_t evaluation_count = 0;
  std::string stop_reason;
  bool aborted = false;
  std::string abort_message;
  std::uint32_t deepest_level = 0;
  std::uint64_t failure_lattice_count = 0;
  std::uint64_t normal_cell_count = 0;
  std::uint64_t dominance_skips = 0;
  std::uint64_t cache_hits = 0;

  std::vector<ReportCritical> criticals;
  std::vector<ReportTraceRow> trace;

  std::optional<double> estimate;  // mcs
  std::optional<double> cov;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> failures;
  std::optional<bool> converged;

  std::optional<double> exact_lolp;  // oracle
  std::vector<std::vector<ComponentId>> minimal_cut_sets;

  bool operator==(const Report&) const = default;
};

inline Report make_csilp_report(const std::string& system_name, const Criteria& crit, const RunOptions& opt,
                                const AssessResult& r) {
  Report rep;
  rep.method = "csilp";
  rep.system_name = system_name;
  rep.parameters.k_max = crit.max_level;
  rep.parameters.max_evals = crit.max_evaluations;
  rep.parameters.delta = crit.min_gap;
  rep.parameters.tight_upper = opt.tight_upper;
  rep.lolp_lower = r.lolp_lower;
  rep.lolp_upper = r.lolp_upper;
  rep.gap = r.gap();
  rep.evaluation_count = r.evaluations;
  rep.stop_reason = to_string(r.stop_reason);
  rep.aborted = r.aborted;
  rep.abort_message = r.abort_message;
  rep.deepest_level = r.deepest_level;
  rep.failure_lattice_count = r.failure_lattices.size();
  rep.normal_cell_count = r.normal_cells.size();
  rep.dominance_skips = r.dominance_skips;
  rep.cache_hits = r.cache_hits;
  for (const CriticalRecord& c : r.criticals) {
    ReportCritical rc;
    rc.components = c.state.components();
    rc.level = c.level;
    rc.shed_mw = c.shed_mw;
    rc.probability = c.probability;
    rc.risk = c.risk;
    rc.delta_lolp = c.delta_lolp;
    rc.lolp_at_identification = c.lolp_at_identification;
    rc.evaluations_at_identification = c.evaluations_at_identification;
    rep.criticals.push_back(std::move(rc));
  }
  for (const TraceRow& t : r.trace) rep.trace.push_back(ReportTraceRow{t.evaluations, t.lower, t.upper});
  return rep;
}

inline Report make_se_report(const std::string& system_name, const Criteria& crit, const EnumerationResult& r) {
  Report rep;
  rep.method = "se";
  rep.system_name = system_name;
  rep.parameters.k_max = crit.max_level;
  rep.parameters.max_evals = crit.max_evaluations;
  rep.parameters.delta = crit.min_gap;
  rep.lolp_lower = r.lolp_lower;
  rep.lolp_upper = r.lolp_upper;
  rep.gap = r.gap();
  rep.evaluation_count = r.evaluations;
  rep.stop_reason = to_string(r.stop_reason);
  rep.deepest_level = r.deepest_level;
  for (const TraceRow& t : r.trace) rep.trace.push_back(ReportTraceRow{t.evaluations, t.lower, t.upper});
  return rep;
}

// MCS bounds are reported as the central 3-sigma interval around the estimate,
// clamped to [0,1]; they are confidence limits, not certified bounds.
inline Report make_mcs_report(const std::string& system_name, const McsSettings& settings, const McsResult& r) {
  Report rep;
  rep.method = "mcs";
  rep.system_name = system_name;
  rep.rng = kMcsRngName;
  rep.parameters.target_cov = settings.target_cov;
  rep.parameters.max_samples = settings.max_samples;
  rep.parameters.seed = settings.seed;
  double sigma = std::isfinite(r.cov) ? r.cov * r.lolp_estimate : 1.0;
  rep.lolp_lower = std::max(0.0, r.lolp_estimate - 3.0 * sigma);
  rep.lolp_upper = std::min(1.0, r.lolp_estimate + 3.0 * sigma);
  rep.gap = rep.lolp_upper - rep.lolp_lower;
  rep.evaluation_count = r.samples;
  rep.stop_reason = r.converged ? "converged" : "sample_budget";
  rep.estimate = r.lolp_estimate;
  rep.cov = std::isfinite(r.cov) ? std::optional<double>(r.cov) : std::nullopt;
  rep.samples = r.samples;
  rep.failures = r.failures;
  rep.converged = r.converged;
  return rep;
}

inline Report make_oracle_report(const std::string& system_name, const BruteForceResult& r) {
  Report rep;
  rep.method = "oracle";
  rep.system_name = system_name;
  rep.lolp_lower = r.lolp;
  rep.lolp_upper = r.lolp;
  rep.gap = 0.0;
  rep.evaluation_count = r.evaluations;
  rep.stop_reason = "exhausted";
  rep.exact_lolp = r.lolp;
  for (const SystemState& s : r.minimal_cut_sets) rep.minimal_cut_sets.push_back(s.components());
  return rep;
}

inline ordered_json report_to_json(const Report& rep) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = rep.method;
  j["system"] = rep.system_name;
  if (!rep.rng.empty()) j["rng"] = rep.rng;

  ordered_json params = ordered_json::object();
  if (rep.parameters.k_max) params["k_max"] = *rep.parameters.k_max;
  if (rep.parameters.max_evals) params["max_evals"] = *rep.parameters.max_evals;
  if (rep.parameters.delta) params["delta"] = *rep.parameters.delta;
  if (rep.method == "csilp") params["tight_upper"] = rep.parameters.tight_upper;
  if (rep.parameters.target_cov) params["target_cov"] = *rep.parameters.target_cov;
  if (rep.parameters.max_samples) params["max_samples"] = *rep.parameters.max_samples;
  if (rep.parameters.seed) params["seed"] = *rep.parameters.seed;
  j["parameters"] = std::move(params);

  ordered_json res = ordered_json::object();
  res["lolp_lower"] = rep.lolp_lower;
  res["lolp_upper"] = rep.lolp_upper;
  res["gap"] = rep.gap;
  res["evaluation_count"] = rep.evaluation_count;
  res["stop_reason"] = rep.stop_reason;
  res["aborted"] = rep.aborted;
  if (rep.aborted) res["abort_message"] = rep.abort_message;
  res["deepest_level"] = rep.deepest_level;
  res["failure_lattice_count"] = rep.failure_lattice_count;
  res["normal_cell_count"] = rep.normal_cell_count;
  res["dominance_skips"] = rep.dominance_skips;
  res["cache_hits"] = rep.cache_hits;
  if (rep.estimate) res["estimate"] = *rep.estimate;
  if (rep.cov) res["cov"] = *rep.cov;
  if (rep.samples) res["samples"] = *rep.samples;
  if (rep.failures) res["failures"] = *rep.failures;
  if (rep.converged) res["converged"] = *rep.converged;
  if (rep.exact_lolp) res["exact_lolp"] = *rep.exact_lolp;
  j["results"] = std::move(res);

  if (rep.method == "csilp") {
    ordered_json arr = ordered_json::array();
    for (const ReportCritical& c : rep.criticals) {
      ordered_json cj;
      cj["state"] = c.components;
      cj["level"] = c.level;
      cj["shed_mw"] = c.shed_mw;
      cj["probability"] = c.probability;
      cj["risk"] = c.risk;
      cj["delta_lolp"] = c.delta_lolp;
      cj["lolp_at_identification"] = c.lolp_at_identification;
      cj["evaluations_at_identification"] = c.evaluations_at_identification;
      arr.push_back(std::move(cj));
    }
    j["criticals"] = std::move(arr);
  }
  if (rep.method == "oracle") {
    ordered_json arr = ordered_json::array();
    for (const auto& cs : rep.minimal_cut_sets) arr.push_back(cs);
    j["minimal_cut_sets"] = std::move(arr);
  }
  if (rep.method == "csilp" || rep.method == "se") {
    ordered_json arr = ordered_json::array();
    for (const ReportTraceRow& t : rep.trace) {
      ordered_json tj;
      tj["evaluations"] = t.evaluations;
      tj["lower"] = t.lower;
      tj["upper"] = t.upper;
      arr.push_back(std::move(tj));
    }
    j["trace"] = std::move(arr);
  }
  return j;
}

inline Report report_from_json(const ordered_json& j) {
  if (!j.is_object()) throw InputFileError("report: top level must be an object");
  if (detail::need_uint(j, "schema_version", "report") != kSchemaVersion)
    throw InputFileError("report.schema_version: unsupported schema version");
  Report rep;
  rep.method = detail::need_string(j, "method", "report");
  rep.system_name = detail::need_string(j, "system", "report");
  if (j.contains("rng")) rep.rng = j.at("rng").get<std::string>();

  const ordered_json& params = detail::need(j, "parameters", "report");
  if (params.contains("k_max")) rep.parameters.k_max = params.at("k_max").get<std::uint32_t>();
  if (params.contains("max_evals")) rep.parameters.max_evals = params.at("max_evals").get<std::uint64_t>();
  if (params.contains("delta")) rep.parameters.delta = params.at("delta").get<double>();
  if (params.contains("tight_upper")) rep.parameters.tight_upper = params.at("tight_upper").get<bool>();
  if (params.contains("target_cov")) rep.parameters.target_cov = params.at("target_cov").get<double>();
  if (params.contains("max_samples")) rep.parameters.max_samples = params.at("max_samples").get<std::uint64_t>();
  if (params.contains("seed")) rep.parameters.seed = params.at("seed").get<std::uint64_t>();

  const ordered_json& res = detail::need(j, "results", "report");
  rep.lolp_lower = detail::need_number(res, "lolp_lower", "report.results");
  rep.lolp_upper = detail::need_number(res, "lolp_upper", "report.results");
  rep.gap = detail::need_number(res, "gap", "report.results");
  rep.evaluation_count = detail::need_uint(res, "evaluation_count", "report.results");
  rep.stop_reason = detail::need_string(res, "stop_reason", "report.results");
  rep.aborted = res.contains("aborted") && res.at("aborted").get<bool>();
  if (res.contains("abort_message")) rep.abort_message = res.at("abort_message").get<std::string>();
  rep.deepest_level = std::uint32_t(detail::need_uint(res, "deepest_level", "report.results"));
  rep.failure_lattice_count = detail::need_uint(res, "failure_lattice_count", "report.results");
  rep.normal_cell_count = detail::need_uint(res, "normal_cell_count", "report.results");
  rep.dominance_skips = detail::need_uint(res, "dominance_skips", "report.results");
  rep.cache_hits = detail::need_uint(res, "cache_hits", "report.results");
  if (res.contains("estimate")) rep.estimate = res.at("estimate").get<double>();
  if (res.contains("cov")) rep.cov = res.at("cov").get<double>();
  if (res.contains("samples")) rep.samples = res.at("samples").get<std::uint64_t>();
  if (res.contains("failures")) rep.failures = res.at("failures").get<std::uint64_t>();
  if (res.contains("converged")) rep.converged = res.at("converged").get<bool>();
  if (res.contains("exact_lolp")) rep.exact_lolp = res.at("exact_lolp").get<double>();

  if (j.contains("criticals")) {
    for (const auto& cj : j.at("criticals")) {
      ReportCritical c;
      c.components = cj.at("state").get<std::vector<ComponentId>>();
      c.level = cj.at("level").get<std::uint32_t>();
      c.shed_mw = cj.at("shed_mw").get<double>();
      c.probability = cj.at("probability").get<double>();
      c.risk = cj.at("risk").get<double>();
      c.delta_lolp = cj.at("delta_lolp").get<double>();
      c.lolp_at_identification = cj.at("lolp_at_identification").get<double>();
      c.evaluations_at_identification = cj.at("evaluations_at_identification").get<std::uint64_t>();
      rep.criticals.push_back(std::move(c));
    }
  }
  if (j.contains("minimal_cut_sets"))
    rep.minimal_cut_sets = j.at("minimal_cut_sets").get<std::vector<std::vector<ComponentId>>>();
  if (j.contains("trace")) {
    for (const auto& tj : j.at("trace")) {
      ReportTraceRow t;
      t.evaluations = tj.at("evaluations").get<std::uint64_t>();
      t.lower = tj.at("lower").get<double>();
      t.upper = tj.at("upper").get<double>();
      rep.trace.push_back(t);
    }
  }
  return rep;
}

inline void write_report(const std::filesystem::path& path, const Report& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputFileError("cannot write report: " + path.string());
  out << report_to_json(rep).dump(2) << '\n';
}

inline Report read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputFileError("cannot open report: " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputFileError("report is not valid JSON: " + std::string(e.what()));
  }
  return report_from_json(j);
}

inline void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputFileError("cannot write trace: " + path.string());
  out << "evals,lower,upper,gap,elapsed_ms\n";
  for (const TraceRow& t : trace)
    out << t.evaluations << ',' << detail::fmt_double(t.lower) << ',' << detail::fmt_double(t.upper) << ','
        << detail::fmt_double(t.upper - t.lower) << ',' << detail::fmt_double(t.elapsed_ms) << '\n';
}

inline void write_criticals_csv(const std::filesystem::path& path, const std::vector<CriticalRecord>& recs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputFileError("cannot write criticals: " + path.string());
  out << "state,level,shed_mw,probability,risk,delta_lolp,lolp_at_identification,evaluations_at_identification\n";
  for (const CriticalRecord& c : recs) {
    std::string ids;
    for (ComponentId id : c.state.components()) {
      if (!ids.empty()) ids += ';';
      ids += std::to_string(id);
    }
    out << ids << ',' << c.level << ',' << detail::fmt_double(c.shed_mw) << ',' << detail::fmt_double(c.probability)
        << ',' << detail::fmt_double(c.risk) << ',' << detail::fmt_double(c.delta_lolp) << ','
        << detail::fmt_double(c.lolp_at_identification) << ',' << c.evaluations_at_identification << '\n';
  }
}

}  // namespace csilp
