// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "askopt/ask_optimizer.hpp"
#include "askopt/baselines.hpp"
#include "askopt/problems.hpp"
#include "askopt/rng.hpp"

namespace askopt {

/// Stable method identifiers.
inline std::vector<std::string> method_names() { return {"ask", "gd", "hb", "nag", "gda", "ogda"}; }

inline std::optional<BaselineMethod> parse_baseline_method(const std::string& name) {
  if (name == "gd") return BaselineMethod::GD;
  if (name == "hb") return BaselineMethod::HB;
  if (name == "nag") return BaselineMethod::NAG;
  if (name == "gda") return BaselineMethod::GDA;
  if (name == "ogda") return BaselineMethod::OGDA;
  return std::nullopt;
}

/// Initial points for `n_trials` trials: trial i draws its coordinates,
/// in order, from SplitMix64(derive_seed(seed, i)), uniform in the
/// problem's init box.
inline std::vector<Eigen::VectorXd> sample_inits(const Problem& problem, int n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw std::invalid_argument("sample_inits: n_trials must be >= 1");
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(n_trials));
  for (int i = 0; i < n_trials; ++i) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd x(problem.dim);
    for (int k = 0; k < problem.dim; ++k) x(k) = rng.uniform(problem.init_lower(k), problem.init_upper(k));
    out.push_back(std::move(x));
  }
  return out;
}

/// Sparse-grid level used for a function when none is given explicitly.
inline int default_level_for(const std::string& function) {
  return (function == "bohachevsky2" || function == "rosenbrock") ? 3 : 1;
}

/// Everything needed to run one benchmark table.
struct SuiteSpec {
  std::string function;
  ProblemOptions problem;
  std::vector<std::string> methods{"ask"};
  int trials = 100;
  std::uint64_t seed = 0;
  AskConfig ask;
  std::optional<int> level;  // unset: default_level_for(function)
  BaselineConfig baseline;
  // method -> parameter -> value, e.g. {"gd", {{"alpha", "1e-3"}}}.
  std::map<std::string, std::map<std::string, std::string>> overrides;
  unsigned threads = 1;
};

struct TrialRecord {
  std::string method;
  std::string function;
  int dim = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd init;
  double grad_norm = 0.0;
  long iterations = 0;
  double time_ms = 0.0;
  bool success = false;
  std::string status;
};

/// Aggregate row for one method. Grad norm and time are averaged over
/// successful trials only (NaN when there are none); success rate is over
/// all trials.
struct MethodSummary {
  std::string method;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_grad_norm = std::numeric_limits<double>::quiet_NaN();
  double mean_time_ms = std::numeric_limits<double>::quiet_NaN();
  // Parameters actually used.
  double alpha = 0.0;
  double beta = 0.0;
  double radius = 0.0;
  int level = 0;
  double horizon = 0.0;
};

struct BenchReport {
  std::string function;
  int dim = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  long max_iters = 0;
  std::vector<MethodSummary> methods;
};

struct SuiteResult {
  BenchReport report;
  std::vector<TrialRecord> records;
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw std::invalid_argument("invalid number for '" + key + "': '" + v + "'");
  return out;
}

inline long parse_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw std::invalid_argument("invalid integer for '" + key + "': '" + v + "'");
  return out;
}

struct MethodParams {
  AskConfig ask;
  BaselineConfig baseline;
};

inline MethodParams params_for(const SuiteSpec& spec, const std::string& method) {
  MethodParams mp{spec.ask, spec.baseline};
  mp.ask.level = spec.level.value_or(default_level_for(spec.function));
  mp.ask.tol = mp.baseline.tol = spec.ask.tol;
  mp.ask.max_iters = mp.baseline.max_iters = spec.ask.max_iters;
  if (auto it = spec.overrides.find(method); it != spec.overrides.end()) {
    for (const auto& [key, value] : it->second) {
      if (key == "alpha") mp.baseline.alpha = parse_double(key, value);
      else if (key == "beta") mp.baseline.beta = parse_double(key, value);
      else if (key == "radius") mp.ask.radius = parse_double(key, value);
      else if (key == "level") mp.ask.level = static_cast<int>(parse_long(key, value));
      else if (key == "horizon") mp.ask.horizon = parse_double(key, value);
      else if (key == "tol") mp.ask.tol = mp.baseline.tol = parse_double(key, value);
      else if (key == "max_iters") mp.ask.max_iters = mp.baseline.max_iters = parse_long(key, value);
      else throw std::invalid_argument("unknown override '" + method + "." + key + "'");
    }
  }
  if (auto m = parse_baseline_method(method)) mp.baseline.method = *m;
  return mp;
}

inline TrialRecord run_trial(const Problem& problem, const std::string& method, const MethodParams& mp, int trial,
                             std::uint64_t seed, const Eigen::VectorXd& x0) {
  TrialRecord rec;
  rec.method = method;
  rec.function = problem.name;
  rec.dim = problem.dim;
  rec.trial = trial;
  rec.seed = seed;
  rec.init = x0;
  const double tol = method == "ask" ? mp.ask.tol : mp.baseline.tol;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (method == "ask") {
      const AskResult r = ask_optimize(problem, x0, mp.ask);
      rec.grad_norm = r.grad_norm;
      rec.iterations = r.outer_iters;
      rec.status = to_string(r.status);
    } else {
      const BaselineResult r = run_baseline(problem, x0, mp.baseline);
      rec.grad_norm = r.grad_norm;
      rec.iterations = r.iterations;
      rec.status = to_string(r.status);
    }
  } catch (const std::exception& e) {
    rec.grad_norm = std::numeric_limits<double>::infinity();
    rec.status = std::string("error: ") + e.what();
  }
  rec.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rec.success = std::isfinite(rec.grad_norm) && rec.grad_norm <= tol;
  return rec;
}

}  // namespace detail

/// Aggregates records of one suite into a report.
inline BenchReport summarize(const SuiteSpec& spec, const Problem& problem, const std::vector<TrialRecord>& records) {
  BenchReport rep;
  rep.function = problem.name;
  rep.dim = problem.dim;
  rep.trials = spec.trials;
  rep.seed = spec.seed;
  rep.tol = spec.ask.tol;
  rep.max_iters = spec.ask.max_iters;
  for (const auto& method : spec.methods) {
    const auto mp = detail::params_for(spec, method);
    MethodSummary s;
    s.method = method;
    s.alpha = mp.baseline.alpha;
    s.beta = mp.baseline.beta;
    s.radius = mp.ask.radius;
    s.level = mp.ask.level;
    s.horizon = mp.ask.horizon;
    double g = 0.0, t = 0.0;
    for (const auto& r : records) {
      if (r.method != method) continue;
      ++s.trials;
      if (r.success) {
        ++s.successes;
        g += r.grad_norm;
        t += r.time_ms;
      }
    }
    if (s.trials > 0) s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
    if (s.successes > 0) {
      s.mean_grad_norm = g / s.successes;
      s.mean_time_ms = t / s.successes;
    }
    rep.methods.push_back(s);
  }
  return rep;
}

/// Runs every method from every seeded initial point. Failing trials are
/// recorded, never thrown. Records are ordered by method (as listed) and
/// then trial index regardless of `threads`.
inline SuiteResult run_suite(const SuiteSpec& spec) {
  for (const auto& m : spec.methods) {
    if (m != "ask" && !parse_baseline_method(m)) throw std::invalid_argument("unknown method '" + m + "'");
  }
  if (spec.trials < 1) throw std::invalid_argument("run_suite: trials must be >= 1");
  const Problem problem = make_problem(spec.function, spec.problem);
  for (const auto& m : spec.methods) {
    if ((m == "gda" || m == "ogda") && !problem.is_minmax()) {
      throw std::invalid_argument("method '" + m + "' needs a min-max function, got '" + spec.function + "'");
    }
  }
  std::vector<detail::MethodParams> params;
  for (const auto& m : spec.methods) {
    params.push_back(detail::params_for(spec, m));
    params.back().ask.validate();
    params.back().baseline.validate();
  }
  const auto inits = sample_inits(problem, spec.trials, spec.seed);

  const std::size_t n_methods = spec.methods.size();
  const std::size_t n_jobs = n_methods * static_cast<std::size_t>(spec.trials);
  std::vector<TrialRecord> records(n_jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      const std::size_t m = job / static_cast<std::size_t>(spec.trials);
      const int trial = static_cast<int>(job % static_cast<std::size_t>(spec.trials));
      records[job] = detail::run_trial(problem, spec.methods[m], params[m], trial,
                                       derive_seed(spec.seed, static_cast<std::uint64_t>(trial)),
                                       inits[static_cast<std::size_t>(trial)]);
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(std::max<std::size_t>(n_jobs, 1))));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  SuiteResult out;
  out.report = summarize(spec, problem, records);
  out.records = std::move(records);
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kRecordsCsvHeader = "method,function,dim,trial,seed,grad_norm,iterations,time_ms,success";

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Shortest of %.15g..%.17g that parses back to the same double.
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_csv_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_double("csv field", s);
}

inline nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace detail

inline void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kRecordsCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.method << ',' << r.function << ',' << r.dim << ',' << r.trial << ',' << r.seed << ','
       << detail::fmt_double(r.grad_norm) << ',' << r.iterations << ',' << detail::fmt_double(r.time_ms) << ','
       << (r.success ? "true" : "false") << '\n';
  }
}

inline void write_summary_csv(std::ostream& os, const BenchReport& rep) {
  os << "method,function,dim,trials,successes,success_rate,mean_grad_norm,mean_time_ms,alpha,beta,radius,level,"
        "horizon,tol,max_iters,seed\n";
  for (const auto& s : rep.methods) {
    os << s.method << ',' << rep.function << ',' << rep.dim << ',' << s.trials << ',' << s.successes << ','
       << detail::fmt_double(s.success_rate) << ',' << detail::fmt_double(s.mean_grad_norm) << ','
       << detail::fmt_double(s.mean_time_ms) << ',' << detail::fmt_double(s.alpha) << ','
       << detail::fmt_double(s.beta) << ',' << detail::fmt_double(s.radius) << ',' << s.level << ','
       << detail::fmt_double(s.horizon) << ',' << detail::fmt_double(rep.tol) << ',' << rep.max_iters << ','
       << rep.seed << '\n';
  }
}

/// Parses the per-trial CSV written by write_records_csv. `init` and
/// `status` are not part of the CSV and stay empty.
inline std::vector<TrialRecord> parse_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("records csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsCsvHeader) throw std::runtime_error("records csv: unexpected header '" + line + "'");
  std::vector<TrialRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 9) throw std::runtime_error("records csv: expected 9 fields, got " + std::to_string(f.size()));
    TrialRecord r;
    r.method = f[0];
    r.function = f[1];
    r.dim = static_cast<int>(detail::parse_long("dim", f[2]));
    r.trial = static_cast<int>(detail::parse_long("trial", f[3]));
    r.seed = std::stoull(f[4]);
    r.grad_norm = detail::parse_csv_double(f[5]);
    r.iterations = detail::parse_long("iterations", f[6]);
    r.time_ms = detail::parse_csv_double(f[7]);
    if (f[8] != "true" && f[8] != "false") throw std::runtime_error("records csv: bad success value '" + f[8] + "'");
    r.success = f[8] == "true";
    out.push_back(std::move(r));
  }
  return out;
}

inline nlohmann::json report_to_json(const BenchReport& rep, const std::vector<TrialRecord>& records) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = {{"function", rep.function}, {"dim", rep.dim},  {"trials", rep.trials},
                 {"seed", rep.seed},         {"tol", rep.tol}, {"max_iters", rep.max_iters}};
  j["summary"] = nlohmann::json::array();
  for (const auto& s : rep.methods) {
    j["summary"].push_back({{"method", s.method},
                            {"trials", s.trials},
                            {"successes", s.successes},
                            {"success_rate", s.success_rate},
                            {"mean_grad_norm", detail::json_number(s.mean_grad_norm)},
                            {"mean_time_ms", detail::json_number(s.mean_time_ms)},
                            {"alpha", s.alpha},
                            {"beta", s.beta},
                            {"radius", s.radius},
                            {"level", s.level},
                            {"horizon", s.horizon}});
  }
  j["records"] = nlohmann::json::array();
  for (const auto& r : records) {
    j["records"].push_back({{"method", r.method},
                            {"function", r.function},
                            {"dim", r.dim},
                            {"trial", r.trial},
                            {"seed", r.seed},
                            {"init", std::vector<double>(r.init.data(), r.init.data() + r.init.size())},
                            {"grad_norm", detail::json_number(r.grad_norm)},
                            {"iterations", r.iterations},
                            {"time_ms", r.time_ms},
                            {"success", r.success},
                            {"status", r.status}});
  }
  return j;
}

enum class ReportFormat { Csv, Json };

/// Path of the aggregate table written next to a CSV report:
/// "out.csv" -> "out_summary.csv".
inline std::filesystem::path summary_path_for(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  p.replace_filename(p.stem().string() + "_summary" + ext);
  return p;
}

/// Writes per-trial rows (plus a `_summary` companion for CSV, or a single
/// document for JSON). On failure, files written so far are removed and a
/// std::runtime_error naming the path is thrown.
inline void write_report(const BenchReport& report, const std::vector<TrialRecord>& records, ReportFormat format,
                         const std::filesystem::path& path) {
  std::vector<std::filesystem::path> written;
  auto write_file = [&](const std::filesystem::path& p, auto&& body) {
    written.push_back(p);
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    body(os);
    os.flush();
    if (!os) throw std::runtime_error("write to '" + p.string() + "' failed");
  };
  try {
    if (format == ReportFormat::Csv) {
      write_file(path, [&](std::ostream& os) { write_records_csv(os, records); });
      write_file(summary_path_for(path), [&](std::ostream& os) { write_summary_csv(os, report); });
    } else {
      write_file(path, [&](std::ostream& os) { os << report_to_json(report, records).dump(2) << '\n'; });
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
}

// ---------------------------------------------------------------------------
// Suite configuration file: one `key = value` per line, '#' starts a comment.
// Keys mirror the CLI flags (function, methods, dim, trials, seed, radius,
// level, horizon, tol, max_iters, alpha, beta, minmax_split, threads) and
// `<method>.<param>` sets a per-method override.

inline void apply_setting(SuiteSpec& spec, const std::string& key, const std::string& value) {
  using detail::parse_double;
  using detail::parse_long;
  if (const auto dot = key.find('.'); dot != std::string::npos) {
    spec.overrides[key.substr(0, dot)][key.substr(dot + 1)] = value;
    return;
  }
  if (key == "function") spec.function = value;
  else if (key == "methods" || key == "method") {
    spec.methods.clear();
    std::stringstream ss(value);
    for (std::string m; std::getline(ss, m, ',');) {
      m.erase(0, m.find_first_not_of(" \t"));
      m.erase(m.find_last_not_of(" \t") + 1);
      if (!m.empty()) spec.methods.push_back(m);
    }
  } else if (key == "dim") spec.problem.dim = static_cast<int>(parse_long(key, value));
  else if (key == "minmax_split") spec.problem.split = static_cast<int>(parse_long(key, value));
  else if (key == "cond") spec.problem.cond_target = parse_double(key, value);
  else if (key == "trials") spec.trials = static_cast<int>(parse_long(key, value));
  else if (key == "seed") spec.seed = std::stoull(value);
  else if (key == "radius") spec.ask.radius = parse_double(key, value);
  else if (key == "level") spec.level = static_cast<int>(parse_long(key, value));
  else if (key == "horizon") spec.ask.horizon = parse_double(key, value);
  else if (key == "tol") spec.ask.tol = spec.baseline.tol = parse_double(key, value);
  else if (key == "max_iters") spec.ask.max_iters = spec.baseline.max_iters = parse_long(key, value);
  else if (key == "alpha") spec.baseline.alpha = parse_double(key, value);
  else if (key == "beta") spec.baseline.beta = parse_double(key, value);
  else if (key == "threads") spec.threads = static_cast<unsigned>(parse_long(key, value));
  else throw std::invalid_argument("unknown setting '" + key + "'");
}

inline void load_suite_config(SuiteSpec& spec, std::istream& is) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    apply_setting(spec, key, value);
  }
}

}  // namespace askopt
