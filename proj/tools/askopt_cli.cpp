// SPDX-License-Identifier: Apache-2.0
// askopt command-line front end: run, list, check.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "askopt/askopt.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct RunFlags {
  std::string config;
  std::string function;
  std::vector<std::string> methods;
  int dim = 0;
  int trials = 100;
  std::uint64_t seed = 0;
  double radius = 0.0;
  int level = 0;
  double horizon = 0.0;
  double tol = 1e-6;
  long max_iters = 50000;
  double alpha = 0.0;
  double beta = 0.0;
  int minmax_split = 0;
  unsigned threads = 1;
  std::string out;
  std::string format = "csv";
};

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

int print_list(const std::string& what) {
  if (what.empty() || what == "functions") {
    std::cout << "functions:\n";
    for (const auto& p : askopt::registry()) {
      std::cout << "  " << p.name << "  dim=" << p.dim << (p.is_minmax() ? "  minmax" : "") << '\n';
    }
  }
  if (what.empty() || what == "methods") {
    std::cout << "methods:\n";
    for (const auto& m : askopt::method_names()) std::cout << "  " << m << '\n';
  }
  return kExitOk;
}

// Compact invariant self-test; the full property suite lives in tests/.
int run_check() {
  int failed = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    if (!ok) ++failed;
  };
  auto sci = [](double v) {
    std::ostringstream os;
    os << std::scientific << v;
    return os.str();
  };

  {
    const bool ok = askopt::smolyak_grid(2, 1).count() == 5 && askopt::smolyak_grid(2, 2).count() == 13 &&
                    askopt::smolyak_grid(3, 1).count() == 7;
    report("smolyak_counts", ok, "d=2 l=1,2 and d=3 l=1");
  }
  {
    const auto ops = askopt::make_collocation_operators(2, 2);
    const Eigen::MatrixXd& p = ops.grid.points;
    Eigen::VectorXd f(ops.count());
    for (int k = 0; k < ops.count(); ++k) f(k) = 1.0 + p(k, 0) - 2.0 * p(k, 1) + p(k, 0) * p(k, 1);
    const Eigen::VectorXd c = ops.M_lu.solve(f);
    const double err = (ops.M * c - f).cwiseAbs().maxCoeff();
    report("interpolation_exactness", err <= 1e-10, "max err " + sci(err));
  }
  {
    Eigen::Matrix2d a;
    a << -1.0, 0.5, -0.5, -2.0;
    askopt::DynamicsField u{2, [a](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; }};
    const auto ops = askopt::make_collocation_operators(2, 1);
    const Eigen::Vector2d x0(0.3, -0.7);
    const auto box = askopt::BoxDomain::around(x0, 1.0);
    const Eigen::MatrixXd pts = askopt::box_points(ops, box);
    auto sys = askopt::spectral_decompose(askopt::assemble_generator(ops, box, u), ops.M, ops.M_lu, 1e12);
    askopt::attach_modes(sys, pts);
    const double e0 = (askopt::evolve_state(sys, 0.0).x - x0).cwiseAbs().maxCoeff();
    report("identity_at_t0", e0 <= 1e-10, "err " + sci(e0));
    // exp(tA) x0 by a fine RK4 reference.
    Eigen::VectorXd ref = x0;
    for (int i = 0; i < 1000; ++i) ref = askopt::rk4_step(u, ref, 1e-3);
    const double e1 = (askopt::evolve_state(sys, 1.0).x - ref).cwiseAbs().maxCoeff();
    report("linear_exactness_t1", e1 <= 1e-8, "err " + sci(e1));
  }
  {
    double worst = 0.0;
    for (const auto& p : askopt::registry()) {
      Eigen::VectorXd x = 0.5 * (p.init_lower + p.init_upper) + 0.137 * (p.init_upper - p.init_lower);
      const Eigen::VectorXd g = p.gradient(x);
      Eigen::VectorXd fd(p.dim);
      for (int i = 0; i < p.dim; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        fd(i) = (p.value(xp) - p.value(xm)) / (2.0 * h);
      }
      worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
    }
    report("gradient_fd", worst <= 1e-5, "worst rel err " + sci(worst));
  }
  {
    askopt::SuiteSpec spec;
    spec.function = "camel3";
    spec.methods = {"ask", "gd"};
    spec.trials = 3;
    spec.seed = 7;
    const auto a = askopt::run_suite(spec);
    std::ostringstream csv;
    askopt::write_records_csv(csv, a.records);
    std::istringstream in(csv.str());
    const auto back = askopt::parse_records_csv(in);
    bool ok = back.size() == a.records.size();
    for (std::size_t i = 0; ok && i < back.size(); ++i) {
      ok = back[i].grad_norm == a.records[i].grad_norm && back[i].seed == a.records[i].seed &&
           back[i].success == a.records[i].success;
    }
    report("csv_round_trip", ok, std::to_string(back.size()) + " records");
  }
  std::cout << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
  return failed == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive spectral Koopman optimizer and baselines"};
  app.require_subcommand(1);

  RunFlags f;
  auto* run = app.add_subcommand("run", "Run a seeded benchmark suite");
  auto* o_config = run->add_option("--config", f.config, "Suite config file (key = value)")->check(CLI::ExistingFile);
  auto* o_function = run->add_option("--function", f.function, "Test function");
  auto* o_method = run->add_option("--method", f.methods, "Methods (ask,gd,hb,nag,gda,ogda)")->delimiter(',');
  auto* o_dim = run->add_option("--dim", f.dim, "Dimension for variable-dimension functions");
  auto* o_trials = run->add_option("--trials", f.trials, "Number of seeded trials")->capture_default_str();
  auto* o_seed = run->add_option("--seed", f.seed, "Master seed");
  auto* o_radius = run->add_option("--radius", f.radius, "ASK neighborhood radius r");
  auto* o_level = run->add_option("--level", f.level, "Sparse-grid level");
  auto* o_horizon = run->add_option("--horizon", f.horizon, "ASK evolution horizon T");
  auto* o_tol = run->add_option("--tol", f.tol, "Gradient-norm tolerance")->capture_default_str();
  auto* o_max_iters = run->add_option("--max-iters", f.max_iters, "Iteration budget")->capture_default_str();
  auto* o_alpha = run->add_option("--alpha", f.alpha, "Baseline step size");
  auto* o_beta = run->add_option("--beta", f.beta, "Momentum coefficient");
  auto* o_split = run->add_option("--minmax-split", f.minmax_split, "Number of minimized coordinates");
  auto* o_threads = run->add_option("--threads", f.threads, "Worker threads");
  run->add_option("--out", f.out, "Report path (summary goes to stdout when omitted)");
  run->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  std::string list_what;
  auto* list = app.add_subcommand("list", "List functions and methods");
  list->add_option("what", list_what, "functions or methods")->check(CLI::IsMember({"functions", "methods"}));

  app.add_subcommand("check", "Run the invariant self-test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (list->parsed()) return print_list(list_what);
  if (!run->parsed()) {
    try {
      return run_check();
    } catch (const std::exception& e) {
      std::cerr << "check: " << e.what() << '\n';
      return kExitRuntime;
    }
  }

  askopt::SuiteSpec spec;
  try {
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      askopt::load_suite_config(spec, in);
    }
    // Flags given on the command line override the config file.
    auto set = [&](const CLI::Option* opt, const std::string& key, const std::string& value) {
      if (opt->count() > 0) askopt::apply_setting(spec, key, value);
    };
    auto num = [](auto v) {
      std::ostringstream os;
      os.precision(17);
      os << v;
      return os.str();
    };
    set(o_function, "function", f.function);
    set(o_method, "methods", join(f.methods));
    set(o_dim, "dim", num(f.dim));
    set(o_trials, "trials", num(f.trials));
    set(o_seed, "seed", num(f.seed));
    set(o_radius, "radius", num(f.radius));
    set(o_level, "level", num(f.level));
    set(o_horizon, "horizon", num(f.horizon));
    set(o_tol, "tol", num(f.tol));
    set(o_max_iters, "max_iters", num(f.max_iters));
    set(o_alpha, "alpha", num(f.alpha));
    set(o_beta, "beta", num(f.beta));
    set(o_split, "minmax_split", num(f.minmax_split));
    set(o_threads, "threads", num(f.threads));
    (void)o_config;
    if (spec.function.empty()) throw std::invalid_argument("no function given (--function or config 'function')");
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << '\n';
    return kExitUsage;
  }

  askopt::SuiteResult result;
  try {
    result = askopt::run_suite(spec);
  } catch (const std::invalid_argument& e) {
    std::cerr << "run: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << '\n';
    return kExitRuntime;
  }

  try {
    if (!f.out.empty()) {
      const auto fmt = f.format == "json" ? askopt::ReportFormat::Json : askopt::ReportFormat::Csv;
      askopt::write_report(result.report, result.records, fmt, f.out);
    }
    askopt::write_summary_csv(std::cout, result.report);
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
