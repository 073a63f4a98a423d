// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: askopt_acceptance [--unit-tests PATH] [--only N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "askopt/askopt.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. evolve_state against exp(tA) x0 on seeded stable linear systems.
Outcome linear_exactness() {
  const auto t0 = Clock::now();
  askopt::SplitMix64 rng(20240101);
  double worst = 0.0;
  int bad_status = 0;
  for (int k = 0; k < 20; ++k) {
    const int d = 1 + k % 4;
    Eigen::MatrixXd b(d, d), c(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        b(i, j) = rng.uniform(-1, 1);
        c(i, j) = rng.uniform(-1, 1);
      }
    }
    const Eigen::MatrixXd a = -(b * b.transpose() + 0.3 * Eigen::MatrixXd::Identity(d, d)) + 0.5 * (c - c.transpose());
    Eigen::VectorXd x0(d);
    for (int i = 0; i < d; ++i) x0(i) = rng.uniform(-2, 2);
    double reach = 0.0;
    for (double t = 0.0; t <= 5.0; t += 0.05) reach = std::max(reach, ((a * t).exp() * x0 - x0).cwiseAbs().maxCoeff());
    const askopt::DynamicsField u{d, [a](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; }};
    const auto ops = askopt::make_collocation_operators(d, 1);
    const auto box = askopt::BoxDomain::around(x0, 1.5 * reach + 0.5);
    auto sys = askopt::spectral_decompose(askopt::assemble_generator(ops, box, u), ops.M, ops.M_lu);
    askopt::attach_modes(sys, askopt::box_points(ops, box));
    for (double t : {0.1, 1.0, 5.0}) {
      const auto r = askopt::evolve_state(sys, t);
      if (r.status != askopt::EvolveStatus::Ok) ++bad_status;
      worst = std::max(worst, (r.x - (a * t).exp() * x0).cwiseAbs().maxCoeff());
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && bad_status == 0 && secs < 5.0,
          "max |err|_inf=" + sci(worst) + " (<=1e-8), flagged=" + std::to_string(bad_status) + ", " + fixed(secs) + "s (<5s)"};
}

// 2. One outer iteration on quadratics when r covers the init domain.
Outcome quadratic_one_step() {
  const auto t0 = Clock::now();
  int ok = 0, total = 0;
  double worst = 0.0;
  for (const auto& [problem, radius] : {std::pair{askopt::sphere(2), 2.0}, std::pair{askopt::rotated_hyper_ellipsoid(2), 130.0}}) {
    askopt::AskConfig cfg;
    cfg.radius = radius;
    for (const auto& x0 : askopt::sample_inits(problem, 100, 2)) {
      const auto r = askopt::ask_optimize(problem, x0, cfg);
      ++total;
      worst = std::max(worst, r.grad_norm);
      if (r.status == askopt::AskStatus::Converged && r.outer_iters == 1 && r.grad_norm <= 1e-8) ++ok;
    }
  }
  const double secs = seconds_since(t0);
  return {ok == total && secs < 10.0, std::to_string(ok) + "/" + std::to_string(total) + " one-step, max grad=" + sci(worst) +
                                          " (<=1e-8), " + fixed(secs) + "s (<10s)"};
}

askopt::SuiteResult run(const std::string& function, const std::vector<std::string>& methods, int trials,
                        std::uint64_t seed, const std::function<void(askopt::SuiteSpec&)>& tweak = {}) {
  askopt::SuiteSpec spec;
  spec.function = function;
  spec.methods = methods;
  spec.trials = trials;
  spec.seed = seed;
  if (tweak) tweak(spec);
  return askopt::run_suite(spec);
}

// 3. ASK magnitudes on the minimization tables.
Outcome table_magnitudes() {
  struct Row {
    std::string function;
    int dim;
    double reference;  // reference ASK mean gradient norm
  };
  const std::vector<Row> rows{{"sum_of_different_powers", 2, 9.9966e-07}, {"camel3", 2, 7.9837e-09},
                              {"camel6", 2, 5.3550e-07},                  {"dixon_price", 2, 9.4133e-08},
                              {"rosenbrock", 2, 3.0836e-07},              {"bohachevsky2", 2, 3.7616e-14},
                              {"dixon_price", 10, 2.2497e-06}};
  const auto t0 = Clock::now();
  bool all = true;
  std::ostringstream detail;
  for (const auto& row : rows) {
    const auto res = run(row.function, {"ask"}, 100, 3, [&](askopt::SuiteSpec& s) { s.problem.dim = row.dim; });
    const auto& m = res.report.methods.front();
    const double orders = std::abs(std::log10(m.mean_grad_norm / row.reference));
    const bool ok = m.success_rate >= 0.80 && m.mean_grad_norm <= 1e-6 && orders <= 2.0;
    all = all && ok;
    detail << "\n    " << (ok ? "ok   " : "MISS ") << row.function << "(d=" << row.dim << ", level " << m.level
           << "): rate=" << fixed(m.success_rate) << " mean grad=" << sci(m.mean_grad_norm) << " ref=" << sci(row.reference)
           << " |log10 ratio|=" << fixed(orders);
  }
  const double secs = seconds_since(t0);
  return {all && secs < 600.0, fixed(secs, 1) + "s (<600s)" + detail.str()};
}

// 4. Bilinear saddle: ASK converges, GDA/NAG/HB do not; GDA radius growth.
Outcome bilinear_case() {
  const auto t0 = Clock::now();
  const auto res = run("minmax_bilinear", {"ask", "gda", "nag", "hb"}, 100, 4);
  double rate[4];
  for (int i = 0; i < 4; ++i) rate[i] = res.report.methods[static_cast<std::size_t>(i)].success_rate;

  const auto p = askopt::minmax_bilinear();
  double growth_err = 0.0;
  for (double alpha : {1e-3, 1e-2, 1e-1, 0.5}) {
    askopt::BaselineConfig cfg;
    cfg.alpha = alpha;
    for (const auto& x0 : askopt::sample_inits(p, 10, 44)) {
      auto s = askopt::BaselineState::start(x0);
      for (int k = 0; k < 100; ++k) {
        const double r0 = s.x.norm();
        askopt::gda_step(s, p, cfg);
        growth_err = std::max(growth_err, std::abs(s.x.norm() / r0 - std::sqrt(1 + alpha * alpha)));
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = rate[0] >= 0.95 && rate[1] <= 0.05 && rate[2] <= 0.05 && rate[3] <= 0.05 && growth_err <= 1e-10 &&
                    secs < 300.0;
  const auto& ask = res.report.methods[0];
  return {pass, "ask rate=" + fixed(rate[0]) + " (>=0.95, mean grad " + sci(ask.mean_grad_norm) + "), gda=" + fixed(rate[1]) +
                    " nag=" + fixed(rate[2]) + " hb=" + fixed(rate[3]) + " (<=0.05), growth err=" + sci(growth_err) +
                    " (<=1e-10), " + fixed(secs, 1) + "s (<300s)"};
}

// 5. Saddle -x1^2 x2^2 + 0.5 x2^2.
Outcome case2() {
  const auto t0 = Clock::now();
  const auto res = run("minmax_case2", {"ask"}, 100, 5);
  const auto& m = res.report.methods.front();
  const double orders = std::abs(std::log10(m.mean_grad_norm / 5.5890e-07));
  const double secs = seconds_since(t0);
  return {m.success_rate >= 0.95 && m.mean_grad_norm <= 1e-6 && secs < 300.0,
          "rate=" + fixed(m.success_rate) + " (>=0.95), mean grad=" + sci(m.mean_grad_norm) + " (<=1e-6, |log10 ratio| to 5.589e-07 = " +
              fixed(orders) + "), " + fixed(secs, 1) + "s (<300s)"};
}

// 6. Full property suite (the unit-test binary).
Outcome property_suite(const std::string& unit_tests) {
  if (unit_tests.empty()) return {false, "unit-test binary not given (--unit-tests PATH)"};
  const auto t0 = Clock::now();
  const std::string cmd = "\"" + unit_tests + "\" --gtest_brief=1 > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  const double secs = seconds_since(t0);
  return {rc == 0 && secs < 120.0, std::string(rc == 0 ? "all unit/property tests passed" : "unit/property tests FAILED") + ", " +
                                       fixed(secs, 1) + "s (<120s)"};
}

// 7. Desk-scale substitute for the 100-d Dixon-Price row.
Outcome dixon_price_100(int trials) {
  const auto t0 = Clock::now();
  const auto res = run("dixon_price", {"ask"}, trials, 7, [](askopt::SuiteSpec& s) { s.problem.dim = 100; });
  int ok = 0;
  double mean_iters = 0.0;
  for (const auto& r : res.records) {
    if (r.grad_norm <= 1e-5) ++ok;
    mean_iters += static_cast<double>(r.iterations) / static_cast<double>(res.records.size());
  }
  const double rate = static_cast<double>(ok) / static_cast<double>(trials);
  const double secs = seconds_since(t0);
  return {rate >= 0.5 && secs < 900.0, std::to_string(ok) + "/" + std::to_string(trials) + " with grad<=1e-5, rate=" + fixed(rate) +
                                           " (>=0.5), mean iters=" + fixed(mean_iters, 0) + ", " + fixed(secs, 1) +
                                           "s (<900s); reference timings not reproduced (informational)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::string unit_tests;
  int only = 0;
  int dixon_trials = 16;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--unit-tests" && i + 1 < argc) unit_tests = argv[++i];
    else if (a == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (a == "--dixon-trials" && i + 1 < argc) dixon_trials = std::atoi(argv[++i]);
    else {
      std::cerr << "usage: askopt_acceptance [--unit-tests PATH] [--only N] [--dixon-trials N]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"linear exactness vs exp(tA)x0", linear_exactness},
      {"quadratic one-step convergence", quadratic_one_step},
      {"minimization table magnitudes", table_magnitudes},
      {"bilinear min-max x1*x2", bilinear_case},
      {"min-max -x1^2 x2^2 + 0.5 x2^2", case2},
      {"property suite", [&] { return property_suite(unit_tests); }},
      {"dixon_price d=100 substitute", [&] { return dixon_price_100(dixon_trials); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && only != id) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first << "): " << o.detail
              << std::endl;
  }
  std::cout << (failed == 0 ? "acceptance: all criteria passed" : "acceptance: " + std::to_string(failed) + " criterion(s) failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
