// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "askopt/koopman.hpp"
#include "askopt/rng.hpp"

namespace askopt {

enum class ProblemKind { Minimize, MinMax };

struct KnownOptimum {
  Eigen::VectorXd point;
  double value = 0.0;
};

/// Objective with analytic gradient. For MinMax, the first `split`
/// coordinates are minimized and the rest maximized.
struct Problem {
  std::string name;
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  ProblemKind kind = ProblemKind::Minimize;
  int split = 0;
  std::vector<KnownOptimum> known_optima;
  Eigen::VectorXd init_lower;
  Eigen::VectorXd init_upper;
  // Where the gradient is not differentiable (empty when smooth).
  std::string nonsmooth_note;

  [[nodiscard]] bool is_minmax() const { return kind == ProblemKind::MinMax; }
};

/// u = -grad f for minimization; for min-max, descent on the first `split`
/// coordinates and ascent on the rest.
inline DynamicsField gradient_flow(const Problem& problem) {
  const int split = problem.is_minmax() ? problem.split : problem.dim;
  auto grad = problem.gradient;
  return {problem.dim, [grad, split](const Eigen::VectorXd& x) {
            Eigen::VectorXd u = grad(x);
            u.head(split) *= -1.0;
            return u;
          }};
}

namespace detail {

inline Eigen::VectorXd filled(int dim, double v) { return Eigen::VectorXd::Constant(dim, v); }

inline Problem with_box(Problem p, double lo, double hi) {
  p.init_lower = filled(p.dim, lo);
  p.init_upper = filled(p.dim, hi);
  return p;
}

}  // namespace detail

/// f = 1/2 ||x||^2.
inline Problem sphere(int dim = 2) {
  Problem p;
  p.name = "sphere";
  p.dim = dim;
  p.value = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  p.gradient = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x); };
  p.known_optima = {{Eigen::VectorXd::Zero(dim), 0.0}};
  return detail::with_box(std::move(p), -1.0, 1.0);
}

/// f = sum_i sum_{j<=i} x_j^2.
inline Problem rotated_hyper_ellipsoid(int dim = 2) {
  Problem p;
  p.name = "rotated_hyper_ellipsoid";
  p.dim = dim;
  // x_j appears in the inner sums for i = j..d, i.e. d - j times (0-based j).
  Eigen::VectorXd w(dim);
  for (int j = 0; j < dim; ++j) w(j) = static_cast<double>(dim - j);
  p.value = [w](const Eigen::VectorXd& x) { return w.dot(x.cwiseAbs2()); };
  p.gradient = [w](const Eigen::VectorXd& x) { return Eigen::VectorXd(2.0 * w.cwiseProduct(x)); };
  p.known_optima = {{Eigen::VectorXd::Zero(dim), 0.0}};
  return detail::with_box(std::move(p), -65.0, 65.0);
}

/// f = sum_i |x_i|^(i+1), i = 1..d.
inline Problem sum_of_different_powers(int dim = 2) {
  Problem p;
  p.name = "sum_of_different_powers";
  p.dim = dim;
  p.value = [](const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)), static_cast<double>(i + 2));
    return s;
  };
  p.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double e = static_cast<double>(i + 2);
      // (i+2) |x|^(i+1) sign(x); for the cubic term this is 3 x |x|.
      g(i) = e * std::pow(std::abs(x(i)), e - 1.0) * (x(i) < 0.0 ? -1.0 : 1.0);
    }
    return g;
  };
  p.known_optima = {{Eigen::VectorXd::Zero(dim), 0.0}};
  p.nonsmooth_note = "second derivative of |x_i|^(i+1), i >= 2, is discontinuous at x_i = 0";
  return detail::with_box(std::move(p), -1.0, 1.0);
}

/// f = x1^2 + x2^2 - 0.3 cos(3 pi x1) cos(4 pi x2) + 0.3.
inline Problem bohachevsky2() {
  using std::numbers::pi;
  Problem p;
  p.name = "bohachevsky2";
  p.dim = 2;
  p.value = [](const Eigen::VectorXd& x) {
    return x(0) * x(0) + x(1) * x(1) - 0.3 * std::cos(3 * pi * x(0)) * std::cos(4 * pi * x(1)) + 0.3;
  };
  p.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(2);
    g(0) = 2 * x(0) + 0.9 * pi * std::sin(3 * pi * x(0)) * std::cos(4 * pi * x(1));
    g(1) = 2 * x(1) + 1.2 * pi * std::cos(3 * pi * x(0)) * std::sin(4 * pi * x(1));
    return g;
  };
  p.known_optima = {{Eigen::VectorXd::Zero(2), 0.0}};
  return detail::with_box(std::move(p), -2.0, 2.0);
}

/// Three-hump camel: 2 x1^2 - 1.05 x1^4 + x1^6 / 6 + x1 x2 + x2^2.
inline Problem camel3() {
  Problem p;
  p.name = "camel3";
  p.dim = 2;
  p.value = [](const Eigen::VectorXd& x) {
    const double a = x(0), b = x(1);
    return 2 * a * a - 1.05 * std::pow(a, 4) + std::pow(a, 6) / 6.0 + a * b + b * b;
  };
  p.gradient = [](const Eigen::VectorXd& x) {
    const double a = x(0), b = x(1);
    Eigen::VectorXd g(2);
    g(0) = 4 * a - 4.2 * a * a * a + std::pow(a, 5) + b;
    g(1) = a + 2 * b;
    return g;
  };
  p.known_optima = {{Eigen::VectorXd::Zero(2), 0.0}};
  return detail::with_box(std::move(p), -5.0, 5.0);
}

/// camel3 as min over x1, max over x2.
inline Problem camel3_minmax() {
  Problem p = camel3();
  p.name = "camel3_minmax";
  p.kind = ProblemKind::MinMax;
  p.split = 1;
  return detail::with_box(std::move(p), -3.0, 3.0);
}

/// Six-hump camel: (4 - 2.1 x1^2 + x1^4 / 3) x1^2 + x1 x2 + (-4 + 4 x2^2) x2^2.
inline Problem camel6() {
  Problem p;
  p.name = "camel6";
  p.dim = 2;
  p.value = [](const Eigen::VectorXd& x) {
    const double a = x(0), b = x(1);
    return (4 - 2.1 * a * a + std::pow(a, 4) / 3.0) * a * a + a * b + (-4 + 4 * b * b) * b * b;
  };
  p.gradient = [](const Eigen::VectorXd& x) {
    const double a = x(0), b = x(1);
    Eigen::VectorXd g(2);
    g(0) = 8 * a - 8.4 * a * a * a + 2 * std::pow(a, 5) + b;
    g(1) = a - 8 * b + 16 * b * b * b;
    return g;
  };
  // Two symmetric global minima, located by Newton refinement from the
  // tabulated (0.0898, -0.7126).
  Eigen::VectorXd xs(2);
  xs << 0.08984201310031807, -0.7126564030207396;
  p.known_optima = {{xs, -1.0316284534898774}, {-xs, -1.0316284534898774}};
  return detail::with_box(std::move(p), -3.0, 3.0);
}

/// Dixon-Price: (x1 - 1)^2 + sum_{j=2}^d j (2 x_j^2 - x_{j-1})^2.
inline Problem dixon_price(int dim = 2) {
  if (dim < 1) throw std::invalid_argument("dixon_price: dim must be >= 1");
  Problem p;
  p.name = "dixon_price";
  p.dim = dim;
  p.value = [](const Eigen::VectorXd& x) {
    double s = (x(0) - 1.0) * (x(0) - 1.0);
    for (Eigen::Index j = 1; j < x.size(); ++j) {
      const double r = 2.0 * x(j) * x(j) - x(j - 1);
      s += static_cast<double>(j + 1) * r * r;
    }
    return s;
  };
  p.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    g(0) = 2.0 * (x(0) - 1.0);
    for (Eigen::Index j = 1; j < x.size(); ++j) {
      const double w = static_cast<double>(j + 1);
      const double r = 2.0 * x(j) * x(j) - x(j - 1);
      g(j) += w * 2.0 * r * 4.0 * x(j);
      g(j - 1) -= w * 2.0 * r;
    }
    return g;
  };
  Eigen::VectorXd xs(dim);
  for (int j = 1; j <= dim; ++j) {
    const double e = std::pow(2.0, j);
    xs(j - 1) = std::pow(2.0, -(e - 2.0) / e);
  }
  p.known_optima = {{xs, 0.0}};
  return detail::with_box(std::move(p), -10.0, 10.0);
}

/// Dixon-Price as a min-max problem: first `split` coordinates minimized.
inline Problem dixon_price_minmax(int dim = 100, std::optional<int> split = std::nullopt) {
  Problem p = dixon_price(dim);
  p.name = "dixon_price_minmax";
  p.kind = ProblemKind::MinMax;
  p.split = split.value_or(dim / 2);
  if (p.split < 0 || p.split > dim) throw std::invalid_argument("dixon_price_minmax: split out of range");
  return p;
}

/// Rosenbrock: 100 (x2 - x1^2)^2 + (x1 - 1)^2.
inline Problem rosenbrock() {
  Problem p;
  p.name = "rosenbrock";
  p.dim = 2;
  p.value = [](const Eigen::VectorXd& x) {
    const double a = x(1) - x(0) * x(0);
    return 100.0 * a * a + (x(0) - 1.0) * (x(0) - 1.0);
  };
  p.gradient = [](const Eigen::VectorXd& x) {
    const double a = x(1) - x(0) * x(0);
    Eigen::VectorXd g(2);
    g(0) = -400.0 * a * x(0) + 2.0 * (x(0) - 1.0);
    g(1) = 200.0 * a;
    return g;
  };
  p.known_optima = {{Eigen::Vector2d(1.0, 1.0), 0.0}};
  return detail::with_box(std::move(p), -2.0, 2.0);
}

/// min_x1 max_x2 x1 x2.
inline Problem minmax_bilinear() {
  Problem p;
  p.name = "minmax_bilinear";
  p.dim = 2;
  p.kind = ProblemKind::MinMax;
  p.split = 1;
  p.value = [](const Eigen::VectorXd& x) { return x(0) * x(1); };
  p.gradient = [](const Eigen::VectorXd& x) { return Eigen::Vector2d(x(1), x(0)).eval(); };
  p.known_optima = {{Eigen::VectorXd::Zero(2), 0.0}};
  return detail::with_box(std::move(p), -1.0, 1.0);
}

/// min_x1 max_x2 -x1^2 x2^2 + 0.5 x2^2.
inline Problem minmax_case2() {
  Problem p;
  p.name = "minmax_case2";
  p.dim = 2;
  p.kind = ProblemKind::MinMax;
  p.split = 1;
  p.value = [](const Eigen::VectorXd& x) { return -x(0) * x(0) * x(1) * x(1) + 0.5 * x(1) * x(1); };
  p.gradient = [](const Eigen::VectorXd& x) {
    return Eigen::Vector2d(-2.0 * x(0) * x(1) * x(1), -2.0 * x(0) * x(0) * x(1) + x(1)).eval();
  };
  p.known_optima = {{Eigen::VectorXd::Zero(2), 0.0}};
  return detail::with_box(std::move(p), -1.0, 1.0);
}

/// min_x1 max_x2 -x1^2 x2 + 0.5 x2^2.
inline Problem minmax_case2_alt() {
  Problem p;
  p.name = "minmax_case2_alt";
  p.dim = 2;
  p.kind = ProblemKind::MinMax;
  p.split = 1;
  p.value = [](const Eigen::VectorXd& x) { return -x(0) * x(0) * x(1) + 0.5 * x(1) * x(1); };
  p.gradient = [](const Eigen::VectorXd& x) {
    return Eigen::Vector2d(-2.0 * x(0) * x(1), -x(0) * x(0) + x(1)).eval();
  };
  p.known_optima = {{Eigen::VectorXd::Zero(2), 0.0}};
  return detail::with_box(std::move(p), -1.0, 1.0);
}

/// Least squares from an explicit SPD matrix, right-hand side and solution.
inline Problem make_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& solution) {
  Problem p;
  p.name = "least_squares";
  p.dim = static_cast<int>(a.rows());
  p.value = [a, b](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x) - x.dot(b); };
  p.gradient = [a, b](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x - b); };
  p.known_optima = {{solution, 0.5 * solution.dot(a * solution) - solution.dot(b)}};
  return detail::with_box(std::move(p), -1.0, 1.0);
}

/// f = 1/2 x^T A x - x^T b with A SPD, spectrum log-spaced in [1, cond_target]
/// under a seeded random rotation, and b = A x* for a seeded x* in [-1,1]^d.
inline Problem make_least_squares(int dim, double cond_target, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("make_least_squares: dim must be >= 1");
  if (!(cond_target >= 1.0)) throw std::invalid_argument("make_least_squares: cond_target must be >= 1");
  SplitMix64 rng(seed);
  Eigen::MatrixXd gauss(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) gauss(i, j) = rng.normal();
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();
  Eigen::VectorXd spectrum(dim);
  for (int i = 0; i < dim; ++i) {
    const double frac = dim == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
    spectrum(i) = std::pow(cond_target, frac);
  }
  Eigen::MatrixXd a = q * spectrum.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::VectorXd xs(dim);
  for (int i = 0; i < dim; ++i) xs(i) = rng.uniform(-1.0, 1.0);
  return make_least_squares(a, a * xs, xs);
}

/// Stable identifiers accepted by `make_problem`.
inline std::vector<std::string> problem_names() {
  return {"sphere",       "rotated_hyper_ellipsoid", "sum_of_different_powers", "bohachevsky2",
          "camel3",       "camel3_minmax",           "camel6",                  "dixon_price",
          "rosenbrock",   "least_squares",           "minmax_bilinear",         "minmax_case2",
          "minmax_case2_alt", "dixon_price_minmax"};
}

/// Options for problems that take a size or split.
struct ProblemOptions {
  std::optional<int> dim;
  std::optional<int> split;
  double cond_target = 1e3;
  std::uint64_t seed = 0;
};

/// Looks up a problem by name; throws std::invalid_argument on unknown names
/// or on a dimension the problem does not support.
inline Problem make_problem(const std::string& name, const ProblemOptions& opt = {}) {
  auto fixed = [&](Problem p) {
    if (opt.dim && *opt.dim != p.dim) {
      throw std::invalid_argument(name + " is only defined for dim=" + std::to_string(p.dim));
    }
    return p;
  };
  if (name == "sphere") return sphere(opt.dim.value_or(2));
  if (name == "rotated_hyper_ellipsoid") return rotated_hyper_ellipsoid(opt.dim.value_or(2));
  if (name == "sum_of_different_powers") return sum_of_different_powers(opt.dim.value_or(2));
  if (name == "bohachevsky2") return fixed(bohachevsky2());
  if (name == "camel3") return fixed(camel3());
  if (name == "camel3_minmax") return fixed(camel3_minmax());
  if (name == "camel6") return fixed(camel6());
  if (name == "dixon_price") return dixon_price(opt.dim.value_or(2));
  if (name == "rosenbrock") return fixed(rosenbrock());
  if (name == "least_squares") return make_least_squares(opt.dim.value_or(10), opt.cond_target, opt.seed);
  if (name == "minmax_bilinear") return fixed(minmax_bilinear());
  if (name == "minmax_case2") return fixed(minmax_case2());
  if (name == "minmax_case2_alt") return fixed(minmax_case2_alt());
  if (name == "dixon_price_minmax") return dixon_price_minmax(opt.dim.value_or(100), opt.split);
  throw std::invalid_argument("unknown function '" + name + "'");
}

/// Default benchmark set with the standard dimensions.
inline std::vector<Problem> registry() {
  return {rotated_hyper_ellipsoid(2), sum_of_different_powers(2), bohachevsky2(),      camel3(),
          camel3_minmax(),            camel6(),                   dixon_price(2),      dixon_price(10),
          dixon_price(100),           rosenbrock(),               make_least_squares(10, 1e3, 0),
          minmax_bilinear(),          minmax_case2(),             minmax_case2_alt(), dixon_price_minmax(100)};
}

}  // namespace askopt
