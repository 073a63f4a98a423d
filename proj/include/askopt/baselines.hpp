// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "askopt/koopman.hpp"
#include "askopt/problems.hpp"

namespace askopt {

enum class BaselineMethod { GD, HB, NAG, GDA, OGDA };

inline const char* to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::GD: return "gd";
    case BaselineMethod::HB: return "hb";
    case BaselineMethod::NAG: return "nag";
    case BaselineMethod::GDA: return "gda";
    case BaselineMethod::OGDA: return "ogda";
  }
  return "unknown";
}

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::GD;
  double alpha = 1e-2;
  double beta = 0.9;  // heavy-ball momentum
  long max_iters = 50000;
  double tol = 1e-6;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("BaselineConfig: alpha must be positive");
    if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("BaselineConfig: beta must lie in [0, 1)");
    if (max_iters < 0) throw std::invalid_argument("BaselineConfig: max_iters must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("BaselineConfig: tol must be positive");
  }
};

/// Iterate plus the history each method needs. All steppers move along the
/// flow field u (u = -grad f when minimizing).
struct BaselineState {
  Eigen::VectorXd x;
  Eigen::VectorXd p;          // HB direction
  Eigen::VectorXd y_prev;     // NAG
  double t = 1.0;             // NAG, t^(0) = 1
  Eigen::VectorXd u_prev;     // OGDA, flow at the previous iterate
  bool has_prev = false;

  static BaselineState start(const Eigen::VectorXd& x0) {
    BaselineState s;
    s.x = x0;
    s.p = Eigen::VectorXd::Zero(x0.size());
    s.y_prev = x0;
    return s;
  }
};

/// x <- x + alpha u(x).
inline void gd_step(BaselineState& s, const DynamicsField& u, const BaselineConfig& cfg) {
  s.x += cfg.alpha * u(s.x);
}

/// p <- u(x) + beta p; x <- x + alpha p.
inline void hb_step(BaselineState& s, const DynamicsField& u, const BaselineConfig& cfg) {
  s.p = u(s.x) + cfg.beta * s.p;
  s.x += cfg.alpha * s.p;
}

/// Nesterov: t' = (1 + sqrt(4 t^2 + 1)) / 2; y = x + alpha u(x);
/// x = y + ((t - 1) / t') (y - y_prev).
inline void nag_step(BaselineState& s, const DynamicsField& u, const BaselineConfig& cfg) {
  const double t_next = 0.5 * (1.0 + std::sqrt(4.0 * s.t * s.t + 1.0));
  const Eigen::VectorXd y = s.x + cfg.alpha * u(s.x);
  s.x = y + ((s.t - 1.0) / t_next) * (y - s.y_prev);
  s.y_prev = y;
  s.t = t_next;
}

namespace detail {

inline void require_minmax(const Problem& problem, const char* who) {
  if (!problem.is_minmax()) throw std::invalid_argument(std::string(who) + ": problem '" + problem.name + "' is not min-max");
}

}  // namespace detail

/// Simultaneous descent on the min block and ascent on the max block.
inline void gda_step(BaselineState& s, const Problem& problem, const BaselineConfig& cfg) {
  detail::require_minmax(problem, "gda_step");
  gd_step(s, gradient_flow(problem), cfg);
}

/// Optimistic GDA: x <- x + 2 alpha u(x_k) - alpha u(x_{k-1}); the first step
/// uses u(x_{k-1}) = u(x_k) and so equals GDA.
inline void ogda_step(BaselineState& s, const DynamicsField& u, const BaselineConfig& cfg) {
  const Eigen::VectorXd cur = u(s.x);
  const Eigen::VectorXd& prev = s.has_prev ? s.u_prev : cur;
  s.x += 2.0 * cfg.alpha * cur - cfg.alpha * prev;
  s.u_prev = cur;
  s.has_prev = true;
}

inline void ogda_step(BaselineState& s, const Problem& problem, const BaselineConfig& cfg) {
  detail::require_minmax(problem, "ogda_step");
  ogda_step(s, gradient_flow(problem), cfg);
}

enum class BaselineStatus { Converged, MaxIters, Diverged };

inline const char* to_string(BaselineStatus s) {
  switch (s) {
    case BaselineStatus::Converged: return "converged";
    case BaselineStatus::MaxIters: return "max_iters";
    case BaselineStatus::Diverged: return "diverged";
  }
  return "unknown";
}

struct BaselineResult {
  Eigen::VectorXd x_final;
  double grad_norm = 0.0;
  long iterations = 0;
  BaselineStatus status = BaselineStatus::MaxIters;
};

/// Iterates the configured method until ||grad f|| <= tol, max_iters, or a
/// non-finite iterate. GD/HB/NAG run on the flow field of any problem;
/// GDA/OGDA require a min-max problem.
inline BaselineResult run_baseline(const Problem& problem, const Eigen::VectorXd& x0, const BaselineConfig& cfg) {
  cfg.validate();
  if (x0.size() != problem.dim) throw std::invalid_argument("run_baseline: x0 dimension mismatch");
  if (cfg.method == BaselineMethod::GDA || cfg.method == BaselineMethod::OGDA) {
    detail::require_minmax(problem, to_string(cfg.method));
  }
  const DynamicsField u = gradient_flow(problem);
  BaselineState s = BaselineState::start(x0);
  BaselineResult res;
  auto grad_norm = [&](const Eigen::VectorXd& x) { return problem.gradient(x).norm(); };
  res.grad_norm = grad_norm(s.x);
  while (std::isfinite(res.grad_norm) && res.grad_norm > cfg.tol && res.iterations < cfg.max_iters) {
    switch (cfg.method) {
      case BaselineMethod::GD:
      case BaselineMethod::GDA: gd_step(s, u, cfg); break;
      case BaselineMethod::HB: hb_step(s, u, cfg); break;
      case BaselineMethod::NAG: nag_step(s, u, cfg); break;
      case BaselineMethod::OGDA: ogda_step(s, u, cfg); break;
    }
    ++res.iterations;
    res.grad_norm = s.x.allFinite() ? grad_norm(s.x) : std::numeric_limits<double>::infinity();
  }
  res.x_final = s.x;
  if (!std::isfinite(res.grad_norm)) {
    res.status = BaselineStatus::Diverged;
  } else {
    res.status = res.grad_norm <= cfg.tol ? BaselineStatus::Converged : BaselineStatus::MaxIters;
  }
  return res;
}

}  // namespace askopt
