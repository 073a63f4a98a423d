// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "askopt/errors.hpp"
#include "askopt/koopman.hpp"
#include "askopt/problems.hpp"
#include "askopt/sparse_grid.hpp"
#include "askopt/spectral_basis.hpp"

namespace askopt {

/// Parameters of the adaptive spectral Koopman loop.
struct AskConfig {
  double radius = 1e-1;       // neighborhood half-width r
  int level = 1;              // sparse-grid level
  double horizon = 1e2;       // first evolution time T tried each step
  long max_iters = 50000;     // outer adaptivity steps
  double tol = 1e-6;          // stop when ||u(x)|| <= tol
  std::optional<double> t_min;  // defaults to 1e-12 * horizon
  double cond_cap = 1e12;     // largest accepted cond(Phi)
  double fallback_step = 1e-3;  // RK4 step used when the spectral step fails
  bool record_trajectory = false;

  [[nodiscard]] double min_time() const { return t_min.value_or(1e-12 * horizon); }

  void validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("AskConfig: radius must be positive");
    if (level < 0) throw std::invalid_argument("AskConfig: level must be >= 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("AskConfig: horizon must be positive");
    if (max_iters < 0) throw std::invalid_argument("AskConfig: max_iters must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("AskConfig: tol must be positive");
    if (!(min_time() > 0.0) || !(min_time() < horizon)) {
      throw std::invalid_argument("AskConfig: t_min must satisfy 0 < t_min < horizon");
    }
    if (!(cond_cap > 0.0)) throw std::invalid_argument("AskConfig: cond_cap must be positive");
    if (!(fallback_step > 0.0)) throw std::invalid_argument("AskConfig: fallback_step must be positive");
  }
};

/// What happened inside one ask_step.
struct StepDiagnostics {
  double t_accepted = 0.0;  // 0 when the fallback step was taken
  int retractions = 0;      // number of halvings
  bool fallback = false;
  double cond_phi = 0.0;
  std::string fallback_reason;
};

struct StepResult {
  Eigen::VectorXd x;
  StepDiagnostics diag;
};

enum class AskStatus { Converged, MaxIters, Failed };

inline const char* to_string(AskStatus s) {
  switch (s) {
    case AskStatus::Converged: return "converged";
    case AskStatus::MaxIters: return "max_iters";
    case AskStatus::Failed: return "failed";
  }
  return "unknown";
}

struct AskResult {
  Eigen::VectorXd x_final;
  double grad_norm = 0.0;
  long outer_iters = 0;
  long retractions_total = 0;
  long fallbacks_total = 0;
  std::vector<Eigen::VectorXd> trajectory;  // iterates x^(0..k) when recorded
  AskStatus status = AskStatus::MaxIters;
  std::string message;
};

/// One classical RK4 step of x' = u(x).
inline Eigen::VectorXd rk4_step(const DynamicsField& u, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = u(x);
  const Eigen::VectorXd k2 = u(x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = u(x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = u(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {

inline StepResult fallback_step(const DynamicsField& u, const Eigen::VectorXd& x, const BoxDomain& box,
                                const AskConfig& cfg, StepDiagnostics diag, std::string reason) {
  Eigen::VectorXd next = rk4_step(u, x, cfg.fallback_step);
  if (!next.allFinite()) throw NonFiniteDynamics("fallback step produced a non-finite state");
  next = next.cwiseMax(box.lower).cwiseMin(box.upper);
  diag.fallback = true;
  diag.t_accepted = 0.0;
  diag.fallback_reason = std::move(reason);
  return {next, diag};
}

}  // namespace detail

/// One adaptivity step: spectral evolution inside [x - r, x + r] with
/// time-halving retraction from T until the candidate lies in the box.
///
/// Falls back to a single RK4 step of size `fallback_step` (clamped to the
/// box) when t drops below t_min or the spectral pipeline is unusable.
inline StepResult ask_step(const Eigen::VectorXd& x, const DynamicsField& u, const CollocationOperators& ops,
                           const AskConfig& cfg) {
  if (x.size() != ops.dim() || u.dim != ops.dim()) throw std::invalid_argument("ask_step: dimension mismatch");
  const BoxDomain box = BoxDomain::around(x, cfg.radius);
  const Eigen::MatrixXd points = box_points(ops, box);
  const Eigen::MatrixXd values = sample_dynamics(u, points);

  StepDiagnostics diag;
  SpectralSystem sys;
  try {
    const Eigen::MatrixXd gen = generator_from_values(ops, box, values);
    sys = spectral_decompose(gen, ops.M, ops.M_lu, cfg.cond_cap);
    attach_modes(sys, points);
  } catch (const SpectralError& e) {
    return detail::fallback_step(u, x, box, cfg, diag, e.what());
  }
  diag.cond_phi = sys.cond_phi;

  const double t_min = cfg.min_time();
  for (double t = cfg.horizon; t >= t_min; t *= 0.5) {
    const EvolveResult cand = evolve_state(sys, t);
    if (cand.status == EvolveStatus::NumericalNoise) {
      return detail::fallback_step(u, x, box, cfg, diag, "numerical noise in reconstruction");
    }
    if (cand.status == EvolveStatus::Ok && box.contains(cand.x)) {
      diag.t_accepted = t;
      return {cand.x, diag};
    }
    ++diag.retractions;
  }
  return detail::fallback_step(u, x, box, cfg, diag, "retraction reached t_min");
}

/// Runs ask_step until ||u(x)|| <= tol or max_iters steps.
inline AskResult ask_optimize(const DynamicsField& u, const Eigen::VectorXd& x0, const AskConfig& cfg,
                              const std::shared_ptr<const CollocationOperators>& ops_in = nullptr) {
  cfg.validate();
  if (x0.size() != u.dim) throw std::invalid_argument("ask_optimize: x0 dimension mismatch");
  const auto ops = ops_in ? ops_in : shared_collocation_operators(u.dim, cfg.level);

  AskResult res;
  Eigen::VectorXd x = x0;
  if (cfg.record_trajectory) res.trajectory.push_back(x);
  try {
    Eigen::VectorXd ux = u(x);
    if (!ux.allFinite()) throw NonFiniteDynamics("dynamics not finite at the initial point");
    res.grad_norm = ux.norm();
    while (res.grad_norm > cfg.tol && res.outer_iters < cfg.max_iters) {
      const StepResult step = ask_step(x, u, *ops, cfg);
      x = step.x;
      ++res.outer_iters;
      res.retractions_total += step.diag.retractions;
      res.fallbacks_total += step.diag.fallback ? 1 : 0;
      if (cfg.record_trajectory) res.trajectory.push_back(x);
      ux = u(x);
      if (!ux.allFinite()) throw NonFiniteDynamics("dynamics not finite at an accepted iterate");
      res.grad_norm = ux.norm();
    }
    res.status = res.grad_norm <= cfg.tol ? AskStatus::Converged : AskStatus::MaxIters;
  } catch (const NonFiniteDynamics& e) {
    res.status = AskStatus::Failed;
    res.message = e.what();
  }
  res.x_final = x;
  return res;
}

/// ask_optimize on the gradient flow of `problem`.
inline AskResult ask_optimize(const Problem& problem, const Eigen::VectorXd& x0, const AskConfig& cfg) {
  return ask_optimize(gradient_flow(problem), x0, cfg);
}

}  // namespace askopt
