// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "askopt/errors.hpp"
#include "askopt/sparse_grid.hpp"
#include "askopt/spectral_basis.hpp"

namespace askopt {

/// Matrix infinity norm (max absolute row sum).
template <typename Derived>
double inf_norm(const Eigen::MatrixBase<Derived>& a) {
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Vector field u: R^d -> R^d driving x' = u(x).
struct DynamicsField {
  int dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return eval(x); }
};

/// Spectral data for one neighborhood. Immutable once built.
struct SpectralSystem {
  Eigen::VectorXcd eigenvalues;  // N
  Eigen::MatrixXcd eigvecs;      // W, N x N, columns are coefficient vectors
  Eigen::MatrixXcd phi;          // M W
  Eigen::VectorXcd nu;           // first row of phi
  Eigen::MatrixXcd modes;        // C, N x d
  double cond_phi = 1.0;         // 1-norm condition estimate of phi

  // diag(nu) * C, cached for repeated evolution.
  Eigen::MatrixXcd weighted_modes;
};

/// Real-domain collocation points (rows) of the reference grid mapped into `box`.
inline Eigen::MatrixXd box_points(const CollocationOperators& ops, const BoxDomain& box) {
  return map_to_box(ops.grid, box);
}

/// Samples u at every row of `points`; throws NonFiniteDynamics on NaN/Inf.
inline Eigen::MatrixXd sample_dynamics(const DynamicsField& u, const Eigen::MatrixXd& points) {
  Eigen::MatrixXd values(points.rows(), points.cols());
  for (Eigen::Index k = 0; k < points.rows(); ++k) {
    const Eigen::VectorXd v = u(points.row(k).transpose());
    if (v.size() != points.cols()) {
      throw std::invalid_argument("sample_dynamics: dynamics returned " + std::to_string(v.size()) +
                                  " components, expected " + std::to_string(points.cols()));
    }
    if (!v.allFinite()) throw NonFiniteDynamics("dynamics field is not finite at a collocation point");
    values.row(k) = v.transpose();
  }
  return values;
}

/// U = sum_i diag(u_i(p)) * (2 / (U_i - L_i)) * G_i from pre-sampled dynamics values (N x d).
inline Eigen::MatrixXd generator_from_values(const CollocationOperators& ops, const BoxDomain& box,
                                             const Eigen::MatrixXd& values) {
  const Eigen::Index n = ops.count();
  if (values.rows() != n || values.cols() != ops.dim() || box.dim() != ops.dim()) {
    throw std::invalid_argument("assemble_generator: dimension mismatch");
  }
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < ops.dim(); ++i) {
    const double width = box.upper(i) - box.lower(i);
    if (!(width > 0.0)) throw std::invalid_argument("assemble_generator: degenerate box");
    const Eigen::VectorXd scaled = values.col(i) * (2.0 / width);
    gen.noalias() += scaled.asDiagonal() * ops.G[static_cast<std::size_t>(i)];
  }
  return gen;
}

/// Discretized Koopman generator of u on `box`.
inline Eigen::MatrixXd assemble_generator(const CollocationOperators& ops, const BoxDomain& box, const DynamicsField& u) {
  if (u.dim != ops.dim()) throw std::invalid_argument("assemble_generator: dynamics dimension mismatch");
  return generator_from_values(ops, box, sample_dynamics(u, box_points(ops, box)));
}

namespace detail {

inline void sort_spectrum(Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values(a).real() != values(b).real()) return values(a).real() > values(b).real();
    return values(a).imag() < values(b).imag();
  });
  Eigen::VectorXcd v(values.size());
  Eigen::MatrixXcd w(vectors.rows(), vectors.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = values(order[k]);
    w.col(static_cast<Eigen::Index>(k)) = vectors.col(order[k]);
  }
  values = std::move(v);
  vectors = std::move(w);
}

}  // namespace detail

/// Solves U W = M W Lambda as the standard problem on M^{-1} U.
///
/// Eigenvalues come back ordered by real part descending, then imaginary
/// part ascending. `modes` is left empty; see koopman_modes.
inline SpectralSystem spectral_decompose(const Eigen::MatrixXd& gen, const Eigen::MatrixXd& M,
                                         const Eigen::PartialPivLU<Eigen::MatrixXd>& M_lu,
                                         double cond_cap = std::numeric_limits<double>::infinity()) {
  if (gen.rows() != M.rows() || gen.cols() != M.cols() || M.rows() != M.cols()) {
    throw std::invalid_argument("spectral_decompose: U and M must be square and of equal size");
  }
  const double rcond_m = M_lu.rcond();
  if (!(rcond_m > 1e3 * std::numeric_limits<double>::epsilon())) {
    throw SpectralError(SpectralError::Kind::SingularBasis, "spectral_decompose: interpolation matrix is singular");
  }
  if (!gen.allFinite()) {
    throw SpectralError(SpectralError::Kind::IllConditioned, "spectral_decompose: generator is not finite");
  }

  const Eigen::MatrixXd a = M_lu.solve(gen);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, true);
  if (solver.info() != Eigen::Success) {
    throw SpectralError(SpectralError::Kind::IllConditioned, "spectral_decompose: eigensolver did not converge");
  }

  SpectralSystem sys;
  sys.eigenvalues = solver.eigenvalues();
  sys.eigvecs = solver.eigenvectors();
  detail::sort_spectrum(sys.eigenvalues, sys.eigvecs);
  sys.phi = M.cast<std::complex<double>>() * sys.eigvecs;
  sys.nu = sys.phi.row(0).transpose();

  const Eigen::PartialPivLU<Eigen::MatrixXcd> phi_lu(sys.phi);
  const double rcond_phi = phi_lu.rcond();
  sys.cond_phi = rcond_phi > 0.0 ? 1.0 / rcond_phi : std::numeric_limits<double>::infinity();
  if (!(sys.cond_phi <= cond_cap)) {
    throw SpectralError(SpectralError::Kind::IllConditioned,
                        "spectral_decompose: eigenfunction matrix condition " + std::to_string(sys.cond_phi) +
                            " exceeds cap " + std::to_string(cond_cap));
  }
  return sys;
}

inline SpectralSystem spectral_decompose(const Eigen::MatrixXd& gen, const Eigen::MatrixXd& M,
                                         double cond_cap = std::numeric_limits<double>::infinity()) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  return spectral_decompose(gen, M, lu, cond_cap);
}

/// Relative tolerance for the eigen and mode residual invariants.
inline constexpr double kResidualTolerance = 1e-8;

/// Solves Phi C = Xi columnwise (Xi rows are real grid coordinates).
///
/// Uses LU first; when the residual bound is missed, retries with a
/// rank-revealing least-squares solve that drops singular directions below
/// 1e-12 * ||Phi||. Throws IllConditioned if neither meets the bound.
inline Eigen::MatrixXcd koopman_modes(const Eigen::MatrixXcd& phi, const Eigen::MatrixXd& xi) {
  if (phi.rows() != phi.cols() || xi.rows() != phi.rows()) {
    throw std::invalid_argument("koopman_modes: Phi must be N x N and Xi must have N rows");
  }
  const Eigen::MatrixXcd rhs = xi.cast<std::complex<double>>();
  const double bound = kResidualTolerance * (1.0 + inf_norm(xi));
  auto residual = [&](const Eigen::MatrixXcd& c) { return inf_norm(phi * c - rhs); };

  Eigen::MatrixXcd c = Eigen::PartialPivLU<Eigen::MatrixXcd>(phi).solve(rhs);
  if (c.allFinite() && residual(c) <= bound) return c;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
  cod.setThreshold(1e-12);
  cod.compute(phi);
  c = cod.solve(rhs);
  if (c.allFinite() && residual(c) <= bound) return c;

  throw SpectralError(SpectralError::Kind::IllConditioned, "koopman_modes: mode residual bound cannot be met");
}

/// Fills `modes` and the cached weighted modes of `sys` from real grid coordinates.
inline void attach_modes(SpectralSystem& sys, const Eigen::MatrixXd& xi) {
  sys.modes = koopman_modes(sys.phi, xi);
  sys.weighted_modes = sys.nu.asDiagonal() * sys.modes;
}

enum class EvolveStatus { Ok, NumericalNoise, Overflow };

struct EvolveResult {
  Eigen::VectorXd x;
  EvolveStatus status = EvolveStatus::Ok;
};

/// Largest Re(lambda) * t accepted before exp() is considered overflowing.
inline constexpr double kMaxExponent = 700.0;

/// x(t) = Re sum_j C(j,:) nu_j exp(lambda_j t).
///
/// Reports Overflow when any Re(lambda_j) t exceeds kMaxExponent and
/// NumericalNoise when the imaginary residue exceeds 1e-8 (1 + ||Re||).
inline EvolveResult evolve_state(const SpectralSystem& sys, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve_state: t must be non-negative");
  if (sys.weighted_modes.rows() != sys.eigenvalues.size()) {
    throw std::invalid_argument("evolve_state: spectral system has no modes attached");
  }
  EvolveResult out;
  if (t > 0.0 && (sys.eigenvalues.real().array() * t).maxCoeff() > kMaxExponent) {
    out.status = EvolveStatus::Overflow;
    return out;
  }
  const Eigen::VectorXcd growth = (sys.eigenvalues * t).array().exp().matrix();
  const Eigen::VectorXcd z = sys.weighted_modes.transpose() * growth;
  out.x = z.real();
  const double im = z.imag().cwiseAbs().maxCoeff();
  const double re = out.x.cwiseAbs().maxCoeff();
  if (!out.x.allFinite() || im > kResidualTolerance * (1.0 + re)) out.status = EvolveStatus::NumericalNoise;
  return out;
}

/// ||U W - M W Lambda||_inf.
inline double eigen_residual(const Eigen::MatrixXd& gen, const SpectralSystem& sys) {
  const Eigen::MatrixXcd lhs = gen.cast<std::complex<double>>() * sys.eigvecs;
  const Eigen::MatrixXcd rhs = sys.phi * sys.eigenvalues.asDiagonal();
  return inf_norm(lhs - rhs);
}

/// ||Phi C - Xi||_inf.
inline double mode_residual(const SpectralSystem& sys, const Eigen::MatrixXd& xi) {
  return inf_norm(sys.phi * sys.modes - xi.cast<std::complex<double>>());
}

}  // namespace askopt
