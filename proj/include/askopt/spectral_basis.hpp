// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "askopt/sparse_grid.hpp"

namespace askopt {

/// One multi-index of polynomial degrees per basis function; row j is the
/// tensor Chebyshev polynomial Psi_j(x) = prod_i T_{deg(j,i)}(x_i).
struct BasisIndexSet {
  Eigen::MatrixXi degrees;  // N x dim

  [[nodiscard]] Eigen::Index size() const { return degrees.rows(); }
  [[nodiscard]] int max_degree() const { return degrees.size() == 0 ? 0 : degrees.maxCoeff(); }
};

/// Values T_0..T_n and derivatives T_0'..T_n' at x.
///
/// Uses T_{k+1} = 2x T_k - T_{k-1} together with T_k' = k U_{k-1}, where
/// U is the Chebyshev polynomial of the second kind.
inline void chebyshev_values(int n, double x, Eigen::Ref<Eigen::VectorXd> t, Eigen::Ref<Eigen::VectorXd> dt) {
  t(0) = 1.0;
  dt(0) = 0.0;
  if (n == 0) return;
  t(1) = x;
  dt(1) = 1.0;
  double u_prev = 1.0;     // U_{k-2}
  double u_cur = 2.0 * x;  // U_{k-1}
  for (int k = 2; k <= n; ++k) {
    t(k) = 2.0 * x * t(k - 1) - t(k - 2);
    dt(k) = static_cast<double>(k) * u_cur;
    const double u_next = 2.0 * x * u_cur - u_prev;
    u_prev = u_cur;
    u_cur = u_next;
  }
}

/// Downward-closed Smolyak index set matched to `smolyak_grid(dim, level)`:
/// the same multi-level blocks as the grid with each 1-D point block replaced
/// by its degree block, so N basis functions pair with N points.
inline BasisIndexSet basis_index_set(const ReferenceGrid& grid) {
  std::vector<std::vector<int>> rows;
  std::vector<std::vector<int>> degree_blocks;
  for (int depth = 0; depth <= grid.level; ++depth) degree_blocks.push_back(chebyshev_delta_degrees(depth));
  for (const auto& k : smolyak_multi_indices(grid.dim, grid.level)) {
    std::vector<std::vector<int>> factors;
    factors.reserve(k.size());
    for (int depth : k) factors.push_back(degree_blocks[static_cast<std::size_t>(depth)]);
    detail::for_each_tensor(factors, [&](const std::vector<int>& m) { rows.push_back(m); });
  }
  if (static_cast<Eigen::Index>(rows.size()) != grid.count()) {
    throw std::logic_error("basis_index_set: basis size does not match grid size");
  }
  BasisIndexSet basis;
  basis.degrees.resize(static_cast<Eigen::Index>(rows.size()), grid.dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < grid.dim; ++c) basis.degrees(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  return basis;
}

namespace detail {

// Per-point, per-dimension tables of T_k and T_k'.
struct ChebyshevTables {
  std::vector<Eigen::MatrixXd> values;       // dim entries, each (max_deg+1) x N
  std::vector<Eigen::MatrixXd> derivatives;  // same layout

  ChebyshevTables(const Eigen::MatrixXd& points, int max_deg) {
    const Eigen::Index n_pts = points.rows();
    const Eigen::Index dim = points.cols();
    Eigen::VectorXd t(max_deg + 1), dt(max_deg + 1);
    for (Eigen::Index i = 0; i < dim; ++i) {
      Eigen::MatrixXd v(max_deg + 1, n_pts), d(max_deg + 1, n_pts);
      for (Eigen::Index p = 0; p < n_pts; ++p) {
        chebyshev_values(max_deg, points(p, i), t, dt);
        v.col(p) = t;
        d.col(p) = dt;
      }
      values.push_back(std::move(v));
      derivatives.push_back(std::move(d));
    }
  }
};

}  // namespace detail

/// Evaluates every basis function at every row of `points` (rows x N).
inline Eigen::MatrixXd evaluate_basis(const BasisIndexSet& basis, const Eigen::MatrixXd& points) {
  const detail::ChebyshevTables tab(points, basis.max_degree());
  Eigen::MatrixXd out(points.rows(), basis.size());
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    for (Eigen::Index j = 0; j < basis.size(); ++j) {
      double v = 1.0;
      for (Eigen::Index i = 0; i < points.cols(); ++i) v *= tab.values[static_cast<std::size_t>(i)](basis.degrees(j, i), p);
      out(p, j) = v;
    }
  }
  return out;
}

/// M_ij = Psi_j(xi_i).
inline Eigen::MatrixXd interpolation_matrix(const ReferenceGrid& grid, const BasisIndexSet& basis) {
  if (basis.size() != grid.count() || basis.degrees.cols() != grid.dim) {
    throw std::invalid_argument("interpolation_matrix: basis does not match grid");
  }
  return evaluate_basis(basis, grid.points);
}

/// (G_i)_lj = dPsi_j/dx_i at xi_l, on the reference domain.
inline std::vector<Eigen::MatrixXd> differentiation_matrices(const ReferenceGrid& grid, const BasisIndexSet& basis) {
  if (basis.size() != grid.count() || basis.degrees.cols() != grid.dim) {
    throw std::invalid_argument("differentiation_matrices: basis does not match grid");
  }
  const detail::ChebyshevTables tab(grid.points, basis.max_degree());
  const Eigen::Index n = grid.count();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(grid.dim));
  for (int i = 0; i < grid.dim; ++i) {
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double v = 1.0;
        for (int c = 0; c < grid.dim; ++c) {
          const auto& table = (c == i) ? tab.derivatives[static_cast<std::size_t>(c)] : tab.values[static_cast<std::size_t>(c)];
          v *= table(basis.degrees(j, c), l);
          if (v == 0.0) break;
        }
        g(l, j) = v;
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// 2-norm condition number via singular values.
inline double condition_number(const Eigen::MatrixXd& a) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

/// Reference-domain collocation operators for one (dim, level).
struct CollocationOperators {
  ReferenceGrid grid;
  BasisIndexSet basis;
  Eigen::MatrixXd M;
  std::vector<Eigen::MatrixXd> G;
  Eigen::PartialPivLU<Eigen::MatrixXd> M_lu;
  double cond_M = 1.0;

  [[nodiscard]] int dim() const { return grid.dim; }
  [[nodiscard]] Eigen::Index count() const { return grid.count(); }
};

/// Largest cond(M) accepted when building operators.
inline constexpr double kMaxInterpolationCondition = 1e6;

/// Builds grid, basis, M, G_i and the LU of M. Throws if M is singular or
/// worse conditioned than `max_cond`.
inline CollocationOperators make_collocation_operators(int dim, int level, double max_cond = kMaxInterpolationCondition) {
  CollocationOperators ops;
  ops.grid = smolyak_grid(dim, level);
  ops.basis = basis_index_set(ops.grid);
  ops.M = interpolation_matrix(ops.grid, ops.basis);
  ops.G = differentiation_matrices(ops.grid, ops.basis);
  ops.cond_M = condition_number(ops.M);
  if (!(ops.cond_M <= max_cond)) {
    throw std::runtime_error("make_collocation_operators: interpolation matrix for dim=" + std::to_string(dim) +
                             ", level=" + std::to_string(level) + " has condition number " +
                             std::to_string(ops.cond_M) + " above " + std::to_string(max_cond));
  }
  ops.M_lu.compute(ops.M);
  return ops;
}

/// Process-wide memoized operators keyed by (dim, level). Safe for
/// concurrent callers; each entry is built once.
inline std::shared_ptr<const CollocationOperators> shared_collocation_operators(int dim, int level) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const CollocationOperators>> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{dim, level}];
  if (!slot) slot = std::make_shared<const CollocationOperators>(make_collocation_operators(dim, level));
  return slot;
}

}  // namespace askopt
