// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace askopt {

/// Nested Clenshaw-Curtis points added at one-dimensional nesting depth `depth`.
///
/// Depth 0 contributes {0}, depth 1 contributes {-1, 1}, and depth k >= 2
/// contributes cos(j*pi/2^k) for odd j, in ascending order.
inline std::vector<double> chebyshev_delta_1d(int depth) {
  if (depth < 0) throw std::invalid_argument("chebyshev_delta_1d: negative depth");
  if (depth == 0) return {0.0};
  if (depth == 1) return {-1.0, 1.0};
  const long n = 1L << depth;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n / 2));
  // cos(j*pi/n) == sin((n/2 - j)*pi/n); the sine form is exactly odd-symmetric.
  for (long j = n - 1; j >= 1; j -= 2) {
    out.push_back(std::sin(static_cast<double>(n / 2 - j) * std::numbers::pi / static_cast<double>(n)));
  }
  return out;
}

/// Polynomial degrees paired with the points of `chebyshev_delta_1d(depth)`.
inline std::vector<int> chebyshev_delta_degrees(int depth) {
  if (depth < 0) throw std::invalid_argument("chebyshev_delta_degrees: negative depth");
  if (depth == 0) return {0};
  if (depth == 1) return {1, 2};
  std::vector<int> out;
  for (int deg = (1 << (depth - 1)) + 1; deg <= (1 << depth); ++deg) out.push_back(deg);
  return out;
}

/// Nested 1-D Clenshaw-Curtis set of a given level, center first, then by
/// nesting depth (ascending within a depth). Level l >= 1 has 2^l + 1 points.
inline std::vector<double> chebyshev_points_1d(int level) {
  if (level < 0) throw std::invalid_argument("chebyshev_points_1d: negative level");
  std::vector<double> out;
  for (int depth = 0; depth <= level; ++depth) {
    const auto delta = chebyshev_delta_1d(depth);
    out.insert(out.end(), delta.begin(), delta.end());
  }
  return out;
}

/// Multi-indices k in N^d with |k|_1 <= level, ordered by |k|_1 and then
/// lexicographically descending, so (1,0,...) precedes (0,1,...).
inline std::vector<std::vector<int>> smolyak_multi_indices(int dim, int level) {
  if (dim < 1) throw std::invalid_argument("smolyak_multi_indices: dim must be >= 1");
  if (level < 0) throw std::invalid_argument("smolyak_multi_indices: negative level");
  std::vector<std::vector<int>> out;
  std::vector<int> k(static_cast<std::size_t>(dim), 0);
  // Compositions of `total` into `dim` parts, lexicographically descending.
  auto emit = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      k[static_cast<std::size_t>(pos)] = remaining;
      out.push_back(k);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      k[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  for (int total = 0; total <= level; ++total) emit(emit, 0, total);
  return out;
}

/// Sparse collocation points on [-1,1]^d; row k of `points` is point k and
/// row 0 is the center.
struct ReferenceGrid {
  int dim = 0;
  int level = 0;
  Eigen::MatrixXd points;  // N x dim

  [[nodiscard]] Eigen::Index count() const { return points.rows(); }
  [[nodiscard]] Eigen::VectorXd point(Eigen::Index k) const { return points.row(k).transpose(); }
};

namespace detail {

// Visits the tensor product of per-dimension lists, first dimension slowest.
template <typename T, typename F>
void for_each_tensor(const std::vector<std::vector<T>>& factors, F&& visit) {
  const std::size_t d = factors.size();
  std::vector<std::size_t> pos(d, 0);
  std::vector<T> item(d);
  for (const auto& f : factors) {
    if (f.empty()) return;
  }
  while (true) {
    for (std::size_t i = 0; i < d; ++i) item[i] = factors[i][pos[i]];
    visit(item);
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (++pos[i] < factors[i].size()) break;
      pos[i] = 0;
      if (i == 0) return;
    }
    if (d == 0) return;
  }
}

}  // namespace detail

/// Smolyak union of tensor products of nested Clenshaw-Curtis difference
/// sets. Each point appears exactly once because the difference sets are
/// disjoint.
inline ReferenceGrid smolyak_grid(int dim, int level) {
  if (dim < 1) throw std::invalid_argument("smolyak_grid: dim must be >= 1");
  if (level < 0) throw std::invalid_argument("smolyak_grid: level must be >= 0");

  std::vector<std::vector<double>> deltas;
  for (int depth = 0; depth <= level; ++depth) deltas.push_back(chebyshev_delta_1d(depth));

  std::vector<std::vector<double>> rows;
  for (const auto& k : smolyak_multi_indices(dim, level)) {
    std::vector<std::vector<double>> factors;
    factors.reserve(k.size());
    for (int depth : k) factors.push_back(deltas[static_cast<std::size_t>(depth)]);
    detail::for_each_tensor(factors, [&](const std::vector<double>& p) { rows.push_back(p); });
  }

  ReferenceGrid grid;
  grid.dim = dim;
  grid.level = level;
  grid.points.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < dim; ++c) grid.points(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  return grid;
}

/// Axis-aligned box [lower, upper].
struct BoxDomain {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// Isotropic neighborhood [x - r, x + r].
  static BoxDomain around(const Eigen::VectorXd& center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("BoxDomain::around: radius must be positive");
    return {center.array() - radius, center.array() + radius};
  }

  [[nodiscard]] Eigen::Index dim() const { return lower.size(); }

  /// Componentwise membership, bounds included.
  [[nodiscard]] bool contains(const Eigen::VectorXd& x) const {
    return x.size() == lower.size() && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }

  [[nodiscard]] Eigen::VectorXd half_width() const { return 0.5 * (upper - lower); }
};

/// Affine image of the reference grid in `box`: xi -> (U-L)/2 * (xi + 1) + L.
inline Eigen::MatrixXd map_to_box(const ReferenceGrid& grid, const BoxDomain& box) {
  if (box.lower.size() != grid.dim || box.upper.size() != grid.dim) {
    throw std::invalid_argument("map_to_box: grid dimension " + std::to_string(grid.dim) +
                                " does not match box dimension " + std::to_string(box.lower.size()));
  }
  const Eigen::RowVectorXd scale = box.half_width().transpose();
  const Eigen::RowVectorXd lower = box.lower.transpose();
  Eigen::MatrixXd out(grid.points.rows(), grid.dim);
  for (Eigen::Index k = 0; k < grid.points.rows(); ++k) {
    out.row(k) = scale.cwiseProduct((grid.points.row(k).array() + 1.0).matrix()) + lower;
  }
  return out;
}

/// Inverse of `map_to_box` for a single point.
inline Eigen::VectorXd map_from_box(const Eigen::VectorXd& x, const BoxDomain& box) {
  return ((x - box.lower).array() / box.half_width().array() - 1.0).matrix();
}

}  // namespace askopt
