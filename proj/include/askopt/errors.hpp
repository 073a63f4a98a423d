// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace askopt {

/// Failure of the spectral pipeline for one neighborhood.
class SpectralError : public std::runtime_error {
 public:
  enum class Kind { SingularBasis, IllConditioned };

  SpectralError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// The dynamics field produced NaN or Inf somewhere it was sampled.
class NonFiniteDynamics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace askopt
