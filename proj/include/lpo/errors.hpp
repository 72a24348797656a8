// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef LPO_ERRORS_HPP
#define LPO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lpo {

/// Raised when inputs violate a documented precondition (bad dimensions,
/// non-orthonormal frames, unstable dynamics where stability is required).
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a computation fails numerically (factorization breakdown,
/// divergent state, quadrature that cannot reach the requested accuracy).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lpo

#endif  // LPO_ERRORS_HPP
