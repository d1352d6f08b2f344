// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace morprec {

/// Bad user-facing configuration (unknown keys, inconsistent sizes, caps
/// exceeded). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver failure: non-convergence at the iteration cap, Arnoldi
/// breakdown, or a singular projected block. The CLI maps this to exit code 3.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File format or filesystem failure. The CLI maps this to exit code 4.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace morprec
