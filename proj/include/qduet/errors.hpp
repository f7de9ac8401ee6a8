#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qduet {

// Invalid or out-of-range arguments; maps to CLI exit code 1.
struct invalid_argument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct dimension_mismatch : invalid_argument {
  using invalid_argument::invalid_argument;
};

// Numerical blow-up or non-finite values mid-computation; maps to CLI exit code 2.
struct divergence_error : std::runtime_error {
  std::size_t step;
  divergence_error(const std::string& what, std::size_t step_index)
      : std::runtime_error(what + " (step " + std::to_string(step_index) + ")"),
        step(step_index) {}
};

// Requested collapse onto an outcome carrying (numerically) zero probability.
struct impossible_outcome : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Logarithmic-derivative reconstruction hit a near-zero psi or coupling.
struct singular_reconstruction : std::runtime_error {
  std::size_t index;
  singular_reconstruction(const std::string& what, std::size_t at)
      : std::runtime_error(what + " (index " + std::to_string(at) + ")"), index(at) {}
};

// Eigensolver failed to reach the residual tolerance.
struct eigensolver_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qduet
