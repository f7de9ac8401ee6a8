#pragma once

// Lanczos ground-state solver for large real-symmetric operators given as a
// matrix-free apply, with full reorthogonalization (two Gram-Schmidt passes
// per step) and thick restarts from the current Ritz vector. Deterministic:
// fixed start vector, no randomness.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <string>

#include "errors.hpp"

namespace qduet {

struct LanczosResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;   // total matrix applies
  double residual = 0.0;  // ||A v - value v|| at exit
};

// apply(x, y) must set y = A x for the symmetric operator A of dimension dim.
inline LanczosResult lanczos_ground(
    Eigen::Index dim, const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
    double tol = 1e-11, int cycle_len = 250, int max_cycles = 60) {
  if (dim < 1) throw invalid_argument("lanczos_ground: dimension must be positive");
  const int m = static_cast<int>(std::min<Eigen::Index>(cycle_len, dim));

  Eigen::VectorXd v = Eigen::VectorXd::Ones(dim) / std::sqrt(static_cast<double>(dim));
  Eigen::MatrixXd basis(dim, m);
  Eigen::VectorXd alpha(m), beta(m);
  Eigen::VectorXd w(dim), av(dim);
  LanczosResult result;

  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    int built = 0;
    basis.col(0) = v;
    bool breakdown = false;
    for (int j = 0; j < m; ++j) {
      apply(basis.col(j), w);
      ++result.iterations;
      alpha[j] = basis.col(j).dot(w);
      w -= alpha[j] * basis.col(j);
      if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
      // Full reorthogonalization, two passes.
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
      built = j + 1;
      const double norm_w = w.norm();
      if (j + 1 < m) {
        if (norm_w < 1e-14) {  // exact invariant subspace
          breakdown = true;
          break;
        }
        beta[j] = norm_w;
        basis.col(j + 1) = w / norm_w;
      }
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(built, built);
    for (int j = 0; j < built; ++j) {
      tri(j, j) = alpha[j];
      if (j + 1 < built) {
        tri(j, j + 1) = beta[j];
        tri(j + 1, j) = beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri);
    if (solver.info() != Eigen::Success)
      throw eigensolver_failure("lanczos_ground: tridiagonal solve failed");
    const Eigen::VectorXd s = solver.eigenvectors().col(0);
    v = basis.leftCols(built) * s;
    v /= v.norm();
    result.value = solver.eigenvalues()[0];

    apply(v, av);
    ++result.iterations;
    result.residual = (av - result.value * v).norm();
    if (result.residual <= tol * std::max(1.0, std::abs(result.value)) || breakdown) {
      result.vector = v;
      return result;
    }
  }
  throw eigensolver_failure("lanczos_ground: no convergence after " +
                            std::to_string(result.iterations) + " applies, residual " +
                            std::to_string(result.residual));
}

}  // namespace qduet
