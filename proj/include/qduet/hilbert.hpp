#pragma once

// Finite-dimensional Hilbert-space kernel: uniform 1D grids, weighted inner
// products, kinetic/potential operator constructors, and a dense Hermitian
// eigensolver with deterministic ordering and phase.
//
// Conventions (atomic units, hbar = m_e = 1):
//   - inner(u, v) conjugates the first argument: weight * sum conj(u_i) v_i.
//   - Kinetic stencil is the second-difference operator with Dirichlet walls
//     one spacing outside the grid: diagonal 1/(m h^2), off-diagonal -1/(2 m h^2).
//   - Eigenvectors are normalized in the weighted inner product, eigenvalue ties
//     are ordered by the index of the first nonzero component, and the global
//     phase makes the largest-magnitude component real and positive.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace qduet {

using complexd = std::complex<double>;

struct Grid1D {
  int n = 0;
  double x_min = 0.0;
  double x_max = 0.0;

  double spacing() const { return (x_max - x_min) / (n - 1); }
  double point(int i) const { return i == n - 1 ? x_max : x_min + spacing() * i; }
  std::vector<double> points() const {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = point(i);
    return xs;
  }
};

inline Grid1D make_uniform_grid(int n, double x_min, double x_max) {
  if (n < 3) throw invalid_argument("grid size must be at least 3, got " + std::to_string(n));
  if (!(x_min < x_max))
    throw invalid_argument("grid requires x_min < x_max, got [" + std::to_string(x_min) + ", " +
                           std::to_string(x_max) + "]");
  if (!std::isfinite(x_min) || !std::isfinite(x_max))
    throw invalid_argument("grid endpoints must be finite");
  return Grid1D{n, x_min, x_max};
}

// Complex amplitudes plus the quadrature weight of the representation
// (grid spacing h for grid states, 1 for abstract bases).
struct StateVector {
  Eigen::VectorXcd amplitudes;
  double weight = 1.0;

  int dim() const { return static_cast<int>(amplitudes.size()); }
  double norm_sq() const { return weight * amplitudes.squaredNorm(); }
  double norm() const { return std::sqrt(norm_sq()); }
  bool finite() const { return amplitudes.allFinite(); }
};

struct LinearOperator {
  Eigen::MatrixXcd matrix;
  bool hermitian = false;
  double weight = 1.0;  // quadrature weight of the space the operator acts on

  int dim() const { return static_cast<int>(matrix.rows()); }
};

namespace detail {

inline double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return max_abs(m - m.adjoint());
}

inline void check_hermitian(const LinearOperator& op, const char* who) {
  if (!op.hermitian)
    throw invalid_argument(std::string(who) + ": operator is not flagged Hermitian");
  const double scale = max_abs(op.matrix);
  if (hermiticity_defect(op.matrix) > 1e-12 * std::max(scale, 1.0))
    throw invalid_argument(std::string(who) + ": matrix violates the Hermiticity tolerance");
}

}  // namespace detail

inline LinearOperator make_operator(Eigen::MatrixXcd matrix, bool hermitian, double weight = 1.0) {
  if (matrix.rows() != matrix.cols()) throw invalid_argument("operator matrix must be square");
  LinearOperator op{std::move(matrix), hermitian, weight};
  if (hermitian) detail::check_hermitian(op, "make_operator");
  return op;
}

inline complexd inner(const StateVector& u, const StateVector& v) {
  if (u.dim() != v.dim())
    throw dimension_mismatch("inner: dimensions " + std::to_string(u.dim()) + " vs " +
                             std::to_string(v.dim()));
  if (u.weight != v.weight) throw dimension_mismatch("inner: mismatched quadrature weights");
  return u.weight * u.amplitudes.dot(v.amplitudes);  // Eigen dot conjugates the first factor
}

inline StateVector apply(const LinearOperator& op, const StateVector& v) {
  if (op.dim() != v.dim())
    throw dimension_mismatch("apply: operator dim " + std::to_string(op.dim()) + " vs state dim " +
                             std::to_string(v.dim()));
  return StateVector{op.matrix * v.amplitudes, v.weight};
}

inline LinearOperator build_kinetic(const Grid1D& grid, double mass) {
  if (!(mass > 0.0)) throw invalid_argument("kinetic operator requires mass > 0");
  const int n = grid.n;
  const double h = grid.spacing();
  const double diag = 1.0 / (mass * h * h);
  const double off = -0.5 / (mass * h * h);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag;
    if (i + 1 < n) {
      m(i, i + 1) = off;
      m(i + 1, i) = off;
    }
  }
  return LinearOperator{std::move(m), true, grid.spacing()};
}

inline LinearOperator build_potential(const Grid1D& grid, const std::function<double(double)>& f) {
  const int n = grid.n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double v = f(grid.point(i));
    if (!std::isfinite(v))
      throw invalid_argument("potential is non-finite at x = " + std::to_string(grid.point(i)));
    m(i, i) = v;
  }
  return LinearOperator{std::move(m), true, grid.spacing()};
}

namespace detail {

inline int first_significant_index(const Eigen::VectorXcd& v) {
  const double floor = 1e-12 * v.cwiseAbs().maxCoeff();
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > floor) return i;
  return 0;
}

// Rotate the global phase so the largest-magnitude component is real-positive.
inline void fix_phase(Eigen::VectorXcd& v) {
  int imax = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best <= 0.0) return;
  v *= std::conj(v[imax]) / best;
  v[imax] = complexd(std::abs(v[imax]), 0.0);
}

}  // namespace detail

// k lowest eigenpairs of a Hermitian operator, eigenvalues ascending.
// Deterministic output: exact eigenvalue ties are ordered by the first nonzero
// eigenvector component, and each vector's phase is fixed as documented above.
inline std::vector<std::pair<double, StateVector>> eigh(const LinearOperator& op, int k) {
  detail::check_hermitian(op, "eigh");
  const int n = op.dim();
  if (k < 1 || k > n)
    throw invalid_argument("eigh: k must lie in [1, " + std::to_string(n) + "], got " +
                           std::to_string(k));

  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  const bool purely_real = (op.matrix.imag().cwiseAbs().maxCoeff() == 0.0);
  if (purely_real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix.real());
    if (solver.info() != Eigen::Success)
      throw eigensolver_failure("eigh: dense real solver did not converge");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors().cast<complexd>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.matrix);
    if (solver.info() != Eigen::Success)
      throw eigensolver_failure("eigh: dense complex solver did not converge");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<int> first_nonzero(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    order[static_cast<std::size_t>(i)] = i;
    Eigen::VectorXcd col = vectors.col(i);
    detail::fix_phase(col);
    vectors.col(i) = col;
    first_nonzero[static_cast<std::size_t>(i)] = detail::first_significant_index(col);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return first_nonzero[static_cast<std::size_t>(a)] < first_nonzero[static_cast<std::size_t>(b)];
  });

  const double op_norm = op.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  std::vector<std::pair<double, StateVector>> out;
  out.reserve(static_cast<std::size_t>(k));
  const double root_w = std::sqrt(op.weight);
  for (int j = 0; j < k; ++j) {
    const int i = order[static_cast<std::size_t>(j)];
    const double residual = (op.matrix * vectors.col(i) - values[i] * vectors.col(i)).norm();
    if (residual > 1e-10 * std::max(op_norm, 1.0))
      throw eigensolver_failure("eigh: residual " + std::to_string(residual) +
                                " exceeds tolerance for eigenvalue " + std::to_string(values[i]));
    out.emplace_back(values[i], StateVector{vectors.col(i) / root_w, op.weight});
  }
  return out;
}

inline std::pair<double, StateVector> ground_state(const LinearOperator& op) {
  return eigh(op, 1).front();
}

// Cheap deterministic upper bound on the spectral radius (max absolute row sum).
inline double gershgorin_radius(const LinearOperator& op) {
  return op.matrix.cwiseAbs().rowwise().sum().maxCoeff();
}

// <state|op|state> / <state|state>; real up to round-off when op is Hermitian.
inline complexd expectation(const StateVector& state, const LinearOperator& op) {
  const complexd nrm = inner(state, state);
  if (!(nrm.real() > 0.0)) throw invalid_argument("expectation: zero-norm state");
  return inner(state, apply(op, state)) / nrm.real();
}

}  // namespace qduet
