#pragma once

// One-dimensional soft-Coulomb model of a homonuclear one-electron diatomic
// (H2+ analog): an electron at coordinate x bound to two nuclei of mass M at
// separation r, with every Coulomb term regularized as -1/sqrt(u^2 + s^2).
// Atomic units throughout.
//
//   electron (fixed r):  H_e = -(1/2) d2/dx2 - W(x - r/2) - W(x + r/2),
//                        W(u) = 1/sqrt(u^2 + s_e^2)
//   nuclei (relative):   H_n = -(1/2 mu) d2/dr2 + 1/sqrt(r^2 + s_n^2) + V_elec(r),
//                        mu = M/2 (exact reduction of the two-nucleus kinetic
//                        energy to the relative coordinate; center of mass drops)
//   exact two-coordinate oracle: H_tot = T_e x 1 + 1 x T_n + V_nn(r) + V_int(x, r)
//
// Three descriptions of the same system are implemented and compared:
// Born-Oppenheimer (nuclei on the electronic ground-energy curve), a Hartree
// product with self-consistent mean-field coupling (each subsystem feels the
// expectation of V_int over the other), and the exact linear tensor-grid
// ground state. The Hartree energy is a variational upper bound on the exact
// ground energy.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hilbert.hpp"
#include "lanczos.hpp"

namespace qduet {

struct MoleculeParams {
  Grid1D electron_grid;  // electron coordinate x
  Grid1D nuclear_grid;   // internuclear separation r, strictly positive domain
  double M = 100.0;      // mass of one nucleus
  double s_e = 1.0;      // electron-nucleus softening length
  double s_n = 1.0;      // nucleus-nucleus softening length
};

// Desk-scale baseline: 64x64 grids, used by the regression anchors.
inline MoleculeParams baseline_molecule_params() {
  return MoleculeParams{make_uniform_grid(64, -10.0, 10.0), make_uniform_grid(64, 0.3, 8.0), 100.0,
                        1.0, 1.0};
}

struct BoCurve {
  std::vector<double> separations;        // ascending
  std::vector<double> electronic_energy;  // ground energy of H_e, repulsion excluded
  std::vector<double> total_curve;        // electronic_energy + 1/sqrt(r^2 + s_n^2)
};

struct ScfIteration {
  double R = 0.0;
  double E_total = 0.0;
  double delta = 0.0;  // max(|dE_total|, |dR|) against the previous iteration
};

struct ScfResult {
  double R_expectation = 0.0;
  double E_electron = 0.0;  // last electron eigenvalue in the mean-field potential
  double E_nuclear = 0.0;   // last nuclear eigenvalue in the mean-field potential
  double E_total = 0.0;     // energy functional, interaction counted once
  std::size_t iterations = 0;
  std::vector<ScfIteration> history;
  bool converged = false;
};

namespace detail {

inline double soft_well(double u, double s) { return -1.0 / std::sqrt(u * u + s * s); }

inline void validate_softening(double s, const char* name) {
  if (!(s > 0.0))
    throw invalid_argument(std::string("molecule: softening length ") + name + " must be > 0");
}

inline void validate_nuclear_side(const MoleculeParams& p) {
  if (!(p.M > 0.0)) throw invalid_argument("molecule: nuclear mass must be > 0");
  validate_softening(p.s_n, "s_n");
  if (!(p.nuclear_grid.x_min > 0.0))
    throw invalid_argument("molecule: nuclear separation domain must be strictly positive");
}

inline void validate_separation(const MoleculeParams& p, double r) {
  if (!(r >= 0.0)) throw invalid_argument("molecule: separation must be non-negative");
  if (!(r / 2.0 < p.electron_grid.x_max) || !(-r / 2.0 > p.electron_grid.x_min))
    throw invalid_argument("molecule: separation " + std::to_string(r) +
                           " puts a nucleus outside the electron grid");
}

inline double interpolate_linear(const std::vector<double>& xs, const std::vector<double>& ys,
                                 double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return (1.0 - t) * ys[lo] + t * ys[hi];
}

}  // namespace detail

inline LinearOperator electron_hamiltonian(const MoleculeParams& p, double r) {
  detail::validate_softening(p.s_e, "s_e");
  detail::validate_separation(p, r);
  LinearOperator h = build_kinetic(p.electron_grid, 1.0);
  const double s = p.s_e;
  for (int i = 0; i < p.electron_grid.n; ++i) {
    const double x = p.electron_grid.point(i);
    h.matrix(i, i) += detail::soft_well(x - r / 2.0, s) + detail::soft_well(x + r / 2.0, s);
  }
  return h;
}

inline BoCurve bo_curve(const MoleculeParams& p, const std::vector<double>& r_values) {
  detail::validate_softening(p.s_n, "s_n");
  if (r_values.empty()) throw invalid_argument("bo_curve: empty separation list");
  if (!std::is_sorted(r_values.begin(), r_values.end()))
    throw invalid_argument("bo_curve: separations must be ascending");
  BoCurve curve;
  curve.separations = r_values;
  curve.electronic_energy.reserve(r_values.size());
  curve.total_curve.reserve(r_values.size());
  for (double r : r_values) {
    const double e = ground_state(electron_hamiltonian(p, r)).first;
    curve.electronic_energy.push_back(e);
    curve.total_curve.push_back(e + 1.0 / std::sqrt(r * r + p.s_n * p.s_n));
  }
  return curve;
}

inline LinearOperator nuclear_hamiltonian(const MoleculeParams& p, const BoCurve& curve) {
  detail::validate_nuclear_side(p);
  if (curve.separations.empty() || p.nuclear_grid.x_min < curve.separations.front() ||
      p.nuclear_grid.x_max > curve.separations.back())
    throw invalid_argument("nuclear_hamiltonian: nuclear grid exceeds the tabulated range");
  const double mu = p.M / 2.0;
  LinearOperator h = build_kinetic(p.nuclear_grid, mu);
  for (int j = 0; j < p.nuclear_grid.n; ++j) {
    const double r = p.nuclear_grid.point(j);
    const double repulsion = 1.0 / std::sqrt(r * r + p.s_n * p.s_n);
    h.matrix(j, j) +=
        repulsion + detail::interpolate_linear(curve.separations, curve.electronic_energy, r);
  }
  return h;
}

inline double expected_separation(const StateVector& phi, const Grid1D& grid) {
  if (phi.dim() != grid.n)
    throw dimension_mismatch("expected_separation: state/grid dimensions differ");
  const double nrm = phi.norm_sq();
  if (!(nrm > 0.0)) throw invalid_argument("expected_separation: zero-norm state");
  double acc = 0.0;
  for (int j = 0; j < grid.n; ++j)
    acc += grid.point(j) * std::norm(phi.amplitudes[j]);
  return phi.weight * acc / nrm;
}

namespace detail {

// Interaction table V_int(x_i, r_j): both electron-nucleus wells at +-r/2.
inline Eigen::MatrixXd interaction_table(const MoleculeParams& p) {
  const int ne = p.electron_grid.n;
  const int nn = p.nuclear_grid.n;
  Eigen::MatrixXd v(ne, nn);
  for (int j = 0; j < nn; ++j) {
    const double r = p.nuclear_grid.point(j);
    for (int i = 0; i < ne; ++i) {
      const double x = p.electron_grid.point(i);
      v(i, j) = soft_well(x - r / 2.0, p.s_e) + soft_well(x + r / 2.0, p.s_e);
    }
  }
  return v;
}

inline Eigen::VectorXd repulsion_values(const MoleculeParams& p) {
  Eigen::VectorXd v(p.nuclear_grid.n);
  for (int j = 0; j < p.nuclear_grid.n; ++j) {
    const double r = p.nuclear_grid.point(j);
    v[j] = 1.0 / std::sqrt(r * r + p.s_n * p.s_n);
  }
  return v;
}

inline Eigen::VectorXd density(const StateVector& state) {
  return state.weight * state.amplitudes.cwiseAbs2();
}

inline LinearOperator operator_with_potential(LinearOperator kinetic, const Eigen::VectorXd& v) {
  for (int i = 0; i < kinetic.dim(); ++i) kinetic.matrix(i, i) += v[i];
  return kinetic;
}

}  // namespace detail

// Alternating ground-state solves with linear mixing of the effective
// potentials. Initialization: phi0 = nuclear ground state on the BO curve,
// psi0 = electron ground state at the BO minimum. Energy functional counts the
// interaction once:
//   E = <psi|T_e|psi> + <phi|T_n|phi> + <psi phi|V_int|psi phi> + <phi|V_nn|phi>.
inline ScfResult scf_hartree(const MoleculeParams& p, double tol, std::size_t max_iter,
                             double mixing) {
  detail::validate_softening(p.s_e, "s_e");
  detail::validate_nuclear_side(p);
  if (!(tol > 0.0)) throw invalid_argument("scf_hartree: tol must be > 0");
  if (max_iter < 1) throw invalid_argument("scf_hartree: max_iter must be >= 1");
  if (!(mixing > 0.0) || mixing > 1.0)
    throw invalid_argument("scf_hartree: mixing must lie in (0, 1]");
  detail::validate_separation(p, p.nuclear_grid.x_max);

  const LinearOperator kin_e = build_kinetic(p.electron_grid, 1.0);
  const LinearOperator kin_n = build_kinetic(p.nuclear_grid, p.M / 2.0);
  const Eigen::MatrixXd v_int = detail::interaction_table(p);
  const Eigen::VectorXd v_nn = detail::repulsion_values(p);

  // Born-Oppenheimer starting point, tabulated on the nuclear grid itself.
  const BoCurve curve = bo_curve(p, p.nuclear_grid.points());
  StateVector phi = ground_state(nuclear_hamiltonian(p, curve)).second;
  const std::size_t min_index = static_cast<std::size_t>(
      std::min_element(curve.total_curve.begin(), curve.total_curve.end()) -
      curve.total_curve.begin());
  StateVector psi =
      ground_state(electron_hamiltonian(p, curve.separations[min_index])).second;

  auto energy_functional = [&](const StateVector& ps, const StateVector& ph) {
    const double kinetic = std::real(expectation(ps, kin_e)) + std::real(expectation(ph, kin_n));
    const Eigen::VectorXd rho_e = detail::density(ps);
    const Eigen::VectorXd rho_n = detail::density(ph);
    const double interaction = rho_e.dot(v_int * rho_n);
    const double repulsion = rho_n.dot(v_nn);
    return kinetic + interaction + repulsion;
  };

  Eigen::VectorXd v_eff_e = v_int * detail::density(phi);
  Eigen::VectorXd v_eff_n = v_int.transpose() * detail::density(psi);
  double e_prev = energy_functional(psi, phi);
  double r_prev = expected_separation(phi, p.nuclear_grid);

  ScfResult result;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    v_eff_e = (1.0 - mixing) * v_eff_e + mixing * (v_int * detail::density(phi));
    const auto [e_el, psi_new] = ground_state(detail::operator_with_potential(kin_e, v_eff_e));
    psi = psi_new;
    v_eff_n = (1.0 - mixing) * v_eff_n + mixing * (v_int.transpose() * detail::density(psi));
    const auto [e_nu, phi_new] =
        ground_state(detail::operator_with_potential(kin_n, v_nn + v_eff_n));
    phi = phi_new;

    const double e_total = energy_functional(psi, phi);
    const double r_now = expected_separation(phi, p.nuclear_grid);
    if (!std::isfinite(e_total) || !std::isfinite(r_now))
      throw divergence_error("scf_hartree: non-finite energy or separation", it);
    const double delta = std::max(std::abs(e_total - e_prev), std::abs(r_now - r_prev));
    result.history.push_back(ScfIteration{r_now, e_total, delta});
    result.E_electron = e_el;
    result.E_nuclear = e_nu;
    e_prev = e_total;
    r_prev = r_now;
    if (delta <= tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = result.history.size();
  result.E_total = e_prev;
  result.R_expectation = r_prev;
  return result;
}

// Matrix-free application of the exact two-coordinate Hamiltonian
// H_tot = T_e x 1 + 1 x T_n + V_nn + V_int to a real vector flattened
// electron-major: amplitude(i_electron, j_nuclear) at index i + ne * j.
inline std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> exact_hamiltonian_apply(
    const MoleculeParams& p) {
  detail::validate_softening(p.s_e, "s_e");
  detail::validate_nuclear_side(p);
  detail::validate_separation(p, p.nuclear_grid.x_max);
  const int ne = p.electron_grid.n;
  const int nn = p.nuclear_grid.n;

  const double he = p.electron_grid.spacing();
  const double hn = p.nuclear_grid.spacing();
  const double de = 1.0 / (he * he);         // electron kinetic diagonal, m = 1
  const double oe = -0.5 / (he * he);
  const double mu = p.M / 2.0;
  const double dn = 1.0 / (mu * hn * hn);    // nuclear kinetic diagonal
  const double on = -0.5 / (mu * hn * hn);

  Eigen::MatrixXd v = detail::interaction_table(p);
  const Eigen::VectorXd v_nn = detail::repulsion_values(p);
  for (int j = 0; j < nn; ++j) v.col(j).array() += v_nn[j] + de + dn;  // full diagonal

  return [v = std::move(v), ne, nn, oe, on](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const Eigen::Map<const Eigen::MatrixXd> xm(x.data(), ne, nn);
    Eigen::Map<Eigen::MatrixXd> ym(y.data(), ne, nn);
    ym = v.cwiseProduct(xm);
    ym.topRows(ne - 1) += oe * xm.bottomRows(ne - 1);
    ym.bottomRows(ne - 1) += oe * xm.topRows(ne - 1);
    ym.leftCols(nn - 1) += on * xm.rightCols(nn - 1);
    ym.rightCols(nn - 1) += on * xm.leftCols(nn - 1);
  };
}

// Ground eigenpair of the exact two-coordinate Hamiltonian on the tensor grid,
// solved matrix-free (Lanczos with full reorthogonalization). The returned
// state is real non-negative up to sign fixing, weight = h_e * h_n.
inline std::pair<double, StateVector> exact_two_coordinate(const MoleculeParams& p) {
  const int ne = p.electron_grid.n;
  const int nn = p.nuclear_grid.n;
  const Eigen::Index dim = static_cast<Eigen::Index>(ne) * nn;
  if (dim > 100000)
    throw invalid_argument("exact_two_coordinate: tensor dimension " + std::to_string(dim) +
                           " exceeds the desk-scale bound 100000");
  const double he = p.electron_grid.spacing();
  const double hn = p.nuclear_grid.spacing();

  LanczosResult ground = lanczos_ground(dim, exact_hamiltonian_apply(p));
  Eigen::VectorXcd amplitudes = ground.vector.cast<complexd>() / std::sqrt(he * hn);
  detail::fix_phase(amplitudes);
  return {ground.value, StateVector{std::move(amplitudes), he * hn}};
}

}  // namespace qduet
