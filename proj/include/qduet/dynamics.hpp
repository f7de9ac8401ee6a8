#pragma once

// Time evolution in the interaction picture (hbar = 1):
//   linear mode   i dpsi/dt = H psi                        (state-independent H)
//   coupled mode  i dpsi/dt = V(phi, t) psi,  i dphi/dt = L(psi, t) phi
// where each subsystem's generator is built from the other subsystem's current
// state. Both modes use the classic fixed-step 4th-order Runge-Kutta method;
// in coupled mode the coupling operators are re-evaluated from the sub-stage
// states at every RK stage.
//
// Norm behavior of the linear propagator: one RK4 step multiplies the norm
// squared by |R(-i theta)|^2 = 1 - theta^6/72 + theta^8/576 per eigenmode,
// theta = eigenvalue * dt, so for rho(H)*dt <= 1 the drift over a run obeys
// |norm(t) - norm(0)| <= C * dt^4 * steps with C = max(1, rho(H))^6 / 72
// (rho estimated by the Gershgorin bound). The drift is reported on the
// trajectory.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hilbert.hpp"

namespace qduet {

inline constexpr double divergence_guard = 1e12;  // any |amplitude| above this aborts

struct StateSpace {
  int dim = 1;
  double weight = 1.0;
};

// Operator on one space built from the current state of the other space.
using CouplingMap = std::function<Eigen::MatrixXcd(const StateVector& other, double t)>;

enum class CouplingKind { expectation_bilinear, pointwise_product, custom };

struct CoupledSystem {
  StateSpace space_s;
  StateSpace space_m;
  CouplingMap coupling_sm;  // V(phi, t), acts on S
  CouplingMap coupling_ms;  // L(psi, t), acts on M
  CouplingKind kind = CouplingKind::custom;
  // Whether the instantaneous generators are Hermitian (declared, not inferred);
  // subsystem norms are conserved up to integrator error exactly in that case.
  bool hermitian_sm = false;
  bool hermitian_ms = false;
};

using Coefficient = std::function<complexd(double)>;

inline Coefficient constant_coefficient(complexd value) {
  return [value](double) { return value; };
}

// Pointwise-product coupling on same-dimension grids/spaces:
//   (V(phi) psi)_i = a(t) * phi_i * psi_i   and symmetrically with b(t).
// With dim = 1 this is the scalar toy system i psi' = a phi psi, i phi' = b psi phi.
inline CoupledSystem make_pointwise_system(const StateSpace& space, Coefficient a, Coefficient b) {
  CoupledSystem sys;
  sys.space_s = space;
  sys.space_m = space;
  sys.kind = CouplingKind::pointwise_product;
  sys.coupling_sm = [a](const StateVector& other, double t) {
    return Eigen::MatrixXcd((a(t) * other.amplitudes).asDiagonal());
  };
  sys.coupling_ms = [b](const StateVector& other, double t) {
    return Eigen::MatrixXcd((b(t) * other.amplitudes).asDiagonal());
  };
  return sys;
}

inline CoupledSystem make_pointwise_system(const StateSpace& space, complexd a, complexd b) {
  return make_pointwise_system(space, constant_coefficient(a), constant_coefficient(b));
}

// Expectation-bilinear coupling:
//   V(phi, t) = g_sm(t) * <phi|B_m|phi> * A_s,   L(psi, t) = g_ms(t) * <psi|B_s|psi> * A_m
// (raw inner products, quadrature weight included). The generators are
// Hermitian whenever the coefficients are real and A, B are Hermitian.
inline CoupledSystem make_expectation_bilinear_system(
    const StateSpace& space_s, const StateSpace& space_m, Coefficient g_sm,
    const Eigen::MatrixXcd& generator_s, const Eigen::MatrixXcd& probe_m, Coefficient g_ms,
    const Eigen::MatrixXcd& generator_m, const Eigen::MatrixXcd& probe_s,
    bool hermitian_sm = true, bool hermitian_ms = true) {
  CoupledSystem sys;
  sys.space_s = space_s;
  sys.space_m = space_m;
  sys.kind = CouplingKind::expectation_bilinear;
  sys.hermitian_sm = hermitian_sm;
  sys.hermitian_ms = hermitian_ms;
  const double w_m = space_m.weight;
  const double w_s = space_s.weight;
  sys.coupling_sm = [g_sm, generator_s, probe_m, w_m](const StateVector& other, double t) {
    const complexd expect = w_m * other.amplitudes.dot(probe_m * other.amplitudes);
    return Eigen::MatrixXcd(g_sm(t) * expect * generator_s);
  };
  sys.coupling_ms = [g_ms, generator_m, probe_s, w_s](const StateVector& other, double t) {
    const complexd expect = w_s * other.amplitudes.dot(probe_s * other.amplitudes);
    return Eigen::MatrixXcd(g_ms(t) * expect * generator_m);
  };
  return sys;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<double> norms;
  double dt = 0.0;
  double norm_drift = 0.0;  // max |norm(t_k) - norm(t_0)| over the run
  std::string integrator = "rk4-classic";
};

struct CoupledTrajectory {
  std::vector<double> times;
  std::vector<StateVector> states_s;
  std::vector<StateVector> states_m;
  std::vector<double> norms_s;
  std::vector<double> norms_m;
  double dt = 0.0;
  std::string integrator = "rk4-classic";
};

namespace detail {

inline void check_divergence(const Eigen::VectorXcd& v, std::size_t step) {
  if (!v.allFinite()) throw divergence_error("non-finite amplitude detected", step);
  if (v.size() != 0 && v.cwiseAbs().maxCoeff() > divergence_guard)
    throw divergence_error("amplitude magnitude exceeded divergence guard", step);
}

inline Eigen::MatrixXcd coupling_operator(const CouplingMap& map, const StateVector& other,
                                          double t, int expected_dim) {
  Eigen::MatrixXcd op = map(other, t);
  if (op.rows() != expected_dim || op.cols() != expected_dim)
    throw dimension_mismatch("coupling map returned a " + std::to_string(op.rows()) + "x" +
                             std::to_string(op.cols()) + " operator, expected dimension " +
                             std::to_string(expected_dim));
  return op;
}

}  // namespace detail

inline Trajectory propagate_linear(const LinearOperator& H, const StateVector& psi0, double dt,
                                   std::size_t steps) {
  detail::check_hermitian(H, "propagate_linear");
  if (!(dt > 0.0)) throw invalid_argument("propagate_linear: dt must be > 0");
  if (H.dim() != psi0.dim())
    throw dimension_mismatch("propagate_linear: operator/state dimensions differ");

  const complexd minus_i(0.0, -1.0);
  Trajectory traj;
  traj.dt = dt;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.norms.reserve(steps + 1);

  Eigen::VectorXcd y = psi0.amplitudes;
  auto record = [&](std::size_t k) {
    traj.times.push_back(dt * static_cast<double>(k));
    traj.states.push_back(StateVector{y, psi0.weight});
    traj.norms.push_back(traj.states.back().norm());
  };
  record(0);
  for (std::size_t k = 0; k < steps; ++k) {
    const Eigen::VectorXcd k1 = minus_i * (H.matrix * y);
    const Eigen::VectorXcd k2 = minus_i * (H.matrix * (y + 0.5 * dt * k1));
    const Eigen::VectorXcd k3 = minus_i * (H.matrix * (y + 0.5 * dt * k2));
    const Eigen::VectorXcd k4 = minus_i * (H.matrix * (y + dt * k3));
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    detail::check_divergence(y, k + 1);
    record(k + 1);
  }
  for (double n : traj.norms)
    traj.norm_drift = std::max(traj.norm_drift, std::abs(n - traj.norms.front()));
  return traj;
}

inline CoupledTrajectory propagate_coupled(const CoupledSystem& sys, const StateVector& psi0,
                                           const StateVector& phi0, double dt, std::size_t steps) {
  if (!(dt > 0.0)) throw invalid_argument("propagate_coupled: dt must be > 0");
  if (psi0.dim() != sys.space_s.dim || phi0.dim() != sys.space_m.dim)
    throw dimension_mismatch("propagate_coupled: initial states do not match system dimensions");

  const complexd minus_i(0.0, -1.0);
  const int ns = sys.space_s.dim;
  const int nm = sys.space_m.dim;

  CoupledTrajectory traj;
  traj.dt = dt;
  traj.times.reserve(steps + 1);

  Eigen::VectorXcd psi = psi0.amplitudes;
  Eigen::VectorXcd phi = phi0.amplitudes;
  auto record = [&](std::size_t k) {
    traj.times.push_back(dt * static_cast<double>(k));
    traj.states_s.push_back(StateVector{psi, sys.space_s.weight});
    traj.states_m.push_back(StateVector{phi, sys.space_m.weight});
    traj.norms_s.push_back(traj.states_s.back().norm());
    traj.norms_m.push_back(traj.states_m.back().norm());
  };
  // One joint RK stage: generators are rebuilt from the sub-stage states.
  auto stage = [&](const Eigen::VectorXcd& ps, const Eigen::VectorXcd& ph, double t,
                   Eigen::VectorXcd& dps, Eigen::VectorXcd& dph) {
    const StateVector ps_state{ps, sys.space_s.weight};
    const StateVector ph_state{ph, sys.space_m.weight};
    dps = minus_i * (detail::coupling_operator(sys.coupling_sm, ph_state, t, ns) * ps);
    dph = minus_i * (detail::coupling_operator(sys.coupling_ms, ps_state, t, nm) * ph);
  };

  record(0);
  Eigen::VectorXcd k1s(ns), k2s(ns), k3s(ns), k4s(ns);
  Eigen::VectorXcd k1m(nm), k2m(nm), k3m(nm), k4m(nm);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = dt * static_cast<double>(k);
    stage(psi, phi, t, k1s, k1m);
    stage(psi + 0.5 * dt * k1s, phi + 0.5 * dt * k1m, t + 0.5 * dt, k2s, k2m);
    stage(psi + 0.5 * dt * k2s, phi + 0.5 * dt * k2m, t + 0.5 * dt, k3s, k3m);
    stage(psi + dt * k3s, phi + dt * k3m, t + dt, k4s, k4m);
    psi += (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    phi += (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
    detail::check_divergence(psi, k + 1);
    detail::check_divergence(phi, k + 1);
    record(k + 1);
  }
  return traj;
}

// Normalized defect of the superposition principle for the S subsystem:
//   || psi_+(T) - psi_1(T) - psi_2(T) || / max(||psi_1(T)|| + ||psi_2(T)||, eps)
// where psi_+ evolves from psi1 + psi2 and all runs share phi0. Zero (to
// round-off) exactly when the S evolution is linear in psi.
inline double superposition_violation(const CoupledSystem& sys, const StateVector& psi1,
                                      const StateVector& psi2, const StateVector& phi0, double dt,
                                      std::size_t steps) {
  if (psi1.dim() != psi2.dim() || psi1.weight != psi2.weight)
    throw dimension_mismatch("superposition_violation: psi1/psi2 spaces differ");
  const StateVector sum{psi1.amplitudes + psi2.amplitudes, psi1.weight};
  const auto run1 = propagate_coupled(sys, psi1, phi0, dt, steps);
  const auto run2 = propagate_coupled(sys, psi2, phi0, dt, steps);
  const auto run_sum = propagate_coupled(sys, sum, phi0, dt, steps);
  const StateVector defect{run_sum.states_s.back().amplitudes - run1.states_s.back().amplitudes -
                               run2.states_s.back().amplitudes,
                           psi1.weight};
  const double denom = run1.norms_s.back() + run2.norms_s.back();
  return defect.norm() / std::max(denom, 1e-300);
}

// || evolve(c*psi0) - c*evolve(psi0) || for the S component, same phi0.
// Vanishes (within round-off) when the back-coupling L is identically zero.
inline double rescaling_inhomogeneity(const CoupledSystem& sys, const StateVector& psi0,
                                      const StateVector& phi0, complexd c, double dt,
                                      std::size_t steps) {
  if (c == complexd(0.0, 0.0)) throw invalid_argument("rescaling_inhomogeneity: c must be nonzero");
  const StateVector scaled{c * psi0.amplitudes, psi0.weight};
  const auto run_scaled = propagate_coupled(sys, scaled, phi0, dt, steps);
  const auto run_base = propagate_coupled(sys, psi0, phi0, dt, steps);
  const StateVector defect{
      run_scaled.states_s.back().amplitudes - c * run_base.states_s.back().amplitudes, psi0.weight};
  return defect.norm();
}

}  // namespace qduet
