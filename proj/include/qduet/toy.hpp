#pragma once

// Exactly analyzable scalar pair (hbar = 1):
//   i psi'(t) = a(t) phi(t) psi(t)
//   i phi'(t) = b      psi(t) phi(t)
// For b = 0, phi is frozen and psi(t) = exp(-i t a phi0) psi0 in closed form.
// Because psi alone determines phi through the first equation,
//   phi(t) = (i / a(t)) d/dt ln psi(t),
// and eliminating phi gives the second-order integrability condition
//   i [ psi psi'' - (psi')^2 - (a'/a) psi psi' ] = b psi^2 psi',
// which is evaluated here as a finite-difference residual along trajectories.
// Note the 1/a factor in the reconstruction: it is required for consistency
// with the first-order equation (at a = 1 it drops out).

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "dynamics.hpp"
#include "errors.hpp"

namespace qduet {

struct ToyParams {
  Coefficient a;  // coupling multiplying phi in the psi equation
  complexd b = 0.0;
  complexd psi0 = 1.0;
  complexd phi0 = 1.0;
  double dt = 1e-3;
  std::size_t steps = 1000;
};

inline ToyParams make_toy_params(complexd a, complexd b, complexd psi0, complexd phi0, double dt,
                                 std::size_t steps) {
  return ToyParams{constant_coefficient(a), b, psi0, phi0, dt, steps};
}

struct ToyTrajectory {
  std::vector<double> times;
  std::vector<complexd> psi;
  std::vector<complexd> phi;
  // Integrability-condition residual per sample; central differences need both
  // neighbors, so the two endpoint entries are zero by convention.
  std::vector<complexd> residual;
};

inline complexd closed_form_b0(complexd a, complexd phi0, complexd psi0, double t) {
  const complexd i_unit(0.0, 1.0);
  return std::exp(-i_unit * t * a * phi0) * psi0;
}

inline std::vector<complexd> integrability_residual(const ToyTrajectory& traj,
                                                    const Coefficient& a, complexd b) {
  const std::size_t n = traj.psi.size();
  if (n < 5)
    throw invalid_argument("integrability_residual: need at least 5 samples, got " +
                           std::to_string(n));
  const double dt = traj.times[1] - traj.times[0];
  const complexd i_unit(0.0, 1.0);
  std::vector<complexd> res(n, complexd(0.0, 0.0));
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const complexd ps = traj.psi[k];
    const complexd d1 = (traj.psi[k + 1] - traj.psi[k - 1]) / (2.0 * dt);
    const complexd d2 = (traj.psi[k + 1] - 2.0 * ps + traj.psi[k - 1]) / (dt * dt);
    const complexd ak = a(traj.times[k]);
    if (std::abs(ak) <= 1e-12)
      throw invalid_argument("integrability_residual: a(t) vanishes at t = " +
                             std::to_string(traj.times[k]));
    // Central difference of the sampled coefficient; exactly zero for constant a.
    const complexd aprime = (a(traj.times[k + 1]) - a(traj.times[k - 1])) / (2.0 * dt);
    const complexd lhs = i_unit * (ps * d2 - d1 * d1 - (aprime / ak) * ps * d1);
    const complexd rhs = b * ps * ps * d1;
    res[k] = lhs - rhs;
  }
  return res;
}

inline ToyTrajectory toy_propagate(const ToyParams& p) {
  if (!(p.dt > 0.0)) throw invalid_argument("toy_propagate: dt must be > 0");
  if (p.steps < 1) throw invalid_argument("toy_propagate: steps must be >= 1");
  if (!p.a) throw invalid_argument("toy_propagate: coefficient a is empty");

  const complexd i_unit(0.0, 1.0);
  ToyTrajectory traj;
  traj.times.reserve(p.steps + 1);
  traj.psi.reserve(p.steps + 1);
  traj.phi.reserve(p.steps + 1);

  complexd psi = p.psi0;
  complexd phi = p.phi0;
  auto record = [&](std::size_t k) {
    traj.times.push_back(p.dt * static_cast<double>(k));
    traj.psi.push_back(psi);
    traj.phi.push_back(phi);
  };
  auto deriv = [&](complexd ps, complexd ph, double t, complexd& dps, complexd& dph) {
    dps = -i_unit * p.a(t) * ph * ps;
    dph = -i_unit * p.b * ps * ph;
  };
  record(0);
  for (std::size_t k = 0; k < p.steps; ++k) {
    const double t = p.dt * static_cast<double>(k);
    complexd k1p, k1f, k2p, k2f, k3p, k3f, k4p, k4f;
    deriv(psi, phi, t, k1p, k1f);
    deriv(psi + 0.5 * p.dt * k1p, phi + 0.5 * p.dt * k1f, t + 0.5 * p.dt, k2p, k2f);
    deriv(psi + 0.5 * p.dt * k2p, phi + 0.5 * p.dt * k2f, t + 0.5 * p.dt, k3p, k3f);
    deriv(psi + p.dt * k3p, phi + p.dt * k3f, t + p.dt, k4p, k4f);
    psi += (p.dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    phi += (p.dt / 6.0) * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    if (!std::isfinite(psi.real()) || !std::isfinite(psi.imag()) || !std::isfinite(phi.real()) ||
        !std::isfinite(phi.imag()))
      throw divergence_error("toy propagation produced non-finite values", k + 1);
    if (std::abs(psi) > divergence_guard || std::abs(phi) > divergence_guard)
      throw divergence_error("toy propagation exceeded divergence guard", k + 1);
    record(k + 1);
  }
  // The residual diagnostic divides by a(t); where the coefficient vanishes
  // psi has zero drift and the diagnostic is left at its limiting value zero.
  bool coefficient_bounded = true;
  for (double t : traj.times) {
    if (std::abs(p.a(t)) <= 1e-12) {
      coefficient_bounded = false;
      break;
    }
  }
  if (coefficient_bounded && traj.psi.size() >= 5)
    traj.residual = integrability_residual(traj, p.a, p.b);
  else
    traj.residual.assign(traj.psi.size(), complexd(0.0, 0.0));
  return traj;
}

// phi(t) = (i / a(t)) d/dt ln psi, with the log-derivative taken as the
// central difference log(psi_{k+1}/psi_{k-1}) / (2 dt) (branch-safe per step);
// endpoints use one-sided ratios.
inline std::vector<complexd> reconstruct_phi(const ToyTrajectory& traj, const Coefficient& a) {
  const std::size_t n = traj.psi.size();
  if (n < 2) throw invalid_argument("reconstruct_phi: need at least 2 samples");
  const double dt = traj.times[1] - traj.times[0];
  const complexd i_unit(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(traj.psi[k]) <= 1e-12)
      throw singular_reconstruction("reconstruct_phi: |psi| below 1e-12", k);
    if (std::abs(a(traj.times[k])) <= 1e-12)
      throw singular_reconstruction("reconstruct_phi: |a| below 1e-12", k);
  }
  std::vector<complexd> rec(n);
  auto log_ratio = [](complexd num, complexd den) { return std::log(num / den); };
  rec[0] = i_unit * log_ratio(traj.psi[1], traj.psi[0]) / (dt * a(traj.times[0]));
  for (std::size_t k = 1; k + 1 < n; ++k)
    rec[k] = i_unit * log_ratio(traj.psi[k + 1], traj.psi[k - 1]) / (2.0 * dt * a(traj.times[k]));
  rec[n - 1] =
      i_unit * log_ratio(traj.psi[n - 1], traj.psi[n - 2]) / (dt * a(traj.times[n - 1]));
  return rec;
}

}  // namespace qduet
