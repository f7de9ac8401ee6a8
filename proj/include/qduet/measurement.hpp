#pragma once

// Projective measurement: spectral decomposition with eigenvalue grouping,
// Born-rule probabilities, collapse onto a grouped eigenspace, and seeded
// sampling of outcomes (Born 1926 statistical interpretation; von Neumann
// projection postulate).
//
// Degenerate or near-degenerate eigenvalues are merged by chain grouping:
// ascending eigenvalues whose successive gaps are <= group_tol share one
// outcome (the group mean) and one summed projector, so distinct outcomes
// always differ by more than group_tol.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hilbert.hpp"
#include "rng.hpp"

namespace qduet {

inline constexpr double default_group_tol = 1e-8;

// Probabilities below this (after norm division) count as impossible outcomes;
// separates true zero amplitude from round-off.
inline constexpr double collapse_floor = 1e-14;

struct Observable {
  LinearOperator op;
  std::vector<double> outcomes;                // grouped eigenvalues, ascending
  std::vector<Eigen::MatrixXcd> projectors;    // one per outcome; sum to identity
  double group_tol = default_group_tol;
};

struct MeasurementRecord {
  double outcome = 0.0;
  double probability = 0.0;
  StateVector post_state;
  std::uint64_t rng_seed = 0;
};

inline Observable make_observable(const LinearOperator& op, double group_tol = default_group_tol) {
  if (!(group_tol > 0.0)) throw invalid_argument("make_observable: group_tol must be > 0");
  const int n = op.dim();
  auto pairs = eigh(op, n);  // validates Hermiticity

  Observable obs;
  obs.op = op;
  obs.group_tol = group_tol;
  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && pairs[static_cast<std::size_t>(stop)].first -
                               pairs[static_cast<std::size_t>(stop - 1)].first <=
                           group_tol)
      ++stop;
    double mean = 0.0;
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(n, n);
    for (int i = start; i < stop; ++i) {
      const auto& [value, vec] = pairs[static_cast<std::size_t>(i)];
      mean += value;
      proj.noalias() += op.weight * (vec.amplitudes * vec.amplitudes.adjoint());
    }
    obs.outcomes.push_back(mean / (stop - start));
    obs.projectors.push_back(std::move(proj));
    start = stop;
  }
  return obs;
}

namespace detail {

inline double outcome_probability(const StateVector& state, const Observable& obs,
                                  std::size_t group) {
  const StateVector projected{obs.projectors[group] * state.amplitudes, state.weight};
  const double p = std::real(inner(state, projected)) / state.norm_sq();
  return std::clamp(p, 0.0, 1.0);
}

inline std::size_t find_group(const Observable& obs, double outcome) {
  std::size_t best = 0;
  double best_dist = std::abs(outcome - obs.outcomes[0]);
  for (std::size_t g = 1; g < obs.outcomes.size(); ++g) {
    const double d = std::abs(outcome - obs.outcomes[g]);
    if (d < best_dist) {
      best_dist = d;
      best = g;
    }
  }
  if (best_dist > obs.group_tol)
    throw invalid_argument("unknown measurement outcome " + std::to_string(outcome));
  return best;
}

}  // namespace detail

inline std::vector<std::pair<double, double>> born_probabilities(const StateVector& state,
                                                                 const Observable& obs) {
  if (state.dim() != obs.op.dim())
    throw dimension_mismatch("born_probabilities: state/observable dimensions differ");
  if (!(state.norm_sq() > 0.0)) throw invalid_argument("born_probabilities: zero-norm state");
  std::vector<std::pair<double, double>> result;
  result.reserve(obs.outcomes.size());
  for (std::size_t g = 0; g < obs.outcomes.size(); ++g)
    result.emplace_back(obs.outcomes[g], detail::outcome_probability(state, obs, g));
  return result;
}

inline StateVector collapse(const StateVector& state, const Observable& obs, double outcome) {
  if (state.dim() != obs.op.dim())
    throw dimension_mismatch("collapse: state/observable dimensions differ");
  if (!(state.norm_sq() > 0.0)) throw invalid_argument("collapse: zero-norm state");
  const std::size_t g = detail::find_group(obs, outcome);
  if (detail::outcome_probability(state, obs, g) <= collapse_floor)
    throw impossible_outcome("collapse onto outcome " + std::to_string(outcome) +
                             " with numerically zero probability");
  StateVector post{obs.projectors[g] * state.amplitudes, state.weight};
  post.amplitudes /= post.norm();
  detail::fix_phase(post.amplitudes);
  return post;
}

// Draws one outcome by inverse CDF over outcomes in ascending eigenvalue order,
// then collapses. Identical seed => identical record.
inline MeasurementRecord sample_measurement(const StateVector& state, const Observable& obs,
                                            SeededRng& rng) {
  const auto probs = born_probabilities(state, obs);
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t picked = probs.size() - 1;
  for (std::size_t g = 0; g < probs.size(); ++g) {
    cumulative += probs[g].second;
    if (u < cumulative) {
      picked = g;
      break;
    }
  }
  MeasurementRecord record;
  record.outcome = probs[picked].first;
  record.probability = probs[picked].second;
  record.post_state = collapse(state, obs, record.outcome);
  record.rng_seed = rng.seed();
  return record;
}

}  // namespace qduet
