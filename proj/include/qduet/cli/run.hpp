#pragma once

// Run dispatcher: turns a validated RunConfig into data tables, serializes
// them in the requested format, and writes them plus a manifest into the
// output directory. Computation happens before any file is touched, so a
// thrown error never leaves partial data behind; each write itself goes
// through a temp file + rename.
//
// Exit codes: 0 success, 1 validation error (handled by the caller before
// execution), 2 numerical divergence, 3 self-consistency loop that ran out
// of iterations (outputs still written in full).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "../dynamics.hpp"
#include "../measurement.hpp"
#include "../molecule.hpp"
#include "../rng.hpp"
#include "../toy.hpp"
#include "../version.hpp"
#include "config.hpp"
#include "output.hpp"

namespace qduet::cli {

struct RunResult {
  std::vector<DataTable> tables;
  bool converged = true;
  int exit_code = 0;
};

namespace detail {

inline std::string indexed_name(const std::string& stem, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%03zu", index);
  return stem + buf;
}

inline DataTable toy_table(std::string name, const ToyTrajectory& traj) {
  DataTable table{std::move(name),
                  {"t", "psi_re", "psi_im", "phi_re", "phi_im", "residual_abs"},
                  {}};
  table.rows.reserve(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    table.rows.push_back({traj.times[k], traj.psi[k].real(), traj.psi[k].imag(),
                          traj.phi[k].real(), traj.phi[k].imag(), std::abs(traj.residual[k])});
  return table;
}

inline bool hermitian_within_roundoff(const Eigen::MatrixXcd& m) {
  return qduet::detail::hermiticity_defect(m) <= 1e-12 * std::max(qduet::detail::max_abs(m), 1.0);
}

inline RunResult execute_toy_run(const ToyRunConfig& c) {
  const ToyTrajectory traj = toy_propagate(make_toy_params(c.a, c.b, c.psi0, c.phi0, c.dt, c.steps));
  RunResult result;
  result.tables.push_back(toy_table("toy_run", traj));
  return result;
}

inline RunResult execute_toy_scan(const ToyScanConfig& c) {
  RunResult result;
  for (std::size_t i = 0; i < c.b_values.size(); ++i) {
    const ToyTrajectory traj =
        toy_propagate(make_toy_params(c.a, c.b_values[i], c.psi0, c.phi0, c.dt, c.steps));
    result.tables.push_back(toy_table(indexed_name("toy_scan", i), traj));
  }
  return result;
}

inline RunResult execute_coupled_run(const CoupledRunConfig& c) {
  CoupledSystem sys;
  if (c.coupling == CouplingKind::pointwise_product) {
    sys = make_pointwise_system(StateSpace{c.dim_s, 1.0}, c.a, c.b);
  } else {
    const bool herm_sm = c.a.imag() == 0.0 && hermitian_within_roundoff(c.generator_s) &&
                         hermitian_within_roundoff(c.probe_m);
    const bool herm_ms = c.b.imag() == 0.0 && hermitian_within_roundoff(c.generator_m) &&
                         hermitian_within_roundoff(c.probe_s);
    sys = make_expectation_bilinear_system(StateSpace{c.dim_s, 1.0}, StateSpace{c.dim_m, 1.0},
                                           constant_coefficient(c.a), c.generator_s, c.probe_m,
                                           constant_coefficient(c.b), c.generator_m, c.probe_s,
                                           herm_sm, herm_ms);
  }
  const CoupledTrajectory traj = propagate_coupled(sys, StateVector{c.psi0, 1.0},
                                                   StateVector{c.phi0, 1.0}, c.dt, c.steps);

  DataTable table{"coupled_run", {"t"}, {}};
  for (int i = 0; i < c.dim_s; ++i) {
    table.columns.push_back("psi" + std::to_string(i) + "_re");
    table.columns.push_back("psi" + std::to_string(i) + "_im");
  }
  for (int j = 0; j < c.dim_m; ++j) {
    table.columns.push_back("phi" + std::to_string(j) + "_re");
    table.columns.push_back("phi" + std::to_string(j) + "_im");
  }
  table.columns.push_back("norm_s");
  table.columns.push_back("norm_m");
  table.rows.reserve(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<double> row;
    row.reserve(table.columns.size());
    row.push_back(traj.times[k]);
    for (int i = 0; i < c.dim_s; ++i) {
      row.push_back(traj.states_s[k].amplitudes[i].real());
      row.push_back(traj.states_s[k].amplitudes[i].imag());
    }
    for (int j = 0; j < c.dim_m; ++j) {
      row.push_back(traj.states_m[k].amplitudes[j].real());
      row.push_back(traj.states_m[k].amplitudes[j].imag());
    }
    row.push_back(traj.norms_s[k]);
    row.push_back(traj.norms_m[k]);
    table.rows.push_back(std::move(row));
  }
  RunResult result;
  result.tables.push_back(std::move(table));
  return result;
}

inline RunResult execute_molecule_bo(const MoleculeBoConfig& c) {
  MoleculeParams p;
  p.electron_grid = make_uniform_grid(c.electron_n, c.electron_xmin, c.electron_xmax);
  p.s_e = c.s_e;
  p.s_n = c.s_n;
  std::vector<double> r_values(static_cast<std::size_t>(c.r_count));
  const double step = (c.r_max - c.r_min) / static_cast<double>(c.r_count - 1);
  for (int i = 0; i < c.r_count; ++i)
    r_values[static_cast<std::size_t>(i)] = c.r_min + step * static_cast<double>(i);
  r_values.back() = c.r_max;
  const BoCurve curve = bo_curve(p, r_values);

  DataTable table{"molecule_bo", {"r", "electronic_energy", "total_energy"}, {}};
  table.rows.reserve(curve.separations.size());
  for (std::size_t k = 0; k < curve.separations.size(); ++k)
    table.rows.push_back({curve.separations[k], curve.electronic_energy[k], curve.total_curve[k]});
  RunResult result;
  result.tables.push_back(std::move(table));
  return result;
}

inline RunResult execute_molecule_scf(const MoleculeScfConfig& c) {
  const ScfResult scf = scf_hartree(c.params, c.tol, c.max_iter, c.mixing);
  DataTable table{"molecule_scf", {"iteration", "R", "E_total", "delta"}, {}};
  table.rows.reserve(scf.history.size());
  for (std::size_t k = 0; k < scf.history.size(); ++k)
    table.rows.push_back({static_cast<double>(k + 1), scf.history[k].R, scf.history[k].E_total,
                          scf.history[k].delta});
  RunResult result;
  result.tables.push_back(std::move(table));
  result.converged = scf.converged;
  result.exit_code = scf.converged ? 0 : 3;
  return result;
}

inline RunResult execute_molecule_exact(const MoleculeExactConfig& c) {
  const auto [energy, ground] = exact_two_coordinate(c.params);
  (void)ground;
  RunResult result;
  result.tables.push_back(DataTable{"molecule_exact", {"E_exact"}, {{energy}}});
  return result;
}

inline RunResult execute_measure_sample(const MeasureSampleConfig& c) {
  const int dim = static_cast<int>(c.diag.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) m(i, i) = c.diag[static_cast<std::size_t>(i)];
  const Observable obs = make_observable(make_operator(std::move(m), true), c.group_tol);
  StateVector state{Eigen::VectorXcd(dim), 1.0};
  for (int i = 0; i < dim; ++i) state.amplitudes[i] = c.state[static_cast<std::size_t>(i)];

  SeededRng rng(c.seed);
  DataTable table{"measure_sample", {"draw", "outcome", "probability"}, {}};
  table.rows.reserve(c.draws);
  for (std::size_t d = 0; d < c.draws; ++d) {
    const MeasurementRecord record = sample_measurement(state, obs, rng);
    table.rows.push_back({static_cast<double>(d), record.outcome, record.probability});
  }
  RunResult result;
  result.tables.push_back(std::move(table));
  return result;
}

}  // namespace detail

// Pure computation; file I/O happens in run_to_directory.
inline RunResult execute(const RunConfig& cfg) {
  switch (cfg.kind) {
    case RunKind::toy_run:
      return detail::execute_toy_run(std::get<ToyRunConfig>(cfg.params));
    case RunKind::toy_scan:
      return detail::execute_toy_scan(std::get<ToyScanConfig>(cfg.params));
    case RunKind::coupled_run:
      return detail::execute_coupled_run(std::get<CoupledRunConfig>(cfg.params));
    case RunKind::molecule_bo:
      return detail::execute_molecule_bo(std::get<MoleculeBoConfig>(cfg.params));
    case RunKind::molecule_scf:
      return detail::execute_molecule_scf(std::get<MoleculeScfConfig>(cfg.params));
    case RunKind::molecule_exact:
      return detail::execute_molecule_exact(std::get<MoleculeExactConfig>(cfg.params));
    case RunKind::measure_sample:
      return detail::execute_measure_sample(std::get<MeasureSampleConfig>(cfg.params));
  }
  throw invalid_argument("unhandled experiment kind");
}

inline json make_manifest(const json& config_echo, double duration_ms, bool converged,
                          const std::string& checksum) {
  json manifest;
  manifest["config"] = config_echo;
  manifest["version"] = version;
  manifest["duration_ms"] = duration_ms;
  manifest["converged"] = converged;
  manifest["checksum_sha256"] = checksum;
  return manifest;
}

// Written when execution aborts on a numerical failure: no data files, the
// checksum covers the (empty) payload, converged = false.
inline void write_failure_manifest(const json& config_echo, const std::filesystem::path& out_dir,
                                   double duration_ms) {
  const json manifest = make_manifest(config_echo, duration_ms, false, sha256_hex(""));
  std::filesystem::create_directories(out_dir);
  atomic_write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

inline int run_to_directory(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  const RunResult result = execute(cfg);

  const std::string ext = cfg.output_format == "json" ? ".json" : ".csv";
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  std::string concatenated;
  files.reserve(result.tables.size());
  for (const DataTable& table : result.tables) {
    std::string payload = cfg.output_format == "json" ? render_json(table) : render_csv(table);
    concatenated += payload;
    files.emplace_back(out_dir / (table.name + ext), std::move(payload));
  }
  const std::string checksum = sha256_hex(concatenated);

  std::filesystem::create_directories(out_dir);
  for (const auto& [path, payload] : files) {
    atomic_write_file(path, payload);
    log_line(LogLevel::debug, "wrote " + path.string() + " (" + std::to_string(payload.size()) +
                                  " bytes)");
  }
  const double duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const json manifest = make_manifest(cfg.echo, duration_ms, result.converged, checksum);
  atomic_write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  log_line(LogLevel::info, std::string(kind_name(cfg.kind)) + ": " +
                               std::to_string(files.size()) + " data file(s), converged=" +
                               (result.converged ? "true" : "false") + ", sha256=" +
                               checksum.substr(0, 12));
  return result.exit_code;
}

}  // namespace qduet::cli
