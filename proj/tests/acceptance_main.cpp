// Acceptance gate: ten end-to-end checks with pinned tolerances, one PASS/FAIL
// line each. The first command-line argument is the path to the CLI binary
// (used by the determinism check). Exits nonzero if any check fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qduet/qduet.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using qduet::complexd;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", number, name.c_str(), detail.c_str());
  if (!pass) ++g_failures;
}

void run_criterion(int number, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(number, name, pass, detail);
  } catch (const std::exception& e) {
    report(number, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---- criterion 1: Born statistics ------------------------------------------

std::pair<bool, std::string> born_statistics() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m.diagonal() << 0.5, 1.5, 2.5, 3.5;
  const qduet::Observable obs = qduet::make_observable(qduet::make_operator(std::move(m), true));
  qduet::StateVector s{Eigen::VectorXcd(4), 1.0};
  s.amplitudes << std::sqrt(0.4), std::sqrt(0.3), complexd(0.0, std::sqrt(0.2)), -std::sqrt(0.1);

  const auto probs = qduet::born_probabilities(s, obs);
  double total = 0.0;
  for (const auto& [outcome, p] : probs) total += p;
  if (std::abs(total - 1.0) > 1e-10)
    return {false, "probabilities sum to " + fmt(total) + ", off by more than 1e-10"};

  const int draws = 100000;
  qduet::SeededRng rng(20240817);
  std::vector<int> counts(4, 0);
  for (int k = 0; k < draws; ++k) {
    const auto rec = qduet::sample_measurement(s, obs, rng);
    counts[static_cast<std::size_t>(rec.outcome - 0.5)] += 1;
  }
  double worst = 0.0;
  for (std::size_t g = 0; g < 4; ++g) {
    const double p = probs[g].second;
    const double sigma = std::sqrt(p * (1.0 - p) / draws);
    const double dev = std::abs(counts[g] / static_cast<double>(draws) - p) / sigma;
    worst = std::max(worst, dev);
  }
  return {worst < 3.0, "1e5 draws, worst deviation " + fmt(worst) + " sigma (limit 3)"};
}

// ---- criterion 2: collapse contract ----------------------------------------

std::pair<bool, std::string> collapse_contract() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m.diagonal() << 1.0, 1.0 + 5e-10, 2.0, 3.0;  // first two grouped at tol 1e-8
  const qduet::Observable obs = qduet::make_observable(qduet::make_operator(std::move(m), true));
  qduet::StateVector s{Eigen::VectorXcd(4), 1.0};
  s.amplitudes << complexd(0.3, 0.1), complexd(-0.2, 0.5), complexd(0.0, 0.4), 0.0;

  const qduet::StateVector once = qduet::collapse(s, obs, obs.outcomes[0]);
  if (std::abs(once.norm_sq() - 1.0) > 1e-12)
    return {false, "post-state norm^2 off by " + fmt(std::abs(once.norm_sq() - 1.0))};
  const qduet::StateVector twice = qduet::collapse(once, obs, obs.outcomes[0]);
  const double idem = (twice.amplitudes - once.amplitudes).norm();
  if (idem > 1e-12) return {false, "idempotence defect " + fmt(idem) + " > 1e-12"};

  bool rejected = false;
  try {
    (void)qduet::collapse(s, obs, 3.0);  // zero amplitude on that outcome
  } catch (const qduet::impossible_outcome&) {
    rejected = true;
  }
  if (!rejected) return {false, "zero-probability collapse was not rejected"};
  return {true, "idempotence " + fmt(idem) + " <= 1e-12, normalization exact, zero-p rejected"};
}

// ---- criterion 3: toy linear limit -----------------------------------------

std::pair<bool, std::string> toy_linear_limit() {
  const complexd expect = qduet::closed_form_b0(1.0, 2.0, 1.0, 1.0);
  const auto run = [&](double dt, std::size_t steps) {
    const auto traj = qduet::toy_propagate(qduet::make_toy_params(1.0, 0.0, 1.0, 2.0, dt, steps));
    return std::abs(traj.psi.back() - expect);
  };
  const double e_fine = run(1e-4, 10000);
  if (e_fine > 1e-8) return {false, "dt=1e-4 endpoint error " + fmt(e_fine) + " > 1e-8"};

  const double e1 = run(0.02, 50);
  const double e2 = run(0.01, 100);
  const double e3 = run(0.005, 200);
  const double r12 = e1 / e2;
  const double r23 = e2 / e3;
  const bool order = r12 > 11.2 && r12 < 20.8 && r23 > 11.2 && r23 < 20.8;
  return {order, "endpoint error " + fmt(e_fine) + " <= 1e-8; halving ratios " + fmt(r12) + ", " +
                     fmt(r23) + " in [11.2, 20.8]"};
}

// ---- criterion 4: integrability residual -----------------------------------

double max_abs(const std::vector<complexd>& v) {
  double m = 0.0;
  for (complexd z : v) m = std::max(m, std::abs(z));
  return m;
}

std::pair<bool, std::string> integrability_residual_check() {
  const auto fine = qduet::toy_propagate(qduet::make_toy_params(1.0, 1.0, 1.0, 1.0, 1e-3, 1000));
  const auto coarse = qduet::toy_propagate(qduet::make_toy_params(1.0, 1.0, 1.0, 1.0, 2e-3, 500));
  const double res_fine = max_abs(fine.residual);
  const double res_coarse = max_abs(coarse.residual);
  const double ratio = res_coarse / res_fine;
  if (ratio < 2.8 || ratio > 5.2)
    return {false, "halving ratio " + fmt(ratio) + " outside [2.8, 5.2]"};

  qduet::ToyTrajectory corrupted = fine;
  for (std::size_t k = 0; k < corrupted.psi.size(); ++k)
    corrupted.psi[k] *= 1.0 + 0.01 * corrupted.times[k];
  const double res_corrupted =
      max_abs(qduet::integrability_residual(corrupted, qduet::constant_coefficient(1.0), 1.0));
  const double gain = res_corrupted / res_fine;
  return {gain >= 100.0, "O(dt^2) ratio " + fmt(ratio) + " in [2.8, 5.2]; corruption gain " +
                             fmt(gain) + "x >= 100x"};
}

// ---- criterion 5: phi reconstruction ---------------------------------------

std::pair<bool, std::string> reconstruction_check() {
  const auto interior_error = [](double dt, std::size_t steps) {
    const auto traj = qduet::toy_propagate(qduet::make_toy_params(1.0, 1.0, 1.0, 1.0, dt, steps));
    const auto rec = qduet::reconstruct_phi(traj, qduet::constant_coefficient(1.0));
    double err = 0.0;
    for (std::size_t k = 1; k + 1 < rec.size(); ++k)
      err = std::max(err, std::abs(rec[k] - traj.phi[k]));
    return err;
  };
  const double err = interior_error(1e-3, 1000);
  const double err_coarse = interior_error(2e-3, 500);
  const bool fine_ok = err <= 5e-6;
  const bool order_ok = err_coarse <= std::max(5e-6, 5.2 * err);
  return {fine_ok && order_ok, "dt=1e-3 max error " + fmt(err) + " <= 5e-6; dt=2e-3 error " +
                                   fmt(err_coarse) + " consistent with O(dt^2)"};
}

// ---- criterion 6: superposition dichotomy ----------------------------------

std::pair<bool, std::string> superposition_dichotomy() {
  qduet::StateVector half{Eigen::VectorXcd(1), 1.0}, one{Eigen::VectorXcd(1), 1.0};
  half.amplitudes << 0.5;
  one.amplitudes << 1.0;
  const qduet::CoupledSystem lin = qduet::make_pointwise_system(qduet::StateSpace{1, 1.0},
                                                                complexd(1.0), complexd(0.0));
  const qduet::CoupledSystem nl = qduet::make_pointwise_system(qduet::StateSpace{1, 1.0},
                                                               complexd(1.0), complexd(1.0));
  const double v_lin = qduet::superposition_violation(lin, half, half, one, 1e-3, 1000);
  const double v_nl = qduet::superposition_violation(nl, half, half, one, 1e-3, 1000);
  const double r_lin = qduet::rescaling_inhomogeneity(lin, one, one, complexd(2.0, 0.0), 1e-3, 1000);
  const double r_nl = qduet::rescaling_inhomogeneity(nl, one, one, complexd(2.0, 0.0), 1e-3, 1000);
  const bool pass = v_lin <= 1e-10 && v_nl > 1e-6 && r_lin <= 1e-10 && r_nl > 1e-6;
  return {pass, "violation " + fmt(v_lin) + " <= 1e-10 (b=0) vs " + fmt(v_nl) +
                    " > 1e-6 (a=b=1); rescaling " + fmt(r_lin) + " vs " + fmt(r_nl)};
}

// ---- criterion 7: variational hierarchy ------------------------------------

std::pair<bool, std::string> variational_hierarchy() {
  const qduet::MoleculeParams p = qduet::baseline_molecule_params();
  const auto start = std::chrono::steady_clock::now();
  const auto [e_exact, ground] = qduet::exact_two_coordinate(p);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const qduet::ScfResult scf = qduet::scf_hartree(p, 1e-8, 50, 0.5);
  if (!scf.converged) return {false, "SCF failed to converge on the baseline grid"};
  const double gap = scf.E_total - e_exact;
  const bool strict = e_exact < scf.E_total;
  // Frozen regression gap from the first converged run of this configuration.
  const bool gap_ok = std::abs(gap - 6.073e-3) <= 2e-4;
  const bool time_ok = seconds <= 300.0;
  return {strict && gap_ok && time_ok,
          "E_exact " + fmt(e_exact) + " < E_SCF " + fmt(scf.E_total) + ", gap " + fmt(gap) +
              " within 6.073e-3 +- 2e-4, eigensolve " + fmt(seconds) + " s <= 300 s"};
}

// ---- criterion 8: molecular sanity -----------------------------------------

std::pair<bool, std::string> molecular_sanity() {
  const qduet::MoleculeParams p = qduet::baseline_molecule_params();
  const std::vector<double> rs = p.nuclear_grid.points();
  const qduet::BoCurve curve = qduet::bo_curve(p, rs);
  const auto it = std::min_element(curve.total_curve.begin(), curve.total_curve.end());
  const std::size_t kmin = static_cast<std::size_t>(it - curve.total_curve.begin());
  bool unique_min = kmin > 0 && kmin + 1 < rs.size();
  for (std::size_t j = 0; unique_min && j < kmin; ++j)
    unique_min = curve.total_curve[j] > curve.total_curve[j + 1];
  for (std::size_t j = kmin; unique_min && j + 1 < rs.size(); ++j)
    unique_min = curve.total_curve[j] < curve.total_curve[j + 1];
  if (!unique_min) return {false, "BO total curve has no unique interior minimum"};

  // Tail on a wide grid, compared against the same-grid single-well energy.
  qduet::MoleculeParams wide;
  wide.electron_grid = qduet::make_uniform_grid(301, -30.0, 30.0);
  qduet::LinearOperator single = qduet::build_kinetic(wide.electron_grid, 1.0);
  for (int i = 0; i < wide.electron_grid.n; ++i) {
    const double x = wide.electron_grid.point(i);
    single.matrix(i, i) += -1.0 / std::sqrt(x * x + 1.0);
  }
  const double e_atom = qduet::ground_state(single).first;
  const qduet::BoCurve tail = qduet::bo_curve(wide, {25.0});
  const double gap25 = std::abs(tail.total_curve[0] - e_atom);
  if (gap25 >= 2e-3) return {false, "tail gap at r=25 is " + fmt(gap25) + " >= 2e-3"};

  const qduet::ScfResult scf = qduet::scf_hartree(p, 1e-8, 50, 0.5);
  if (!scf.converged || scf.iterations > 50)
    return {false, "SCF did not converge within 50 iterations"};

  qduet::MoleculeParams heavy = p;
  heavy.M = 400.0;
  const qduet::ScfResult heavy_scf = qduet::scf_hartree(heavy, 1e-8, 80, 0.5);
  if (!heavy_scf.converged) return {false, "M=400 SCF did not converge"};
  const double drift = std::abs(heavy_scf.R_expectation - rs[kmin]);
  return {drift <= 0.2, "unique minimum at r=" + fmt(rs[kmin]) + "; tail gap " + fmt(gap25) +
                            " < 2e-3; SCF " + std::to_string(scf.iterations) +
                            " iterations <= 50; |R - r*| = " + fmt(drift) + " <= 0.2 at M=400"};
}

// ---- criterion 9: exact-description linearity ------------------------------

std::pair<bool, std::string> exact_linearity() {
  const qduet::MoleculeParams p = qduet::baseline_molecule_params();
  const auto apply = qduet::exact_hamiltonian_apply(p);
  const int dim = p.electron_grid.n * p.nuclear_grid.n;

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd a(dim), b(dim);
  for (int i = 0; i < dim; ++i) {
    a[i] = u(gen);
    b[i] = u(gen);
  }
  Eigen::VectorXd ha(dim), hb(dim), hsum(dim);
  apply(a, ha);
  apply(b, hb);
  apply(a + b, hsum);
  const double defect = (hsum - ha - hb).cwiseAbs().maxCoeff();
  const double scale = std::max(ha.cwiseAbs().maxCoeff() + hb.cwiseAbs().maxCoeff(), 1.0);
  const double rel = defect / scale;
  return {rel <= 1e-14, "H(a+b) - Ha - Hb relative defect " + fmt(rel) + " <= 1e-14"};
}

// ---- criterion 10: CLI determinism -----------------------------------------

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Byte comparison for data files; manifests compared with duration_ms masked
// (wall-clock time is the one legitimately varying field).
bool outputs_identical(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(a)) names.push_back(entry.path().filename());
  std::size_t b_count = 0;
  for (const auto& entry : fs::directory_iterator(b)) {
    (void)entry;
    ++b_count;
  }
  if (names.size() != b_count) {
    why = "file counts differ";
    return false;
  }
  for (const auto& name : names) {
    if (!fs::exists(b / name)) {
      why = name.string() + " missing from second run";
      return false;
    }
    if (name == "manifest.json") {
      json ma = json::parse(read_text(a / name));
      json mb = json::parse(read_text(b / name));
      ma["duration_ms"] = 0.0;
      mb["duration_ms"] = 0.0;
      if (ma != mb) {
        why = "manifests differ beyond duration_ms";
        return false;
      }
    } else if (read_text(a / name) != read_text(b / name)) {
      why = name.string() + " differs between runs";
      return false;
    }
  }
  return true;
}

std::pair<bool, std::string> cli_determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() /
                        ("qduet_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);

  struct Run {
    std::string name;
    std::string subcommand;
    json config;
  };
  const std::vector<Run> runs = {
      {"toy-run", "toy run",
       {{"kind", "toy-run"}, {"a", 1.0}, {"b", json::array({1.0, 0.0})}, {"psi0", 1.0},
        {"phi0", 1.0}, {"dt", 1e-3}, {"steps", 100}}},
      {"toy-scan", "toy scan",
       {{"kind", "toy-scan"}, {"a", 1.0}, {"psi0", 1.0}, {"phi0", 1.0}, {"dt", 1e-2},
        {"steps", 50}, {"b_values", json::array({0.0, 0.5, 1.0})}}},
      {"coupled-run", "coupled",
       {{"kind", "coupled-run"}, {"coupling", "pointwise-product"}, {"dim_s", 2}, {"dim_m", 2},
        {"a", 1.0}, {"b", json::array({0.5, 0.1})},
        {"psi0", json::array({1.0, json::array({0.0, 0.5})})},
        {"phi0", json::array({0.5, 1.0})}, {"dt", 1e-2}, {"steps", 50}}},
      {"molecule-bo", "molecule bo",
       {{"kind", "molecule-bo"}, {"electron_n", 32}, {"electron_xmin", -10.0},
        {"electron_xmax", 10.0}, {"s_e", 1.0}, {"s_n", 1.0}, {"r_min", 0.5}, {"r_max", 6.0},
        {"r_count", 5}}},
      {"molecule-scf", "molecule scf",
       {{"kind", "molecule-scf"}, {"electron_n", 24}, {"electron_xmin", -10.0},
        {"electron_xmax", 10.0}, {"nuclear_n", 24}, {"nuclear_rmin", 0.3}, {"nuclear_rmax", 8.0},
        {"M", 100.0}, {"s_e", 1.0}, {"s_n", 1.0}, {"tol", 1e-8}, {"max_iter", 80},
        {"mixing", 0.5}}},
      {"molecule-exact", "molecule exact",
       {{"kind", "molecule-exact"}, {"electron_n", 16}, {"electron_xmin", -8.0},
        {"electron_xmax", 8.0}, {"nuclear_n", 16}, {"nuclear_rmin", 0.5}, {"nuclear_rmax", 6.0},
        {"M", 100.0}, {"s_e", 1.0}, {"s_n", 1.0}}},
      {"measure-sample", "measure",
       {{"kind", "measure-sample"}, {"diag", json::array({0.0, 1.0, 2.0})},
        {"state", json::array({0.5, 0.5, json::array({0.5, 0.5})})}, {"draws", 100},
        {"seed", 31415}}},
  };

  for (const auto& run : runs) {
    const fs::path cfg = root / (run.name + ".json");
    std::ofstream(cfg) << run.config.dump();
    const fs::path out_a = root / (run.name + "_a");
    const fs::path out_b = root / (run.name + "_b");
    const int code_a =
        run_cli(cli, run.subcommand + " --config " + cfg.string() + " --output " + out_a.string());
    const int code_b =
        run_cli(cli, run.subcommand + " --config " + cfg.string() + " --output " + out_b.string());
    if (code_a < 0 || code_a != code_b)
      return {false, run.name + ": exit codes " + std::to_string(code_a) + " vs " +
                         std::to_string(code_b)};
    if (code_a != 0 && code_a != 3)
      return {false, run.name + ": unexpected exit code " + std::to_string(code_a)};
    std::string why;
    if (!outputs_identical(out_a, out_b, why)) return {false, run.name + ": " + why};
  }
  fs::remove_all(root);
  return {true, std::to_string(runs.size()) + " kinds, repeated runs byte-identical "
                "(manifest duration_ms masked)"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: qduet_acceptance <path-to-cli-binary>\n";
    return 2;
  }
  const std::string cli = argv[1];

  run_criterion(1, "Born statistics", born_statistics);
  run_criterion(2, "Collapse contract", collapse_contract);
  run_criterion(3, "Toy linear limit", toy_linear_limit);
  run_criterion(4, "Integrability residual", integrability_residual_check);
  run_criterion(5, "Phi reconstruction", reconstruction_check);
  run_criterion(6, "Superposition dichotomy", superposition_dichotomy);
  run_criterion(7, "Variational hierarchy", variational_hierarchy);
  run_criterion(8, "Molecular sanity", molecular_sanity);
  run_criterion(9, "Exact-description linearity", exact_linearity);
  run_criterion(10, "CLI determinism", [&] { return cli_determinism(cli); });

  if (g_failures > 0) {
    std::printf("%d of 10 acceptance criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all 10 acceptance criteria passed\n");
  return 0;
}
