#pragma once

// Strict JSON run configuration: every kind has a fixed key set, unknown keys
// are rejected by name, all numeric ranges are validated before any
// computation starts, and the parsed config echoes back in canonical form
// (complex values as [re, im], defaults materialized) so that
// load -> echo -> reload is the identity.

#include <json.hpp>

#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "../dynamics.hpp"
#include "../errors.hpp"
#include "../hilbert.hpp"
#include "../measurement.hpp"
#include "../molecule.hpp"

namespace qduet::cli {

using json = nlohmann::ordered_json;

enum class RunKind {
  toy_run,
  toy_scan,
  coupled_run,
  molecule_bo,
  molecule_scf,
  molecule_exact,
  measure_sample,
};

inline const char* kind_name(RunKind k) {
  switch (k) {
    case RunKind::toy_run: return "toy-run";
    case RunKind::toy_scan: return "toy-scan";
    case RunKind::coupled_run: return "coupled-run";
    case RunKind::molecule_bo: return "molecule-bo";
    case RunKind::molecule_scf: return "molecule-scf";
    case RunKind::molecule_exact: return "molecule-exact";
    case RunKind::measure_sample: return "measure-sample";
  }
  return "?";
}

inline std::optional<RunKind> parse_kind(const std::string& name) {
  for (RunKind k : {RunKind::toy_run, RunKind::toy_scan, RunKind::coupled_run, RunKind::molecule_bo,
                    RunKind::molecule_scf, RunKind::molecule_exact, RunKind::measure_sample})
    if (name == kind_name(k)) return k;
  return std::nullopt;
}

struct ToyRunConfig {
  complexd a, b, psi0, phi0;
  double dt = 0.0;
  std::size_t steps = 0;
};

struct ToyScanConfig {
  complexd a, psi0, phi0;
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<complexd> b_values;
};

struct CoupledRunConfig {
  CouplingKind coupling = CouplingKind::pointwise_product;
  int dim_s = 1, dim_m = 1;
  complexd a, b;
  Eigen::MatrixXcd generator_s, probe_m, generator_m, probe_s;  // expectation-bilinear only
  Eigen::VectorXcd psi0, phi0;
  double dt = 0.0;
  std::size_t steps = 0;
};

struct MoleculeBoConfig {
  int electron_n = 0;
  double electron_xmin = 0.0, electron_xmax = 0.0;
  double s_e = 1.0, s_n = 1.0;
  double r_min = 0.0, r_max = 0.0;
  int r_count = 0;
};

struct MoleculeScfConfig {
  MoleculeParams params;
  double tol = 0.0;
  std::size_t max_iter = 0;
  double mixing = 0.0;
};

struct MoleculeExactConfig {
  MoleculeParams params;
};

struct MeasureSampleConfig {
  std::vector<double> diag;
  std::vector<complexd> state;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
  double group_tol = default_group_tol;
};

struct RunConfig {
  RunKind kind = RunKind::toy_run;
  std::string output_format = "csv";  // "csv" or "json"
  std::variant<ToyRunConfig, ToyScanConfig, CoupledRunConfig, MoleculeBoConfig, MoleculeScfConfig,
               MoleculeExactConfig, MeasureSampleConfig>
      params;
  json echo;  // canonical materialized form; reloading it reproduces this config
};

namespace detail {

inline void require_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::set<std::string>& required) {
  for (const auto& item : obj.items())
    if (!allowed.contains(item.key()))
      throw invalid_argument("unknown config key \"" + item.key() + "\"");
  for (const auto& key : required)
    if (!obj.contains(key)) throw invalid_argument("missing config key \"" + key + "\"");
}

inline double get_real(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw invalid_argument("config key \"" + key + "\" must be a number");
  return v.get<double>();
}

inline complexd get_complex(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (v.is_number()) return complexd(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return complexd(v[0].get<double>(), v[1].get<double>());
  throw invalid_argument("config key \"" + key + "\" must be a number or [re, im]");
}

inline complexd element_complex(const json& v, const std::string& key) {
  if (v.is_number()) return complexd(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return complexd(v[0].get<double>(), v[1].get<double>());
  throw invalid_argument("entries of \"" + key + "\" must be numbers or [re, im]");
}

inline std::size_t get_count(const json& obj, const std::string& key, std::size_t min_value) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.is_number_float() || v.get<long long>() < 0)
    throw invalid_argument("config key \"" + key + "\" must be a non-negative integer");
  const auto n = v.get<unsigned long long>();
  if (n < min_value)
    throw invalid_argument("config key \"" + key + "\" must be >= " + std::to_string(min_value));
  return static_cast<std::size_t>(n);
}

inline double get_positive(const json& obj, const std::string& key) {
  const double v = get_real(obj, key);
  if (!(v > 0.0)) throw invalid_argument("config key \"" + key + "\" must be > 0");
  return v;
}

inline std::vector<complexd> get_complex_array(const json& obj, const std::string& key,
                                               std::size_t min_size) {
  const json& v = obj.at(key);
  if (!v.is_array()) throw invalid_argument("config key \"" + key + "\" must be an array");
  if (v.size() < min_size)
    throw invalid_argument("config key \"" + key + "\" must have at least " +
                           std::to_string(min_size) + " entries");
  std::vector<complexd> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(element_complex(e, key));
  return out;
}

inline json complex_json(complexd z) { return json::array({z.real(), z.imag()}); }

inline json complex_array_json(const std::vector<complexd>& zs) {
  json arr = json::array();
  for (complexd z : zs) arr.push_back(complex_json(z));
  return arr;
}

inline std::string get_output_format(const json& obj) {
  if (!obj.contains("output_format")) return "csv";
  const json& v = obj.at("output_format");
  if (!v.is_string() || (v != "csv" && v != "json"))
    throw invalid_argument("config key \"output_format\" must be \"csv\" or \"json\"");
  return v.get<std::string>();
}

inline Eigen::MatrixXcd get_matrix(const json& obj, const std::string& key, int dim) {
  if (!obj.contains(key)) return Eigen::MatrixXcd::Identity(dim, dim);
  const json& v = obj.at(key);
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    throw invalid_argument("config key \"" + key + "\" must be a " + std::to_string(dim) + "x" +
                           std::to_string(dim) + " matrix (array of rows)");
  Eigen::MatrixXcd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw invalid_argument("config key \"" + key + "\" must be a " + std::to_string(dim) + "x" +
                             std::to_string(dim) + " matrix (array of rows)");
    for (int j = 0; j < dim; ++j)
      m(i, j) = element_complex(row[static_cast<std::size_t>(j)], key);
  }
  return m;
}

inline json matrix_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline MoleculeParams parse_molecule_common(const json& obj) {
  const int electron_n = static_cast<int>(get_count(obj, "electron_n", 3));
  const int nuclear_n = static_cast<int>(get_count(obj, "nuclear_n", 3));
  const double xmin = get_real(obj, "electron_xmin");
  const double xmax = get_real(obj, "electron_xmax");
  if (!(xmin < xmax)) throw invalid_argument("config requires electron_xmin < electron_xmax");
  const double rmin = get_positive(obj, "nuclear_rmin");
  const double rmax = get_real(obj, "nuclear_rmax");
  if (!(rmin < rmax)) throw invalid_argument("config requires nuclear_rmin < nuclear_rmax");
  MoleculeParams p;
  p.electron_grid = make_uniform_grid(electron_n, xmin, xmax);
  p.nuclear_grid = make_uniform_grid(nuclear_n, rmin, rmax);
  p.M = get_positive(obj, "M");
  p.s_e = get_positive(obj, "s_e");
  p.s_n = get_positive(obj, "s_n");
  return p;
}

inline void echo_molecule_common(json& echo, const MoleculeParams& p) {
  echo["electron_n"] = p.electron_grid.n;
  echo["electron_xmin"] = p.electron_grid.x_min;
  echo["electron_xmax"] = p.electron_grid.x_max;
  echo["nuclear_n"] = p.nuclear_grid.n;
  echo["nuclear_rmin"] = p.nuclear_grid.x_min;
  echo["nuclear_rmax"] = p.nuclear_grid.x_max;
  echo["M"] = p.M;
  echo["s_e"] = p.s_e;
  echo["s_n"] = p.s_n;
}

}  // namespace detail

// Parses and validates a config object; seed_override (from the command line)
// takes precedence over a "seed" key for stochastic kinds.
inline RunConfig parse_config(const json& root,
                              std::optional<std::uint64_t> seed_override = std::nullopt) {
  if (!root.is_object()) throw invalid_argument("config must be a JSON object");
  if (!root.contains("kind")) throw invalid_argument("missing config key \"kind\"");
  if (!root.at("kind").is_string())
    throw invalid_argument("config key \"kind\" must be a string");
  const auto kind = parse_kind(root.at("kind").get<std::string>());
  if (!kind)
    throw invalid_argument("unknown experiment kind \"" + root.at("kind").get<std::string>() +
                           "\"");

  RunConfig cfg;
  cfg.kind = *kind;
  cfg.output_format = detail::get_output_format(root);
  json echo;
  echo["kind"] = kind_name(cfg.kind);
  echo["output_format"] = cfg.output_format;

  using detail::get_complex;
  using detail::get_complex_array;
  using detail::get_count;
  using detail::get_positive;
  using detail::get_real;

  switch (cfg.kind) {
    case RunKind::toy_run: {
      detail::require_keys(root,
                           {"kind", "output_format", "a", "b", "psi0", "phi0", "dt", "steps"},
                           {"a", "b", "psi0", "phi0", "dt", "steps"});
      ToyRunConfig p;
      p.a = get_complex(root, "a");
      p.b = get_complex(root, "b");
      p.psi0 = get_complex(root, "psi0");
      p.phi0 = get_complex(root, "phi0");
      p.dt = get_positive(root, "dt");
      p.steps = get_count(root, "steps", 1);
      echo["a"] = detail::complex_json(p.a);
      echo["b"] = detail::complex_json(p.b);
      echo["psi0"] = detail::complex_json(p.psi0);
      echo["phi0"] = detail::complex_json(p.phi0);
      echo["dt"] = p.dt;
      echo["steps"] = p.steps;
      cfg.params = p;
      break;
    }
    case RunKind::toy_scan: {
      detail::require_keys(
          root, {"kind", "output_format", "a", "psi0", "phi0", "dt", "steps", "b_values"},
          {"a", "psi0", "phi0", "dt", "steps", "b_values"});
      ToyScanConfig p;
      p.a = get_complex(root, "a");
      p.psi0 = get_complex(root, "psi0");
      p.phi0 = get_complex(root, "phi0");
      p.dt = get_positive(root, "dt");
      p.steps = get_count(root, "steps", 1);
      p.b_values = get_complex_array(root, "b_values", 1);
      echo["a"] = detail::complex_json(p.a);
      echo["psi0"] = detail::complex_json(p.psi0);
      echo["phi0"] = detail::complex_json(p.phi0);
      echo["dt"] = p.dt;
      echo["steps"] = p.steps;
      echo["b_values"] = detail::complex_array_json(p.b_values);
      cfg.params = p;
      break;
    }
    case RunKind::coupled_run: {
      detail::require_keys(root,
                           {"kind", "output_format", "coupling", "dim_s", "dim_m", "a", "b",
                            "generator_s", "probe_m", "generator_m", "probe_s", "psi0", "phi0",
                            "dt", "steps"},
                           {"coupling", "dim_s", "dim_m", "a", "b", "psi0", "phi0", "dt", "steps"});
      CoupledRunConfig p;
      if (!root.at("coupling").is_string())
        throw invalid_argument("config key \"coupling\" must be a string");
      const std::string coupling = root.at("coupling").get<std::string>();
      if (coupling == "expectation-bilinear")
        p.coupling = CouplingKind::expectation_bilinear;
      else if (coupling == "pointwise-product")
        p.coupling = CouplingKind::pointwise_product;
      else
        throw invalid_argument("config key \"coupling\" must be \"expectation-bilinear\" or "
                               "\"pointwise-product\"");
      p.dim_s = static_cast<int>(get_count(root, "dim_s", 1));
      p.dim_m = static_cast<int>(get_count(root, "dim_m", 1));
      if (p.coupling == CouplingKind::pointwise_product && p.dim_s != p.dim_m)
        throw invalid_argument("pointwise-product coupling requires dim_s == dim_m");
      p.a = get_complex(root, "a");
      p.b = get_complex(root, "b");
      const auto psi0 = get_complex_array(root, "psi0", 1);
      const auto phi0 = get_complex_array(root, "phi0", 1);
      if (static_cast<int>(psi0.size()) != p.dim_s)
        throw invalid_argument("config key \"psi0\" must have dim_s entries");
      if (static_cast<int>(phi0.size()) != p.dim_m)
        throw invalid_argument("config key \"phi0\" must have dim_m entries");
      p.psi0 = Eigen::Map<const Eigen::VectorXcd>(psi0.data(), static_cast<Eigen::Index>(psi0.size()));
      p.phi0 = Eigen::Map<const Eigen::VectorXcd>(phi0.data(), static_cast<Eigen::Index>(phi0.size()));
      p.dt = get_positive(root, "dt");
      p.steps = get_count(root, "steps", 1);
      if (p.coupling == CouplingKind::expectation_bilinear) {
        p.generator_s = detail::get_matrix(root, "generator_s", p.dim_s);
        p.probe_m = detail::get_matrix(root, "probe_m", p.dim_m);
        p.generator_m = detail::get_matrix(root, "generator_m", p.dim_m);
        p.probe_s = detail::get_matrix(root, "probe_s", p.dim_s);
      } else {
        for (const char* key : {"generator_s", "probe_m", "generator_m", "probe_s"})
          if (root.contains(key))
            throw invalid_argument(std::string("config key \"") + key +
                                   "\" is only valid for expectation-bilinear coupling");
      }
      echo["coupling"] = coupling;
      echo["dim_s"] = p.dim_s;
      echo["dim_m"] = p.dim_m;
      echo["a"] = detail::complex_json(p.a);
      echo["b"] = detail::complex_json(p.b);
      if (p.coupling == CouplingKind::expectation_bilinear) {
        echo["generator_s"] = detail::matrix_json(p.generator_s);
        echo["probe_m"] = detail::matrix_json(p.probe_m);
        echo["generator_m"] = detail::matrix_json(p.generator_m);
        echo["probe_s"] = detail::matrix_json(p.probe_s);
      }
      echo["psi0"] = detail::complex_array_json(psi0);
      echo["phi0"] = detail::complex_array_json(phi0);
      echo["dt"] = p.dt;
      echo["steps"] = p.steps;
      cfg.params = p;
      break;
    }
    case RunKind::molecule_bo: {
      detail::require_keys(root,
                           {"kind", "output_format", "electron_n", "electron_xmin",
                            "electron_xmax", "s_e", "s_n", "r_min", "r_max", "r_count"},
                           {"electron_n", "electron_xmin", "electron_xmax", "s_e", "s_n", "r_min",
                            "r_max", "r_count"});
      MoleculeBoConfig p;
      p.electron_n = static_cast<int>(get_count(root, "electron_n", 3));
      p.electron_xmin = get_real(root, "electron_xmin");
      p.electron_xmax = get_real(root, "electron_xmax");
      if (!(p.electron_xmin < p.electron_xmax))
        throw invalid_argument("config requires electron_xmin < electron_xmax");
      p.s_e = get_positive(root, "s_e");
      p.s_n = get_positive(root, "s_n");
      p.r_min = get_real(root, "r_min");
      if (!(p.r_min >= 0.0)) throw invalid_argument("config key \"r_min\" must be >= 0");
      p.r_max = get_real(root, "r_max");
      if (!(p.r_min < p.r_max)) throw invalid_argument("config requires r_min < r_max");
      p.r_count = static_cast<int>(get_count(root, "r_count", 2));
      echo["electron_n"] = p.electron_n;
      echo["electron_xmin"] = p.electron_xmin;
      echo["electron_xmax"] = p.electron_xmax;
      echo["s_e"] = p.s_e;
      echo["s_n"] = p.s_n;
      echo["r_min"] = p.r_min;
      echo["r_max"] = p.r_max;
      echo["r_count"] = p.r_count;
      cfg.params = p;
      break;
    }
    case RunKind::molecule_scf: {
      detail::require_keys(root,
                           {"kind", "output_format", "electron_n", "electron_xmin",
                            "electron_xmax", "nuclear_n", "nuclear_rmin", "nuclear_rmax", "M",
                            "s_e", "s_n", "tol", "max_iter", "mixing"},
                           {"electron_n", "electron_xmin", "electron_xmax", "nuclear_n",
                            "nuclear_rmin", "nuclear_rmax", "M", "s_e", "s_n", "tol", "max_iter",
                            "mixing"});
      MoleculeScfConfig p;
      p.params = detail::parse_molecule_common(root);
      p.tol = get_positive(root, "tol");
      p.max_iter = get_count(root, "max_iter", 1);
      p.mixing = get_positive(root, "mixing");
      if (p.mixing > 1.0) throw invalid_argument("config key \"mixing\" must be <= 1");
      detail::echo_molecule_common(echo, p.params);
      echo["tol"] = p.tol;
      echo["max_iter"] = p.max_iter;
      echo["mixing"] = p.mixing;
      cfg.params = p;
      break;
    }
    case RunKind::molecule_exact: {
      detail::require_keys(root,
                           {"kind", "output_format", "electron_n", "electron_xmin",
                            "electron_xmax", "nuclear_n", "nuclear_rmin", "nuclear_rmax", "M",
                            "s_e", "s_n"},
                           {"electron_n", "electron_xmin", "electron_xmax", "nuclear_n",
                            "nuclear_rmin", "nuclear_rmax", "M", "s_e", "s_n"});
      MoleculeExactConfig p;
      p.params = detail::parse_molecule_common(root);
      detail::echo_molecule_common(echo, p.params);
      cfg.params = p;
      break;
    }
    case RunKind::measure_sample: {
      detail::require_keys(
          root, {"kind", "output_format", "diag", "state", "draws", "seed", "group_tol"},
          {"diag", "state", "draws"});
      MeasureSampleConfig p;
      const json& diag = root.at("diag");
      if (!diag.is_array() || diag.empty())
        throw invalid_argument("config key \"diag\" must be a non-empty array");
      for (const auto& e : diag) {
        if (!e.is_number())
          throw invalid_argument("entries of \"diag\" must be real numbers");
        p.diag.push_back(e.get<double>());
      }
      p.state = get_complex_array(root, "state", 1);
      if (p.state.size() != p.diag.size())
        throw invalid_argument("config keys \"diag\" and \"state\" must have equal lengths");
      p.draws = get_count(root, "draws", 1);
      if (root.contains("group_tol")) p.group_tol = get_positive(root, "group_tol");
      if (seed_override) {
        p.seed = *seed_override;
      } else if (root.contains("seed")) {
        p.seed = static_cast<std::uint64_t>(get_count(root, "seed", 0));
      } else {
        throw invalid_argument("missing config key \"seed\" (required for measure-sample; "
                               "may also be given as --seed)");
      }
      json diag_echo = json::array();
      for (double d : p.diag) diag_echo.push_back(d);
      echo["diag"] = diag_echo;
      echo["state"] = detail::complex_array_json(p.state);
      echo["draws"] = p.draws;
      echo["seed"] = p.seed;
      echo["group_tol"] = p.group_tol;
      cfg.params = p;
      break;
    }
  }
  cfg.echo = echo;
  return cfg;
}

inline RunConfig load_config(const std::string& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_argument("cannot open config file \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json root;
  try {
    root = json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw invalid_argument(std::string("config parse error: ") + e.what());
  }
  return parse_config(root, seed_override);
}

}  // namespace qduet::cli
