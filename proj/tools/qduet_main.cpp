// Command-line front end. Subcommands map one-to-one onto experiment kinds;
// the JSON config names its kind too, and a mismatch between the two is a
// validation error. Exit codes: 0 success, 1 validation error, 2 numerical
// divergence (failure manifest written, no data files), 3 self-consistency
// loop that did not converge (all outputs still written).

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "qduet/cli/config.hpp"
#include "qduet/cli/run.hpp"
#include "qduet/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"workbench for coupled nonlinear quantum evolution"};
  app.set_version_flag("--version", qduet::version);
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir = ".";
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  std::optional<qduet::cli::RunKind> expected;

  const auto attach = [&](CLI::App* cmd, qduet::cli::RunKind kind) {
    cmd->add_option("--config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--output", output_dir, "output directory, created if missing");
    CLI::Option* seed_opt =
        cmd->add_option("--seed", seed_value, "RNG seed, overrides the config value");
    cmd->callback([&expected, &seed_given, kind, seed_opt] {
      expected = kind;
      seed_given = seed_opt->count() > 0;
    });
  };

  CLI::App* toy = app.add_subcommand("toy", "scalar two-amplitude model");
  toy->require_subcommand(1);
  attach(toy->add_subcommand("run", "single trajectory with integrability residual"),
         qduet::cli::RunKind::toy_run);
  attach(toy->add_subcommand("scan", "sweep over back-coupling strengths"),
         qduet::cli::RunKind::toy_scan);
  attach(app.add_subcommand("coupled", "finite-dimensional coupled pair"),
         qduet::cli::RunKind::coupled_run);
  CLI::App* molecule = app.add_subcommand("molecule", "one-dimensional diatomic model");
  molecule->require_subcommand(1);
  attach(molecule->add_subcommand("bo", "clamped-nuclei ground-state curve"),
         qduet::cli::RunKind::molecule_bo);
  attach(molecule->add_subcommand("scf", "self-consistent mean-field ground state"),
         qduet::cli::RunKind::molecule_scf);
  attach(molecule->add_subcommand("exact", "two-coordinate ground state"),
         qduet::cli::RunKind::molecule_exact);
  attach(app.add_subcommand("measure", "projective measurement sampling"),
         qduet::cli::RunKind::measure_sample);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  std::optional<qduet::cli::RunConfig> cfg;
  try {
    cfg = qduet::cli::load_config(
        config_path, seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt);
    if (cfg->kind != *expected)
      throw qduet::invalid_argument(std::string("config kind \"") +
                                    qduet::cli::kind_name(cfg->kind) +
                                    "\" does not match subcommand \"" +
                                    qduet::cli::kind_name(*expected) + "\"");
  } catch (const qduet::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    return qduet::cli::run_to_directory(*cfg, output_dir);
  } catch (const qduet::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    const double duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    try {
      qduet::cli::write_failure_manifest(cfg->echo, output_dir, duration_ms);
    } catch (const std::exception& io) {
      std::cerr << "error: could not write failure manifest: " << io.what() << "\n";
    }
    return 2;
  }
}
