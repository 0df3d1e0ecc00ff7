// shieldcp: Casimir-Polder / Yukawa force budgets for a shielded atom-surface
// experiment.
//
//   shieldcp cp-scan   [--config F] [--out F] [--format csv|structured] [--workers N] [--rel-tol X]
//   shieldcp budget    ...
//   shieldcp exclusion ...
//   shieldcp bloch     ...
//
// Exit codes: 0 success, 1 configuration error, 2 quadrature did not converge.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shieldcp/cli/commands.hpp"
#include "shieldcp/cli/config.hpp"
#include "shieldcp/cli/dataset.hpp"
#include "shieldcp/quadrature.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_nonconvergence = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace shieldcp::cli;

  CLI::App app{"Casimir-Polder and Yukawa force budgets for a shielded atom interferometer"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format;
  std::optional<std::size_t> workers;
  std::optional<double> rel_tol;
  app.add_option("--config", config_path, "JSON configuration file (defaults if omitted)");
  app.add_option("--out", out_path, "write output here instead of stdout");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "structured"}));
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--rel-tol", rel_tol, "relative tolerance of the CP quadrature")->check(CLI::PositiveNumber);

  auto* cp_scan = app.add_subcommand("cp-scan", "CP force against z or d_vac, with reference surfaces");
  auto* budget = app.add_subcommand("budget", "force table and Bloch-frequency shifts over (z, d_vac)");
  auto* exclusion = app.add_subcommand("exclusion", "alpha-lambda exclusion boundaries");
  auto* bloch = app.add_subcommand("bloch", "Bloch frequencies and Wannier-Stark extents");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  try {
    RunConfig cfg = config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(config_path);
    if (!out_path.empty()) cfg.out_path = out_path;
    if (!format.empty()) cfg.format = format;
    if (workers) cfg.workers = *workers;
    if (rel_tol) {
      cfg.cp.rel_tol = *rel_tol;
      try {
        cfg.cp.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--rel-tol: ") + e.what());
      }
    }

    Dataset data;
    if (*cp_scan)
      data = cmd_cp_scan(cfg);
    else if (*budget)
      data = cmd_force_budget(cfg);
    else if (*exclusion)
      data = cmd_exclusion(cfg);
    else if (*bloch)
      data = cmd_bloch(cfg);

    const std::string text = cfg.format == "structured" ? to_structured(data) : to_csv(data);
    if (cfg.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(cfg.out_path, std::ios::binary);
      if (!out) throw ConfigError("cannot write output file '" + cfg.out_path + "'");
      out << text;
    }
    return exit_ok;
  } catch (const shieldcp::quad::NonConvergenceError& e) {
    std::cerr << "shieldcp: " << e.what() << " (best estimate " << format_number(e.best_estimate())
              << ", error bound " << format_number(e.error_bound()) << ")\n";
    return exit_nonconvergence;
  } catch (const ConfigError& e) {
    std::cerr << "shieldcp: configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "shieldcp: configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::domain_error& e) {
    std::cerr << "shieldcp: configuration error: " << e.what() << '\n';
    return exit_config;
  }
}
