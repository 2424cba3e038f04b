// sim <experiment> --config <file> [--out <dir>] [--threads N]
//
// Exit codes: 0 success, 2 configuration error, 3 physics-domain error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "critpol/cli/config.hpp"
#include "critpol/cli/csv.hpp"
#include "critpol/cli/experiments.hpp"
#include "critpol/errors.hpp"

int main(int argc, char** argv) {
  using namespace critpol;

  CLI::App app{"Polariton / NV-spin simulation runner"};
  std::string experiment, config_path, out_dir;
  std::size_t threads = cli::default_threads();
  if (const char* env = std::getenv("SIM_OUTPUT_DIR")) out_dir = env;
  app.add_option("experiment", experiment, "spectrum | coupling-map | meanfield | stark | rabi | iswap")->required();
  app.add_option("--config,-c", config_path, "configuration file")->required();
  app.add_option("--out,-o", out_dir, "output directory (default: $SIM_OUTPUT_DIR or .)");
  app.add_option("--threads,-j", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    cli::ExperimentConfig cfg = cli::load_config(config_path);
    if (!cfg.experiment.empty() && cfg.experiment != experiment)
      throw ConfigError(config_path + ": config is for experiment '" + cfg.experiment + "', not '" + experiment + "'");
    cfg.experiment = experiment;

    const cli::Table table = cli::run_experiment(cfg, threads);
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    const std::string path = cli::output_path(cfg, out_dir.empty() ? "." : out_dir);
    cli::write_csv_file(path, table);

    std::size_t failed = 0;
    if (!table.columns.empty() && table.columns.back() == "status")
      for (const auto& row : table.rows) failed += row.back() != "ok";
    std::cout << experiment << ": wrote " << table.rows.size() << " rows to " << path;
    if (failed) std::cout << " (" << failed << " rows with non-ok status)";
    std::cout << '\n';
    for (const auto& [k, v] : table.metadata)
      if (k == "warning") std::cerr << "warning: " << v << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
