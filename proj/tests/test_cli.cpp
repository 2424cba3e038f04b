#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "critpol/cli/config.hpp"
#include "critpol/cli/csv.hpp"
#include "critpol/cli/experiments.hpp"
#include "critpol/cli/sweep.hpp"
#include "critpol/polariton.hpp"

using namespace critpol;
using namespace critpol::cli;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

CsvData run_csv(const std::string& text, std::size_t threads = 1) {
  std::istringstream in(to_csv(run_experiment(parse_config_string(text), threads)));
  return read_csv(in);
}

double cell(const CsvData& d, std::size_t row, const std::string& col) {
  return std::stod(d.rows.at(row).at(d.column(col)));
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("critpol_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_sim(const std::string& args) {
  const std::string cmd = std::string(SIM_EXECUTABLE) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_file(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(Config, ParsesAllSections) {
  const auto cfg = parse_config_string(R"(
# leading comment
experiment = spectrum
units = angular
params.omega_m = 2.5     # trailing comment
sweep.G_over_omega_m = 0:0.5:11
sweep.delta_a_over_omega_m = 1:100:3:log
numerics.n_max = 8
output.file = out.csv
output.format = long
)");
  EXPECT_EQ(cfg.experiment, "spectrum");
  EXPECT_EQ(cfg.params.at("omega_m"), 2.5);
  ASSERT_EQ(cfg.sweep.size(), 2u);
  EXPECT_EQ(cfg.sweep[0].name, "G_over_omega_m");
  EXPECT_EQ(cfg.sweep[0].points, 11u);
  EXPECT_TRUE(cfg.sweep[1].log);
  const auto v = cfg.sweep[1].values();
  EXPECT_NEAR(v[1], 10.0, 1e-12);
  EXPECT_EQ(v.back(), 100.0);
  EXPECT_EQ(cfg.numerics.at("n_max"), 8.0);
  EXPECT_EQ(cfg.output.at("file"), "out.csv");
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config_string("experiment spectrum"), ConfigError);
  EXPECT_THROW(parse_config_string("params.omega_m = abc"), ConfigError);
  EXPECT_THROW(parse_config_string("params.omega_m = 1\nparams.omega_m = 2"), ConfigError);
  EXPECT_THROW(parse_config_string("units = furlongs"), ConfigError);
  EXPECT_THROW(parse_config_string("bogus.key = 1"), ConfigError);
  EXPECT_THROW(parse_config_string("colour = red"), ConfigError);
  EXPECT_THROW(parse_config_string("sweep.G = 0:1"), ConfigError);
  EXPECT_THROW(parse_config_string("sweep.G = 0:1:2.5"), ConfigError);
  EXPECT_THROW(parse_config_string("sweep.G = 0:1:1"), ConfigError);
  EXPECT_THROW(parse_config_string("sweep.G = 0:1:5:log"), ConfigError);
  EXPECT_THROW(parse_config_string("sweep.G = 0:1:5:cubic"), ConfigError);
  EXPECT_THROW(parse_config_string("params.G = 1\nsweep.G = 0:1:3"), ConfigError);
  EXPECT_THROW(parse_config_string("output.format = xml"), ConfigError);
  EXPECT_THROW(parse_config_string("params.G = inf"), ConfigError);
  EXPECT_NO_THROW(parse_config_string("sweep.G = 0.3:0.3:1"));
  EXPECT_THROW(load_config("/nonexistent/path.cfg"), ConfigError);
}

TEST(Config, HertzUnitsConvertFrequencies) {
  const auto cfg = parse_config_string("units = hertz\nparams.lambda_plus = 3.5e6\nparams.N_pl = 2\nsweep.delta = 1e6:2e6:2\n");
  EXPECT_DOUBLE_EQ(cfg.params.at("lambda_plus"), 2.0 * pi * 3.5e6);
  EXPECT_EQ(cfg.params.at("N_pl"), 2.0);
  EXPECT_DOUBLE_EQ(cfg.sweep[0].start, 2.0 * pi * 1e6);
  EXPECT_DOUBLE_EQ(cfg.sweep[0].stop, 2.0 * pi * 2e6);
  EXPECT_FALSE(is_frequency_param("G_over_omega_m"));
}

TEST(Config, ExperimentValidation) {
  EXPECT_THROW(run_experiment(parse_config_string("experiment = nothing")), ConfigError);
  EXPECT_THROW(run_experiment(parse_config_string("experiment = spectrum\nparams.kappa = 1")), ConfigError);
  EXPECT_THROW(run_experiment(parse_config_string("experiment = spectrum\nparams.G = 0.1\nparams.gap = 0.1")),
               ConfigError);
  EXPECT_THROW(run_experiment(parse_config_string("experiment = rabi\nsweep.kappa = 0:1:3")), ConfigError);
  EXPECT_THROW(run_experiment(parse_config_string("experiment = rabi\nnumerics.n_max = 1")), ConfigError);
  EXPECT_THROW(run_experiment(parse_config_string("experiment = spectrum\nnumerics.n_max = 4")), ConfigError);
  EXPECT_THROW(run_experiment(parse_config_string("experiment = stark\nparams.delta = 1")), ConfigError);
}

TEST(Sweep, GridOrderFirstAxisSlowest) {
  const auto cfg = parse_config_string("sweep.a = 0:1:2\nsweep.b = 10:30:3\n");
  const auto grid = sweep_grid(cfg.sweep);
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_EQ(grid[0], (std::vector<double>{0, 10}));
  EXPECT_EQ(grid[1], (std::vector<double>{0, 20}));
  EXPECT_EQ(grid[3], (std::vector<double>{1, 10}));
  EXPECT_EQ(grid[5], (std::vector<double>{1, 30}));
  EXPECT_EQ(sweep_grid({}).size(), 1u);
}

TEST(Sweep, ParallelMapKeepsOrder) {
  for (std::size_t threads : {1u, 3u, 16u}) {
    const auto out = parallel_map<std::size_t>(37, threads, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);
  }
}

TEST(Runner, SpectrumRowsMatchLibrary) {
  const auto d = run_csv(
      "experiment = spectrum\nparams.omega_m = 2\nsweep.G_over_omega_m = 0:0.45:10\nsweep.delta_a_over_omega_m = 0.5:5:10\n");
  ASSERT_EQ(d.rows.size(), 100u);
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    const double g = cell(d, r, "G_over_omega_m") * 2.0, da = cell(d, r, "delta_a_over_omega_m") * 2.0;
    if (g > critical_coupling(da, 2.0)) {
      EXPECT_EQ(d.rows[r].back(), "unstable");
      continue;
    }
    ASSERT_EQ(d.rows[r].back(), "ok");
    const auto w = polariton_frequencies(da, 2.0, g);
    EXPECT_EQ(cell(d, r, "omega_plus"), w.plus);
    EXPECT_EQ(cell(d, r, "omega_minus"), w.minus);
    EXPECT_EQ(cell(d, r, "theta"), mixing_angle(da, 2.0, g));
  }
  EXPECT_EQ(d.columns.front(), "G_over_omega_m");
  EXPECT_EQ(d.columns[1], "delta_a_over_omega_m");
}

TEST(Runner, UnstablePointsGetStatusNotAbort) {
  const auto d = run_csv("experiment = spectrum\nsweep.G_over_omega_m = 0:1:5\n");
  ASSERT_EQ(d.rows.size(), 5u);
  EXPECT_EQ(d.rows[0].back(), "ok");
  EXPECT_EQ(d.rows[4].back(), "unstable");
  EXPECT_EQ(d.rows[4][d.column("omega_minus")], "");
  // G = 0.5 = G_c is stable with omega_- = 0.
  EXPECT_EQ(d.rows[2].back(), "ok");
  EXPECT_EQ(cell(d, 2, "omega_minus"), 0.0);
  // Without a sweep the same error propagates.
  EXPECT_THROW(run_experiment(parse_config_string("experiment = spectrum\nparams.G = 1")), UnstableRegime);
}

TEST(Runner, DeterministicAcrossThreadCounts) {
  const std::string cfg =
      "experiment = coupling-map\nparams.lambda = 3\nsweep.delta_a_over_omega_m = 1:10:7\n"
      "sweep.omega_minus_over_delta_a = 1e-6:0.05:9:log\n";
  const std::string one = to_csv(run_experiment(parse_config_string(cfg), 1));
  EXPECT_EQ(one, to_csv(run_experiment(parse_config_string(cfg), 4)));
  EXPECT_EQ(one, to_csv(run_experiment(parse_config_string(cfg), 13)));
}

TEST(Runner, SinglePointSweepMatchesFixedRun) {
  const auto swept = run_csv("experiment = stark\nparams.lambda_plus = 7\nsweep.delta = 70:70:1\n");
  const auto fixed = run_csv("experiment = stark\nparams.lambda_plus = 7\nparams.delta = 70\n");
  ASSERT_EQ(swept.rows.size(), 1u);
  ASSERT_EQ(fixed.rows.size(), 1u);
  for (const auto& col : fixed.columns)
    if (col != "status") EXPECT_EQ(swept.rows[0][swept.column(col)], fixed.rows[0][fixed.column(col)]) << col;
}

TEST(Runner, LongFormatAndMetadata) {
  const auto d = run_csv("experiment = coupling-map\nparams.lambda = 2\nparams.delta_a_over_omega_m = 10\n"
                         "sweep.omega_minus_over_delta_a = 1e-3:1e-2:2:log\n");
  EXPECT_EQ(d.columns, (std::vector<std::string>{"omega_minus_over_delta_a", "quantity", "value", "status"}));
  EXPECT_EQ(d.rows.size(), 2u * 15u);
  bool has_param = false, has_sweep = false, has_derived = false;
  for (const auto& m : d.metadata) {
    has_param |= m.rfind("param.lambda: 2", 0) == 0;
    has_sweep |= m.rfind("sweep.omega_minus_over_delta_a: 0.001:0.01", 0) == 0;
    has_derived |= m.rfind("derived(first point).omega_minus", 0) == 0;
  }
  EXPECT_TRUE(has_param);
  EXPECT_TRUE(has_sweep);
  EXPECT_TRUE(has_derived);
}

TEST(Runner, StarkReferenceValues) {
  const auto d = run_csv("experiment = stark\nunits = hertz\nparams.lambda_plus = 3.5e6\nparams.delta = 35e6\n");
  EXPECT_NEAR(cell(d, 0, "shift_hz"), 0.7e6, 1e-3);
  EXPECT_NEAR(cell(d, 0, "g_eff_hz"), 350e3, 1e-3);
  EXPECT_LT(cell(d, 0, "relative_error"), 0.02);
}

TEST(Runner, TimeSeriesExperiments) {
  const auto rabi = run_csv("experiment = rabi\nparams.kappa = 0\nparams.gamma_perp = 0\nnumerics.n_max = 3\n");
  EXPECT_EQ(rabi.columns, (std::vector<std::string>{"t", "P_e", "n_polariton"}));
  EXPECT_EQ(cell(rabi, 0, "P_e"), 1.0);
  const auto sw = run_csv("experiment = iswap\nnumerics.composite = 0\n");
  EXPECT_GT(cell(sw, sw.rows.size() - 1, "fidelity"), 0.999);
}

TEST(Runner, OutputPath) {
  ExperimentConfig cfg;
  cfg.experiment = "stark";
  EXPECT_EQ(output_path(cfg, "out"), "out/stark.csv");
  cfg.output["file"] = "x.csv";
  EXPECT_EQ(output_path(cfg, "out/"), "out/x.csv");
  cfg.output["file"] = "/abs/x.csv";
  EXPECT_EQ(output_path(cfg, "out"), "/abs/x.csv");
}

TEST(Csv, EmptyCellsForNonFinite) {
  EXPECT_EQ(format_cell(std::nullopt), "");
  EXPECT_EQ(format_cell(std::nan("")), "");
  EXPECT_EQ(format_cell(0.1), "0.10000000000000001");
  Table t;
  t.meta("k", 1.5);
  t.columns = {"a", "b"};
  t.rows = {{"1", ""}};
  std::istringstream in(to_csv(t));
  const auto d = read_csv(in);
  EXPECT_EQ(d.metadata, (std::vector<std::string>{"k: 1.5"}));
  EXPECT_EQ(d.rows[0], (std::vector<std::string>{"1", ""}));
}

TEST(SimBinary, ExitCodes) {
  const fs::path dir = scratch_dir("exit");
  write_file(dir / "ok.cfg", "experiment = spectrum\nsweep.G_over_omega_m = 0:0.5:6\n");
  write_file(dir / "bad.cfg", "experiment = spectrum\nparams.nonsense = 1\n");
  write_file(dir / "unstable.cfg", "experiment = spectrum\nparams.G = 2\n");
  const std::string out = " --out " + (dir / "out").string();
  EXPECT_EQ(run_sim("spectrum --config " + (dir / "ok.cfg").string() + out), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "spectrum.csv"));
  EXPECT_EQ(run_sim("spectrum --config " + (dir / "bad.cfg").string() + out), 2);
  EXPECT_EQ(run_sim("stark --config " + (dir / "ok.cfg").string() + out), 2);
  EXPECT_EQ(run_sim("spectrum --config " + (dir / "missing.cfg").string() + out), 2);
  EXPECT_EQ(run_sim("spectrum"), 2);
  EXPECT_EQ(run_sim("spectrum --config " + (dir / "unstable.cfg").string() + out), 3);
  fs::remove_all(dir);
}

TEST(SimBinary, OutputDirFromEnvironment) {
  const fs::path dir = scratch_dir("env");
  write_file(dir / "s.cfg", "experiment = stark\nparams.lambda_plus = 1\nparams.delta = 20\noutput.file = s.csv\n");
  const std::string cmd = "SIM_OUTPUT_DIR=" + (dir / "env_out").string() + " " + SIM_EXECUTABLE + " stark -c " +
                          (dir / "s.cfg").string() + " >/dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  const auto d = read_csv_file((dir / "env_out" / "s.csv").string());
  EXPECT_NEAR(cell(d, 0, "zeta"), 0.05, 1e-15);
  fs::remove_all(dir);
}
