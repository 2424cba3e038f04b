// Acceptance suite: one PASS/FAIL line per criterion. Exits 1 if any
// criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "critpol/cli/csv.hpp"
#include "critpol/critpol.hpp"

using namespace critpol;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Symplectic eigenvalues: |Im eig(J K)| for H = r^T K r / 2 over r = (x_a, p_a, x_b, p_b).
std::pair<double, double> symplectic_eigenvalues(double da, double wm, double G) {
  Eigen::Matrix4d k = Eigen::Matrix4d::Zero(), j = Eigen::Matrix4d::Zero();
  k(0, 0) = k(1, 1) = da;
  k(2, 2) = k(3, 3) = wm;
  k(0, 2) = k(2, 0) = -2.0 * G;
  j(0, 1) = j(2, 3) = 1.0;
  j(1, 0) = j(3, 2) = -1.0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(j * k, false);
  std::vector<double> w;
  for (int i = 0; i < 4; ++i)
    if (es.eigenvalues()(i).imag() > 0.0) w.push_back(es.eigenvalues()(i).imag());
  if (w.size() != 2) return {std::nan(""), std::nan("")};
  return {std::max(w[0], w[1]), std::min(w[0], w[1])};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

Outcome critical_point() {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double da = std::pow(10.0, u(rng) + 3.0), wm = std::pow(10.0, u(rng) + 3.0);
    const auto w = polariton_frequencies(da, wm, critical_coupling(da, wm));
    worst = std::max(worst, w.minus / w.plus);
  }
  return {worst <= 1e-12, fmt("max omega_-/omega_+ at G_c = %.3g over 100 pairs (tol 1e-12)", worst)};
}

Outcome closed_vs_numeric() {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double ratio = std::pow(10.0, -1.0 + 2.0 * i / 49.0);
    const double wm = 1.0, da = ratio * wm, gc = critical_coupling(da, wm);
    for (int k = 0; k < 50; ++k) {
      const double G = gc * k / 50.0;
      const auto w = polariton_frequencies(da, wm, G);
      const auto [np, nm] = symplectic_eigenvalues(da, wm, G);
      worst = std::max({worst, rel(w.plus, np), rel(w.minus, nm)});
    }
  }
  return {worst <= 1e-10, fmt("max relative deviation %.3g over 50x50 (G/G_c in [0,0.98], Delta_a/omega_m in [0.1,10]; tol 1e-10)", worst)};
}

Outcome enhancement() {
  const double wmin = 100.0, da = 1e6 * wmin, wm = 1e5 * wmin, lambda = 2.0 * pi * 7e3;
  const auto b = bogoliubov_from_low_frequency(da, wm, wmin, lambda);
  const double ratio = b.couplings.lambda_plus / lambda;
  const double lp_hz = b.couplings.lambda_plus / (2.0 * pi);
  const double exact = extract_spin_couplings(b, lambda).lambda_plus / lambda;
  const bool ok = std::abs(ratio / 500.0 - 1.0) < 0.01 && std::abs(lp_hz / 3.5e6 - 1.0) < 0.01;
  return {ok, fmt("lambda_+/lambda = %.4g (want 500 +- 1%%), lambda_+ = 2pi x %.4g Hz (want 3.5e6 +- 1%%); "
                  "exact-transform ratio %.4g",
                  ratio, lp_hz, exact)};
}

Outcome decoupling() {
  const double wm = 1.0, da = 100.0, lambda = 1.0;
  const double G = 0.999 * critical_coupling(da, wm);
  const auto c = spin_polariton_couplings(lambda, da, wm, G);
  const double target = lambda * wm / da;
  const double em = std::abs(c.eta_minus) / lambda, ep = std::abs(c.eta_plus - target) / target;
  return {em < 0.02 && ep < 0.05, fmt("|eta_-|/lambda = %.3g (< 0.02), |eta_+ - lambda omega_m/Delta_a|/(lambda omega_m/Delta_a) = %.3g (< 0.05)", em, ep)};
}

Outcome rabi() {
  RabiParams p;  // lambda_+ = 2 pi x 3.5 MHz, kappa = 1e6, gamma_perp = 1e3, n_max = 8
  const auto traj = rabi_experiment(p);
  const auto& pe = traj.series("P_e");
  const auto x = level_crossings(traj.times, pe, 0.5);
  const double period_want = rabi_period(p.lambda_plus);
  // Two crossings per period of P_e.
  double period = std::nan("");
  if (x.size() >= 2) period = 2.0 * (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  const double err = std::abs(period / period_want - 1.0);
  const double n0 = traj.series("n_polariton").front();
  const bool ok = x.size() >= 9 && err < 0.02 && std::abs(pe.front() - 1.0) < 1e-12 && std::abs(n0) < 1e-12 &&
                  traj.max_trace_drift < 1e-8;
  return {ok, fmt("period %.6g s vs pi/lambda_+ = %.6g s (rel err %.2g, tol 0.02);", period, period_want, err) +
                  fmt(" P_e(0) = %.17g; <n>(0) = %.3g; trace drift %.2g (tol 1e-8);", pe.front(), n0, traj.max_trace_drift) +
                  fmt(" %g crossings of P_e = 1/2", static_cast<double>(x.size()))};
}

Outcome effective_coupling() {
  const double lp = 2.0 * pi * 3.5e6, delta = 2.0 * pi * 35e6;
  const auto dp = make_dispersive_params({lp, lp}, {delta, delta});
  const double hz = dp.g_eff / (2.0 * pi);
  return {std::abs(hz / 350e3 - 1.0) < 1e-12, fmt("g_eff = 2pi x %.12g Hz (want 350e3)", hz)};
}

Outcome stark() {
  const double lp = 2.0 * pi * 3.5e6, delta = 2.0 * pi * 35e6;
  const double closed = stark_shift(lp, delta, 1.0).shift;
  const double exact = exact_stark_shift(lp, delta, 1.0);
  const double hz = closed / (2.0 * pi), dev = std::abs(exact / closed - 1.0);
  return {std::abs(hz / 0.7e6 - 1.0) < 1e-12 && dev < 0.02,
          fmt("2 lambda_+ zeta = 2pi x %.12g Hz (want 0.7e6); exact JC shift deviates by %.3g (tol 0.02) at zeta = %.2g", hz,
              dev, lp / delta)};
}

Outcome iswap_identity() {
  const double lp = 2.0 * pi * 3.5e6, delta = 2.0 * pi * 35e6;
  const double g = make_dispersive_params({lp, lp}, {delta, delta}).g_eff;
  const double t = iswap_time(g);
  // Exact propagator of the interaction-picture flip-flop Hamiltonian.
  const Matrix u = unitary_propagator(g * flip_flop().matrix(), t);
  const double process = std::norm((ideal_iswap().adjoint() * u).trace()) / 16.0;
  // Master-equation path with all rates zero.
  GateStudyParams p;
  p.kappa = p.gamma_m = 0.0;
  p.composite = false;
  p.dt = t / 400.0;
  const auto r = full_dissipative_experiment(p);
  const Vector ge = basis_state(two_spin_space(), {1, 0});
  const Vector want = ideal_iswap() * ge;
  const double state = fidelity_pure(want, r.spin_state);
  return {process >= 1.0 - 1e-9 && state >= 1.0 - 1e-9,
          fmt("process fidelity 1 - %.2g; RK4 (dt = t_gate/400) state fidelity 1 - %.2g (tol 1e-9)", 1.0 - process,
              1.0 - state)};
}

Outcome gate_robustness() {
  double worst = 0.0;
  const auto start = std::chrono::steady_clock::now();
  // Boson-only dissipation at the strongest allowed rates and occupations.
  for (double nth : {0.5, 0.0}) {
    GateStudyParams p;
    p.kappa = 1e6;
    p.gamma_m = 10.0;
    p.n_th_a = p.n_th_m = nth;
    p.n_a = p.n_b = 20;
    const auto r = full_dissipative_experiment(p);
    for (double d : r.trajectory.series("trace_distance")) worst = std::max(worst, d);
  }
  const double factor_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 2.0;
  GateStudyParams p;  // kappa 1e6, n_th_a 0.01, gamma_m 10, n_th_m 260 (capped), composite n = 20
  p.gamma_perp = 1e3;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = full_dissipative_experiment(p);
  const double run = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = worst < 1e-6 && r.gate_fidelity >= 0.995 && run < 120.0 && factor_time < 120.0;
  return {ok, fmt("boson-only max trace distance %.3g (tol 1e-6); gamma_perp = 1e3 gate fidelity %.6f (>= 0.995); "
                  "composite run %.2f s (< 120 s)",
                  worst, r.gate_fidelity, std::max(run, factor_time))};
}

int run_sim(const std::string& experiment, const std::string& cfg, const std::string& out) {
  const std::string cmd = std::string(SIM_EXECUTABLE) + " " + experiment + " --config " + CONFIG_DIR + "/" + cfg +
                          " --out " + out + " >/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome figure_shapes() {
  const auto dir = std::filesystem::temp_directory_path() / ("critpol_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::string why;
  auto check = [&](bool cond, const std::string& msg) {
    if (!cond && why.empty()) why = msg;
  };
  check(run_sim("spectrum", "spectrum.cfg", dir.string()) == 0, "sim spectrum failed");
  check(run_sim("coupling-map", "coupling_map.cfg", dir.string()) == 0, "sim coupling-map failed");
  std::size_t spectrum_rows = 0, map_rows = 0;
  if (why.empty()) {
    const auto s = cli::read_csv_file((dir / "spectrum.csv").string());
    spectrum_rows = s.rows.size();
    const auto cg = s.column("G"), cp = s.column("omega_plus"), cm = s.column("omega_minus"), cc = s.column("G_c");
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      check(s.rows[i].back() == "ok", "spectrum row not ok");
      if (i == 0 || !why.empty()) continue;
      check(std::stod(s.rows[i][cg]) > std::stod(s.rows[i - 1][cg]), "spectrum G not increasing");
      check(std::stod(s.rows[i][cm]) < std::stod(s.rows[i - 1][cm]), "omega_- not decreasing in G");
      check(std::stod(s.rows[i][cp]) > std::stod(s.rows[i - 1][cp]), "omega_+ not increasing in G");
    }
    const auto& last = s.rows.back();
    check(std::abs(std::stod(last[cg]) / std::stod(last[cc]) - 1.0) < 1e-12, "spectrum does not end at G_c");
    check(std::stod(last[cm]) <= 1e-12 * std::stod(last[cp]), "omega_- does not vanish at G_c");

    const auto m = cli::read_csv_file((dir / "coupling_map.csv").string());
    map_rows = m.rows.size();
    const auto cr = m.column("delta_a_over_omega_m"), co = m.column("omega_minus_over_delta_a");
    const auto clp = m.column("lambda_plus"), clm = m.column("lambda_minus");
    std::map<double, std::vector<std::tuple<double, double, double>>> by_ratio;  // ratio -> (r, lambda+, lambda-)
    for (const auto& row : m.rows) {
      check(row.back() == "ok", "coupling-map row not ok");
      if (row.back() == "ok")
        by_ratio[std::stod(row[cr])].emplace_back(std::stod(row[co]), std::stod(row[clp]), std::stod(row[clm]));
    }
    check(by_ratio.size() >= 2 && by_ratio.begin()->first == 1.0 && by_ratio.rbegin()->first == 10.0,
          "coupling map must span Delta_a/omega_m = 1..10");
    for (auto& [ratio, pts] : by_ratio) {
      std::sort(pts.begin(), pts.end());  // omega_-/Delta_a ascending
      for (std::size_t i = 1; i < pts.size(); ++i) {
        check(std::get<1>(pts[i]) < std::get<1>(pts[i - 1]), "lambda_+ not increasing as omega_-/Delta_a -> 0");
        check(std::get<2>(pts[i]) < std::get<2>(pts[i - 1]), "lambda_- not increasing as omega_-/Delta_a -> 0");
      }
      check(std::get<1>(pts.front()) > 100.0 * std::get<1>(pts.back()), "lambda_+ does not diverge");
    }
    for (auto it = std::next(by_ratio.begin()); it != by_ratio.end(); ++it) {
      const auto& lo = std::prev(it)->second;
      const auto& hi = it->second;
      for (std::size_t i = 0; i < std::min(lo.size(), hi.size()); ++i) {
        check(std::get<1>(hi[i]) > std::get<1>(lo[i]), "lambda_+ not increasing with Delta_a/omega_m");
        check(std::get<2>(hi[i]) > std::get<2>(lo[i]), "lambda_- not increasing with Delta_a/omega_m");
      }
    }
  }
  std::filesystem::remove_all(dir);
  return {why.empty(), why.empty() ? fmt("spectrum %g rows monotone, omega_- = 0 at G_c; coupling map %g rows: lambda_pm "
                                         "diverge as omega_-/Delta_a -> 0 and grow with Delta_a/omega_m",
                                         static_cast<double>(spectrum_rows), static_cast<double>(map_rows))
                                   : why};
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  struct Criterion {
    const char* name;
    double budget_s;  // 0 = no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"critical point", 1.0, critical_point},
      {"closed form vs symplectic eigenvalues", 5.0, closed_vs_numeric},
      {"enhancement ratio", 0.0, enhancement},
      {"decoupling limits", 0.0, decoupling},
      {"vacuum Rabi oscillation", 30.0, rabi},
      {"effective spin-spin coupling", 0.0, effective_coupling},
      {"single-polariton Stark shift", 0.0, stark},
      {"iSWAP identity", 0.0, iswap_identity},
      {"gate robustness", 0.0, gate_robustness},
      {"sweep shapes from sim CSV", 10.0, figure_shapes},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      o.pass = false;
      o.detail += fmt(" [runtime %.2f s exceeds %.0f s]", secs, c.budget_s);
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
