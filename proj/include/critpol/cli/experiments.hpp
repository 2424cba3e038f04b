#pragma once

// Experiment registry and runner behind the `sim` command.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "critpol/cli/config.hpp"
#include "critpol/cli/csv.hpp"
#include "critpol/cli/sweep.hpp"
#include "critpol/dispersive.hpp"
#include "critpol/dynamics/experiments.hpp"
#include "critpol/errors.hpp"
#include "critpol/meanfield.hpp"
#include "critpol/polariton.hpp"

namespace critpol::cli {

/// Parameter values at one grid point: fixed params overlaid with axis values.
class Params {
 public:
  Params(const std::map<std::string, double>& base, const std::vector<SweepAxis>& axes, const std::vector<double>& point)
      : values_(base) {
    for (std::size_t i = 0; i < axes.size(); ++i) values_[axes[i].name] = point[i];
  }

  bool has(const std::string& name) const { return values_.count(name) > 0; }
  double get(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("missing required parameter '" + name + "'");
    return it->second;
  }
  double get_or(const std::string& name, double fallback) const { return has(name) ? get(name) : fallback; }

 private:
  std::map<std::string, double> values_;
};

using Derived = std::vector<std::pair<std::string, double>>;

struct ExperimentDef {
  std::string name;
  std::string description;
  std::set<std::string> params;
  std::set<std::string> numerics;
  std::vector<std::vector<std::string>> exclusive;  ///< at most one of each group may be given
  std::string default_format = "wide";
  // Point experiments (sweepable).
  std::vector<std::string> columns;
  std::function<std::vector<double>(const Params&, const ExperimentConfig&)> kernel;
  // Time-series experiments (not sweepable): fill columns, rows, extra metadata.
  std::function<void(const Params&, const ExperimentConfig&, Table&)> series;
  // Quantities echoed in the metadata block, evaluated at the first grid point.
  std::function<Derived(const Params&, const ExperimentConfig&)> derived;
};

/// Status column value for a per-point physics error.
inline std::string status_of(const DomainError& e) {
  if (dynamic_cast<const UnstableRegime*>(&e)) return "unstable";
  if (dynamic_cast<const SingularCoupling*>(&e)) return "singular";
  if (dynamic_cast<const NonDispersive*>(&e)) return "nondispersive";
  if (dynamic_cast<const NonConvergence*>(&e)) return "nonconvergent";
  if (dynamic_cast<const TruncationError*>(&e)) return "truncation";
  return "error";
}

namespace detail {

inline double numeric_or(const ExperimentConfig& cfg, const std::string& key, double fallback) {
  const auto it = cfg.numerics.find(key);
  return it == cfg.numerics.end() ? fallback : it->second;
}

inline std::size_t count_or(const ExperimentConfig& cfg, const std::string& key, std::size_t fallback) {
  const double v = numeric_or(cfg, key, static_cast<double>(fallback));
  if (v != std::floor(v) || v < 0.0) throw ConfigError("numerics." + key + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline double omega_m_of(const Params& p) { return p.get_or("omega_m", 1.0); }

inline double delta_a_of(const Params& p) {
  return p.has("delta_a") ? p.get("delta_a") : p.get_or("delta_a_over_omega_m", 1.0) * omega_m_of(p);
}

/// Polariton basis from whichever of G, G_over_omega_m, gap, omega_minus,
/// omega_minus_over_delta_a is given (G = 0 when none is).
inline PolaritonBasis basis_of(const Params& p, double lambda = 1.0) {
  const double wm = omega_m_of(p), da = delta_a_of(p);
  if (p.has("omega_minus_over_delta_a"))
    return bogoliubov_from_low_frequency(da, wm, p.get("omega_minus_over_delta_a") * da, lambda);
  if (p.has("omega_minus")) return bogoliubov_from_low_frequency(da, wm, p.get("omega_minus"), lambda);
  return bogoliubov_diagonalize(da, wm, p.has("G") ? p.get("G") : 0.0, lambda);
}

inline double coupling_of(const Params& p) {
  const double wm = omega_m_of(p), da = delta_a_of(p);
  if (p.has("G")) return p.get("G");
  if (p.has("G_over_omega_m")) return p.get("G_over_omega_m") * wm;
  if (p.has("gap")) return critical_coupling(da, wm) - p.get("gap") * wm;
  if (p.has("omega_minus_over_delta_a"))
    return coupling_for_low_frequency(da, wm, p.get("omega_minus_over_delta_a") * da);
  if (p.has("omega_minus")) return coupling_for_low_frequency(da, wm, p.get("omega_minus"));
  return 0.0;
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// G, G_c, omega_pm, theta and, for lambda != 0, the closed-form and exact
/// couplings; the trace and determinant identities are re-checked here.
inline Derived polariton_derived(double delta_a, double omega_m, double G, double lambda) {
  Derived d;
  const double gc = critical_coupling(delta_a, omega_m);
  const auto w = polariton_frequencies(delta_a, omega_m, G);
  d.insert(d.end(), {{"G", G}, {"G_c", gc}, {"omega_plus", w.plus}, {"omega_minus", w.minus},
                     {"theta", mixing_angle(delta_a, omega_m, G)}});
  const double wp2 = w.plus * w.plus, wm2 = w.minus * w.minus;
  const double trace_err = relative(wp2 + wm2, delta_a * delta_a + omega_m * omega_m);
  const double det_err = std::abs(wp2 * wm2 - (delta_a * delta_a * omega_m * omega_m - 4.0 * G * G * delta_a * omega_m)) /
                         (delta_a * delta_a * omega_m * omega_m);
  if (!(trace_err <= 1e-10) || !(det_err <= 1e-10))
    throw Error("derived polariton quantities violate the trace/determinant identities");
  d.emplace_back("trace_identity_error", trace_err);
  d.emplace_back("determinant_identity_error", det_err);
  if (lambda != 0.0 && w.minus > 0.0) {
    const auto b = bogoliubov_diagonalize(delta_a, omega_m, G, lambda);
    const auto ex = extract_spin_couplings(b, lambda);
    d.insert(d.end(), {{"lambda", lambda},
                       {"lambda_plus", b.couplings.lambda_plus},
                       {"lambda_minus", b.couplings.lambda_minus},
                       {"eta_plus", b.couplings.eta_plus},
                       {"eta_minus", b.couplings.eta_minus},
                       {"exact_lambda_plus", ex.lambda_plus},
                       {"exact_lambda_minus", ex.lambda_minus}});
  }
  return d;
}

inline Derived polariton_derived(const Params& p, double lambda) {
  return polariton_derived(delta_a_of(p), omega_m_of(p), coupling_of(p), lambda);
}

inline void append_series(Table& t, const Trajectory& traj) {
  t.columns = {"t"};
  for (const auto& [name, s] : traj.observables) t.columns.push_back(name);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<std::string> row{format_cell(traj.times[i])};
    for (const auto& [name, s] : traj.observables) row.push_back(format_cell(s[i]));
    t.rows.push_back(std::move(row));
  }
}

inline const std::set<std::string> kSystemParams{"omega_a", "omega_m", "omega_d",  "g",          "kappa",
                                                 "gamma_m", "Omega_d", "Omega_NV", "omega_NV",   "lambda",
                                                 "gamma_perp", "gamma_par", "L_a",  "d",          "T",
                                                 "Q"};

inline SystemParams system_params(const Params& p) {
  SystemParams s;
  s.omega_a = p.get_or("omega_a", s.omega_a);
  s.omega_m = p.get_or("omega_m", s.omega_m);
  s.omega_d = p.get_or("omega_d", s.omega_d);
  s.g = p.get_or("g", s.g);
  s.kappa = p.get_or("kappa", s.kappa);
  s.gamma_m = p.get_or("gamma_m", s.gamma_m);
  s.Omega_d = p.get_or("Omega_d", s.Omega_d);
  s.Omega_NV = p.get_or("Omega_NV", s.Omega_NV);
  s.omega_NV = p.get_or("omega_NV", s.omega_NV);
  s.lambda = p.get_or("lambda", s.lambda);
  s.gamma_perp = p.get_or("gamma_perp", s.gamma_perp);
  s.gamma_par = p.get_or("gamma_par", s.gamma_par);
  s.L_a = p.get_or("L_a", s.L_a);
  s.d = p.get_or("d", s.d);
  s.T = p.get_or("T", s.T);
  s.Q = p.get_or("Q", s.Q);
  return s;
}

inline ExperimentDef spectrum_def() {
  ExperimentDef e;
  e.name = "spectrum";
  e.description = "polariton frequencies versus the linearized coupling";
  e.params = {"omega_m", "delta_a", "delta_a_over_omega_m", "G", "G_over_omega_m", "gap"};
  e.exclusive = {{"delta_a", "delta_a_over_omega_m"}, {"G", "G_over_omega_m", "gap"}};
  e.columns = {"G", "G_c", "G_over_G_c", "omega_plus", "omega_minus", "omega_plus_numeric", "omega_minus_numeric", "theta"};
  e.kernel = [](const Params& p, const ExperimentConfig&) {
    const double wm = omega_m_of(p), da = delta_a_of(p), G = coupling_of(p);
    const double gc = critical_coupling(da, wm);
    const auto w = polariton_frequencies(da, wm, G);
    // Symplectic eigenvalues from the quadrature form: eig(Kp^1/2 Kx Kp^1/2) = omega^2.
    Eigen::Matrix2d m;
    m << da * da, -2.0 * G * std::sqrt(da * wm), -2.0 * G * std::sqrt(da * wm), wm * wm;
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m, Eigen::EigenvaluesOnly).eigenvalues();
    return std::vector<double>{G, gc, G / gc, w.plus, w.minus, std::sqrt(ev(1)), std::sqrt(std::max(0.0, ev(0))),
                               mixing_angle(da, wm, G)};
  };
  e.derived = [](const Params& p, const ExperimentConfig&) { return polariton_derived(p, 0.0); };
  return e;
}

inline ExperimentDef coupling_map_def() {
  ExperimentDef e;
  e.name = "coupling-map";
  e.description = "spin-polariton couplings near the critical point";
  e.params = {"lambda", "omega_m", "delta_a", "delta_a_over_omega_m", "G", "G_over_omega_m", "gap", "omega_minus",
              "omega_minus_over_delta_a"};
  e.exclusive = {{"delta_a", "delta_a_over_omega_m"},
                 {"G", "G_over_omega_m", "gap", "omega_minus", "omega_minus_over_delta_a"}};
  e.default_format = "long";
  e.columns = {"delta_a_over_omega_m", "gap", "omega_minus_over_delta_a", "G", "G_c", "omega_plus", "omega_minus",
               "theta", "lambda_plus", "lambda_minus", "eta_plus", "eta_minus", "exact_lambda_plus",
               "exact_lambda_minus", "exact_eta_plus", "exact_eta_minus"};
  e.kernel = [](const Params& p, const ExperimentConfig&) {
    const double lambda = p.get_or("lambda", 1.0);
    const double wm = omega_m_of(p), da = delta_a_of(p);
    const PolaritonBasis b = (p.has("omega_minus") || p.has("omega_minus_over_delta_a"))
                                 ? basis_of(p, lambda)
                                 : bogoliubov_diagonalize(da, wm, coupling_of(p), lambda);
    const auto& c = b.couplings;
    const auto ex = extract_spin_couplings(b, lambda);
    return std::vector<double>{da / wm,     (b.G_c - b.G) / wm, b.omega_minus / da, b.G,
                               b.G_c,       b.omega_plus,       b.omega_minus,      b.theta,
                               c.lambda_plus, c.lambda_minus,   c.eta_plus,         c.eta_minus,
                               ex.lambda_plus, ex.lambda_minus, ex.eta_plus,        ex.eta_minus};
  };
  e.derived = [](const Params& p, const ExperimentConfig&) { return polariton_derived(p, p.get_or("lambda", 1.0)); };
  return e;
}

inline ExperimentDef meanfield_def() {
  ExperimentDef e;
  e.name = "meanfield";
  e.description = "driven steady state, linearized coupling and physical estimates";
  e.params = kSystemParams;
  e.numerics = {"tol"};
  e.columns = {"a_re", "a_im", "b_re", "b_im", "N", "delta_a", "G", "G_c", "G_over_G_c", "residual",
               "lambda_estimate", "n_th_a", "n_th_m"};
  e.kernel = [](const Params& p, const ExperimentConfig& cfg) {
    const SystemParams s = system_params(p);
    const auto mf = solve_mean_fields(s, numeric_or(cfg, "tol", 1e-12));
    const double gc = mf.delta_a > 0.0 ? critical_coupling(mf.delta_a, s.omega_m) : std::nan("");
    const double lam = s.omega_a > 0.0 ? coupling_estimate(s.d, s.omega_a, s.L_a) : std::nan("");
    const double na = s.omega_a > 0.0 ? thermal_occupation(s.omega_a, s.T) : std::nan("");
    return std::vector<double>{mf.a_mean.real(), mf.a_mean.imag(), mf.b_mean.real(), mf.b_mean.imag(),
                               mf.N,             mf.delta_a,       mf.G,             gc,
                               mf.G / gc,        mf.residual,      lam,              na,
                               thermal_occupation(s.omega_m, s.T)};
  };
  e.derived = [](const Params& p, const ExperimentConfig& cfg) {
    const SystemParams s = system_params(p);
    const auto mf = solve_mean_fields(s, numeric_or(cfg, "tol", 1e-12));
    Derived d{{"N", mf.N}, {"delta_a", mf.delta_a}, {"G", mf.G}};
    if (mf.delta_a > 0.0 && mf.G <= critical_coupling(mf.delta_a, s.omega_m)) {
      const auto pd = polariton_derived(mf.delta_a, s.omega_m, mf.G, s.lambda);
      d.insert(d.end(), pd.begin() + 1, pd.end());
    }
    return d;
  };
  return e;
}

inline ExperimentDef stark_def() {
  ExperimentDef e;
  e.name = "stark";
  e.description = "ac Stark shift and effective coupling in the dispersive regime";
  e.params = {"lambda_plus", "delta", "N_pl", "omega_minus"};
  e.columns = {"zeta", "zero_point", "shift", "shift_hz", "single_polariton_shift", "exact_single_polariton_shift",
               "relative_error", "g_eff", "g_eff_hz"};
  e.kernel = [](const Params& p, const ExperimentConfig&) {
    const double lp = p.get("lambda_plus"), delta = p.get("delta");
    const auto s = stark_shift(lp, delta, p.get_or("N_pl", 1.0));
    const double single = stark_shift(lp, delta, 1.0).shift;
    const double exact = exact_stark_shift(lp, delta, p.get_or("omega_minus", 1.0));
    const double g = make_dispersive_params({lp, lp}, {delta, delta}).g_eff;
    const double two_pi = 2.0 * std::numbers::pi;
    return std::vector<double>{lp / std::abs(delta), s.zero_point, s.shift, s.shift / two_pi, single, exact,
                               relative(exact, single), g, g / two_pi};
  };
  return e;
}

inline ExperimentDef rabi_def() {
  ExperimentDef e;
  e.name = "rabi";
  e.description = "vacuum Rabi oscillation between one spin and the low polariton";
  e.params = {"lambda_plus", "omega_minus", "kappa", "gamma_perp", "gamma_par"};
  e.numerics = {"n_max", "t_final", "dt"};
  e.series = [](const Params& p, const ExperimentConfig& cfg, Table& t) {
    RabiParams r;
    r.lambda_plus = p.get_or("lambda_plus", r.lambda_plus);
    r.omega_minus = p.get_or("omega_minus", r.omega_minus);
    r.kappa = p.get_or("kappa", r.kappa);
    r.gamma_perp = p.get_or("gamma_perp", r.gamma_perp);
    r.gamma_par = p.get_or("gamma_par", r.gamma_par);
    r.n_max = count_or(cfg, "n_max", r.n_max);
    r.t_final = numeric_or(cfg, "t_final", r.t_final);
    r.dt = numeric_or(cfg, "dt", r.dt);
    const auto traj = rabi_experiment(r);
    t.meta("derived.rabi_period", rabi_period(r.lambda_plus));
    t.meta("derived.max_trace_drift", traj.max_trace_drift);
    append_series(t, traj);
  };
  return e;
}

inline ExperimentDef iswap_def() {
  ExperimentDef e;
  e.name = "iswap";
  e.description = "iSWAP gate fidelity under thermal dissipation";
  e.params = {"lambda_plus", "lambda_plus1", "lambda_plus2", "delta", "delta1", "delta2", "omega_minus", "kappa",
              "n_th_a", "gamma_m", "n_th_m", "gamma_perp", "gamma_par"};
  e.exclusive = {{"lambda_plus", "lambda_plus1"}, {"lambda_plus", "lambda_plus2"}, {"delta", "delta1"}, {"delta", "delta2"}};
  e.numerics = {"n_a", "n_b", "composite", "t_final", "dt"};
  e.series = [](const Params& p, const ExperimentConfig& cfg, Table& t) {
    GateStudyParams g;
    g.lambda_plus1 = p.get_or("lambda_plus1", p.get_or("lambda_plus", g.lambda_plus1));
    g.lambda_plus2 = p.get_or("lambda_plus2", p.get_or("lambda_plus", g.lambda_plus2));
    g.delta1 = p.get_or("delta1", p.get_or("delta", g.delta1));
    g.delta2 = p.get_or("delta2", p.get_or("delta", g.delta2));
    g.omega_minus = p.get_or("omega_minus", g.omega_minus);
    g.kappa = p.get_or("kappa", g.kappa);
    g.n_th_a = p.get_or("n_th_a", g.n_th_a);
    g.gamma_m = p.get_or("gamma_m", g.gamma_m);
    g.n_th_m = p.get_or("n_th_m", g.n_th_m);
    g.gamma_perp = p.get_or("gamma_perp", g.gamma_perp);
    g.gamma_par = p.get_or("gamma_par", g.gamma_par);
    g.n_a = count_or(cfg, "n_a", g.n_a);
    g.n_b = count_or(cfg, "n_b", g.n_b);
    g.composite = numeric_or(cfg, "composite", 1.0) != 0.0;
    g.t_final = numeric_or(cfg, "t_final", g.t_final);
    g.dt = numeric_or(cfg, "dt", g.dt);
    const auto res = full_dissipative_experiment(g);
    const double two_pi = 2.0 * std::numbers::pi;
    t.meta("derived.zeta1", res.dispersive.zeta[0]);
    t.meta("derived.zeta2", res.dispersive.zeta[1]);
    t.meta("derived.g_eff", res.dispersive.g_eff);
    t.meta("derived.g_eff_hz", res.dispersive.g_eff / two_pi);
    t.meta("derived.delta_eff1", res.dispersive.delta_eff[0]);
    t.meta("derived.delta_eff2", res.dispersive.delta_eff[1]);
    t.meta("derived.t_gate", res.t_gate);
    t.meta("derived.gate_fidelity", res.gate_fidelity);
    t.meta("derived.n_th_a_used", res.n_th_a_used);
    t.meta("derived.n_th_m_used", res.n_th_m_used);
    t.meta("derived.max_trace_drift", res.trajectory.max_trace_drift);
    for (const auto& w : res.warnings) t.meta("warning", w);
    append_series(t, res.trajectory);
  };
  return e;
}

}  // namespace detail

inline const std::map<std::string, ExperimentDef>& registry() {
  static const std::map<std::string, ExperimentDef> reg = [] {
    std::map<std::string, ExperimentDef> m;
    for (auto e : {detail::spectrum_def(), detail::coupling_map_def(), detail::meanfield_def(), detail::stark_def(),
                   detail::rabi_def(), detail::iswap_def()})
      m.emplace(e.name, std::move(e));
    return m;
  }();
  return reg;
}

inline const ExperimentDef& find_experiment(const std::string& name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) {
    std::string known;
    for (const auto& [n, e] : reg) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown experiment '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

inline void check_config(const ExperimentDef& e, const ExperimentConfig& cfg) {
  auto known = [&](const std::string& what, const std::string& name, const std::set<std::string>& allowed) {
    if (!allowed.count(name)) throw ConfigError(cfg.source + ": experiment '" + e.name + "' has no " + what + " '" + name + "'");
  };
  std::set<std::string> given;
  for (const auto& [name, v] : cfg.params) {
    known("parameter", name, e.params);
    given.insert(name);
  }
  for (const auto& ax : cfg.sweep) {
    known("parameter", ax.name, e.params);
    given.insert(ax.name);
  }
  for (const auto& [name, v] : cfg.numerics) known("numerics key", name, e.numerics);
  for (const auto& [name, v] : cfg.output) known("output key", name, {"file", "format"});
  for (const auto& group : e.exclusive) {
    std::vector<std::string> hit;
    for (const auto& g : group)
      if (given.count(g)) hit.push_back(g);
    if (hit.size() > 1) throw ConfigError(cfg.source + ": parameters '" + hit[0] + "' and '" + hit[1] + "' are alternatives; give one");
  }
  if (e.series && !cfg.sweep.empty())
    throw ConfigError(cfg.source + ": experiment '" + e.name + "' is a time series and does not accept sweep axes");
  for (const char* key : {"n_max", "n_a", "n_b"})
    if (const auto it = cfg.numerics.find(key); it != cfg.numerics.end() && it->second < 2.0)
      throw ConfigError(cfg.source + ": numerics." + key + " must be >= 2");
}

/// Runs the configured experiment. Without sweep axes a physics error
/// propagates; within a sweep it becomes that row's status.
inline Table run_experiment(const ExperimentConfig& cfg, std::size_t threads = 1) {
  const ExperimentDef& e = find_experiment(cfg.experiment);
  check_config(e, cfg);

  Table t;
  t.meta("experiment", e.name);
  t.meta("description", e.description);
  t.meta("units", std::string(cfg.units == Units::hertz ? "hertz" : "angular") +
                      " input; values below and all output in rad/s, s, K, H, m");
  for (const auto& [k, v] : cfg.params) t.meta("param." + k, v);
  for (const auto& ax : cfg.sweep) t.meta("sweep." + ax.name, ax.describe());
  for (const auto& [k, v] : cfg.numerics) t.meta("numerics." + k, v);

  const auto grid = sweep_grid(cfg.sweep);
  const Params first(cfg.params, cfg.sweep, grid.front());
  if (e.derived) {
    try {
      const std::string where = cfg.sweep.empty() ? "derived." : "derived(first point).";
      for (const auto& [k, v] : e.derived(first, cfg)) t.meta(where + k, v);
    } catch (const DomainError& err) {
      if (cfg.sweep.empty()) throw;
      t.meta("derived", std::string("unavailable at the first grid point: ") + err.what());
    }
  }

  if (e.series) {
    e.series(first, cfg, t);
    return t;
  }

  struct Point {
    std::vector<double> values;
    std::string status = "ok";
  };
  auto eval = [&](std::size_t i) {
    Point out;
    const Params p(cfg.params, cfg.sweep, grid[i]);
    if (cfg.sweep.empty()) {
      out.values = e.kernel(p, cfg);
      return out;
    }
    try {
      out.values = e.kernel(p, cfg);
    } catch (const DomainError& err) {
      out.status = status_of(err);
    }
    return out;
  };
  const auto points = parallel_map<Point>(grid.size(), threads, eval);

  std::set<std::string> axis_names;
  for (const auto& ax : cfg.sweep) axis_names.insert(ax.name);
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < e.columns.size(); ++c)
    if (!axis_names.count(e.columns[c])) kept.push_back(c);

  const auto fmt = cfg.output.count("format") ? cfg.output.at("format") : e.default_format;
  t.meta("format", fmt);
  for (const auto& ax : cfg.sweep) t.columns.push_back(ax.name);
  if (fmt == "long") {
    t.columns.insert(t.columns.end(), {"quantity", "value", "status"});
  } else {
    for (std::size_t c : kept) t.columns.push_back(e.columns[c]);
    t.columns.push_back("status");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> axes;
    for (double v : grid[i]) axes.push_back(format_cell(v));
    const auto& pt = points[i];
    auto value = [&](std::size_t c) { return pt.status == "ok" ? format_cell(pt.values.at(c)) : std::string{}; };
    if (fmt == "long") {
      for (std::size_t c : kept) {
        auto row = axes;
        row.insert(row.end(), {e.columns[c], value(c), pt.status});
        t.rows.push_back(std::move(row));
      }
    } else {
      auto row = axes;
      for (std::size_t c : kept) row.push_back(value(c));
      row.push_back(pt.status);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

/// Output path: <dir>/<output.file>, defaulting to <experiment>.csv.
inline std::string output_path(const ExperimentConfig& cfg, const std::string& dir) {
  const std::string file = cfg.output.count("file") ? cfg.output.at("file") : cfg.experiment + ".csv";
  if (dir.empty() || (!file.empty() && file.front() == '/')) return file;
  return dir.back() == '/' ? dir + file : dir + "/" + file;
}

inline std::size_t default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace critpol::cli
