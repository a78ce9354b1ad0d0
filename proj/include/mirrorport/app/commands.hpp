#pragma once

// The six subcommands. Each returns its CSV table, a JSON summary and a short
// human-readable report; the caller decides where each goes.

#include "mirrorport/app/config.hpp"
#include "mirrorport/app/csv.hpp"
#include "mirrorport/mirrorport.hpp"

#include <json.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace mirrorport::app {

struct CommandResult {
  std::string csv;
  nlohmann::json summary;
  std::string report;
};

/// JSON has no infinity; non-finite values become null.
inline nlohmann::json num(Real v) {
  if (!std::isfinite(v)) return nullptr;
  return static_cast<double>(v);
}

inline std::vector<McPoint> default_mc_points() {
  const Real two_pi = 2 * std::acos(Real(-1));
  return {{two_pi - Real(0.001), 0},    {two_pi - Real(0.001), 1},   {two_pi - Real(0.001), 10},
          {two_pi - Real(0.001), 1000}, {two_pi - Real(0.003), 0},   {two_pi - Real(0.01), 0},
          {Real(0.0005), 0},            {two_pi - Real(0.002), 1},   {two_pi - Real(0.0015), 10},
          {two_pi - Real(0.0012), 1000}};
}

/// Warning when the propagator over the period exceeds the precision budget.
inline std::vector<std::string> precision_warnings(const Couplings<Real>& c) {
  if (!(c.big_theta() > 0)) return {};
  const Matrix<Real> s = propagator(c, std::acos(Real(-1)) / c.big_theta());
  if (!exceeds_precision_budget(s)) return {};
  return {"propagator entries reach " + format_number(max_abs<Real>(s)) +
          " (> 1e8); evolved moments lose precision and results may be unreliable"};
}

struct CurveReport {
  Real nbar{0};
  std::vector<ProtocolResult<Real>> points;
  CurveSummary<Real> fidelity;
  CurveSummary<Real> no_heterodyne;
  Real n_eff_at_max{0};
  Real n_eff_at_zero{0};
  Real f_at_zero{0};
};

struct SweepData {
  Couplings<Real> couplings;
  std::vector<Real> grid;
  std::vector<CurveReport> curves;
};

inline SweepData run_sweep(const RunConfig& cfg) {
  validate_config(cfg);
  SweepData d;
  d.couplings = couplings_from_params(cfg.params);
  d.grid = sweep_grid<Real>(cfg.grid.start, cfg.grid.stop, cfg.grid.points, cfg.edge_points);
  const SignVariant v = cfg.variant();
  const auto alpha = cfg.alpha_in();
  for (const Real nbar : effective_nbars(cfg)) {
    CurveReport r;
    r.nbar = nbar;
    r.points = fidelity_curve(d.couplings, nbar, std::span<const Real>(d.grid), v, alpha, cfg.thread_count());
    std::vector<Real> f, fn;
    for (const auto& p : r.points) {
      if (!std::isfinite(p.fidelity) || !std::isfinite(p.fidelity_no_het) || !std::isfinite(p.n_eff)) {
        std::ostringstream msg;
        msg << "nonfinite fidelity at theta_t=" << format_number(p.theta_t) << ", nbar=" << format_number(nbar);
        throw NumericalContractError(msg.str());
      }
      f.push_back(p.fidelity);
      fn.push_back(p.fidelity_no_het);
    }
    const auto& c = d.couplings;
    const std::function<Real(Real)> ff = [&](Real x) { return evaluate_point(c, nbar, x, v, alpha).fidelity; };
    const std::function<Real(Real)> fnh = [&](Real x) { return evaluate_point(c, nbar, x, v, alpha).fidelity_no_het; };
    r.fidelity = analyze_curve<Real>(ff, d.grid, f, Real(0.5));
    r.no_heterodyne = analyze_curve<Real>(fnh, d.grid, fn, Real(0.5));
    r.n_eff_at_max = evaluate_point(c, nbar, r.fidelity.argmax, v, alpha).n_eff;
    const auto zero = evaluate_point(c, nbar, Real(0), v, alpha);
    r.n_eff_at_zero = zero.n_eff;
    r.f_at_zero = zero.fidelity;
    d.curves.push_back(std::move(r));
  }
  return d;
}

inline CommandResult cmd_couplings(const RunConfig& cfg) {
  validate_config(cfg);
  const auto c = couplings_from_params(cfg.params);
  const Real big = c.big_theta();
  const Real ratio_minus_one = c.gap / (c.chi * (c.theta + c.chi));  // θ/χ − 1
  const Real period_s = 2 * std::acos(Real(-1)) / big;
  CsvTable t({"chi_rad_s", "theta_rad_s", "big_theta_rad_s", "theta_over_chi_minus_1", "period_s"});
  t.add_row({format_number(c.chi), format_number(c.theta), format_number(big), format_number(ratio_minus_one),
             format_number(period_s)});
  CommandResult out;
  out.csv = t.text();
  auto warnings = validate(cfg.params);
  for (auto& w : precision_warnings(c)) warnings.push_back(std::move(w));
  out.summary = {{"command", "couplings"},
                 {"chi_rad_s", num(c.chi)},
                 {"theta_rad_s", num(c.theta)},
                 {"big_theta_rad_s", num(big)},
                 {"theta_over_chi_minus_1", num(ratio_minus_one)},
                 {"period_s", num(period_s)},
                 {"warnings", warnings}};
  std::ostringstream rep;
  rep << "chi = " << format_number(c.chi) << " rad/s, theta = " << format_number(c.theta)
      << " rad/s, Theta = " << format_number(big) << " rad/s, theta/chi - 1 = " << format_number(ratio_minus_one)
      << "\n";
  for (const auto& w : warnings) rep << "warning: " << w << "\n";
  out.report = rep.str();
  return out;
}

inline CommandResult cmd_fidelity_sweep(const RunConfig& cfg) {
  const auto d = run_sweep(cfg);
  CsvTable t({"theta_t", "nbar", "F", "F_no_het", "n_eff"});
  for (const auto& r : d.curves)
    for (const auto& p : r.points)
      t.add_row({format_number(p.theta_t), format_number(r.nbar), format_number(p.fidelity),
                 format_number(p.fidelity_no_het), format_number(p.n_eff)});

  CommandResult out;
  out.csv = t.text();
  nlohmann::json curves = nlohmann::json::array();
  std::ostringstream rep;
  for (const auto& w : precision_warnings(d.couplings)) rep << "warning: " << w << "\n";
  Real lo = std::numeric_limits<Real>::infinity(), hi = -lo;
  bool decreasing = true;
  for (std::size_t i = 0; i < d.curves.size(); ++i) {
    const auto& r = d.curves[i];
    lo = std::min(lo, r.fidelity.max_value);
    hi = std::max(hi, r.fidelity.max_value);
    if (i > 0 && !(r.fidelity.window_measure < d.curves[i - 1].fidelity.window_measure)) decreasing = false;
    curves.push_back({{"nbar", num(r.nbar)},
                      {"F_max", num(r.fidelity.max_value)},
                      {"argmax_theta_t", num(r.fidelity.argmax)},
                      {"window_width", num(r.fidelity.window_measure)},
                      {"window_count", r.fidelity.window_count},
                      {"F_at_zero", num(r.f_at_zero)},
                      {"F_no_het_max", num(r.no_heterodyne.max_value)},
                      {"n_eff_min", num(r.n_eff_at_max)}});
    rep << "nbar = " << format_number(r.nbar) << ": F_max = " << format_number(r.fidelity.max_value)
        << " at theta_t = " << format_number(r.fidelity.argmax)
        << ", width of {F > 1/2} = " << format_number(r.fidelity.window_measure)
        << ", F_max without heterodyne = " << format_number(r.no_heterodyne.max_value) << "\n";
  }
  out.summary = {{"command", "fidelity-sweep"},
                 {"sign_variant", cfg.sign_variant},
                 {"grid_points", d.grid.size()},
                 {"curves", curves},
                 {"F_max_spread", num(hi - lo)},
                 {"windows_strictly_decreasing", decreasing}};
  rep << "spread of F_max across nbar = " << format_number(hi - lo) << "\n";
  out.report = rep.str();
  return out;
}

inline CommandResult cmd_cooling(const RunConfig& cfg) {
  const auto d = run_sweep(cfg);
  CsvTable t({"theta_t", "nbar", "n_eff"});
  for (const auto& r : d.curves)
    for (const auto& p : r.points) t.add_row({format_number(p.theta_t), format_number(r.nbar), format_number(p.n_eff)});

  CommandResult out;
  out.csv = t.text();
  nlohmann::json curves = nlohmann::json::array();
  std::ostringstream rep;
  Real overall = std::numeric_limits<Real>::infinity();
  for (const auto& r : d.curves) {
    const Real from_fidelity = 1 / r.fidelity.max_value - 1;
    overall = std::min(overall, r.n_eff_at_max);
    curves.push_back({{"nbar", num(r.nbar)},
                      {"n_eff_min", num(r.n_eff_at_max)},
                      {"theta_t_at_min", num(r.fidelity.argmax)},
                      {"one_over_F_max_minus_one", num(from_fidelity)},
                      {"n_eff_at_zero", num(r.n_eff_at_zero)},
                      {"thermal_noise_reduction", num(r.nbar + 1 > 0 ? 1 - r.n_eff_at_max / (r.nbar + 1) : Real(0))}});
    rep << "nbar = " << format_number(r.nbar) << ": min n_eff = " << format_number(r.n_eff_at_max)
        << " at theta_t = " << format_number(r.fidelity.argmax) << " (n_eff(0) = " << format_number(r.n_eff_at_zero)
        << ")\n";
  }
  out.summary = {{"command", "cooling"}, {"curves", curves}, {"n_eff_min", num(overall)}};
  out.report = rep.str();
  return out;
}

inline CommandResult cmd_montecarlo(const RunConfig& cfg) {
  validate_config(cfg);
  const auto c = couplings_from_params(cfg.params);
  const auto pts = cfg.mc_points.empty() ? default_mc_points() : cfg.mc_points;
  const SignVariant v = cfg.variant();
  const auto alpha = cfg.alpha_in();
  CsvTable t({"point", "theta_t", "nbar", "F_analytic", "F_mc", "stderr", "z", "mean_transport_max_dev"});
  nlohmann::json rows = nlohmann::json::array();
  Real max_z = 0, max_dev = 0;
  std::ostringstream rep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& pt = pts[i];
    const TrajectorySimulator<Real> sim(c, pt.nbar, pt.theta_t / c.big_theta(), alpha, v);
    const Real analytic = v == SignVariant{} ? fidelity_coherent(sim.coefficients())
                                             : variant_fidelity(sim.coefficients(), v, alpha);
    const auto s = summarize_ensemble(sim, cfg.mc_n_traj, mix_seed(cfg.mc_seed + i), cfg.thread_count());
    const Real z = (s.fidelity.mean - analytic) / s.fidelity.stderr_;
    max_z = std::max(max_z, std::abs(z));
    max_dev = std::max(max_dev, s.max_mean_deviation);
    t.add_row({format_number(static_cast<std::uint64_t>(i)), format_number(pt.theta_t), format_number(pt.nbar),
               format_number(analytic), format_number(s.fidelity.mean), format_number(s.fidelity.stderr_),
               format_number(z), format_number(s.max_mean_deviation)});
    rows.push_back({{"point", i},
                    {"theta_t", num(pt.theta_t)},
                    {"nbar", num(pt.nbar)},
                    {"F_analytic", num(analytic)},
                    {"F_mc", num(s.fidelity.mean)},
                    {"stderr", num(s.fidelity.stderr_)},
                    {"z", num(z)},
                    {"mean_transport_max_dev", num(s.max_mean_deviation)}});
    rep << "point " << i << " (theta_t = " << format_number(pt.theta_t) << ", nbar = " << format_number(pt.nbar)
        << "): analytic " << format_number(analytic) << ", MC " << format_number(s.fidelity.mean) << " +- "
        << format_number(s.fidelity.stderr_) << ", z = " << format_number(z) << "\n";
  }
  CommandResult out;
  out.csv = t.text();
  out.summary = {{"command", "montecarlo"},
                 {"n_traj", cfg.mc_n_traj},
                 {"seed", cfg.mc_seed},
                 {"points", rows},
                 {"max_abs_z", num(max_z)},
                 {"max_mean_transport_dev", num(max_dev)}};
  rep << "max |z| = " << format_number(max_z) << ", max mean-transport deviation = " << format_number(max_dev) << "\n";
  out.report = rep.str();
  return out;
}

inline CommandResult cmd_readout_check(const RunConfig& cfg) {
  validate_config(cfg);
  const auto c = couplings_from_params(cfg.params);
  const Real big = c.big_theta();
  const int sigma = cfg.readout_sigma;
  const Real ratio = dominance_ratio(c);
  CsvTable t({"theta_t", "t_s", "sigma", "c_b", "c_a1", "c_a2", "printed_c_b", "printed_c_a1", "printed_c_a2",
              "residual_c_b", "residual_c_a1", "residual_c_a2", "dominance_ratio"});
  const auto grid = sweep_grid<Real>(cfg.grid.start, cfg.grid.stop, cfg.grid.points);
  for (const Real x : grid) {
    const Real time = x / big;
    const auto d = readout_coefficients(c, time, sigma);
    const auto p = printed_readout_coefficients(c, time);
    t.add_row({format_number(x), format_number(time), format_number(sigma), format_number(d.c_b),
               format_number(d.c_a1), format_number(d.c_a2), format_number(p.c_b), format_number(p.c_a1),
               format_number(p.c_a2), format_number(p.c_b - d.c_b), format_number(p.c_a1 - d.c_a1),
               format_number(p.c_a2 - d.c_a2), format_number(ratio)});
  }
  const auto d0 = readout_coefficients(c, Real(0), sigma);
  const auto r0 = printed_formula_residual(c, Real(0), sigma);
  CommandResult out;
  out.csv = t.text();
  out.summary = {{"command", "readout-check"},
                 {"sigma", sigma},
                 {"dominance_ratio", num(ratio)},
                 {"t0_coefficients", {num(d0.c_b), num(d0.c_a1), num(d0.c_a2)}},
                 {"t0_printed_residual", {num(r0.c_b), num(r0.c_a1), num(r0.c_a2)}}};
  std::ostringstream rep;
  rep << "dominance ratio theta(theta-chi)/[Theta(theta+chi)] = " << format_number(ratio) << "\n"
      << "t = 0 coefficients (b+, a1, a2+) = (" << format_number(d0.c_b) << ", " << format_number(d0.c_a1) << ", "
      << format_number(d0.c_a2) << ")\n"
      << "printed-formula residual at t = 0 = (" << format_number(r0.c_b) << ", " << format_number(r0.c_a1) << ", "
      << format_number(r0.c_a2) << ")  (reported, not asserted)\n";
  out.report = rep.str();
  return out;
}

inline CommandResult cmd_sensitivity(const RunConfig& cfg) {
  validate_config(cfg);
  const Real delta = cfg.rel_dpower;
  auto big_at = [&](Real scale) {
    PhysicalParams<Real> p = cfg.params;
    p.power_w *= scale;
    return couplings_from_params(p).big_theta();
  };
  // at fixed pulse length, Δ(Θt)/(Θt) = ΔΘ/Θ
  const Real base = big_at(1);
  const Real rel_change = big_at(1 + delta) / base - 1;
  const Real slope = (std::log(big_at(1 + delta)) - std::log(big_at(1 - delta))) /
                     (std::log1p(delta) - std::log1p(-delta));
  const Real derived = delta / 2;   // Δ(Θt)/Θt = Δ℘/(2℘)
  const Real printed = 2 * delta;   // Δ℘/℘ = Δ(Θt)/(2Θt) read literally

  const auto sweep = run_sweep(cfg);
  const Real gamma = cfg.params.gamma_m_hz;
  CsvTable t({"quantity", "nbar", "value"});
  const auto global = [&](const std::string& q, Real v) { t.add_row({q, "", format_number(v)}); };
  global("rel_dpower", delta);
  global("rel_d_theta_t_finite_difference", rel_change);
  global("log_slope_theta_t_vs_power", slope);
  global("rel_d_theta_t_derived", derived);
  global("rel_d_theta_t_printed_relation", printed);
  global("printed_over_derived", printed / derived);
  global("gamma_m_hz", gamma);

  nlohmann::json budgets = nlohmann::json::array();
  std::ostringstream rep;
  rep << "d ln(Theta t)/d ln P = " << format_number(slope) << "; at dP/P = " << format_number(delta)
      << ": d(Theta t)/(Theta t) = " << format_number(rel_change) << " (derived " << format_number(derived)
      << ", printed relation gives " << format_number(printed) << ", factor " << format_number(printed / derived)
      << " apart)\n";
  for (const auto& r : sweep.curves) {
    const Real budget = gamma > 0 && r.nbar > 0 ? 1 / (gamma * r.nbar) : std::numeric_limits<Real>::infinity();
    const Real window_s = r.fidelity.window_measure / base;
    const Real pulse_s = r.fidelity.argmax / base;
    const Real shift = r.fidelity.argmax * rel_change;  // absolute Θt shift at the optimum
    const std::string n = format_number(r.nbar);
    t.add_row({"decoherence_budget_s", n, format_number(budget)});
    t.add_row({"window_duration_s", n, format_number(window_s)});
    t.add_row({"pulse_duration_s", n, format_number(pulse_s)});
    t.add_row({"theta_t_shift", n, format_number(shift)});
    t.add_row({"shift_over_window", n, format_number(shift / r.fidelity.window_measure)});
    budgets.push_back({{"nbar", num(r.nbar)},
                       {"decoherence_budget_s", num(budget)},
                       {"window_duration_s", num(window_s)},
                       {"pulse_duration_s", num(pulse_s)},
                       {"theta_t_shift", num(shift)},
                       {"shift_over_window", num(shift / r.fidelity.window_measure)}});
    rep << "nbar = " << n << ": (gamma_m nbar)^-1 = " << format_number(budget)
        << " s, F > 1/2 window lasts " << format_number(window_s) << " s, pulse " << format_number(pulse_s)
        << " s, power-noise shift / window = " << format_number(shift / r.fidelity.window_measure) << "\n";
  }
  CommandResult out;
  out.csv = t.text();
  out.summary = {{"command", "sensitivity"},
                 {"rel_dpower", num(delta)},
                 {"rel_d_theta_t", num(rel_change)},
                 {"log_slope", num(slope)},
                 {"derived_rel_d_theta_t", num(derived)},
                 {"printed_rel_d_theta_t", num(printed)},
                 {"printed_over_derived", num(printed / derived)},
                 {"gamma_m_hz", num(gamma)},
                 {"budgets", budgets}};
  out.report = rep.str();
  return out;
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"couplings", "fidelity-sweep", "cooling",
                                              "montecarlo", "readout-check",  "sensitivity"};
  return names;
}

inline CommandResult run_command(const std::string& name, const RunConfig& cfg) {
  if (name == "couplings") return cmd_couplings(cfg);
  if (name == "fidelity-sweep") return cmd_fidelity_sweep(cfg);
  if (name == "cooling") return cmd_cooling(cfg);
  if (name == "montecarlo") return cmd_montecarlo(cfg);
  if (name == "readout-check") return cmd_readout_check(cfg);
  if (name == "sensitivity") return cmd_sensitivity(cfg);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace mirrorport::app
