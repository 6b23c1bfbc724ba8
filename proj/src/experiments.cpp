#include "sqg/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "sqg/error.hpp"
#include "sqg/local_ops.hpp"
#include "sqg/quadrature.hpp"
#include "sqg/solver.hpp"

namespace sqg {

namespace {

constexpr double pi = std::numbers::pi;

const std::vector<std::string> kCommonKeys = {"experiment", "out", "formats", "seed"};

std::vector<std::string> keys_for(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::constants: return {"alphas"};
    case ExperimentKind::approx_rates: return {"alpha", "lambda", "N_values", "grid.n", "commutator.L"};
    case ExperimentKind::pseudo_error:
      return {"alpha", "beta", "lambda", "K", "eps_tilde", "base", "N_values", "grid.n", "grid.L",
              "cfl", "dt_max", "t_end", "n_quad", "samples"};
    case ExperimentKind::norm_inflation:
      return {"alpha", "beta", "N", "lambda", "K", "eps_tilde", "base", "N_values", "grid.n", "grid.L",
              "cfl", "dt_max", "n_quad", "samples"};
    case ExperimentKind::radial_decay: return {"alphas", "times", "grid.n", "grid.L", "r0_min", "r0_max"};
    case ExperimentKind::compose_translates:
      return {"alpha", "beta", "N", "lambda", "eps_tilde", "base", "J", "rescalings", "separations", "grid.n",
              "grid.L", "dt_max", "t_end", "n_quad", "samples"};
  }
  return {};
}

struct Defaults {
  double alpha = 0.5, beta = 1.2, lambda = 4.0, grid_L = 1.5;
  int N = 64, grid_n = 1024;
  std::vector<int> N_values;
  std::vector<double> alphas, times;
  double t_end = 0.0;
};

Defaults defaults_for(ExperimentKind k) {
  Defaults d;
  switch (k) {
    case ExperimentKind::constants: d.alphas = {0.1, 0.25, 0.5, 0.75, 0.9}; break;
    case ExperimentKind::approx_rates:
      d.lambda = 1.0;
      d.N_values = {8, 16, 32, 64};
      break;
    case ExperimentKind::pseudo_error: d.N_values = {8, 11, 16}; break;
    case ExperimentKind::norm_inflation:
      d.alpha = 0.4;
      d.N_values = {32, 64, 128};
      break;
    case ExperimentKind::radial_decay:
      d.grid_n = 2048;
      d.grid_L = 32.0;
      d.alphas = {0.3, 0.5, 0.7};
      d.times = {0.0, 0.5, 1.0, 2.0};
      break;
    case ExperimentKind::compose_translates:
      d.N = 8;
      d.grid_n = 1536;
      d.grid_L = 3.0;
      d.t_end = 0.1;
      break;
  }
  return d;
}

std::shared_ptr<const BaseRadialFlow> make_base(const std::string& kind) {
  if (kind == "smooth") return std::make_shared<const BaseRadialFlow>(smooth_base_radial({1.0, 0.0, 1.0}));
  if (kind == "explicit") return std::make_shared<const BaseRadialFlow>(construct_base_radial({1.0, 0.0, 1.0}));
  throw Error(ErrorKind::ConfigError, "base must be 'smooth' or 'explicit'");
}

ExperimentReport new_report(const ExperimentConfig& c) {
  ExperimentReport r;
  r.experiment = to_string(c.experiment);
  r.config_hash = c.hash;
  r.version = library_version();
  for (const auto& [k, v] : c.resolved.values())
    if (k != "out" && k != "formats") r.metadata.emplace_back(k, v);
  return r;
}

void say(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

std::vector<double> sample_times(double T, int samples) {
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i) t[i] = T * i / (samples - 1);
  return t;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::DegenerateFit, "line fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0)) throw Error(ErrorKind::DegenerateFit, "line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

// K from the config or, when zero, the admissibility ladder
double settle_K(PseudoSolution& ps, double T, int n_quad) {
  if (ps.params().K > 0.0) return ps.params().K;
  ps.set_K(1.0);
  return choose_K(ps, T, n_quad);
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::approx_rates: return "approx_rates";
    case ExperimentKind::norm_inflation: return "norm_inflation";
    case ExperimentKind::pseudo_error: return "pseudo_error";
    case ExperimentKind::radial_decay: return "radial_decay";
    case ExperimentKind::compose_translates: return "compose_translates";
    case ExperimentKind::constants: return "constants";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::approx_rates, ExperimentKind::norm_inflation, ExperimentKind::pseudo_error,
                 ExperimentKind::radial_decay, ExperimentKind::compose_translates, ExperimentKind::constants})
    if (to_string(k) == s) return k;
  throw Error(ErrorKind::ConfigError, "unknown experiment '" + s + "'");
}

ExperimentConfig resolve_config(ExperimentKind kind, const Config& raw) {
  if (raw.has("experiment") && experiment_from_string(raw.get_string("experiment", "")) != kind)
    throw Error(ErrorKind::ConfigError, "config is for experiment '" + raw.get_string("experiment", "") + "'");
  std::vector<std::string> allowed = kCommonKeys;
  const auto keys = keys_for(kind);
  allowed.insert(allowed.end(), keys.begin(), keys.end());
  raw.require_known(allowed);

  const Defaults d = defaults_for(kind);
  ExperimentConfig c;
  c.experiment = kind;
  c.params.alpha = raw.get_double("alpha", d.alpha);
  c.params.beta = raw.get_double("beta", d.beta);
  c.params.N = raw.get_int("N", d.N);
  c.params.lambda = raw.get_double("lambda", d.lambda);
  c.params.K = raw.get_double("K", 0.0);
  c.params.eps_tilde = raw.get_double("eps_tilde", 0.4);
  c.grid_n = raw.get_int("grid.n", d.grid_n);
  c.grid_L = raw.get_double("grid.L", d.grid_L);
  c.commutator_L = raw.get_double("commutator.L", 6.0);
  c.base = raw.get_string("base", "smooth");
  c.N_values = raw.get_ints("N_values", d.N_values);
  c.alphas = raw.get_doubles("alphas", d.alphas);
  c.times = raw.get_doubles("times", d.times);
  c.separations = raw.get_doubles("separations", {0.7, 1.4, 2.8});
  c.rescalings = raw.get_doubles("rescalings", {1.0, 1.25});
  c.J = raw.get_int("J", 2);
  c.cfl = raw.get_double("cfl", 0.5);
  c.dt_max = raw.get_double("dt_max", 2e-3);
  c.t_end = raw.get_double("t_end", d.t_end);
  c.n_quad = raw.get_int("n_quad", 16);
  c.samples = raw.get_int("samples", kind == ExperimentKind::compose_translates ? 11 : 32);
  c.r0_min = raw.get_double("r0_min", 4.0);
  c.r0_max = raw.get_double("r0_max", 16.0);
  c.seed = std::uint64_t(raw.get_int("seed", 0));
  c.out_dir = raw.get_string("out", "out");

  auto bad = [](const std::string& m) { throw Error(ErrorKind::ConfigError, m); };
  if (c.grid_n < 16 || c.grid_n % 2) bad("grid.n must be an even integer >= 16");
  if (!(c.grid_L > 0)) bad("grid.L must be positive");
  if (!(c.commutator_L > 0)) bad("commutator.L must be positive");
  if (!(c.cfl > 0 && c.cfl <= 1)) bad("cfl must lie in (0,1]");
  if (!(c.dt_max > 0)) bad("dt_max must be positive");
  if (!(c.t_end >= 0)) bad("t_end must be non-negative");
  if (c.n_quad < 8 || c.n_quad % 8) bad("n_quad must be a positive multiple of 8");
  if (c.samples < 2) bad("samples must be at least 2");
  if (!(c.r0_min > 0 && c.r0_max > c.r0_min)) bad("need 0 < r0_min < r0_max");
  if (c.J < 1) bad("J must be at least 1");
  if (int(c.rescalings.size()) < c.J) bad("rescalings needs at least J entries");
  for (double s : c.rescalings)
    if (!(s >= 1.0)) bad("rescalings must be >= 1");
  for (double s : c.separations)
    if (!(s > 0.0)) bad("separations must be positive");
  for (double a : c.alphas)
    if (!(a > 0.0 && a < 1.0)) bad("alphas must lie in (0,1)");
  for (double t : c.times)
    if (!(t >= 0.0)) bad("times must be non-negative");
  for (std::size_t i = 1; i < c.N_values.size(); ++i)
    if (c.N_values[i] <= c.N_values[i - 1]) bad("N_values must increase");
  if (c.base != "smooth" && c.base != "explicit") bad("base must be 'smooth' or 'explicit'");
  const bool uses_params = kind == ExperimentKind::pseudo_error || kind == ExperimentKind::norm_inflation ||
                           kind == ExperimentKind::compose_translates;
  try {
    if (uses_params) {
      validate(c.params);
      for (int N : c.N_values) {
        PseudoParams p = c.params;
        p.N = N;
        validate(p);
      }
    } else if (kind == ExperimentKind::approx_rates) {
      if (!(c.params.alpha > 0 && c.params.alpha < 1)) bad("alpha must lie in (0,1)");
      if (!(c.params.lambda >= 1)) bad("lambda must be >= 1");
      if (c.N_values.size() < 4) bad("N_values needs at least four entries");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, e.what());
  }

  Config& r = c.resolved;
  r.set("experiment", to_string(kind));
  r.set("out", c.out_dir);
  if (raw.has("formats")) r.set("formats", *raw.raw("formats"));
  r.set("seed", std::to_string(c.seed));
  for (const auto& k : keys) {
    if (k == "alpha") r.set(k, format_number(c.params.alpha));
    else if (k == "beta") r.set(k, format_number(c.params.beta));
    else if (k == "N") r.set(k, std::to_string(c.params.N));
    else if (k == "lambda") r.set(k, format_number(c.params.lambda));
    else if (k == "K") r.set(k, format_number(c.params.K));
    else if (k == "eps_tilde") r.set(k, format_number(c.params.eps_tilde));
    else if (k == "base") r.set(k, c.base);
    else if (k == "N_values") r.set(k, format_list(c.N_values));
    else if (k == "alphas") r.set(k, format_list(c.alphas));
    else if (k == "times") r.set(k, format_list(c.times));
    else if (k == "separations") r.set(k, format_list(c.separations));
    else if (k == "rescalings") r.set(k, format_list(c.rescalings));
    else if (k == "J") r.set(k, std::to_string(c.J));
    else if (k == "grid.n") r.set(k, std::to_string(c.grid_n));
    else if (k == "grid.L") r.set(k, format_number(c.grid_L));
    else if (k == "commutator.L") r.set(k, format_number(c.commutator_L));
    else if (k == "cfl") r.set(k, format_number(c.cfl));
    else if (k == "dt_max") r.set(k, format_number(c.dt_max));
    else if (k == "t_end") r.set(k, format_number(c.t_end));
    else if (k == "n_quad") r.set(k, std::to_string(c.n_quad));
    else if (k == "samples") r.set(k, std::to_string(c.samples));
    else if (k == "r0_min") r.set(k, format_number(c.r0_min));
    else if (k == "r0_max") r.set(k, format_number(c.r0_max));
  }
  c.hash = r.hash();
  return c;
}

ExperimentReport run_constants(const ExperimentConfig& c, const ProgressFn& progress) {
  ExperimentReport rep = new_report(c);
  Table t{"values", {"name", "alpha", "value", "reference", "abs_diff"}, {}};
  const double C0 = dirichlet_C0();
  t.add_row({std::string("dirichlet_C0"), 0.0, C0, 2.0 * pi, std::abs(C0 - 2.0 * pi)});
  rep.summary.emplace_back("dirichlet_C0", C0);
  for (double a : c.alphas) {
    say(progress, fmt::format("constants alpha={}", a));
    const double cp = cos_power_integral(a), cp_ref = std::tgamma(a) * std::cos(pi * a / 2.0);
    t.add_row({std::string("cos_power_integral"), a, cp, cp_ref, std::abs(cp - cp_ref)});
    const double sp = sin_power_integral(a);
    t.add_row({std::string("sin_power_integral"), a, sp, std::nan(""), std::nan("")});
    const double K = K_alpha(a), K_ref = 1.0 / riesz_potential_constant(a);
    t.add_row({std::string("K_alpha"), a, K, K_ref, std::abs(K - K_ref)});
    rep.summary.emplace_back(fmt::format("cos_power_integral_{}", format_number(a)), cp);
    rep.summary.emplace_back(fmt::format("K_alpha_{}", format_number(a)), K);
  }
  rep.tables.push_back(std::move(t));
  return rep;
}

ExperimentReport run_approx_rates(const ExperimentConfig& c, const ProgressFn& progress) {
  ExperimentReport rep = new_report(c);
  const double alpha = c.params.alpha, lambda = c.params.lambda;
  const Grid grid = standard_rate_grid(c.grid_n, lambda);
  Table errors{"errors", {"kind", "N", "error", "excluded"}, {}};
  Table fits{"fits", {"kind", "slope", "intercept", "r2", "threshold"}, {}};
  auto record = [&](const std::string& kind, const RateFit& f, double threshold) {
    for (std::size_t i = 0; i < f.N_values.size(); ++i) {
      const bool ex = std::find(f.excluded.begin(), f.excluded.end(), f.N_values[i]) != f.excluded.end();
      errors.add_row({kind, long(f.N_values[i]), f.errors[i], long(ex)});
    }
    fits.add_row({kind, f.slope, f.intercept, f.r2, threshold});
    rep.summary.emplace_back("slope_" + kind, f.slope);
    rep.summary.emplace_back("r2_" + kind, f.r2);
    rep.summary.emplace_back("threshold_" + kind, threshold);
  };
  const AnsatzFamily family = [lambda](int N) { return standard_ansatz(N, lambda); };
  const std::vector<std::pair<RateKind, double>> kinds = {
      {RateKind::lambda_minus_alpha, -(1.0 + alpha) + 0.3},
      {RateKind::lambda_plus_alpha, -1.0 + alpha + 0.3},
      {RateKind::velocity, -0.7},
      {RateKind::radial_velocity, -0.7}};
  for (const auto& [kind, threshold] : kinds) {
    say(progress, "approx_rates " + to_string(kind));
    record(to_string(kind), approximation_rate_sweep(family, c.N_values, kind, grid, alpha, {}, false), threshold);
  }
  say(progress, "approx_rates commutator");
  const Grid cgrid(c.grid_n, c.commutator_L / lambda);
  const RadialProfile env = commutator_envelope(lambda);
  std::vector<double> defects;
  for (int N : c.N_values) {
    const OscillatoryAnsatz a = commutator_ansatz(N, lambda);
    const double wn = l2_norm(sample_ansatz(a, cgrid));
    defects.push_back(commutator_defect(a, env, Trig::sin, 1, cgrid) / (c1_norm(env) * wn));
  }
  record("commutator", fit_rate(c.N_values, defects, false), -0.7);
  rep.tables.push_back(std::move(errors));
  rep.tables.push_back(std::move(fits));
  rep.plots.push_back({"errors", "errors", "N", {"error"}, "kind", true, true, "surrogate error against N"});
  return rep;
}

ExperimentReport run_pseudo_error(const ExperimentConfig& c, const ProgressFn& progress) {
  ExperimentReport rep = new_report(c);
  const auto base = make_base(c.base);
  const Grid grid(c.grid_n, c.grid_L);
  Table rows{"errors",
             {"N", "K", "t", "err_full", "err_full_raw", "err_naive", "err_naive_raw", "dist_gbar", "pert_norm",
              "base_drift"},
             {}};
  std::vector<double> peaks, logN;
  bool naive_exceeds_all = true;
  for (int N : c.N_values) {
    PseudoParams p = c.params;
    p.N = N;
    PseudoSolution ps(p, base, grid);
    const double T = default_t_max(p, c.t_end);
    const double K = settle_K(ps, T, c.n_quad);
    say(progress, fmt::format("pseudo_error N={} K={} T={:.4g}", N, K, T));
    const auto times = sample_times(T, c.samples);
    const auto states = ps.build_states(times, c.n_quad);

    SolverConfig sc;
    sc.alpha = p.alpha;
    sc.cfl = c.cfl;
    sc.dt_max = c.dt_max;
    sc.t_end = T;
    const Solver solver(grid, sc);
    SolverState full = make_state(ps.eval(states[0]));
    SolverState bare = make_state(ps.g_bar0());
    double peak = 0.0, last_full = 0.0, last_naive = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      while (full.t < times[i]) {
        const double t0 = full.t;
        full = solver.step_adaptive(full, times[i]);
        bare = solver.step(bare, full.t - t0);
        bare.t = full.t;
      }
      const SpectralField P = ps.perturbation(states[i]);
      const SpectralField Pn = ps.perturbation(states[i], PseudoVariant::naive);
      const SpectralField gb = ps.g_bar(times[i]);
      const SpectralField dw = full.w - bare.w;
      const double ef = l2_norm(dw - P), en = l2_norm(dw - Pn);
      rows.add_row({long(N), K, times[i], ef, l2_norm(full.w - gb - P), en, l2_norm(full.w - ps.eval(states[i], PseudoVariant::naive)),
                    l2_norm(full.w - gb), l2_norm(P), l2_norm(bare.w - gb)});
      peak = std::max(peak, ef);
      last_full = ef;
      last_naive = en;
    }
    say(progress, fmt::format("pseudo_error N={} peak={:.3e} steps={}", N, peak, full.step_count));
    peaks.push_back(peak);
    logN.push_back(std::log(double(N)));
    const bool exceeds = last_naive > last_full;
    naive_exceeds_all = naive_exceeds_all && exceeds;
    rep.summary.emplace_back(fmt::format("K_N{}", N), K);
    rep.summary.emplace_back(fmt::format("T_N{}", N), T);
    rep.summary.emplace_back(fmt::format("peak_err_N{}", N), peak);
    rep.summary.emplace_back(fmt::format("err_full_T_N{}", N), last_full);
    rep.summary.emplace_back(fmt::format("err_naive_T_N{}", N), last_naive);
    rep.summary.emplace_back(fmt::format("yardstick_N{}", N),
                             1.0 / (std::pow(double(N), p.beta + 1.0) * std::pow(p.lambda, p.beta)));
  }
  if (peaks.size() >= 2) {
    std::vector<double> lp;
    for (double v : peaks) lp.push_back(std::log(v));
    const LineFit f = fit_line(logN, lp);
    rep.summary.emplace_back("peak_slope", f.slope);
    rep.summary.emplace_back("peak_ratio_per_doubling", std::pow(2.0, f.slope));
    double worst = 0.0;
    for (std::size_t i = 1; i < peaks.size(); ++i)
      worst = std::max(worst, std::pow(peaks[i] / peaks[i - 1], std::log(2.0) / (logN[i] - logN[i - 1])));
    rep.summary.emplace_back("worst_pair_ratio_per_doubling", worst);
  }
  rep.summary.emplace_back("naive_exceeds_at_T", naive_exceeds_all ? 1.0 : 0.0);
  rep.tables.push_back(std::move(rows));
  rep.plots.push_back({"errors", "errors", "t", {"err_full", "err_naive"}, "N", false, true, "solver minus pseudo-solution"});
  return rep;
}

ExperimentReport run_norm_inflation(const ExperimentConfig& c, const ProgressFn& progress) {
  ExperimentReport rep = new_report(c);
  const auto base = make_base(c.base);
  const Grid grid(c.grid_n, c.grid_L);
  Table rows{"norms", {"N", "t", "ratio", "hbeta", "pert_h1"}, {}};
  std::vector<int> Ns = c.N_values.empty() ? std::vector<int>{c.params.N} : c.N_values;
  for (int N : Ns) {
    PseudoParams p = c.params;
    p.N = N;
    PseudoSolution ps(p, base, grid);
    const double t_star = default_t_max(p, 0.0);
    const double K = settle_K(ps, t_star, c.n_quad);
    say(progress, fmt::format("norm_inflation N={} K={} t*={:.4g}", N, K, t_star));
    const auto times = sample_times(t_star, c.samples);
    const auto states = ps.build_states(times, c.n_quad);
    const SpectralField w0 = ps.eval(states[0]);
    const double h0 = sobolev_norm(w0, p.beta, false);
    std::vector<double> hb(times.size()), ph(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) ph[i] = sobolev_norm(ps.perturbation(states[i]), 1.0, true);
    SolverConfig sc;
    sc.alpha = p.alpha;
    sc.cfl = c.cfl;
    sc.dt_max = c.dt_max;
    sc.t_end = t_star;
    std::vector<Observer> obs;
    for (std::size_t i = 0; i < times.size(); ++i)
      obs.push_back({times[i], true, [&hb, i, &p](double, const SpectralField& w) { hb[i] = sobolev_norm(w, p.beta, true); }});
    Solver(grid, sc).run(make_state(w0), obs);
    for (std::size_t i = 0; i < times.size(); ++i) rows.add_row({long(N), times[i], hb[i] / h0, hb[i], ph[i]});
    rep.summary.emplace_back(fmt::format("K_N{}", N), K);
    rep.summary.emplace_back(fmt::format("t_star_N{}", N), t_star);
    rep.summary.emplace_back(fmt::format("ratio_at_t_star_N{}", N), hb.back() / h0);
    rep.summary.emplace_back(fmt::format("max_ratio_N{}", N), *std::max_element(hb.begin(), hb.end()) / h0);
  }
  rep.tables.push_back(std::move(rows));
  rep.plots.push_back({"ratio", "norms", "t", {"ratio"}, "N", false, true, "H^beta growth ratio"});
  return rep;
}

ExperimentReport run_radial_decay(const ExperimentConfig& c, const ProgressFn& progress) {
  ExperimentReport rep = new_report(c);
  const Grid grid(c.grid_n, c.grid_L);
  const BumpShape bump{2.0, 1.0, 0.5};
  const double mass = integrate_composite([&](double r) { return bump(r) * r; }, 1.0, 3.0, 16, 16);
  const SpectralField f0 =
      SpectralField::sample(grid, [&](double x1, double x2) { return bump(std::hypot(x1, x2)) / mass; });
  Table prof{"profile", {"alpha", "t", "r", "abs_dfdr"}, {}};
  Table fits{"fits", {"alpha", "t", "slope", "intercept", "r2", "bound"}, {}};
  const double dx = grid.dx();
  for (double a : c.alphas) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double t : c.times) {
      say(progress, fmt::format("radial_decay alpha={} t={}", a, t));
      const SpectralField d = apply_multiplier(f0, VectorSymbol([a, t](double k1, double k2) {
        return cplx(0.0, k1) * std::exp(-std::pow(std::hypot(k1, k2), a) * t);
      }));
      const auto v = positive_axis_values(d);
      std::vector<double> lx, ly;
      double tail = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        const double r = j * dx;
        if (r < c.r0_min || r > c.r0_max) continue;
        tail = std::max(tail, std::abs(v[j]));
        prof.add_row({a, t, r, std::abs(v[j])});
        if (std::abs(v[j]) > 0) {
          lx.push_back(std::log(r));
          ly.push_back(std::log(std::abs(v[j])));
        }
      }
      const double bound = -(3.0 + 2.0 * a) / 3.0 + 0.2;
      if (t == 0.0) {
        rep.summary.emplace_back(fmt::format("t0_tail_max_alpha{}", format_number(a)), tail);
        continue;
      }
      const LineFit f = fit_line(lx, ly);
      fits.add_row({a, t, f.slope, f.intercept, f.r2, bound});
      worst = std::max(worst, f.slope);
    }
    if (std::isfinite(worst)) rep.summary.emplace_back(fmt::format("exponent_alpha{}", format_number(a)), worst);
    rep.summary.emplace_back(fmt::format("bound_alpha{}", format_number(a)), -(3.0 + 2.0 * a) / 3.0 + 0.2);
  }
  rep.tables.push_back(std::move(prof));
  rep.tables.push_back(std::move(fits));
  rep.plots.push_back({"tail", "profile", "r", {"abs_dfdr"}, "t", true, true, "radial derivative tail"});
  return rep;
}

ExperimentReport run_compose_translates(const ExperimentConfig& c, const ProgressFn& progress) {
  ExperimentReport rep = new_report(c);
  const auto base = make_base(c.base);
  const Grid grid(c.grid_n, c.grid_L);
  const double T = c.t_end;
  if (!(T > 0.0)) throw Error(ErrorKind::ConfigError, "compose_translates needs t_end > 0");
  const double lam = c.params.lambda, beta = c.params.beta, alpha = c.params.alpha;

  SolverConfig sc;
  sc.alpha = alpha;
  sc.dt_max = c.dt_max;
  sc.t_end = T;
  sc.adaptive = false;
  const Solver solver(grid, sc);
  const auto times = sample_times(T, c.samples);

  Table summ{"summands", {"j", "rescale", "lambda", "K", "amplitude", "radius", "hbeta_initial", "hbeta_peak"}, {}};
  std::vector<SpectralField> u0, uT;
  std::vector<double> radius;
  double max_cfl = 0.0;
  for (int j = 0; j < c.J; ++j) {
    const double Kj = c.rescalings[j];
    PseudoParams p = c.params;
    p.lambda = lam * Kj;
    PseudoSolution ps(p, base, grid);
    const double K = settle_K(ps, default_t_max(p, T), c.n_quad);
    const double amp = std::pow(lam, 1.0 - beta) / (std::pow(lam * Kj, 1.0 - beta) * std::pow(Kj, 1.0 - alpha));
    say(progress, fmt::format("compose_translates summand {} lambda={} K={}", j, p.lambda, K));
    SpectralField w = amp * ps.eval(ps.build_phase_and_damping(0.0, c.n_quad));
    max_cfl = std::max(max_cfl, c.dt_max * solver.max_velocity(w) / grid.dx());
    double peak = 0.0;
    std::vector<Observer> obs;
    for (double t : times)
      obs.push_back({t, false, [&peak, beta](double, const SpectralField& f) { peak = std::max(peak, sobolev_norm(f, beta, false)); }});
    const SolverState end = solver.run(make_state(w), obs);
    summ.add_row({long(j), Kj, p.lambda, K, amp, ps.support().second, sobolev_norm(w, beta, false), peak});
    radius.push_back(ps.support().second);
    u0.push_back(std::move(w));
    uT.push_back(end.w);
  }

  Table defects{"defects", {"separation", "defect_h1", "relative", "hbeta_sum_initial"}, {}};
  const double margin = 4.0 * grid.dx();
  for (double R : c.separations) {
    std::vector<double> pos(c.J);
    for (int j = 0; j < c.J; ++j) pos[j] = R * (std::ldexp(1.0, j) - 1.0);
    const double shift = (pos.front() + pos.back()) / 2.0;
    for (double& x : pos) x -= shift;
    const double rmax = *std::max_element(radius.begin(), radius.end());
    for (int j = 0; j < c.J; ++j) {
      if (std::abs(pos[j]) + radius[j] > c.grid_L - margin)
        throw Error(ErrorKind::BoxTooSmall, fmt::format("separation {} does not fit in the box", R));
      if (j > 0 && pos[j] - pos[j - 1] < radius[j] + radius[j - 1] + margin)
        throw Error(ErrorKind::BoxTooSmall, fmt::format("separation {} makes the summands overlap", R));
    }
    double widest = 0.0;
    for (int j = 1; j < c.J; ++j) widest = std::max(widest, pos[j] - pos[j - 1]);
    const double wrap = 2.0 * c.grid_L - (pos.back() - pos.front());
    if (c.J > 1 && (wrap < 2.0 * rmax + margin || wrap < widest))
      throw Error(ErrorKind::BoxTooSmall,
                  fmt::format("separation {} puts periodic images closer than the intended neighbours", R));
    say(progress, fmt::format("compose_translates separation {}", R));
    SpectralField sum0(grid), sumT(grid);
    for (int j = 0; j < c.J; ++j) {
      sum0 += translate(u0[j], pos[j], 0.0);
      sumT += translate(uT[j], pos[j], 0.0);
    }
    const SolverState joint = solver.run(make_state(sum0));
    const double defect = sobolev_norm(joint.w - sumT, 1.0, false);
    const double rel = defect / sobolev_norm(joint.w, 1.0, false);
    defects.add_row({R, defect, rel, sobolev_norm(sum0, beta, false)});
    rep.summary.emplace_back(fmt::format("defect_R{}", format_number(R)), defect);
  }
  rep.summary.emplace_back("max_cfl_number", max_cfl);
  rep.tables.push_back(std::move(summ));
  rep.tables.push_back(std::move(defects));
  rep.plots.push_back({"defects", "defects", "separation", {"defect_h1"}, "", true, true, "interaction defect"});
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& c, const ProgressFn& progress) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport r;
  switch (c.experiment) {
    case ExperimentKind::constants: r = run_constants(c, progress); break;
    case ExperimentKind::approx_rates: r = run_approx_rates(c, progress); break;
    case ExperimentKind::pseudo_error: r = run_pseudo_error(c, progress); break;
    case ExperimentKind::norm_inflation: r = run_norm_inflation(c, progress); break;
    case ExperimentKind::radial_decay: r = run_radial_decay(c, progress); break;
    case ExperimentKind::compose_translates: r = run_compose_translates(c, progress); break;
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string write_resolved_config(const ExperimentConfig& c, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IOFailure, "cannot create output directory " + dir);
  const std::string path = (std::filesystem::path(dir) / (to_string(c.experiment) + ".config")).string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IOFailure, "cannot write " + path);
  out << "# config_hash=" << c.hash << "\n";
  for (const auto& [k, v] : c.resolved.values()) out << k << " = " << v << "\n";
  if (!out) throw Error(ErrorKind::IOFailure, "write failed for " + path);
  return path;
}

}  // namespace sqg
