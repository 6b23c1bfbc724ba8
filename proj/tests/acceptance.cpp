#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sqg/experiments.hpp"
#include "sqg/local_ops.hpp"
#include "sqg/pseudo.hpp"
#include "sqg/quadrature.hpp"
#include "sqg/solver.hpp"

using namespace sqg;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string g(double v) { return fmt::format("{:.4g}", v); }

double brute_cos_power(double alpha, int M) {
  const double X = 2 * pi * M;
  double v = integrate_composite([alpha](double u) { return std::cos(std::pow(u, 1 / alpha)) / alpha; }, 0.0,
                                 std::pow(pi / 2, alpha), 64, 16);
  v += integrate_composite([alpha](double R) { return std::cos(R) * std::pow(R, alpha - 1); }, pi / 2, X, 8 * M, 16);
  return v + (1 - alpha) * std::pow(X, alpha - 2);
}

double brute_sin_power(double alpha) {
  const double p = 1 / (1 - alpha);
  return integrate_composite(
      [alpha, p](double v) {
        if (v == 0) return 0.0;
        return std::pow(std::sin(std::pow(v, p)), -alpha) * p * std::pow(v, p - 1);
      },
      0.0, std::pow(pi / 2, 1 - alpha), 400, 16);
}

// four times the half-line Dirichlet integral, tail by two integrations by parts
double brute_dirichlet(int M) {
  const double X = 2 * pi * M + pi / 2;
  const double head = integrate_composite([](double s) { return s == 0 ? 1.0 : std::sin(s) / s; }, 0.0, X, 8 * M, 16);
  return 4 * (head + std::cos(X) / X + std::sin(X) / (X * X));
}

Outcome constants() {
  const auto t0 = Clock::now();
  const double C0 = dirichlet_C0(), cp = cos_power_integral(0.5), K = K_alpha(0.5);
  const double oC0 = brute_dirichlet(4000), ocp = brute_cos_power(0.5, 4000);
  const double oK = 4 * brute_sin_power(0.5) * ocp;
  const bool oracles = std::abs(C0 - oC0) < 1e-6 && std::abs(cp - ocp) < 1e-6 && std::abs(K - oK) < 1e-5;
  const bool values = std::abs(C0 - 2 * pi) < 1e-6 && std::abs(cp - std::sqrt(pi / 2)) < 1e-6 && std::abs(K - 13.1450) < 1e-3;
  const double secs = seconds_since(t0);
  return {oracles && values && secs < 10,
          fmt::format("C0={:.10f} cos_power(0.5)={:.10f} K(0.5)={:.6f} oracle diffs {:.1e} {:.1e} {:.1e} in {:.1f}s", C0,
                      cp, K, std::abs(C0 - oC0), std::abs(cp - ocp), std::abs(K - oK), secs)};
}

Outcome operator_identities() {
  const auto t0 = Clock::now();
  const Grid grid(128, 2.0);
  double plane = 0;
  for (double a : {0.3, 0.5, 1.4}) {
    const double k = std::hypot(3 * pi / 2, 2 * pi / 2);
    const auto w = SpectralField::sample(grid, [](double x, double y) { return std::cos(3 * pi * x / 2 + pi * y); });
    const auto out = fractional_laplacian(w, a).to_physical();
    const auto ref = w.to_physical();
    for (std::size_t i = 0; i < ref.size(); ++i) plane = std::max(plane, std::abs(out[i] - std::pow(k, a) * ref[i]));
  }
  std::mt19937 rng(1);
  std::normal_distribution<double> nd;
  std::vector<double> v(grid.physical_size());
  for (auto& x : v) x = nd(rng);
  const auto r = remove_mean(dealias(SpectralField::from_physical(grid, v)));
  double inv = 0;
  for (double a : {0.3, 0.5, 0.9}) inv = std::max(inv, l2_norm(fractional_laplacian(fractional_laplacian(r, a), -a) - r) / l2_norm(r));
  const double div = l2_norm(divergence(riesz_velocity(r))) / l2_norm(r);
  const double secs = seconds_since(t0);
  return {plane < 1e-12 && inv < 1e-10 && div < 1e-10 && secs < 5,
          fmt::format("plane-wave max err {:.1e}, inverse composition {:.1e}, divergence {:.1e} in {:.2f}s", plane, inv,
                      div, secs)};
}

struct RateRun {
  ExperimentReport report;
  ExperimentConfig config;
  double seconds = 0;
};

RateRun rates(const fs::path& out) {
  RateRun r;
  r.config = resolve_config(ExperimentKind::approx_rates, Config());
  r.config.out_dir = out.string();
  const auto t0 = Clock::now();
  r.report = run_experiment(r.config);
  r.seconds = seconds_since(t0);
  write_resolved_config(r.config, out.string());
  emit_report(r.report, out.string());
  return r;
}

Outcome rate_minus_alpha(const RateRun& r) {
  const double s = r.report.summary_value("slope_lambda_minus_alpha"), q = r.report.summary_value("r2_lambda_minus_alpha");
  const double bound = -(1 + 0.5) + 0.3;
  return {s <= bound && q >= 0.9 && r.seconds < 120,
          fmt::format("slope {} (bound {}), r2 {}, N 8..64 at n=1024, sweep {:.1f}s", g(s), g(bound), g(q), r.seconds)};
}

Outcome rate_radial_and_commutator(const RateRun& r) {
  const double s = r.report.summary_value("slope_radial_velocity"), c = r.report.summary_value("slope_commutator");
  return {s <= -0.7 && c <= -0.7 && r.seconds < 240,
          fmt::format("radial velocity slope {}, commutator slope {} (bound -0.7)", g(s), g(c))};
}

Outcome oscillatory_limits() {
  OscillatoryIntegralSpec s;
  s.alpha = 0.5;
  double worst = 0;
  std::string exps;
  bool trend = true;
  for (auto [r, gp] : {std::pair{1.0, 0.0}, std::pair{1.3, 0.8}}) {
    s.r = r;
    s.gprime = gp;
    s.N = 1e4;
    for (auto k : {HKind::diffusion, HKind::radial_velocity})
      worst = std::max(worst, std::abs(H_N(s, k) / H_limit(s, k) - 1));
    for (auto k : {HKind::diffusion, HKind::radial_velocity}) {
      std::vector<double> lx, ly;
      for (double N : {100.0, 300.0, 1000.0}) {
        s.N = N;
        const double a = H_N(s, k);
        s.N = 2 * N;
        lx.push_back(std::log(N));
        ly.push_back(std::log(std::abs(H_N(s, k) - a)));
      }
      const double slope = fit_rate({100, 300, 1000}, {std::exp(ly[0]), std::exp(ly[1]), std::exp(ly[2])}, false).slope;
      trend = trend && slope <= -1 + s.epsilon_prime;
      exps += fmt::format(" {}(r={},g'={})={}", k == HKind::diffusion ? "diffusion" : "radial", g(r), g(gp), g(slope));
    }
  }
  return {worst < 0.03 && trend,
          fmt::format("worst limit deviation {:.2f}% at N=1e4; Cauchy difference exponents (need <= {}):{}", 100 * worst,
                      g(-1 + s.epsilon_prime), exps)};
}

Outcome base_construction() {
  const auto base = smooth_base_radial({1, 0, 1});
  const auto& a = base.achieved;
  const bool targets = std::abs(a[0] - 1) < 0.02 && std::abs(a[1]) < 0.02 && std::abs(a[2] - 1) < 0.02;
  const double d1 = base.triple_at(1.0)[0];
  double worst = INFINITY;
  for (double eps : {0.2, 0.4})
    for (double r0 : {1 - eps, 1 - eps / 2, 1 + eps / 2, 1 + eps})
      worst = std::min(worst, (base.triple_at(r0)[0] - d1) / (0.1 * (1 - r0) * (1 - r0)));
  return {targets && worst >= 0.9,
          fmt::format("achieved ({}, {}, {}); worst ratio of neighbour gap to (1/10)(1-r0)^2 is {} (need >= 0.9)", g(a[0]),
                      g(a[1]), g(a[2]), g(worst))};
}

Outcome solver_checks() {
  const Grid grid(64, pi);
  const auto w0 = SpectralField::sample(grid, [](double x, double y) {
    return std::sin(x) * std::cos(2 * y) + 0.5 * std::cos(3 * x + y) + 0.3 * std::sin(2 * x - 3 * y);
  });
  auto fixed = [](double dt, double T) {
    SolverConfig c;
    c.adaptive = false;
    c.dt_max = dt;
    c.t_end = T;
    return c;
  };
  const auto a = run(w0, fixed(0.04, 0.4)).w, b = run(w0, fixed(0.02, 0.4)).w, c = run(w0, fixed(0.01, 0.4)).w;
  const double order = std::log2(l2_norm(a - b) / l2_norm(b - c));

  SolverConfig ec;
  ec.t_end = 0.5;
  ec.dt_max = 5e-3;
  const auto s = run(w0, ec);
  double dissipated = 0;
  for (std::size_t i = 1; i < s.history.size(); ++i) {
    const auto &p = s.history[i - 1], &q = s.history[i];
    dissipated += (q.t - p.t) * 0.5 * (p.h_half_alpha * p.h_half_alpha + q.h_half_alpha * q.h_half_alpha);
  }
  const double lost = 0.5 * (s.history.front().l2 * s.history.front().l2 - s.history.back().l2 * s.history.back().l2);
  const double energy = std::abs(lost / dissipated - 1);

  const fs::path dir = fs::temp_directory_path() / "sqg_acceptance_ckpt";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cc = ec;
  cc.checkpoint_every = 40;
  cc.checkpoint_dir = dir.string();
  const auto full = run(w0, cc);
  const auto ck = read_checkpoint((dir / "ckpt_00000040.bin").string());
  cc.checkpoint_every = 0;
  const auto resumed = Solver(grid, cc).run(ck.state);
  const double restart = l2_norm(resumed.w - full.w) / l2_norm(full.w);
  fs::remove_all(dir);
  return {order >= 2.5 && energy < 0.05 && restart <= 1e-9,
          fmt::format("order {}, energy identity off by {:.2f}%, restart difference {:.1e}", g(order), 100 * energy, restart)};
}

Outcome pseudo_closure() {
  PseudoParams p;
  p.N = 16;
  p.lambda = 4;
  p.eps_tilde = 0.4;
  PseudoSolution ps(p, std::make_shared<const BaseRadialFlow>(smooth_base_radial({1, 0, 1})), Grid(1024, 1.5));
  const double T = default_t_max(p, 0);
  const double K = choose_K(ps, T);
  std::vector<double> times;
  for (int i = 0; i < 8; ++i) times.push_back(T * (i + 1) / 8.0);
  bool ordering = true;
  for (const auto& s : ps.build_states(times)) ordering = ordering && ps.maximocentro_holds(s);
  double worst = 0;
  const double h = 1e-4 * T;
  for (double t : times) {
    const auto st = ps.build_states({t - h, t, t + h});
    const double scale = l2_norm(ps.perturbation(st[1])) * std::pow(p.N * p.lambda, p.alpha);
    worst = std::max(worst, ps.perturbation_residual(st[0], st[1], st[2]) / scale);
  }
  return {ordering && worst <= 1e-3,
          fmt::format("K={} ordering at 8 times: {}; worst residual / (|P| (N lambda)^alpha) = {:.2e}", K,
                      ordering ? "holds" : "fails", worst)};
}

Outcome pseudo_error(const fs::path& out) {
  auto c = resolve_config(ExperimentKind::pseudo_error, Config());
  c.out_dir = out.string();
  const auto t0 = Clock::now();
  const auto r = run_experiment(c);
  const double secs = seconds_since(t0);
  emit_report(r, out.string());
  const double ratio = r.summary_value("peak_ratio_per_doubling");
  const bool naive = r.summary_value("naive_exceeds_at_T") == 1.0;
  std::string peaks;
  for (int N : c.N_values) peaks += fmt::format(" N={}:{:.3e}", N, r.summary_value(fmt::format("peak_err_N{}", N)));
  return {ratio <= 0.7 && naive && secs < 1800,
          fmt::format("peaks{}; ratio per doubling {}; naive exceeds full at T: {}; {:.0f}s", peaks, g(ratio),
                      naive ? "yes" : "no", secs)};
}

Outcome norm_inflation(const fs::path& out) {
  auto c = resolve_config(ExperimentKind::norm_inflation, Config());
  c.out_dir = out.string();
  try {
    const auto t0 = Clock::now();
    const auto r = run_experiment(c);
    const double secs = seconds_since(t0);
    emit_report(r, out.string());
    std::vector<double> ratios;
    std::string txt;
    for (int N : c.N_values) {
      ratios.push_back(r.summary_value(fmt::format("ratio_at_t_star_N{}", N)));
      txt += fmt::format(" N={}:{}", N, g(ratios.back()));
    }
    bool increasing = true;
    for (std::size_t i = 1; i < ratios.size(); ++i) increasing = increasing && ratios[i] > ratios[i - 1];
    const double at_default = r.summary_value(fmt::format("ratio_at_t_star_N{}", c.params.N));
    return {at_default >= 1.5 && increasing && secs < 1800, fmt::format("ratios{}; {:.0f}s", txt, secs)};
  } catch (const Error& e) {
    return {false, fmt::format("default config could not run ({}: {})", to_string(e.kind()), e.what())};
  }
}

Outcome radial_decay(const fs::path& out) {
  auto c = resolve_config(ExperimentKind::radial_decay, Config());
  c.out_dir = out.string();
  const auto r = run_experiment(c);
  emit_report(r, out.string());
  const double e = r.summary_value("exponent_alpha0.5"), b = r.summary_value("bound_alpha0.5");
  return {e <= b, fmt::format("tail exponent {} for alpha=0.5 (bound {})", g(e), g(b))};
}

Outcome determinism(const fs::path& first) {
  const auto cfg = first / "approx_rates.config";
  const auto c = resolve_config(ExperimentKind::approx_rates, Config::parse_file(cfg.string()));
  const fs::path again = first / "rerun";
  fs::create_directories(again);
  emit_report(run_experiment(c), again.string(), true, false);
  double worst = 0;
  bool shape = true;
  for (const auto& name : {"approx_rates_errors.csv", "approx_rates_fits.csv", "approx_rates_summary.csv"}) {
    const auto a = read_report_csv((first / name).string()), b = read_report_csv((again / name).string());
    shape = shape && a.metadata.at("config_hash") == b.metadata.at("config_hash") && a.table.rows.size() == b.table.rows.size();
    for (std::size_t i = 0; shape && i < a.table.rows.size(); ++i)
      for (std::size_t j = 0; j < a.table.rows[i].size(); ++j) {
        const std::string &x = a.table.rows[i][j], &y = b.table.rows[i][j];
        char* end = nullptr;
        const double dx = std::strtod(x.c_str(), &end);
        if (end == x.c_str() || *end != '\0') {
          shape = shape && x == y;
          continue;
        }
        const double dy = std::stod(y);
        worst = std::max(worst, std::abs(dx - dy) / std::max(1.0, std::abs(dx)));
      }
  }
  return {shape && worst <= 1e-12,
          fmt::format("re-run of approx_rates from {} (hash {}): max row difference {:.1e}", cfg.filename().string(),
                      c.hash.substr(0, 12), worst)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = "acceptance_out";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--out") out = argv[i + 1];
  fs::create_directories(out);

  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    fmt::print("{} criterion {:>2} {}: {} [{:.1f}s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail, seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "constants", constants);
  report(2, "operator identities", operator_identities);
  RateRun rr;
  bool have_rates = false;
  report(3, "negative-order surrogate rate", [&] {
    rr = rates(out / "approx_rates");
    have_rates = true;
    return rate_minus_alpha(rr);
  });
  report(4, "radial velocity and commutator rates", [&] {
    if (!have_rates) return Outcome{false, "rate sweep did not run"};
    return rate_radial_and_commutator(rr);
  });
  report(5, "oscillatory integral limits", oscillatory_limits);
  report(6, "base flow construction", base_construction);
  report(7, "solver", solver_checks);
  report(8, "pseudo-solution closure", pseudo_closure);
  report(9, "pseudo-solution error", [&] { return pseudo_error(out / "pseudo_error"); });
  report(10, "norm inflation", [&] { return norm_inflation(out / "norm_inflation"); });
  report(11, "radial decay", [&] { return radial_decay(out / "radial_decay"); });
  report(12, "determinism", [&] {
    if (!have_rates) return Outcome{false, "no first run to compare against"};
    return determinism(out / "approx_rates");
  });
  fmt::print("{} of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
