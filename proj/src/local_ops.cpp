#include "sqg/local_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sqg/quadrature.hpp"

namespace sqg {

namespace {

constexpr double pi = std::numbers::pi;

void check_exponent(double e) {
  const bool ok = e == -1.0 || (e > -1.0 && e < 1.0 && e != 0.0);
  if (!ok) throw Error(ErrorKind::InvalidRegime, "surrogate exponent must be -1 or lie in (-1,1) without 0");
}

double physical_l2(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc) * g.dx();
}

template <class F>
std::vector<double> sample_physical(const Grid& g, F&& f) {
  std::vector<double> v(g.physical_size());
  for (int i1 = 0; i1 < g.n(); ++i1)
    for (int i2 = 0; i2 < g.n(); ++i2) v[std::size_t(i1) * g.n() + i2] = f(g.x(i1), g.x(i2));
  return v;
}

}  // namespace

double surrogate_factor(double exponent, SurrogateConvention convention) {
  check_exponent(exponent);
  const double a = std::abs(exponent);
  const double K = surrogate_constant(a);
  const double k = exponent < 0 ? K : 1.0 / K;
  if (convention == SurrogateConvention::kernel) return k;
  const double c = a == 1.0 ? 1.0 / (2.0 * pi) : riesz_potential_constant(a);
  return exponent < 0 ? c * k : k / c;
}

double radial_velocity_factor(SurrogateConvention convention) {
  const double C0 = dirichlet_C0();
  return convention == SurrogateConvention::kernel ? -C0 : C0 / (2.0 * pi);
}

SpectralField bar_lambda(const OscillatoryAnsatz& a, const Grid& grid, double exponent,
                         SurrogateConvention convention, const ResolutionPolicy& policy) {
  validate(a, false);
  check_resolution(grid, required_wavenumber(a), policy, "local surrogate");
  const double factor = surrogate_factor(exponent, convention);
  const auto [lo, hi] = a.support();
  return SpectralField::sample(grid, [&](double x1, double x2) {
    const double r = std::hypot(x1, x2);
    if (r < lo || r > hi) return 0.0;
    const double w = a.value(r, std::atan2(x2, x1));
    if (w == 0.0) return 0.0;
    const double gp = a.gprime(r);
    const double k2 = (a.N / r) * (a.N / r) + a.N * a.N * gp * gp;
    return factor * std::pow(k2, exponent / 2.0) * w;
  });
}

SpectralField bar_v_r(const OscillatoryAnsatz& a, const Grid& grid, SurrogateConvention convention,
                      const ResolutionPolicy& policy) {
  validate(a, false);
  check_resolution(grid, required_wavenumber(a), policy, "radial velocity surrogate");
  const double factor = radial_velocity_factor(convention);
  const auto [lo, hi] = a.support();
  return SpectralField::sample(grid, [&](double x1, double x2) {
    const double r = std::hypot(x1, x2);
    if (r < lo || r > hi) return 0.0;
    const double s = a.lambda * r;
    const double amp = a.f(s);
    if (amp == 0.0) return 0.0;
    const double phase = a.N * (std::atan2(x2, x1) + a.g_phase(s)) + a.p(s);
    const double gp = a.gprime(r);
    return factor * amp * std::sin(phase) / std::sqrt(1.0 + r * r * gp * gp);
  });
}

VelocityField bar_velocity(const OscillatoryAnsatz& a, const Grid& grid, const ResolutionPolicy& policy) {
  const SpectralField psi = bar_lambda(a, grid, -1.0, SurrogateConvention::spectral, policy);
  VelocityField v;
  v.v1 = -1.0 * derivative(psi, 1);
  v.v2 = derivative(psi, 0);
  return v;
}

std::vector<double> radial_component(const VelocityField& v) {
  const Grid& g = v.v1.grid();
  const auto p1 = v.v1.to_physical();
  const auto p2 = v.v2.to_physical();
  std::vector<double> out(p1.size());
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.n(); ++i2) {
      const std::size_t idx = std::size_t(i1) * g.n() + i2;
      const double x1 = g.x(i1), x2 = g.x(i2);
      const double r = std::hypot(x1, x2);
      out[idx] = r == 0.0 ? 0.0 : (p1[idx] * x1 + p2[idx] * x2) / r;
    }
  }
  return out;
}

RateFit fit_rate(const std::vector<int>& N_values, const std::vector<double>& errors, bool require_quality) {
  if (N_values.size() != errors.size()) throw Error(ErrorKind::DegenerateFit, "rate fit size mismatch");
  RateFit fit;
  fit.N_values = N_values;
  fit.errors = errors;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < N_values.size(); ++i) {
    if (i > 0 && N_values[i] <= N_values[i - 1]) throw Error(ErrorKind::DegenerateFit, "N values must increase");
    if (!(errors[i] > 0.0)) throw Error(ErrorKind::DegenerateFit, "rate fit needs positive errors");
    x.push_back(std::log(double(N_values[i])));
    y.push_back(std::log(errors[i]));
  }
  if (x.size() < 2) throw Error(ErrorKind::DegenerateFit, "rate fit needs at least two points");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
  if (require_quality && fit.r2 < 0.9)
    throw Error(ErrorKind::DegenerateFit, "rate fit r^2 = " + std::to_string(fit.r2) + " below 0.9");
  return fit;
}

std::string to_string(RateKind kind) {
  switch (kind) {
    case RateKind::lambda_minus_alpha: return "lambda_minus_alpha";
    case RateKind::lambda_plus_alpha: return "lambda_plus_alpha";
    case RateKind::velocity: return "velocity";
    case RateKind::radial_velocity: return "radial_velocity";
  }
  return "unknown";
}

RateKind rate_kind_from_string(const std::string& s) {
  for (RateKind k : {RateKind::lambda_minus_alpha, RateKind::lambda_plus_alpha, RateKind::velocity,
                     RateKind::radial_velocity})
    if (to_string(k) == s) return k;
  throw Error(ErrorKind::ConfigError, "unknown rate kind " + s);
}

OperatorError operator_error(const OscillatoryAnsatz& a, const Grid& grid, RateKind kind, double alpha,
                             const ResolutionPolicy& policy) {
  const SpectralField w = sample_ansatz(a, grid, policy);
  OperatorError out;
  switch (kind) {
    case RateKind::lambda_minus_alpha:
    case RateKind::lambda_plus_alpha: {
      const double e = kind == RateKind::lambda_minus_alpha ? -alpha : alpha;
      const SpectralField exact = fractional_laplacian(w, e);
      const SpectralField approx = bar_lambda(a, grid, e, SurrogateConvention::spectral, policy);
      out.error = l2_norm(exact - approx);
      out.reference_norm = l2_norm(exact);
      break;
    }
    case RateKind::velocity: {
      const VelocityField exact = riesz_velocity(w);
      const VelocityField approx = bar_velocity(a, grid, policy);
      const double e1 = l2_norm(exact.v1 - approx.v1), e2 = l2_norm(exact.v2 - approx.v2);
      out.error = std::hypot(e1, e2);
      out.reference_norm = std::hypot(l2_norm(exact.v1), l2_norm(exact.v2));
      break;
    }
    case RateKind::radial_velocity: {
      const auto exact = radial_component(riesz_velocity(w));
      const auto approx = bar_v_r(a, grid, SurrogateConvention::spectral, policy).to_physical();
      out.error = physical_l2(grid, exact, approx);
      out.reference_norm = l2_norm_physical(grid, exact);
      break;
    }
  }
  return out;
}

RateFit approximation_rate_sweep(const AnsatzFamily& family, const std::vector<int>& N_values, RateKind kind,
                                 const Grid& grid, double alpha, const ResolutionPolicy& policy,
                                 bool require_quality) {
  if (N_values.size() < 4) throw Error(ErrorKind::DegenerateFit, "rate sweep needs at least four N values");
  std::vector<OperatorError> res(N_values.size());
  for (std::size_t i = 0; i < N_values.size(); ++i) res[i] = operator_error(family(N_values[i]), grid, kind, alpha, policy);
  std::vector<int> Ns(N_values);
  std::vector<double> errs;
  for (const auto& r : res) errs.push_back(r.error);
  std::vector<int> excluded;
  const double eps = std::numeric_limits<double>::epsilon();
  if (errs.back() < 10.0 * eps * res.back().reference_norm) {
    excluded.push_back(Ns.back());
    Ns.pop_back();
    errs.pop_back();
  }
  RateFit fit = fit_rate(Ns, errs, require_quality);
  fit.excluded = excluded;
  return fit;
}

double c1_norm(const RadialProfile& envelope) {
  double m0 = 0.0, m1 = 0.0;
  const auto r = envelope.r_grid();
  for (double x : r) {
    m0 = std::max(m0, std::abs(envelope(x)));
    m1 = std::max(m1, std::abs(envelope.d1(x)));
  }
  return m0 + m1;
}

double commutator_defect(const OscillatoryAnsatz& w, const RadialProfile& envelope, Trig trig, int axis,
                         const Grid& grid, const ResolutionPolicy& policy) {
  if (axis != 1 && axis != 2) throw Error(ErrorKind::InvalidGeometry, "commutator axis must be 1 or 2");
  const double lam = w.lambda;
  for (double r : envelope.r_grid()) {
    if ((r < 1.0 / lam - 1e-12 || r > 4.0 / lam + 1e-12) && std::abs(envelope(r)) > 1e-14)
      throw Error(ErrorKind::InvalidGeometry, "commutator envelope must be supported in [1/lambda, 4/lambda]");
  }
  const SpectralField wf = sample_ansatz(w, grid, policy);
  const auto mult = sample_physical(grid, [&](double x1, double x2) {
    const double r = std::hypot(x1, x2);
    const double e = envelope(r);
    if (e == 0.0 || r == 0.0) return 0.0;
    return e * (trig == Trig::sin ? x2 / r : x1 / r);
  });
  auto product = wf.to_physical();
  for (std::size_t i = 0; i < product.size(); ++i) product[i] *= mult[i];
  const SpectralField pw = remove_mean(SpectralField::from_physical(grid, product));
  const VelocityField v_of_product = riesz_velocity(pw);
  const VelocityField v_of_w = riesz_velocity(wf);
  auto lhs = (axis == 1 ? v_of_product.v1 : v_of_product.v2).to_physical();
  auto rhs = (axis == 1 ? v_of_w.v1 : v_of_w.v2).to_physical();
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] *= mult[i];
  return physical_l2(grid, lhs, rhs);
}

OscillatoryAnsatz standard_ansatz(int N, double lambda) {
  OscillatoryAnsatz a;
  a.f = bump_profile(1.0, 0.35, 0.5);
  a.g_phase = RadialProfile::sample([](double r) { return 0.15 * r * r; });
  a.p = RadialProfile::sample([](double r) { return 0.3 * r; });
  a.N = N;
  a.lambda = lambda;
  return a;
}

Grid standard_rate_grid(int n, double lambda) { return Grid(n, 5.4 / lambda); }

OscillatoryAnsatz commutator_ansatz(int N, double lambda) {
  OscillatoryAnsatz a;
  a.f = bump_profile(1.2, 0.28, 0.5);
  a.g_phase = RadialProfile::zero();
  a.p = RadialProfile::sample([](double r) { return 0.3 * r; });
  a.N = N;
  a.lambda = lambda;
  return a;
}

RadialProfile commutator_envelope(double lambda) { return bump_profile(1.6 / lambda, 0.55 / lambda, 0.5); }

}  // namespace sqg
