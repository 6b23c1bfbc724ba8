#include "sqg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

namespace sqg {

namespace {

constexpr double pi = std::numbers::pi;

std::mutex gl_mutex;
std::map<int, GaussLegendre> gl_cache;

GaussLegendre build_gauss_legendre(int n) {
  GaussLegendre r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

// integral over [a, b] of envelope * exp(i omega x), one Legendre panel
std::complex<double> filon_panel(const std::function<double(double)>& envelope, double a, double b, double omega,
                                 int m) {
  const GaussLegendre& q = gauss_legendre(m);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::vector<double> coef(m, 0.0);
  std::vector<double> P(m);
  for (int k = 0; k < m; ++k) {
    const double u = q.x[k];
    const double e = envelope(c + h * u) * q.w[k];
    P[0] = 1.0;
    if (m > 1) P[1] = u;
    for (int j = 2; j < m; ++j) P[j] = ((2.0 * j - 1.0) * u * P[j - 1] - (j - 1.0) * P[j - 2]) / j;
    for (int j = 0; j < m; ++j) coef[j] += e * P[j];
  }
  const double kappa = omega * h;
  std::complex<double> acc = 0.0;
  const std::complex<double> I(0.0, 1.0);
  std::complex<double> ipow = 1.0;
  for (int j = 0; j < m; ++j) {
    const double aj = 0.5 * (2.0 * j + 1.0) * coef[j];
    const double jj = (kappa == 0.0) ? (j == 0 ? 1.0 : 0.0) : std::sph_bessel(unsigned(j), std::abs(kappa)) *
                                                                 ((kappa < 0 && j % 2 == 1) ? -1.0 : 1.0);
    acc += aj * 2.0 * ipow * jj;
    ipow *= I;
  }
  return h * std::polar(1.0, omega * c) * acc;
}

// partial sums of panel integrals of f over [x0 + k*step, x0 + (k+1)*step]
std::vector<double> panel_partial_sums(const std::function<double(double)>& f, double x0, double step, int panels,
                                       double start) {
  std::vector<double> s(panels);
  double acc = start;
  for (int k = 0; k < panels; ++k) {
    acc += integrate_gl(f, x0 + k * step, x0 + (k + 1) * step, 24);
    s[k] = acc;
  }
  return s;
}

double accelerated_tail(const std::vector<double>& sums) {
  const std::size_t take = std::min<std::size_t>(sums.size(), 24);
  return accelerate_partial_sums(std::span<const double>(sums).last(take));
}

std::vector<double> geometric_breaks(double a, double b) {
  std::vector<double> br{a};
  double x = a;
  while (x < b) {
    x = std::min(b, 2.0 * x);
    if (b - x < 0.25 * x) x = b;
    br.push_back(x);
  }
  return br;
}

double filon_geometric(const std::function<double(double)>& env, double a, double b, double omega, bool sine) {
  if (b <= a) return 0.0;
  double acc = 0.0;
  const auto br = geometric_breaks(a, b);
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    // subdivide so each panel carries a bounded relative envelope variation
    const OscPair p = filon_integral(env, br[i], br[i + 1], omega, 24);
    acc += sine ? p.sin_part : p.cos_part;
  }
  return acc;
}

void composite_nodes(double a, double b, int panels, int n, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  const GaussLegendre& q = gauss_legendre(n);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int k = 0; k < n; ++k) {
      x.push_back(c + 0.5 * h * q.x[k]);
      w.push_back(0.5 * h * q.w[k]);
    }
  }
}

// integral over the square [0,a]^2 of F(rho cos phi, rho sin phi) rho d rho d phi, F given via radial integrand
template <class Radial>
double polar_square(double a, Radial&& radial_integral) {
  std::vector<double> px, pw;
  composite_nodes(0.0, pi / 4.0, 16, 16, px, pw);
  double acc = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double phi = px[i];
    const double R = a / std::cos(phi);
    acc += pw[i] * (radial_integral(phi, R) + radial_integral(pi / 2.0 - phi, R));
  }
  return acc;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidRegime, "Gauss-Legendre order must be positive");
  std::lock_guard<std::mutex> lock(gl_mutex);
  auto it = gl_cache.find(n);
  if (it != gl_cache.end()) return it->second;
  return gl_cache.emplace(n, build_gauss_legendre(n)).first->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
  const GaussLegendre& q = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += q.w[k] * f(c + h * q.x[k]);
  return h * acc;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b, int panels, int n) {
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) acc += integrate_gl(f, a + p * h, a + (p + 1) * h, n);
  return acc;
}

double accelerate_partial_sums(std::span<const double> partial_sums) {
  std::vector<double> s(partial_sums.begin(), partial_sums.end());
  if (s.empty()) return 0.0;
  while (s.size() > 1) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) s[i] = 0.5 * (s[i] + s[i + 1]);
    s.pop_back();
  }
  return s[0];
}

OscPair filon_integral(const std::function<double(double)>& envelope, double a, double b, double omega, int m) {
  const std::complex<double> v = filon_panel(envelope, a, b, omega, m);
  return {v.real(), v.imag()};
}

double dirichlet_truncated(double lambda, int M) {
  if (lambda == 0.0) return 0.0;
  const double l = std::abs(lambda);
  auto f = [l](double x) { return x == 0.0 ? l : std::sin(l * x) / x; };
  const double step = pi / l;
  const auto sums = panel_partial_sums(f, 0.0, step, 2 * M, 0.0);
  return 4.0 * std::copysign(sums.back(), lambda);
}

double dirichlet_signed(double lambda) {
  if (lambda == 0.0) return 0.0;
  const double l = std::abs(lambda);
  auto f = [l](double x) { return x == 0.0 ? l : std::sin(l * x) / x; };
  const double step = pi / l;
  double previous = 0.0;
  bool have_previous = false;
  for (int M = 16; M <= 8192; M *= 2) {
    const auto sums = panel_partial_sums(f, 0.0, step, 2 * M, 0.0);
    const double est = accelerated_tail(sums);
    if (have_previous && std::abs(est - previous) < 1e-8) return 4.0 * std::copysign(est, lambda);
    previous = est;
    have_previous = true;
  }
  throw Error(ErrorKind::NonConvergence, "Dirichlet integral tail did not settle");
}

double dirichlet_C0() { return dirichlet_signed(1.0); }

double cos_power_integral(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidRegime, "alpha must lie in (0,1)");
  const double u_max = std::pow(pi / 2.0, alpha);
  const double head = integrate_composite(
      [alpha](double u) { return std::cos(std::pow(u, 1.0 / alpha)) / alpha; }, 0.0, u_max, 16, 24);
  auto f = [alpha](double R) { return std::cos(R) * std::pow(R, alpha - 1.0); };
  double previous = 0.0;
  bool have_previous = false;
  for (int panels = 32; panels <= 16384; panels *= 2) {
    const auto sums = panel_partial_sums(f, pi / 2.0, pi, panels, head);
    const double est = accelerated_tail(sums);
    if (have_previous && std::abs(est - previous) < 1e-11 * std::max(1.0, std::abs(est))) {
      if (!(est > 0.0)) throw Error(ErrorKind::NonConvergence, "cos power integral not positive");
      return est;
    }
    previous = est;
    have_previous = true;
  }
  throw Error(ErrorKind::NonConvergence, "cos power integral tail did not settle");
}

double sin_power_integral(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidRegime, "alpha must lie in (0,1)");
  const double pref = std::pow(pi / 2.0, 1.0 - alpha) / (1.0 - alpha);
  auto f = [alpha](double t) {
    const double A = (pi / 2.0) * std::pow(t, 1.0 / (1.0 - alpha));
    const double sinc = A == 0.0 ? 1.0 : std::sin(A) / A;
    return std::pow(sinc, -alpha);
  };
  return pref * integrate_composite(f, 0.0, 1.0, 8, 24);
}

double K_alpha(double alpha) {
  const double k = 4.0 * sin_power_integral(alpha) * cos_power_integral(alpha);
  if (!(k > 0.0)) throw Error(ErrorKind::NonConvergence, "K_alpha not positive");
  return k;
}

double riesz_potential_constant(double alpha) {
  return std::tgamma(1.0 - alpha / 2.0) / (std::pow(2.0, alpha) * pi * std::tgamma(alpha / 2.0));
}

double surrogate_constant(double alpha) {
  if (alpha == 1.0) return dirichlet_C0();
  return K_alpha(alpha);
}

void validate(const OscillatoryIntegralSpec& s) {
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw Error(ErrorKind::InvalidRegime, "alpha must lie in (0,1)");
  if (!(s.r > 0.0)) throw Error(ErrorKind::InvalidRegime, "radius must be positive");
  if (!(s.N >= 2.0)) throw Error(ErrorKind::InvalidRegime, "truncation N must be >= 2");
  if (!(s.epsilon_prime > 0.0 && s.epsilon_prime < 0.5))
    throw Error(ErrorKind::InvalidRegime, "epsilon_prime must lie in (0, 1/2)");
  if (!std::isfinite(s.gprime)) throw Error(ErrorKind::InvalidRegime, "g' must be finite");
}

double H_limit(const OscillatoryIntegralSpec& s, HKind kind) {
  validate(s);
  if (kind == HKind::diffusion)
    return K_alpha(s.alpha) / std::pow(1.0 / (s.r * s.r) + s.gprime * s.gprime, s.alpha / 2.0);
  return dirichlet_C0() / std::sqrt(1.0 + s.r * s.r * s.gprime * s.gprime);
}

namespace {

double H_diffusion(const OscillatoryIntegralSpec& s) {
  const double alpha = s.alpha, r = s.r, g = std::abs(s.gprime);
  const double A = std::pow(s.N, s.epsilon_prime);  // s1 half-range
  const double B = r * pi * s.N;                    // s2 half-range
  const double a = std::min(A, B);
  const double q = std::max(1.0 / r, g);

  auto radial = [&](double phi, double R) {
    const double c1 = std::cos(phi) * g, c2 = std::sin(phi) / r;
    const int panels = 16 + int(std::ceil(R * q / alpha / 2.0));
    const double inner = integrate_composite(
        [&](double t) {
          const double rho = R * std::pow(t, 1.0 / alpha);
          return std::cos(rho * c2) * std::cos(rho * c1);
        },
        0.0, 1.0, panels, 16);
    return std::pow(R, alpha) / alpha * inner;
  };
  double total = polar_square(a, radial);

  std::vector<double> xs, ws;
  if (B > a) {
    composite_nodes(0.0, A, 8 + int(std::ceil(A * g)), 16, xs, ws);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double s1 = xs[i];
      auto env = [&](double s2) { return std::pow(s1 * s1 + s2 * s2, (alpha - 2.0) / 2.0); };
      total += ws[i] * std::cos(s1 * g) * filon_geometric(env, a, B, 1.0 / r, false);
    }
  } else if (A > a) {
    composite_nodes(0.0, B, 8 + int(std::ceil(B / r)), 16, xs, ws);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double s2 = xs[i];
      auto env = [&](double s1) { return std::pow(s1 * s1 + s2 * s2, (alpha - 2.0) / 2.0); };
      total += ws[i] * std::cos(s2 / r) * filon_geometric(env, a, A, g, false);
    }
  }
  return 4.0 * total;
}

double H_radial_velocity(const OscillatoryIntegralSpec& s) {
  const double r = s.r, g = std::abs(s.gprime);
  const double X = std::sqrt(s.N);               // s1 half-range
  const double Y = std::pow(s.N, s.epsilon_prime) / r;  // s2 half-range
  const double a = std::min(X, Y);
  const double rg = r * g;

  auto radial = [&](double phi, double R) {
    const double c = std::cos(phi), sn = std::sin(phi);
    const int panels = 8 + int(std::ceil(R * std::max(1.0, rg)));
    return integrate_composite(
        [&](double rho) {
          const double sr = rho == 0.0 ? c : std::sin(rho * c) / rho;
          return c * sr * std::cos(rg * rho * sn);
        },
        0.0, R, panels, 16);
  };
  double total = polar_square(a, radial);

  std::vector<double> xs, ws;
  if (X > a) {
    composite_nodes(0.0, Y, 8 + int(std::ceil(Y * rg)), 16, xs, ws);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double s2 = xs[i];
      auto env = [&](double s1) { return s1 / std::pow(s1 * s1 + s2 * s2, 1.5); };
      total += ws[i] * std::cos(rg * s2) * filon_geometric(env, a, X, 1.0, true);
    }
  } else if (Y > a) {
    composite_nodes(0.0, X, 8 + int(std::ceil(X)), 16, xs, ws);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double s1 = xs[i];
      auto env = [&](double s2) { return 1.0 / std::pow(s1 * s1 + s2 * s2, 1.5); };
      total += ws[i] * s1 * std::sin(s1) * filon_geometric(env, a, Y, rg, false);
    }
  }
  return 4.0 * total;
}

}  // namespace

double H_N(const OscillatoryIntegralSpec& spec, HKind kind) {
  validate(spec);
  const double v = kind == HKind::diffusion ? H_diffusion(spec) : H_radial_velocity(spec);
  if (!std::isfinite(v)) throw Error(ErrorKind::NonConvergence, "H_N quadrature produced a non-finite value");
  return v;
}

}  // namespace sqg
