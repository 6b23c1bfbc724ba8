#include "sqg/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sqg/quadrature.hpp"

namespace sqg {

namespace {

constexpr double pi = std::numbers::pi;

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

void geometric_toward(double a, double b, bool toward_b, int levels, std::vector<double>& breaks) {
  // breakpoints in [a, b] refined geometrically toward b (or a)
  breaks.clear();
  const double len = b - a;
  if (toward_b) {
    breaks.push_back(a);
    for (int j = 1; j <= levels; ++j) breaks.push_back(b - len * std::pow(0.5, j));
    breaks.push_back(b);
  } else {
    breaks.push_back(a);
    for (int j = levels; j >= 1; --j) breaks.push_back(a + len * std::pow(0.5, j));
    breaks.push_back(b);
  }
}

double kernel(double r, double rp, double theta) {
  const double s = std::sin(0.5 * theta);
  const double one_minus_cos = 2.0 * s * s;
  const double d2 = (r - rp) * (r - rp) + 2.0 * r * rp * one_minus_cos;
  return ((r - rp) + rp * one_minus_cos) / (d2 * std::sqrt(d2));
}

// 2 * integral over [0, pi] of the kernel, panels graded toward theta = 0
double angular_integral(double r, double rp) {
  const GaussLegendre& q = gauss_legendre(16);
  const double d = std::max(std::abs(r - rp) / (4.0 * std::max(r, rp)), 1e-14);
  double acc = 0.0;
  double a = 0.0, b = std::min(d, pi);
  while (a < pi) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int k = 0; k < 16; ++k) acc += q.w[k] * h * kernel(r, rp, c + h * q.x[k]);
    a = b;
    b = std::min(pi, 2.0 * b);
  }
  return 2.0 * acc;
}

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = psi(x), b = psi(1.0 - x);
  return a / (a + b);
}

double highpass_cutoff(double x) { return smooth_step(x - 1.0); }

double BumpShape::operator()(double r) const {
  const double plateau = plateau_fraction * half_width;
  const double d = std::abs(r - center);
  if (d <= plateau) return 1.0;
  if (d >= half_width) return 0.0;
  return smooth_step((half_width - d) / (half_width - plateau));
}

RadialProfile bump_profile(double center, double half_width, double plateau_fraction, double r_max, int samples) {
  if (!(plateau_fraction > 0.0 && plateau_fraction < 1.0))
    throw Error(ErrorKind::InvalidGeometry, "plateau fraction must lie in (0,1)");
  if (!(half_width > 0.0 && half_width < center))
    throw Error(ErrorKind::InvalidGeometry, "bump half-width must be positive and below the center");
  if (center + half_width >= r_max) throw Error(ErrorKind::InvalidGeometry, "bump exceeds profile range");
  const BumpShape b{center, half_width, plateau_fraction};
  return RadialProfile::sample(b, r_max, samples);
}

double OscillatoryAnsatz::value(double r, double theta) const {
  const double s = lambda * r;
  const double amp = f(s);
  if (amp == 0.0) return 0.0;
  return amp * std::cos(N * (theta + g_phase(s)) + p(s));
}

double OscillatoryAnsatz::phase_slope(double r) const {
  const double s = lambda * r;
  return lambda * (N * g_phase.d1(s) + p.d1(s));
}

double OscillatoryAnsatz::gprime(double r) const { return lambda * g_phase.d1(lambda * r); }

std::pair<double, double> OscillatoryAnsatz::support() const {
  const auto& v = f.values();
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  std::size_t lo = v.size(), hi = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-14 * m) {
      lo = std::min(lo, i);
      hi = i;
    }
  }
  if (lo > hi) return {0.0, 0.0};
  const double h = f.step();
  return {(lo == 0 ? 0.0 : (lo - 1) * h) / lambda, std::min(f.r_max(), (hi + 1) * h) / lambda};
}

void validate(const OscillatoryAnsatz& a, bool require_unit_annulus) {
  if (a.N < 1) throw Error(ErrorKind::InvalidGeometry, "ansatz frequency N must be positive");
  if (!(a.lambda >= 1.0)) throw Error(ErrorKind::InvalidGeometry, "ansatz scale lambda must be >= 1");
  const auto [lo, hi] = a.support();
  if (hi <= lo) throw Error(ErrorKind::InvalidGeometry, "ansatz amplitude vanishes");
  if (require_unit_annulus && (lo * a.lambda < 0.5 - 1e-12 || hi * a.lambda > 1.5 + 1e-12))
    throw Error(ErrorKind::InvalidGeometry, "ansatz amplitude support must lie in (1/2, 3/2) before scaling");
}

double required_wavenumber(const OscillatoryAnsatz& a) {
  const auto [lo, hi] = a.support();
  const double rmin = std::max(lo, 1e-6);
  double fmax = 0.0, dfmax = 0.0, slope = 0.0;
  const int samples = 1024;
  for (int i = 0; i <= samples; ++i) {
    const double r = lo + (hi - lo) * i / samples;
    const double s = a.lambda * r;
    fmax = std::max(fmax, std::abs(a.f(s)));
    dfmax = std::max(dfmax, std::abs(a.f.d1(s)));
    slope = std::max(slope, std::abs(a.phase_slope(r)));
  }
  const double bandwidth = fmax > 0 ? dfmax / fmax : 0.0;
  return a.N / rmin + slope + a.lambda * bandwidth;
}

void check_resolution(const Grid& grid, double k_required, const ResolutionPolicy& policy, const std::string& what) {
  const double ppw = 2.0 * pi / (k_required * grid.dx());
  if (ppw < policy.points_per_wavelength)
    throw Error(ErrorKind::UnderResolved, what + " needs wavenumber " + std::to_string(k_required) +
                                              " but the grid gives " + std::to_string(ppw) + " points per wavelength");
}

SpectralField sample_ansatz(const OscillatoryAnsatz& a, const Grid& grid, const ResolutionPolicy& policy) {
  validate(a, false);
  check_resolution(grid, required_wavenumber(a), policy, "oscillatory ansatz");
  const auto [lo, hi] = a.support();
  if (hi >= grid.L()) throw Error(ErrorKind::InvalidGeometry, "ansatz support exceeds the box");
  SpectralField w = SpectralField::sample(grid, [&](double x1, double x2) {
    const double r = std::hypot(x1, x2);
    if (r < lo || r > hi) return 0.0;
    return a.value(r, std::atan2(x2, x1));
  });
  const auto phys = w.to_physical();
  const double m = max_abs(phys);
  if (std::abs(w.mean()) > 1e-8 * std::max(m, 1e-300))
    throw Error(ErrorKind::UnderResolved, "sampled ansatz has a non-negligible mean");
  return remove_mean(w);
}

double v_theta_radial(const RadialProfile& h, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidGeometry, "v_theta_radial needs r > 0");
  const double R = h.r_max();
  const double hr = h(r);
  const GaussLegendre& q = gauss_legendre(16);
  double acc = 0.0;
  std::vector<double> br;
  auto integrate_span = [&](double a, double b, bool toward_b) {
    if (b <= a) return;
    geometric_toward(a, b, toward_b, 40, br);
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double width = br[i + 1] - br[i];
      if (width <= 0.0) continue;
      const int sub = std::max(1, int(std::ceil(width / (16.0 * h.step()))));
      for (int s = 0; s < sub; ++s) {
        const double a0 = br[i] + width * s / sub;
        const double hw = 0.5 * width / sub, c = a0 + hw;
        for (int k = 0; k < 16; ++k) {
          const double rp = c + hw * q.x[k];
          const double diff = h(rp) - hr;
          if (diff == 0.0) continue;
          acc += q.w[k] * hw * rp * diff * angular_integral(r, rp);
        }
      }
    }
  };
  if (r < R) {
    integrate_span(0.0, r, true);
    integrate_span(r, R, false);
  } else {
    integrate_span(0.0, R, false);
  }
  if (hr != 0.0 && r < R) {
    // exterior part of the subtracted constant, r' = R/u
    const double ext = integrate_composite(
        [&](double u) {
          if (u <= 0.0) return 0.0;
          const double rp = R / u;
          return rp * angular_integral(r, rp) * R / (u * u);
        },
        0.0, 1.0, 8, 16);
    acc -= hr * ext;
  }
  if (!std::isfinite(acc)) throw Error(ErrorKind::NonConvergence, "v_theta quadrature produced a non-finite value");
  return acc;
}

}  // namespace sqg
