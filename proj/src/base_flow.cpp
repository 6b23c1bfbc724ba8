#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "sqg/ansatz.hpp"
#include "sqg/jet.hpp"
#include "sqg/quadrature.hpp"

namespace sqg {

namespace {

constexpr double pi = std::numbers::pi;
using J3 = Jet<3>;
using J4 = Jet<4>;

double bessel_j(int order, double x) {
  if (order < 0) return (order % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(double(-order), x);
  return std::cyl_bessel_j(double(order), x);
}

// J_1(k rho) as a jet in rho around rho0
J3 bessel_j1_jet(double k, double rho0) {
  std::array<double, 4> d{};
  const double x = k * rho0;
  for (int m = 0; m <= 3; ++m) {
    double s = 0.0, binom = 1.0;
    for (int j = 0; j <= m; ++j) {
      s += (j % 2 == 0 ? 1.0 : -1.0) * binom * bessel_j(1 - m + 2 * j, x);
      binom = binom * (m - j) / (j + 1);
    }
    d[m] = s / std::pow(2.0, m) * std::pow(k, m);
  }
  J3 drho = J3::variable(rho0);
  drho.c[0] = rho0;
  // derivatives already carry the chain factor k^m; compose against a unit-slope variable
  return compose<3>(d, drho);
}

struct Nodes {
  std::vector<double> x, w;
};

Nodes composite(double a, double b, int panels, int n) {
  Nodes r;
  const GaussLegendre& q = gauss_legendre(n);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int k = 0; k < n; ++k) {
      r.x.push_back(c + 0.5 * h * q.x[k]);
      r.w.push_back(0.5 * h * q.w[k]);
    }
  }
  return r;
}

// One radial building block: profile, 2D Fourier transform and filtered v/rho jets.
struct Basis {
  std::function<double(double)> raw;
  std::function<double(double)> hat;        // 2 pi int raw(s) J0(k s) s ds
  std::function<J3(double)> ratio_jet;       // filtered v_theta / rho around rho0
  std::function<double(double)> v_direct;    // filtered v_theta(rho), no jets
};

Triple triple_of(const J3& j) { return {j.derivative(1), j.derivative(2), j.derivative(3)}; }

// low-pass part of the velocity: int_0^{2c} hat(k) (1 - p(k/c)) J1(k rho) k dk
struct LowPass {
  Nodes k;
  std::vector<double> weight;  // hat(k) (1 - p) k w
  LowPass(const std::function<double(double)>& hat, double c) : k(composite(0.0, 2.0 * c, 8, 32)) {
    weight.resize(k.x.size());
    for (std::size_t i = 0; i < k.x.size(); ++i)
      weight[i] = hat(k.x[i]) * (1.0 - highpass_cutoff(k.x[i] / c)) * k.x[i] * k.w[i];
  }
  J3 jet(double rho0) const {
    J3 acc;
    for (std::size_t i = 0; i < k.x.size(); ++i) acc += bessel_j1_jet(k.x[i], rho0) * weight[i];
    return acc;
  }
  double value(double rho) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < k.x.size(); ++i) acc += std::cyl_bessel_j(1.0, k.x[i] * rho) * weight[i];
    return acc;
  }
  double profile(double rho) const {
    // (1/2pi) int hat (1-p) J0 k dk
    double acc = 0.0;
    for (std::size_t i = 0; i < k.x.size(); ++i) acc += std::cyl_bessel_j(0.0, k.x[i] * rho) * weight[i];
    return acc / (2.0 * pi);
  }
};

// coefficient of u^{2n} in the angular kernel integral, exterior multipole series
double multipole_coefficient(int n) {
  double c = 1.0;
  for (int j = 1; j <= n; ++j) c *= (2.0 * j - 1.0) / (2.0 * j);
  return 2.0 * pi * (2.0 * n + 1.0) * c * c;
}

// compactly supported block known through its even moments M_{2n} = int r^{2n+1} b(r) dr;
// outside the support v_theta = sum a_n M_{2n} / rho^{2n+2}
Basis compact_basis(std::function<double(double)> raw, double s1, std::vector<double> moments, double c) {
  auto M = std::make_shared<std::vector<double>>(std::move(moments));
  std::function<double(double)> hat = [M](double k) {
    double acc = 0.0, term = 1.0;
    for (std::size_t m = 0; m < M->size(); ++m) {
      acc += term * (*M)[m];
      term *= -(k * k / 4.0) / double((m + 1) * (m + 1));
    }
    return 2.0 * pi * acc;
  };
  auto low = std::make_shared<LowPass>(hat, c);
  Basis b;
  b.raw = std::move(raw);
  b.hat = hat;
  b.ratio_jet = [M, low, s1](double rho0) {
    if (rho0 <= s1) throw Error(ErrorKind::InvalidGeometry, "derivative radius inside the basis support");
    const J3 rho = J3::variable(rho0);
    J3 acc;
    for (std::size_t n = 0; n < M->size(); ++n)
      acc += pow(rho, -2.0 * n - 3.0) * (multipole_coefficient(int(n)) * (*M)[n]);
    return acc - low->jet(rho0) / rho;
  };
  b.v_direct = [M, low](double rho) {
    double acc = 0.0;
    for (std::size_t n = 0; n < M->size(); ++n) acc += multipole_coefficient(int(n)) * (*M)[n] * std::pow(rho, -2.0 * n - 2.0);
    return acc - low->value(rho);
  };
  return b;
}

// Gaussian block exp(-rho^2/sigma^2), high-pass filtered in the Hankel domain
Basis gaussian_basis(double sigma, double c) {
  const double kmax = 14.0 / sigma;
  auto kn = std::make_shared<Nodes>(composite(c, kmax, 96, 16));
  auto wt = std::make_shared<std::vector<double>>(kn->x.size());
  for (std::size_t i = 0; i < kn->x.size(); ++i) {
    const double k = kn->x[i];
    (*wt)[i] = pi * sigma * sigma * std::exp(-k * k * sigma * sigma / 4.0) * highpass_cutoff(k / c) * k * kn->w[i];
  }
  Basis b;
  b.raw = [sigma](double r) { return std::exp(-r * r / (sigma * sigma)); };
  b.hat = [sigma](double k) { return pi * sigma * sigma * std::exp(-k * k * sigma * sigma / 4.0); };
  b.ratio_jet = [kn, wt](double rho0) {
    J3 acc;
    for (std::size_t i = 0; i < kn->x.size(); ++i) acc += bessel_j1_jet(kn->x[i], rho0) * (*wt)[i];
    return acc / J3::variable(rho0);
  };
  b.v_direct = [kn, wt](double rho) {
    double acc = 0.0;
    for (std::size_t i = 0; i < kn->x.size(); ++i) acc += std::cyl_bessel_j(1.0, kn->x[i] * rho) * (*wt)[i];
    return acc;
  };
  return b;
}

std::array<double, 3> solve3(std::array<Triple, 3> cols, Triple rhs) {
  // rows are derivative orders, columns are bases
  double A[3][4];
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      A[i][j] = cols[j][i];
      scale = std::max(scale, std::abs(A[i][j]));
    }
    A[i][3] = rhs[i];
  }
  const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                     A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                     A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
  if (!(std::abs(det) > 1e-12 * scale * scale * scale))
    throw Error(ErrorKind::SingularSystem, "base flow derivative system is singular");
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int i = col + 1; i < 3; ++i)
      if (std::abs(A[i][col]) > std::abs(A[piv][col])) piv = i;
    for (int j = 0; j < 4; ++j) std::swap(A[col][j], A[piv][j]);
    for (int i = col + 1; i < 3; ++i) {
      const double f = A[i][col] / A[col][col];
      for (int j = col; j < 4; ++j) A[i][j] -= f * A[col][j];
    }
  }
  std::array<double, 3> x{};
  for (int i = 2; i >= 0; --i) {
    double s = A[i][3];
    for (int j = i + 1; j < 3; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

// finite-difference derivatives of v/rho at rho0 from direct evaluations
Triple finite_difference_triple(const std::function<double(double)>& v, double rho0, double d) {
  double f[7];
  for (int j = -3; j <= 3; ++j) f[j + 3] = v(rho0 + j * d) / (rho0 + j * d);
  const double d1 = (-f[0] + 9 * f[1] - 45 * f[2] + 45 * f[4] - 9 * f[5] + f[6]) / (60 * d);
  const double d2 = (2 * f[0] - 27 * f[1] + 270 * f[2] - 490 * f[3] + 270 * f[4] - 27 * f[5] + 2 * f[6]) / (180 * d * d);
  const double d3 = (f[0] - 8 * f[1] + 13 * f[2] - 13 * f[4] + 8 * f[5] - f[6]) / (8 * d * d * d);
  return {d1, d2, d3};
}

BaseRadialFlow assemble(const std::string& kind, std::vector<Basis> bases, const Triple& targets,
                        const BaseOptions& opt, double lambda_h, const std::array<Triple, 3>& ideal) {
  BaseRadialFlow out;
  out.kind = kind;
  out.cutoff_c = opt.cutoff_c;
  out.lambda_h = lambda_h;
  out.targets = targets;
  out.ideal_triples = ideal;
  for (int i = 0; i < 3; ++i) out.basis_triples[i] = triple_of(bases[i].ratio_jet(1.0));
  const bool zero = targets == Triple{0.0, 0.0, 0.0};
  out.coefficients = zero ? Triple{0.0, 0.0, 0.0} : solve3(out.basis_triples, targets);
  auto shared = std::make_shared<std::vector<Basis>>(std::move(bases));
  const Triple coef = out.coefficients;
  out.raw = [shared, coef](double r) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
      if (coef[i] != 0.0) acc += coef[i] * (*shared)[i].raw(r);
    return acc;
  };
  out.triple_at = [shared, coef](double r0) {
    J3 acc;
    for (int i = 0; i < 3; ++i)
      if (coef[i] != 0.0) acc += (*shared)[i].ratio_jet(r0) * coef[i];
    return triple_of(acc);
  };
  if (zero) {
    out.achieved = {0.0, 0.0, 0.0};
    out.profile = RadialProfile::zero(opt.profile_r_max, 64);
    return out;
  }
  auto v = [shared, coef](double rho) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += coef[i] * (*shared)[i].v_direct(rho);
    return acc;
  };
  out.achieved = finite_difference_triple(v, 1.0, 0.01);
  double tscale = 0.0;
  for (double t : targets) tscale = std::max(tscale, std::abs(t));
  for (int i = 0; i < 3; ++i) {
    const double tol = opt.tolerance * std::max(std::abs(targets[i]), tscale);
    if (std::abs(out.achieved[i] - targets[i]) > tol)
      throw Error(ErrorKind::TargetMiss, "base flow derivative " + std::to_string(i + 1) + " measured " +
                                             std::to_string(out.achieved[i]) + " for target " +
                                             std::to_string(targets[i]));
  }
  LowPass low(
      [shared, coef](double k) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) acc += coef[i] * (*shared)[i].hat(k);
        return acc;
      },
      opt.cutoff_c);
  const auto raw = out.raw;
  out.profile = RadialProfile::sample([&](double r) { return raw(r) - low.profile(r); }, opt.profile_r_max,
                                      opt.profile_samples);
  return out;
}

}  // namespace

BaseRadialFlow construct_base_radial(const Triple& targets, const BaseOptions& opt) {
  const double a = 0.25, b = 0.5;
  // closed-form bump on (a, b) and its radial derivatives via Taylor jets
  auto bump = [a, b](const J4& s) {
    const double w = 0.25 * (b - a) * (b - a);
    const J4 t = (s - a) * (b - s);
    return exp(-w / t);
  };
  const double mass = integrate_composite(
      [&](double s) { return (s <= a || s >= b) ? 0.0 : s * bump(J4(s)).value(); }, a, b, 8, 32);
  const double A = 1.0 / mass;
  auto q_jet = [=](double s) { return J4::variable(s) * bump(J4::variable(s)) * A; };
  auto h1 = [=](double s) { return (s <= a || s >= b) ? 0.0 : A * bump(J4(s)).value(); };
  auto h2 = [=](double s) { return (s <= a || s >= b) ? 0.0 : q_jet(s).derivative(2) / s; };
  auto h3 = [=](double s) { return (s <= a || s >= b) ? 0.0 : q_jet(s).derivative(4) / s; };

  const int n_moments = 12;
  std::vector<double> m1(n_moments + 2);
  for (int n = 0; n < n_moments + 2; ++n)
    m1[n] = integrate_composite([&](double s) { return std::pow(s, 2 * n + 1) * h1(s); }, a, b, 16, 32);
  const std::array<Triple, 3> ideal = {Triple{-6 * pi, 24 * pi, -120 * pi},
                                       Triple{-15 * pi, 90 * pi, -630 * pi},
                                       Triple{-945 * pi / 4, 945 * pi * 2, -945 * pi / 4 * 72}};
  const double ladder[] = {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0};
  for (double lh : ladder) {
    // moments of the scaled blocks, by parts: int r^{2n} (r h1)'' = 2n(2n-1) M_{2n-2}(h1)
    std::array<std::vector<double>, 3> mom;
    for (int n = 0; n < n_moments; ++n) {
      const double f2 = 2.0 * n * (2.0 * n - 1.0);
      const double f4 = f2 * (2.0 * n - 2.0) * (2.0 * n - 3.0);
      const double scale = std::pow(lh, -2.0 * n - 2.0);
      mom[0].push_back(lh * lh * scale * m1[n]);
      mom[1].push_back(std::pow(lh, 4) * scale * (n >= 1 ? f2 * m1[n - 1] : 0.0));
      mom[2].push_back(std::pow(lh, 6) * scale * (n >= 2 ? f4 * m1[n - 2] : 0.0));
    }
    std::vector<Basis> bases;
    bases.push_back(compact_basis([=](double r) { return lh * lh * h1(lh * r); }, b / lh, mom[0], opt.cutoff_c));
    bases.push_back(compact_basis([=](double r) { return std::pow(lh, 4) * h2(lh * r); }, b / lh, mom[1], opt.cutoff_c));
    bases.push_back(compact_basis([=](double r) { return std::pow(lh, 6) * h3(lh * r); }, b / lh, mom[2], opt.cutoff_c));
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      const Triple t = triple_of(bases[i].ratio_jet(1.0));
      for (int j = 0; j < 3; ++j)
        if (std::abs(t[j] - ideal[i][j]) > opt.basis_tolerance * std::abs(ideal[i][j])) ok = false;
    }
    if (!ok) continue;
    return assemble("explicit", std::move(bases), targets, opt, lh, ideal);
  }
  throw Error(ErrorKind::NonConvergence, "no concentration scale reproduces the ideal basis triples");
}

BaseRadialFlow smooth_base_radial(const Triple& targets, const BaseOptions& opt) {
  std::vector<Basis> bases;
  for (double sigma : {0.6, 0.9, 1.6}) bases.push_back(gaussian_basis(sigma, opt.cutoff_c));
  return assemble("smooth", std::move(bases), targets, opt, 1.0, {});
}

SpectralField sample_base_raw(const BaseRadialFlow& base, const Grid& grid, double lambda) {
  const auto raw = base.raw;
  return SpectralField::sample(grid, [&](double x1, double x2) { return raw(lambda * std::hypot(x1, x2)); });
}

SpectralField sample_base(const BaseRadialFlow& base, const Grid& grid, double lambda, double beta) {
  const SpectralField raw = sample_base_raw(base, grid, lambda);
  const double c = base.cutoff_c * lambda;
  const double amp = std::pow(lambda, 1.0 - beta);
  return apply_multiplier(raw, RadialSymbol([c, amp](double k) { return amp * highpass_cutoff(k / c); }));
}

}  // namespace sqg
