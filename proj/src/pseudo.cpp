#include "sqg/pseudo.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sqg/local_ops.hpp"
#include "sqg/quadrature.hpp"

namespace sqg {

namespace {

constexpr double pi = std::numbers::pi;

RadialProfile axis_profile(const Grid& g, std::vector<double> v) {
  const double r_max = (int(v.size()) - 1) * g.dx();
  return RadialProfile(r_max, std::move(v));
}

// values at r = 0 are replaced by the neighbour where the formula is singular
void patch_origin(std::vector<double>& v) {
  if (v.size() > 1) v[0] = v[1];
}

}  // namespace

void validate(const PseudoParams& p) {
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw Error(ErrorKind::InvalidRegime, "alpha must lie in (0,1)");
  if (!(p.beta > 1.0 && p.beta < 2.0 - p.alpha)) throw Error(ErrorKind::InvalidRegime, "beta must lie in (1, 2-alpha)");
  if (p.N < 8) throw Error(ErrorKind::InvalidRegime, "N must be at least 8");
  if (!(p.lambda >= 1.0)) throw Error(ErrorKind::InvalidRegime, "lambda must be >= 1");
  if (!(p.K >= 0.0)) throw Error(ErrorKind::InvalidRegime, "K must be positive");
  if (!(p.eps_tilde > 0.0 && p.eps_tilde < 0.5)) throw Error(ErrorKind::InvalidRegime, "eps_tilde must lie in (0,1/2)");
  if (p.coupled) {
    const double e = 2.0 - p.beta - p.alpha;
    const double rhs = std::pow(p.lambda, e);
    if (std::abs(std::pow(p.N, p.alpha) * std::log(double(p.N)) - rhs) / rhs >= 1e-10)
      throw Error(ErrorKind::InvalidRegime, "coupled parameters violate N^alpha ln N = lambda^{2-beta-alpha}");
  }
}

double couple_parameters(double alpha, double beta, double N) {
  const double e = 2.0 - beta - alpha;
  if (!(e > 0.0)) throw Error(ErrorKind::InvalidRegime, "coupling needs 2 - beta - alpha > 0");
  if (!(N > 1.0)) throw Error(ErrorKind::InvalidRegime, "coupling needs N > 1");
  return std::pow(std::pow(N, alpha) * std::log(N), 1.0 / e);
}

double invert_coupling(double alpha, double beta, double lambda) {
  const double e = 2.0 - beta - alpha;
  if (!(e > 0.0)) throw Error(ErrorKind::InvalidRegime, "coupling needs 2 - beta - alpha > 0");
  const double target = e * std::log(lambda);
  // log(N^alpha ln N) = alpha u + ln u with u = ln N, increasing in u > 0
  auto phi = [alpha](double u) { return alpha * u + std::log(u); };
  double lo = 1e-300, hi = 1.0;
  while (phi(hi) < target) hi *= 2.0;
  for (int it = 0; it < 400 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) < target ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double default_t_max(const PseudoParams& p, double horizon) {
  const double t = std::pow(p.lambda, p.beta - 2.0) * std::sqrt(std::log(double(p.N)));
  return horizon > 0.0 ? std::min(t, horizon) : t;
}

void PseudoState::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IOFailure, "cannot write " + path);
  out << fmt::format("# t={:.17g}\n", t);
  out << "r,g_bar,Theta,G_damp,phase_shift,Theta_r,u_theta_over_r,dg_dr\n";
  const auto r = g_bar.r_grid();
  for (std::size_t i = 0; i < r.size(); ++i)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r[i], g_bar.values()[i],
                       Theta.values()[i], G_damp.values()[i], phase_shift.values()[i], Theta_r.values()[i],
                       u_theta_over_r.values()[i], dg_dr.values()[i]);
  if (!out) throw Error(ErrorKind::IOFailure, "write failed for " + path);
}

PseudoState PseudoState::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot read " + path);
  PseudoState s;
  std::string line;
  std::array<std::vector<double>, 8> cols;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# t=", 0) == 0) s.t = std::stod(line.substr(4));
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    for (auto& c : cols) {
      if (!std::getline(ss, cell, ',')) throw Error(ErrorKind::IOFailure, "short row in " + path);
      c.push_back(std::stod(cell));
    }
  }
  if (cols[0].size() < 4) throw Error(ErrorKind::IOFailure, "too few rows in " + path);
  const double rmax = cols[0].back();
  s.g_bar = RadialProfile(rmax, cols[1]);
  s.Theta = RadialProfile(rmax, cols[2]);
  s.G_damp = RadialProfile(rmax, cols[3]);
  s.phase_shift = RadialProfile(rmax, cols[4]);
  s.Theta_r = RadialProfile(rmax, cols[5]);
  s.u_theta_over_r = RadialProfile(rmax, cols[6]);
  s.dg_dr = RadialProfile(rmax, cols[7]);
  return s;
}

PseudoSolution::PseudoSolution(const PseudoParams& params, std::shared_ptr<const BaseRadialFlow> base,
                               const Grid& grid, const ResolutionPolicy& policy)
    : params_(params), base_(std::move(base)), grid_(grid), policy_(policy) {
  validate(params_);
  if (!base_) throw Error(ErrorKind::InvalidGeometry, "pseudo-solution needs a base flow");
  const double outer = (1.0 + params_.eps_tilde) / params_.lambda;
  if (outer >= grid_.L() - 4.0 * grid_.dx())
    throw Error(ErrorKind::BoxTooSmall, "perturbation support does not fit in the box");
  bump_ = BumpShape{1.0, params_.eps_tilde, 0.5};
  amp_scale_ = std::pow(params_.lambda, 1.0 - params_.beta) * std::pow(double(params_.N), -params_.beta);
  damping_factor_ = surrogate_factor(params_.alpha, SurrogateConvention::spectral);
  vr_factor_ = radial_velocity_factor(SurrogateConvention::spectral);

  double fmax = 0.0, dfmax = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double s = 1.0 - params_.eps_tilde + 2.0 * params_.eps_tilde * i / 2000.0;
    const double h = 1e-5;
    fmax = std::max(fmax, bump_(s));
    dfmax = std::max(dfmax, std::abs(bump_(s + h) - bump_(s - h)) / (2 * h));
  }
  band_ = params_.lambda * dfmax / fmax;

  if (base_->is_zero()) {
    g0_ = SpectralField(grid_);
  } else {
    g0_ = sample_base(*base_, grid_, params_.lambda, params_.beta);
  }
  kalpha_.resize(grid_.spectral_size());
  for (int i1 = 0; i1 < grid_.n(); ++i1)
    for (int i2 = 0; i2 < grid_.nh(); ++i2)
      kalpha_[std::size_t(i1) * grid_.nh() + i2] = std::pow(grid_.kmag(i1, i2), params_.alpha);
  double cmax = 0.0;
  for (const cplx& c : g0_.coeffs()) cmax = std::max(cmax, std::abs(c));
  for (int i1 = 0; i1 < grid_.n(); ++i1) {
    for (int i2 = 0; i2 < grid_.nh(); ++i2) {
      const cplx c = g0_.at(i1, i2);
      if (grid_.is_nyquist(i1, i2) || !(std::abs(c) > 1e-17 * cmax)) continue;
      modes_.push_back(Mode{i1, (grid_.n() - i1) % grid_.n(), i2 > 0, (i2 % 2 == 0) ? 1.0 : -1.0, grid_.k1(i1),
                            grid_.kmag(i1, i2), kalpha_[std::size_t(i1) * grid_.nh() + i2], c});
    }
  }

  auto ut = axis(0.0, [](double k1, double k, double, double heat) {
    return k == 0.0 ? cplx{} : cplx(0.0, k1 / k) * heat;
  });
  std::vector<double> om(ut.size());
  for (std::size_t j = 1; j < ut.size(); ++j) om[j] = ut[j] / (j * grid_.dx());
  patch_origin(om);
  omega0_ = axis_profile(grid_, om);
}

template <class Symbol>
std::vector<double> PseudoSolution::axis(double t, Symbol&& symbol) const {
  std::vector<cplx> rows(grid_.n());
  for (const Mode& m : modes_) {
    const double heat = t == 0.0 ? 1.0 : std::exp(-m.ka * t);
    const cplx v = m.sgn * symbol(m.k1, m.k, m.ka, heat) * m.c;
    rows[m.i1] += v;
    if (m.paired) rows[m.j1] += std::conj(v);
  }
  return positive_axis_from_rows(grid_, rows);
}

SpectralField PseudoSolution::g_bar(double t) const {
  if (t < 0.0) throw Error(ErrorKind::InvalidRegime, "negative time");
  SpectralField out(grid_);
  auto o = out.coeffs();
  const auto in = g0_.coeffs();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = in[i] * std::exp(-kalpha_[i] * t);
  return out;
}

RadialProfile PseudoSolution::evolve_radial_heat(double t) const {
  if (t < 0.0) throw Error(ErrorKind::InvalidRegime, "negative time");
  return axis_profile(grid_, axis(t, [](double, double, double, double heat) { return cplx(heat, 0.0); }));
}

std::vector<PseudoState> PseudoSolution::build_states(const std::vector<double>& times, int n_quad) const {
  if (n_quad < 8) throw Error(ErrorKind::InvalidRegime, "n_quad must be at least 8");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1]))
      throw Error(ErrorKind::InvalidRegime, "state times must be nonnegative and increasing");
  }
  const int m = grid_.n() / 2;
  const double dx = grid_.dx();
  const double Kc = params_.K * std::pow(params_.lambda, params_.beta - 2.0);
  const double a = params_.alpha;
  const double NA = std::pow(double(params_.N), a);

  // phase velocity multiplier K lambda^{beta-2} + (1 - e^{-|k|^alpha s}) / |k|^alpha
  auto memory = [Kc](double ka, double heat) { return ka == 0.0 ? 0.0 : Kc + (1.0 - heat) / ka; };
  auto theta_parts = [&](double s, std::vector<double>& theta, std::vector<double>& theta_r) {
    const auto U = axis(s, [&](double k1, double k, double ka, double heat) {
      return k == 0.0 ? cplx{} : cplx(0.0, k1 / k * memory(ka, heat));
    });
    const auto Ur = axis(s, [&](double k1, double k, double ka, double heat) {
      return k == 0.0 ? cplx{} : cplx(-k1 * k1 / k * memory(ka, heat), 0.0);
    });
    theta.assign(m, 0.0);
    theta_r.assign(m, 0.0);
    for (int j = 1; j < m; ++j) {
      const double r = j * dx;
      theta[j] = -U[j] / r;
      theta_r[j] = -Ur[j] / r + U[j] / (r * r);
    }
    patch_origin(theta);
    patch_origin(theta_r);
  };

  std::vector<double> G(m, 0.0), S(m, 0.0), th, thr;
  const GaussLegendre& q = gauss_legendre(8);
  const int panels = (n_quad + 7) / 8;
  std::vector<PseudoState> states;
  states.reserve(times.size());
  double t_prev = 0.0;
  for (double t : times) {
    if (t > t_prev) {
      for (int p = 0; p < panels; ++p) {
        const double a0 = t_prev + (t - t_prev) * p / panels;
        const double h = 0.5 * (t - t_prev) / panels, c = a0 + h;
        for (int k = 0; k < 8; ++k) {
          const double s = c + h * q.x[k];
          const double w = q.w[k] * h;
          theta_parts(s, th, thr);
          const auto dg = axis(s, [](double k1, double, double, double heat) { return cplx(0.0, k1 * heat); });
          for (int j = 1; j < m; ++j) {
            const double r = j * dx;
            G[j] += w * damping_factor_ * NA * std::pow(1.0 / (r * r) + thr[j] * thr[j], 0.5 * a);
            S[j] -= w * vr_factor_ * dg[j] / std::sqrt(1.0 + r * r * thr[j] * thr[j]);
          }
        }
      }
      for (double v : G)
        if (!std::isfinite(v)) throw Error(ErrorKind::NonConvergence, "damping quadrature produced a non-finite value");
    }
    t_prev = t;
    PseudoState st;
    st.t = t;
    theta_parts(t, th, thr);
    st.Theta = axis_profile(grid_, th);
    st.Theta_r = axis_profile(grid_, thr);
    auto Gc = G, Sc = S;
    patch_origin(Gc);
    patch_origin(Sc);
    st.G_damp = axis_profile(grid_, Gc);
    st.phase_shift = axis_profile(grid_, Sc);
    st.g_bar = evolve_radial_heat(t);
    st.dg_dr = axis_profile(
        grid_, axis(t, [](double k1, double, double, double heat) { return cplx(0.0, k1 * heat); }));
    auto ut = axis(t, [](double k1, double k, double, double heat) {
      return k == 0.0 ? cplx{} : cplx(0.0, k1 / k * heat);
    });
    for (int j = 1; j < m; ++j) ut[j] /= j * dx;
    patch_origin(ut);
    st.u_theta_over_r = axis_profile(grid_, ut);
    states.push_back(std::move(st));
  }
  return states;
}

PseudoState PseudoSolution::build_phase_and_damping(double t, int n_quad) const {
  return build_states({t}, n_quad).front();
}

double PseudoSolution::amplitude(double r) const { return amp_scale_ * bump_(params_.lambda * r); }

std::pair<double, double> PseudoSolution::support() const {
  return {(1.0 - params_.eps_tilde) / params_.lambda, (1.0 + params_.eps_tilde) / params_.lambda};
}

void PseudoSolution::check_phase_resolution(const PseudoState& s) const {
  const auto [lo, hi] = support();
  double k = 0.0;
  for (int i = 0; i <= 512; ++i) {
    const double r = lo + (hi - lo) * i / 512;
    k = std::max(k, params_.N / r + params_.N * std::abs(s.Theta_r(r)) + std::abs(s.phase_shift.d1(r)));
  }
  check_resolution(grid_, k + band_, policy_, "pseudo-solution perturbation");
}

SpectralField PseudoSolution::perturbation(const PseudoState& s, PseudoVariant variant) const {
  check_phase_resolution(s);
  const auto [lo, hi] = support();
  const double N = params_.N;
  SpectralField out;
  if (variant == PseudoVariant::full) {
    out = SpectralField::sample(grid_, [&](double x1, double x2) {
      const double r = std::hypot(x1, x2);
      if (r <= lo || r >= hi) return 0.0;
      const double A = amplitude(r);
      if (A == 0.0) return 0.0;
      const double phase = N * (std::atan2(x2, x1) + s.Theta(r)) - s.phase_shift(r);
      return A * std::cos(phase) * std::exp(-s.G_damp(r));
    });
  } else {
    const double C = damping_factor_;
    const double lam_a = std::pow(params_.lambda, params_.alpha);
    const double decay = std::exp(-C * std::pow(N * params_.lambda, params_.alpha) * s.t);
    const double drift = (1.0 - std::exp(-C * lam_a * s.t)) / (C * lam_a);
    const double Kc = params_.K * std::pow(params_.lambda, params_.beta - 2.0);
    out = SpectralField::sample(grid_, [&](double x1, double x2) {
      const double r = std::hypot(x1, x2);
      if (r <= lo || r >= hi) return 0.0;
      const double A = amplitude(r);
      if (A == 0.0) return 0.0;
      const double om = omega0_(r);
      const double phase = N * (std::atan2(x2, x1) - Kc * om - om * drift);
      return A * decay * std::cos(phase);
    });
  }
  return remove_mean(out);
}

SpectralField PseudoSolution::eval(const PseudoState& s, PseudoVariant variant) const {
  SpectralField out = perturbation(s, variant);
  if (variant == PseudoVariant::full) {
    out += g_bar(s.t);
  } else {
    const double C = damping_factor_;
    out += std::exp(-C * std::pow(params_.lambda, params_.alpha) * s.t) * g0_;
  }
  return out;
}

bool PseudoSolution::maximocentro_holds(const PseudoState& s, double* worst_margin) const {
  const double lam = params_.lambda, e = params_.eps_tilde;
  const double gc = s.G_damp(1.0 / lam);
  double worst = std::numeric_limits<double>::infinity();
  auto band = [&](double a, double b) {
    for (int i = 0; i <= 16; ++i) worst = std::min(worst, s.G_damp(a + (b - a) * i / 16) - gc);
  };
  band((1.0 - e) / lam, (2.0 - e) / (2.0 * lam));
  band((2.0 + e) / (2.0 * lam), (1.0 + e) / lam);
  if (worst_margin) *worst_margin = worst;
  return worst >= -1e-12 * std::max(1.0, std::abs(gc));
}

PseudoSolution::Forcing PseudoSolution::forcing_terms(const PseudoState& s) const {
  const SpectralField P = perturbation(s);
  const SpectralField gb = g_bar(s.t);
  const auto [lo, hi] = support();
  const double N = params_.N, a = params_.alpha;
  const auto Pp = P.to_physical();
  const int n = grid_.n();

  // pointwise surrogates on the support
  std::vector<double> barL(Pp.size(), 0.0), barVr(Pp.size(), 0.0), dgr(Pp.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x1 = grid_.x(i), x2 = grid_.x(j);
      const double r = std::hypot(x1, x2);
      const std::size_t idx = std::size_t(i) * n + j;
      dgr[idx] = s.dg_dr(r);
      if (r <= lo || r >= hi) continue;
      const double A = amplitude(r);
      if (A == 0.0) continue;
      const double tr = s.Theta_r(r);
      const double phase = N * (std::atan2(x2, x1) + s.Theta(r)) - s.phase_shift(r);
      const double env = A * std::exp(-s.G_damp(r));
      barL[idx] = damping_factor_ * std::pow(N * N / (r * r) + N * N * tr * tr, 0.5 * a) * Pp[idx];
      barVr[idx] = vr_factor_ * env * std::sin(phase) / std::sqrt(1.0 + r * r * tr * tr);
    }
  }
  const auto lamP = fractional_laplacian(P, a).to_physical();
  const VelocityField v = riesz_velocity(P);
  const auto v1 = v.v1.to_physical(), v2 = v.v2.to_physical();
  const auto P1 = derivative(P, 0).to_physical(), P2 = derivative(P, 1).to_physical();
  const auto g1 = derivative(gb, 0).to_physical(), g2 = derivative(gb, 1).to_physical();
  std::vector<double> f1(Pp.size()), f2(Pp.size()), f3(Pp.size());
  for (std::size_t i = 0; i < Pp.size(); ++i) {
    f1[i] = barL[i] - lamP[i];
    f2[i] = -(v1[i] * P1[i] + v2[i] * P2[i]);
    f3[i] = barVr[i] * dgr[i] - (v1[i] * g1[i] + v2[i] * g2[i]);
  }
  Forcing out;
  out.F1 = SpectralField::from_physical(grid_, f1);
  out.F2 = SpectralField::from_physical(grid_, f2);
  out.F3 = SpectralField::from_physical(grid_, f3);
  const SpectralField* F[3] = {&out.F1, &out.F2, &out.F3};
  for (int k = 0; k < 3; ++k)
    for (int sidx = 0; sidx < 3; ++sidx) out.norms[k][sidx] = sobolev_norm(*F[k], double(sidx), false);
  return out;
}

double PseudoSolution::perturbation_residual(const PseudoState& minus, const PseudoState& mid,
                                             const PseudoState& plus) const {
  const double dt2 = plus.t - minus.t;
  if (!(dt2 > 0.0)) throw Error(ErrorKind::InvalidRegime, "residual needs increasing times");
  check_phase_resolution(mid);
  const auto [lo, hi] = support();
  const double N = params_.N, a = params_.alpha;
  auto value = [&](const PseudoState& s, double r, double th) {
    return amplitude(r) * std::exp(-s.G_damp(r)) * std::cos(N * (th + s.Theta(r)) - s.phase_shift(r));
  };
  const int n = grid_.n();
  std::vector<double> res(grid_.physical_size(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x1 = grid_.x(i), x2 = grid_.x(j);
      const double r = std::hypot(x1, x2);
      if (r <= lo || r >= hi) continue;
      const double A = amplitude(r);
      if (A == 0.0) continue;
      const double th = std::atan2(x2, x1);
      const double env = A * std::exp(-mid.G_damp(r));
      const double phase = N * (th + mid.Theta(r)) - mid.phase_shift(r);
      const double P = env * std::cos(phase);
      const double tr = mid.Theta_r(r);
      const double dPdt = (value(plus, r, th) - value(minus, r, th)) / dt2;
      const double transport = mid.u_theta_over_r(r) * (-env * N * std::sin(phase));
      const double vr = vr_factor_ * env * std::sin(phase) / std::sqrt(1.0 + r * r * tr * tr);
      const double damp = damping_factor_ * std::pow(N * N / (r * r) + N * N * tr * tr, 0.5 * a) * P;
      res[std::size_t(i) * n + j] = dPdt + transport + vr * mid.dg_dr(r) + damp;
    }
  }
  return l2_norm_physical(grid_, res);
}

double PseudoSolution::closure_residual(const PseudoState& minus, const PseudoState& mid, const PseudoState& plus,
                                        bool exclude_base_self_advection) const {
  const double dt2 = plus.t - minus.t;
  if (!(dt2 > 0.0)) throw Error(ErrorKind::InvalidRegime, "residual needs increasing times");
  const SpectralField wm = eval(minus), w0 = eval(mid), wp = eval(plus);
  const Forcing F = forcing_terms(mid);
  const auto dw = ((1.0 / dt2) * (wp - wm)).to_physical();
  const auto lam = fractional_laplacian(w0, params_.alpha).to_physical();
  const VelocityField v = riesz_velocity(w0);
  const auto v1 = v.v1.to_physical(), v2 = v.v2.to_physical();
  const auto d1 = derivative(w0, 0).to_physical(), d2 = derivative(w0, 1).to_physical();
  const auto f = (F.F1 + F.F2 + F.F3).to_physical();
  std::vector<double> res(dw.size());
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = dw[i] + v1[i] * d1[i] + v2[i] * d2[i] + lam[i] + f[i];
  if (exclude_base_self_advection) {
    const auto adv = base_self_advection(mid.t);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] -= adv[i];
  }
  return l2_norm_physical(grid_, res);
}

std::vector<double> PseudoSolution::base_self_advection(double t) const {
  const SpectralField gb = g_bar(t);
  const VelocityField v = riesz_velocity(gb);
  const auto v1 = v.v1.to_physical(), v2 = v.v2.to_physical();
  const auto d1 = derivative(gb, 0).to_physical(), d2 = derivative(gb, 1).to_physical();
  std::vector<double> out(v1.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v1[i] * d1[i] + v2[i] * d2[i];
  return out;
}

double choose_K(PseudoSolution& ps, double t_max, int n_quad, double* out_margin) {
  if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidRegime, "choose_K needs a positive horizon");
  std::vector<double> times(8);
  for (int i = 0; i < 8; ++i) times[i] = t_max * (i + 1) / 8.0;
  for (int e = 0; e <= 16; ++e) {
    const double K = std::ldexp(1.0, e);
    ps.set_K(K);
    const auto states = ps.build_states(times, n_quad);
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const auto& s : states) {
      double m = 0.0;
      ok = ps.maximocentro_holds(s, &m) && ok;
      worst = std::min(worst, m);
      if (!ok) break;
    }
    if (ok) {
      if (out_margin) *out_margin = worst;
      return K;
    }
  }
  throw Error(ErrorKind::NoAdmissibleK, "no K up to 2^16 satisfies the damping ordering");
}

}  // namespace sqg
