#include "sqg/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace sqg {

namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan line_inverse = nullptr;
};

std::mutex plan_mutex;
std::map<int, Plans> plan_cache;

const Plans& plans_for(int n) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = plan_cache.find(n);
  if (it != plan_cache.end()) return it->second;
  const std::size_t nr = std::size_t(n) * n;
  const std::size_t nc = std::size_t(n) * (n / 2 + 1);
  double* re = fftw_alloc_real(nr);
  fftw_complex* co = fftw_alloc_complex(nc);
  fftw_complex* line_a = fftw_alloc_complex(n);
  fftw_complex* line_b = fftw_alloc_complex(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p;
  p.r2c = fftw_plan_dft_r2c_2d(n, n, re, co, flags);
  p.c2r = fftw_plan_dft_c2r_2d(n, n, co, re, flags | FFTW_DESTROY_INPUT);
  p.line_inverse = fftw_plan_dft_1d(n, line_a, line_b, FFTW_BACKWARD, flags);
  fftw_free(re);
  fftw_free(co);
  fftw_free(line_a);
  fftw_free(line_b);
  return plan_cache.emplace(n, p).first->second;
}

double column_weight(const Grid& g, int i2) { return (i2 == 0 || i2 == g.n() / 2) ? 1.0 : 2.0; }

double coefficient_scale(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.coeffs()) m = std::max(m, std::abs(c));
  return std::max(1.0, m);
}

void require_zero_mean(const SpectralField& f, const char* where) {
  if (std::abs(f.mean()) > mean_tolerance() * coefficient_scale(f))
    throw Error(ErrorKind::NonzeroMean, std::string(where) + " requires a zero-mean field");
}

}  // namespace

double mean_tolerance() { return 1e-12; }

Grid::Grid(int n, double L) : n_(n), L_(L) {
  if (n < 16 || n % 2 != 0) throw Error(ErrorKind::InvalidGeometry, "grid size must be even and >= 16");
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidGeometry, "box half-length must be positive");
}

double Grid::k1(int i1) const { return std::numbers::pi * mode1(i1) / L_; }
double Grid::k2(int i2) const { return std::numbers::pi * mode2(i2) / L_; }
double Grid::kmag(int i1, int i2) const { return std::hypot(k1(i1), k2(i2)); }
double Grid::k_nyquist() const { return std::numbers::pi * (n_ / 2) / L_; }

SpectralField::SpectralField(const Grid& g) : grid_(g), coeffs_(g.spectral_size()) {}

SpectralField SpectralField::from_physical(const Grid& g, std::span<const double> values) {
  if (values.size() != g.physical_size()) throw Error(ErrorKind::InvalidGeometry, "physical array size mismatch");
  SpectralField out(g);
  std::vector<double> in(values.begin(), values.end());
  const Plans& p = plans_for(g.n());
  fftw_execute_dft_r2c(p.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.coeffs_.data()));
  const double scale = 1.0 / double(g.physical_size());
  for (auto& c : out.coeffs_) c *= scale;
  return out;
}

SpectralField SpectralField::sample(const Grid& g, const std::function<double(double, double)>& f) {
  std::vector<double> v(g.physical_size());
  for (int i1 = 0; i1 < g.n(); ++i1)
    for (int i2 = 0; i2 < g.n(); ++i2) v[std::size_t(i1) * g.n() + i2] = f(g.x(i1), g.x(i2));
  return from_physical(g, v);
}

std::vector<double> SpectralField::to_physical() const {
  std::vector<cplx> tmp(coeffs_);
  std::vector<double> out(grid_.physical_size());
  const Plans& p = plans_for(grid_.n());
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(tmp.data()), out.data());
  return out;
}

double SpectralField::value_at(double x1, double x2) const {
  const Grid& g = grid_;
  double acc = 0.0;
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.nh(); ++i2) {
      const double ph = g.k1(i1) * (x1 + g.L()) + g.k2(i2) * (x2 + g.L());
      acc += column_weight(g, i2) * std::real(at(i1, i2) * std::polar(1.0, ph));
    }
  }
  return acc;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (!(grid_ == o.grid_)) throw Error(ErrorKind::InvalidGeometry, "grid mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (!(grid_ == o.grid_)) throw Error(ErrorKind::InvalidGeometry, "grid mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

SpectralField apply_multiplier(const SpectralField& f, const RadialSymbol& symbol) {
  const Grid& g = f.grid();
  const double s0 = symbol(0.0);
  const bool singular = !std::isfinite(s0);
  if (singular) require_zero_mean(f, "singular multiplier");
  SpectralField out(g);
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.nh(); ++i2) {
      if (g.is_nyquist(i1, i2)) continue;
      if (i1 == 0 && i2 == 0) {
        out.at(0, 0) = singular ? cplx{} : s0 * f.at(0, 0);
        continue;
      }
      out.at(i1, i2) = symbol(g.kmag(i1, i2)) * f.at(i1, i2);
    }
  }
  return out;
}

SpectralField apply_multiplier(const SpectralField& f, const VectorSymbol& symbol) {
  const Grid& g = f.grid();
  const cplx s0 = symbol(0.0, 0.0);
  const bool singular = !std::isfinite(s0.real()) || !std::isfinite(s0.imag());
  if (singular) require_zero_mean(f, "singular multiplier");
  SpectralField out(g);
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.nh(); ++i2) {
      if (g.is_nyquist(i1, i2)) continue;
      if (i1 == 0 && i2 == 0) {
        out.at(0, 0) = singular ? cplx{} : s0 * f.at(0, 0);
        continue;
      }
      out.at(i1, i2) = symbol(g.k1(i1), g.k2(i2)) * f.at(i1, i2);
    }
  }
  return out;
}

SpectralField fractional_laplacian(const SpectralField& f, double s) {
  if (s == 0.0) return apply_multiplier(f, RadialSymbol([](double) { return 1.0; }));
  return apply_multiplier(f, RadialSymbol([s](double k) {
    return k == 0.0 ? (s < 0 ? std::numeric_limits<double>::infinity() : 0.0) : std::pow(k, s);
  }));
}

VelocityField riesz_velocity(const SpectralField& w) {
  require_zero_mean(w, "riesz_velocity");
  const auto inf = std::numeric_limits<double>::infinity();
  VelocityField v;
  v.v1 = apply_multiplier(w, VectorSymbol([inf](double k1, double k2) -> cplx {
    const double k = std::hypot(k1, k2);
    return k == 0.0 ? cplx(inf, 0) : cplx(0.0, -k2 / k);
  }));
  v.v2 = apply_multiplier(w, VectorSymbol([inf](double k1, double k2) -> cplx {
    const double k = std::hypot(k1, k2);
    return k == 0.0 ? cplx(inf, 0) : cplx(0.0, k1 / k);
  }));
  return v;
}

SpectralField derivative(const SpectralField& f, int axis) {
  return apply_multiplier(f, VectorSymbol([axis](double k1, double k2) {
    return cplx(0.0, axis == 0 ? k1 : k2);
  }));
}

SpectralField divergence(const VelocityField& v) { return derivative(v.v1, 0) + derivative(v.v2, 1); }

double sobolev_norm(const SpectralField& w, double s, bool homogeneous) {
  if (s < -2.0 || s > 6.0) throw Error(ErrorKind::InvalidRegime, "Sobolev index outside [-2, 6]");
  if (s < 0.0) require_zero_mean(w, "negative-order Sobolev norm");
  const Grid& g = w.grid();
  double h2 = 0.0, l2 = 0.0;
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.nh(); ++i2) {
      const double e = column_weight(g, i2) * std::norm(w.at(i1, i2));
      l2 += e;
      if (i1 == 0 && i2 == 0) {
        if (s == 0.0) h2 += e;
        continue;
      }
      h2 += std::pow(g.kmag(i1, i2), 2.0 * s) * e;
    }
  }
  const double area = 4.0 * g.L() * g.L();
  const double hom = std::sqrt(area * h2);
  return homogeneous ? hom : std::sqrt(area * l2) + hom;
}

double l2_norm(const SpectralField& w) { return sobolev_norm(w, 0.0, true); }

double l2_norm_physical(const Grid& g, std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc * g.dx() * g.dx());
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

SpectralField dealias(const SpectralField& f) {
  const Grid& g = f.grid();
  const int cut = g.n() / 3;
  SpectralField out = f;
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.nh(); ++i2) {
      if (std::abs(g.mode1(i1)) > cut || std::abs(g.mode2(i2)) > cut) out.at(i1, i2) = 0.0;
    }
  }
  return out;
}

SpectralField remove_mean(const SpectralField& f) {
  SpectralField out = f;
  if (!out.coeffs().empty()) out.at(0, 0) = 0.0;
  return out;
}

SpectralField translate(const SpectralField& f, double a1, double a2) {
  const Grid& g = f.grid();
  SpectralField out = f;
  for (int i1 = 0; i1 < g.n(); ++i1)
    for (int i2 = 0; i2 < g.nh(); ++i2)
      out.at(i1, i2) *= std::polar(1.0, -(g.k1(i1) * a1 + g.k2(i2) * a2));
  return out;
}

std::vector<double> positive_axis_from_rows(const Grid& g, std::span<const cplx> row_sums) {
  const int n = g.n();
  if (int(row_sums.size()) != n) throw Error(ErrorKind::InvalidGeometry, "row sums must have one entry per row");
  std::vector<cplx> d(row_sums.begin(), row_sums.end()), out(n);
  const Plans& p = plans_for(n);
  fftw_execute_dft(p.line_inverse, reinterpret_cast<fftw_complex*>(d.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  std::vector<double> axis(n / 2);
  for (int j = 0; j < n / 2; ++j) axis[j] = out[n / 2 + j].real();
  return axis;
}

std::vector<double> positive_axis_values(const SpectralField& f) {
  const Grid& g = f.grid();
  const int n = g.n();
  std::vector<cplx> d(n);
  for (int i1 = 0; i1 < n; ++i1) {
    const int j1 = (n - i1) % n;
    cplx acc = f.at(i1, 0);
    for (int i2 = 1; i2 < g.nh(); ++i2) {
      const double sgn = (i2 % 2 == 0) ? 1.0 : -1.0;
      const cplx pair = f.at(i1, i2) + std::conj(f.at(j1, i2));
      acc += sgn * (i2 == n / 2 ? 0.5 * pair : pair);
    }
    d[i1] = acc;
  }
  return positive_axis_from_rows(g, d);
}

}  // namespace sqg
