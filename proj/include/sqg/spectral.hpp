#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sqg/error.hpp"

namespace sqg {

using cplx = std::complex<double>;

// Periodic box [-L, L)^2 sampled on n x n points. Spectral storage is the
// r2c half plane: row i1 in [0, n), column i2 in [0, n/2].
class Grid {
 public:
  Grid() = default;
  Grid(int n, double L);

  int n() const { return n_; }
  double L() const { return L_; }
  int nh() const { return n_ / 2 + 1; }
  double dx() const { return 2.0 * L_ / n_; }
  double x(int i) const { return -L_ + i * dx(); }
  std::size_t physical_size() const { return std::size_t(n_) * n_; }
  std::size_t spectral_size() const { return std::size_t(n_) * nh(); }

  // signed mode number for a row index (first axis)
  int mode1(int i1) const { return i1 < n_ / 2 ? i1 : i1 - n_; }
  // column index is the second axis mode, Nyquist reported as -n/2
  int mode2(int i2) const { return i2 < n_ / 2 ? i2 : -n_ / 2; }
  double k1(int i1) const;
  double k2(int i2) const;
  double kmag(int i1, int i2) const;
  bool is_nyquist(int i1, int i2) const { return i1 == n_ / 2 || i2 == n_ / 2; }
  double k_nyquist() const;

  bool operator==(const Grid& o) const { return n_ == o.n_ && L_ == o.L_; }

 private:
  int n_ = 0;
  double L_ = 0.0;
};

class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const Grid& g);

  static SpectralField from_physical(const Grid& g, std::span<const double> values);
  static SpectralField sample(const Grid& g, const std::function<double(double, double)>& f);

  std::vector<double> to_physical() const;

  const Grid& grid() const { return grid_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  cplx& at(int i1, int i2) { return coeffs_[std::size_t(i1) * grid_.nh() + i2]; }
  cplx at(int i1, int i2) const { return coeffs_[std::size_t(i1) * grid_.nh() + i2]; }
  cplx mean() const { return coeffs_.empty() ? cplx{} : coeffs_[0]; }

  // direct Fourier series evaluation, O(n^2) per point
  double value_at(double x1, double x2) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

struct VelocityField {
  SpectralField v1;
  SpectralField v2;
};

using RadialSymbol = std::function<double(double)>;
using VectorSymbol = std::function<cplx(double, double)>;

// Symbols returning a non-finite value at k = 0 are treated as singular there.
SpectralField apply_multiplier(const SpectralField& f, const RadialSymbol& symbol);
SpectralField apply_multiplier(const SpectralField& f, const VectorSymbol& symbol);

SpectralField fractional_laplacian(const SpectralField& f, double s);
VelocityField riesz_velocity(const SpectralField& w);
SpectralField derivative(const SpectralField& f, int axis);
SpectralField divergence(const VelocityField& v);

double sobolev_norm(const SpectralField& w, double s, bool homogeneous);
double l2_norm(const SpectralField& w);
double l2_norm_physical(const Grid& g, std::span<const double> values);
double max_abs(std::span<const double> values);

SpectralField dealias(const SpectralField& f);
SpectralField remove_mean(const SpectralField& f);
SpectralField translate(const SpectralField& f, double a1, double a2);

double mean_tolerance();

// Values along the ray x2 = 0, x1 = j*dx for j = 0..n/2-1.
std::vector<double> positive_axis_values(const SpectralField& f);
// Same ray from precomputed sums over the second axis, sign (-1)^{m2} folded in, one entry per row.
std::vector<double> positive_axis_from_rows(const Grid& g, std::span<const cplx> row_sums);

}  // namespace sqg
