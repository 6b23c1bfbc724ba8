#pragma once

#include <array>
#include <functional>
#include <string>

#include "sqg/radial.hpp"
#include "sqg/spectral.hpp"

namespace sqg {

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x);
// High-pass cutoff p(x): 0 for x <= 1, 1 for x >= 2.
double highpass_cutoff(double x);

// Closed-form bump equal to 1 on the plateau and supported in [center - hw, center + hw].
struct BumpShape {
  double center = 1.0;
  double half_width = 0.2;
  double plateau_fraction = 0.5;
  double operator()(double r) const;
};

RadialProfile bump_profile(double center, double half_width, double plateau_fraction, double r_max = 4.0,
                           int samples = 4096);

struct OscillatoryAnsatz {
  RadialProfile f;
  RadialProfile g_phase;
  RadialProfile p;
  int N = 8;
  double lambda = 1.0;

  double value(double r, double theta) const;
  // radial derivative of the phase N g(lambda r) + p(lambda r)
  double phase_slope(double r) const;
  // physical g'(r) of the scaled phase function g(lambda r)
  double gprime(double r) const;
  // support of f(lambda r) in physical radius
  std::pair<double, double> support() const;
};

void validate(const OscillatoryAnsatz& a, bool require_unit_annulus = true);

struct ResolutionPolicy {
  double points_per_wavelength = 4.0;
};

double required_wavenumber(const OscillatoryAnsatz& a);
void check_resolution(const Grid& grid, double k_required, const ResolutionPolicy& policy, const std::string& what);

SpectralField sample_ansatz(const OscillatoryAnsatz& a, const Grid& grid, const ResolutionPolicy& policy = {});

// Angular velocity kernel v_theta(h)(r) in the unnormalized kernel convention;
// a unit-mass annulus concentrated near the origin gives 2 pi / r^2.
double v_theta_radial(const RadialProfile& h, double r);

using Triple = std::array<double, 3>;

// Radial base flow with prescribed derivatives of v_theta(g)/r at r = 1 (kernel convention).
struct BaseRadialFlow {
  std::string kind;
  std::function<double(double)> raw;   // unfiltered profile g_raw(rho)
  double cutoff_c = 0.5;               // high-pass cutoff, filtered profile has Fourier support in (c, inf)
  double lambda_h = 1.0;
  Triple targets{};
  Triple coefficients{};
  std::array<Triple, 3> basis_triples{};  // filtered basis derivative triples at r = 1
  std::array<Triple, 3> ideal_triples{};
  Triple achieved{};                       // verification measurement at r = 1
  std::function<Triple(double)> triple_at;  // derivatives of v_theta(g)/r at radius r0
  RadialProfile profile;                   // filtered profile, sampled for inspection
  bool is_zero() const { return coefficients == Triple{0.0, 0.0, 0.0}; }
};

struct BaseOptions {
  double cutoff_c = 0.5;
  double tolerance = 0.02;
  double basis_tolerance = 0.05;
  double profile_r_max = 32.0;
  int profile_samples = 8192;
};

BaseRadialFlow construct_base_radial(const Triple& targets, const BaseOptions& options = {});

// Resolvable base made from wide Gaussians, same targets and high-pass cutoff.
BaseRadialFlow smooth_base_radial(const Triple& targets, const BaseOptions& options = {});

// Torus samples of lambda^{1-beta} H_{c lambda}[g_raw(lambda |x|)].
SpectralField sample_base(const BaseRadialFlow& base, const Grid& grid, double lambda, double beta);

// Unfiltered torus samples of g_raw(lambda |x|).
SpectralField sample_base_raw(const BaseRadialFlow& base, const Grid& grid, double lambda);

}  // namespace sqg
