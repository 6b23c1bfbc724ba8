#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sqg/error.hpp"

namespace sqg {

struct GaussLegendre {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Cached Gauss-Legendre rule with n nodes.
const GaussLegendre& gauss_legendre(int n);

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);
double integrate_composite(const std::function<double(double)>& f, double a, double b, int panels, int n);

// Limit of an alternating sequence of partial sums by repeated averaging.
double accelerate_partial_sums(std::span<const double> partial_sums);

// Sum of Legendre-Filon panels: integral of envelope(x) * exp(i omega x) over [a, b].
struct OscPair {
  double cos_part = 0.0;
  double sin_part = 0.0;
};
OscPair filon_integral(const std::function<double(double)>& envelope, double a, double b, double omega, int m = 24);

double dirichlet_C0();
// 4 * integral of sin(lambda x)/x over [0, 2 pi M], without tail acceleration
double dirichlet_truncated(double lambda, int M);
double dirichlet_signed(double lambda);

double cos_power_integral(double alpha);
double sin_power_integral(double alpha);
double K_alpha(double alpha);

// Riesz potential constant c_a: Lambda^{-a} f = c_a * (|x|^{a-2} * f) in the plane.
double riesz_potential_constant(double alpha);
// Effective constant of the local surrogate: K used in place of K_alpha, including the alpha = 1 limit.
double surrogate_constant(double alpha);

struct OscillatoryIntegralSpec {
  double alpha = 0.5;
  double r = 1.0;
  double gprime = 0.0;
  double N = 100.0;
  double epsilon_prime = 0.25;
};

enum class HKind { diffusion, radial_velocity };

void validate(const OscillatoryIntegralSpec& spec);
double H_N(const OscillatoryIntegralSpec& spec, HKind kind);
double H_limit(const OscillatoryIntegralSpec& spec, HKind kind);

}  // namespace sqg
