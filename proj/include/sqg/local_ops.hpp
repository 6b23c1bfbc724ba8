#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sqg/ansatz.hpp"
#include "sqg/spectral.hpp"

namespace sqg {

// kernel: constants exactly as in the integral-kernel formulas (K_alpha, C_0 unnormalized).
// spectral: the same surrogates rescaled to the multiplier normalization used by spectral_core.
enum class SurrogateConvention { spectral, kernel };

// Factor multiplying |k_eff|^{exponent} w in the local surrogate.
double surrogate_factor(double exponent, SurrogateConvention convention);
// Factor multiplying f sin(phase) / sqrt(1 + r^2 g'^2) in the radial velocity surrogate.
double radial_velocity_factor(SurrogateConvention convention);

SpectralField bar_lambda(const OscillatoryAnsatz& a, const Grid& grid, double exponent,
                         SurrogateConvention convention = SurrogateConvention::spectral,
                         const ResolutionPolicy& policy = {});
SpectralField bar_v_r(const OscillatoryAnsatz& a, const Grid& grid,
                      SurrogateConvention convention = SurrogateConvention::spectral,
                      const ResolutionPolicy& policy = {});
// (-d2 bar_lambda^{-1} w, d1 bar_lambda^{-1} w)
VelocityField bar_velocity(const OscillatoryAnsatz& a, const Grid& grid, const ResolutionPolicy& policy = {});

// physical samples of v1 cos(theta) + v2 sin(theta)
std::vector<double> radial_component(const VelocityField& v);

struct RateFit {
  std::vector<int> N_values;
  std::vector<double> errors;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<int> excluded;  // dropped by the noise floor guard
};

RateFit fit_rate(const std::vector<int>& N_values, const std::vector<double>& errors, bool require_quality = true);

enum class RateKind { lambda_minus_alpha, lambda_plus_alpha, velocity, radial_velocity };
std::string to_string(RateKind kind);
RateKind rate_kind_from_string(const std::string& s);

using AnsatzFamily = std::function<OscillatoryAnsatz(int N)>;

struct OperatorError {
  double error = 0.0;
  double reference_norm = 0.0;
};

OperatorError operator_error(const OscillatoryAnsatz& a, const Grid& grid, RateKind kind, double alpha,
                             const ResolutionPolicy& policy = {});

RateFit approximation_rate_sweep(const AnsatzFamily& family, const std::vector<int>& N_values, RateKind kind,
                                 const Grid& grid, double alpha, const ResolutionPolicy& policy = {},
                                 bool require_quality = true);

enum class Trig { sin, cos };

// ||v_i(E trig(theta) w) - E trig(theta) v_i(w)||_{L2}; envelope given in physical radius.
double commutator_defect(const OscillatoryAnsatz& w, const RadialProfile& envelope, Trig trig, int axis,
                         const Grid& grid, const ResolutionPolicy& policy = {});
double c1_norm(const RadialProfile& envelope);

// Standard test family on the unit annulus: f = bump(1, 0.35, 1/2), g = 0.15 r^2, p = 0.3 r.
OscillatoryAnsatz standard_ansatz(int N, double lambda = 1.0);
Grid standard_rate_grid(int n = 1024, double lambda = 1.0);

// Commutator family: f = bump(1.2, 0.28, 1/2), g = 0, p = 0.3 r; envelope bump(1.6, 0.55, 1/2) on [1, 4].
OscillatoryAnsatz commutator_ansatz(int N, double lambda = 1.0);
RadialProfile commutator_envelope(double lambda = 1.0);

}  // namespace sqg
