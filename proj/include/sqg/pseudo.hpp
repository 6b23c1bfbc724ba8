#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "sqg/ansatz.hpp"
#include "sqg/radial.hpp"
#include "sqg/spectral.hpp"

namespace sqg {

struct PseudoParams {
  double alpha = 0.5;
  double beta = 1.2;
  int N = 64;
  double lambda = 4.0;
  double K = 0.0;  // 0 selects K by the admissibility ladder
  double eps_tilde = 0.4;
  bool coupled = false;
};

void validate(const PseudoParams& p);

double couple_parameters(double alpha, double beta, double N);
double invert_coupling(double alpha, double beta, double lambda);

// Default horizon min(lambda^{beta-2} sqrt(ln N), horizon).
double default_t_max(const PseudoParams& p, double horizon);

struct PseudoState {
  double t = 0.0;
  RadialProfile g_bar;          // heat-evolved base along a ray
  RadialProfile Theta;
  RadialProfile G_damp;
  RadialProfile phase_shift;
  RadialProfile Theta_r;
  RadialProfile u_theta_over_r;  // angular velocity of the base divided by r
  RadialProfile dg_dr;

  void write_csv(const std::string& path) const;
  static PseudoState read_csv(const std::string& path);
};

enum class PseudoVariant { full, naive };

// Everything fixed for one (params, base, grid) triple.
class PseudoSolution {
 public:
  PseudoSolution(const PseudoParams& params, std::shared_ptr<const BaseRadialFlow> base, const Grid& grid,
                 const ResolutionPolicy& policy = {});

  const PseudoParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  const BaseRadialFlow& base() const { return *base_; }
  const SpectralField& g_bar0() const { return g0_; }
  void set_K(double K) { params_.K = K; }

  // ḡ(·,t) on the torus, exact heat multiplier
  SpectralField g_bar(double t) const;
  // Radial heat evolution of a sampled profile on this grid.
  RadialProfile evolve_radial_heat(double t) const;

  // states at increasing times; time integrals accumulated segment by segment
  std::vector<PseudoState> build_states(const std::vector<double>& times, int n_quad = 16) const;
  PseudoState build_phase_and_damping(double t, int n_quad = 16) const;

  // amplitude f(lambda r) lambda^{1-beta} N^{-beta}
  double amplitude(double r) const;
  std::pair<double, double> support() const;

  SpectralField perturbation(const PseudoState& s, PseudoVariant variant = PseudoVariant::full) const;
  SpectralField eval(const PseudoState& s, PseudoVariant variant = PseudoVariant::full) const;

  // G(1/lambda, t) <= G(r, t) on both side bands
  bool maximocentro_holds(const PseudoState& s, double* worst_margin = nullptr) const;

  struct Forcing {
    SpectralField F1, F2, F3;
    std::array<std::array<double, 3>, 3> norms{};  // [term][s], s in {0,1,2}
  };
  Forcing forcing_terms(const PseudoState& s) const;

  // pointwise residual of the perturbation identity, L2 norm; uses states at t - dt, t, t + dt
  double perturbation_residual(const PseudoState& minus, const PseudoState& mid, const PseudoState& plus) const;
  // residual of the forced equation with the forcing from forcing_terms
  double closure_residual(const PseudoState& minus, const PseudoState& mid, const PseudoState& plus,
                          bool exclude_base_self_advection = true) const;
  // v(ḡ)·∇ḡ on the torus; zero for a radial base in the plane, nonzero here from periodization
  std::vector<double> base_self_advection(double t) const;

 private:
  template <class Symbol>
  std::vector<double> axis(double t, Symbol&& symbol) const;
  void check_phase_resolution(const PseudoState& s) const;

  PseudoParams params_;
  std::shared_ptr<const BaseRadialFlow> base_;
  Grid grid_;
  ResolutionPolicy policy_;
  SpectralField g0_;
  std::vector<double> kalpha_;
  struct Mode {
    int i1, j1;
    bool paired;
    double sgn, k1, k, ka;
    cplx c;
  };
  std::vector<Mode> modes_;  // significant base coefficients
  BumpShape bump_;
  RadialProfile omega0_;
  double amp_scale_ = 1.0;
  double band_ = 0.0;
  double damping_factor_ = 1.0;
  double vr_factor_ = 1.0;
};

double choose_K(PseudoSolution& ps, double t_max, int n_quad = 16, double* out_margin = nullptr);

}  // namespace sqg
