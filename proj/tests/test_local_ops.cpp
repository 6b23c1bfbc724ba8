#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sqg/local_ops.hpp"
#include "sqg/quadrature.hpp"

using namespace sqg;

namespace {

constexpr double pi = std::numbers::pi;

OscillatoryAnsatz flat_ansatz(int N, double lambda = 1.0) {
  OscillatoryAnsatz a;
  a.f = bump_profile(1.0, 0.35, 0.5);
  a.g_phase = RadialProfile::zero();
  a.p = RadialProfile::zero();
  a.N = N;
  a.lambda = lambda;
  return a;
}

// grid index of the point (x, 0)
std::size_t axis_index(const Grid& g, double x) {
  const int i = int(std::lround((x + g.L()) / g.dx()));
  return std::size_t(i) * g.n() + std::size_t(g.n() / 2);
}

}  // namespace

TEST_CASE("surrogate factors invert each other in both conventions") {
  for (double a : {0.3, 0.5, 0.8}) {
    for (auto c : {SurrogateConvention::kernel, SurrogateConvention::spectral})
      CHECK(surrogate_factor(a, c) * surrogate_factor(-a, c) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(surrogate_factor(-a, SurrogateConvention::kernel) == doctest::Approx(K_alpha(a)));
    CHECK(surrogate_factor(-a, SurrogateConvention::spectral) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(radial_velocity_factor(SurrogateConvention::kernel) == doctest::Approx(-2 * pi).epsilon(1e-9));
  CHECK_THROWS_AS(surrogate_factor(0.0, SurrogateConvention::kernel), Error);
  CHECK_THROWS_AS(surrogate_factor(1.5, SurrogateConvention::kernel), Error);
}

TEST_CASE("negative-order surrogate reduces to K (r/N)^alpha on a flat phase") {
  const auto a = flat_ansatz(16);
  const Grid g(512, 2.0);
  const double alpha = 0.5;
  const auto w = sample_ansatz(a, g).to_physical();
  const auto s = bar_lambda(a, g, -alpha, SurrogateConvention::kernel).to_physical();
  for (double x : {0.9, 1.0, 1.1}) {
    const auto i = axis_index(g, x);
    const double r = g.x(int(i / g.n()));
    CHECK(s[i] == doctest::Approx(K_alpha(alpha) * std::pow(r / 16, alpha) * w[i]).epsilon(1e-9));
  }
}

TEST_CASE("forward and inverse surrogates compose to the identity on the support") {
  const auto a = standard_ansatz(16);
  const Grid g(512, 2.0);
  const auto w = sample_ansatz(a, g).to_physical();
  const auto up = bar_lambda(a, g, 0.5).to_physical();
  const auto down = bar_lambda(a, g, -0.5).to_physical();
  double err = 0, m = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    err = std::max(err, std::abs(up[i] * down[i] - w[i] * w[i]));
    m = std::max(m, w[i] * w[i]);
  }
  CHECK(err < 1e-10 * m);
}

TEST_CASE("surrogate magnitude scales with lambda as the formula predicts") {
  const double alpha = 0.5;
  double plateau[2];
  int idx = 0;
  for (double lam : {1.0, 2.0}) {
    const auto a = flat_ansatz(8, lam);
    const Grid g(512, 2.0 / lam);
    const auto w = sample_ansatz(a, g).to_physical();
    const auto s = bar_lambda(a, g, alpha).to_physical();
    const auto i = axis_index(g, 1.0 / lam);
    plateau[idx++] = s[i] / w[i];
  }
  CHECK(plateau[1] / plateau[0] == doctest::Approx(std::pow(2.0, alpha)).epsilon(1e-9));
}

TEST_CASE("radial velocity surrogate special cases") {
  const Grid g(512, 2.0);
  const auto a = flat_ansatz(8);
  const auto v = bar_v_r(a, g, SurrogateConvention::kernel).to_physical();
  const double C0 = dirichlet_C0();
  for (int i1 = 0; i1 < g.n(); i1 += 37)
    for (int i2 = 0; i2 < g.n(); i2 += 41) {
      const double x = g.x(i1), y = g.x(i2), r = std::hypot(x, y);
      CHECK(v[std::size_t(i1) * g.n() + i2] ==
            doctest::Approx(-C0 * a.f(r) * std::sin(8 * std::atan2(y, x))).epsilon(1e-9));
    }
  auto b = flat_ansatz(8);
  b.g_phase = RadialProfile::sample([](double r) { return std::sqrt(3.0) * std::log(std::max(r, 0.1)); });
  const auto vb = bar_v_r(b, g, SurrogateConvention::kernel).to_physical();
  for (double x : {0.9, 1.0, 1.1}) {
    const auto i = axis_index(g, x);
    const double r = g.x(int(i / g.n()));
    const double phase = 8 * b.g_phase(r);
    CHECK(vb[i] == doctest::Approx(-C0 * b.f(r) * std::sin(phase) / 2).epsilon(1e-3));
  }
}

TEST_CASE("surrogate errors are genuine rather than discretization noise") {
  const auto a = standard_ansatz(16);
  for (auto kind : {RateKind::lambda_minus_alpha, RateKind::lambda_plus_alpha, RateKind::velocity,
                    RateKind::radial_velocity}) {
    const double e1 = operator_error(a, standard_rate_grid(1024), kind, 0.5).error;
    const double e2 = operator_error(a, standard_rate_grid(2048), kind, 0.5).error;
    CHECK(std::abs(e1 - e2) / e2 < 0.05);
  }
}

TEST_CASE("surrogate errors shrink with N") {
  const Grid g = standard_rate_grid(1024);
  const std::vector<int> Ns = {8, 11, 16, 22};
  for (auto kind : {RateKind::lambda_minus_alpha, RateKind::lambda_plus_alpha, RateKind::velocity,
                    RateKind::radial_velocity}) {
    const auto fit = approximation_rate_sweep([](int N) { return standard_ansatz(N); }, Ns, kind, g, 0.5);
    int rises = 0;
    for (std::size_t i = 1; i < fit.errors.size(); ++i) rises += fit.errors[i] > fit.errors[i - 1];
    CHECK(rises <= 1);
    CHECK(fit.slope < 0);
    CHECK(fit.r2 >= 0.9);
  }
  CHECK_THROWS_AS(approximation_rate_sweep([](int N) { return standard_ansatz(N); }, {8, 16, 32}, RateKind::velocity,
                                           g, 0.5),
                  Error);
}

TEST_CASE("rate fit recovers a known power law and rejects bad input") {
  const std::vector<int> Ns = {8, 16, 32, 64};
  std::vector<double> e;
  for (int N : Ns) e.push_back(3.0 * std::pow(N, -1.5));
  const auto f = fit_rate(Ns, e);
  CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_rate({8, 8, 16, 32}, e), Error);
  CHECK_THROWS_AS(fit_rate(Ns, {1, 0, 1, 1}), Error);
  CHECK_THROWS_AS(fit_rate(Ns, {1, 0.01, 1, 0.01}), Error);
  CHECK(rate_kind_from_string("velocity") == RateKind::velocity);
  CHECK_THROWS_AS(rate_kind_from_string("nope"), Error);
}

TEST_CASE("commutator defect basics") {
  const Grid g(1024, 6.0);
  const auto w = commutator_ansatz(8);
  CHECK(commutator_defect(w, RadialProfile::zero(), Trig::sin, 1, g) == 0.0);
  const auto bad = bump_profile(0.6, 0.3, 0.5);
  CHECK_THROWS_AS(commutator_defect(w, bad, Trig::sin, 1, g), Error);
  CHECK_THROWS_AS(commutator_defect(w, commutator_envelope(), Trig::sin, 3, g), Error);
}

TEST_CASE("commutator defect is scale invariant") {
  std::vector<double> ratios;
  for (double lam : {1.0, 2.0, 4.0}) {
    const Grid g(1024, 6.0 / lam);
    const auto w = commutator_ansatz(8, lam);
    const double d = commutator_defect(w, commutator_envelope(lam), Trig::cos, 2, g);
    ratios.push_back(d / l2_norm(sample_ansatz(w, g)));
  }
  CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(1e-4));
  CHECK(ratios[2] == doctest::Approx(ratios[0]).epsilon(1e-4));
}
