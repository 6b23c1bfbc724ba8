#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sqg/quadrature.hpp"

using namespace sqg;

namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Legendre panels on [0, 2 pi M] after u = R^alpha near the origin, tail from two integrations by parts
double brute_cos_power(double alpha, int M) {
  const double X = 2 * pi * M;
  double head = integrate_composite([alpha](double u) { return std::cos(std::pow(u, 1 / alpha)) / alpha; }, 0.0,
                                    std::pow(pi / 2, alpha), 64, 16);
  head += integrate_composite([alpha](double R) { return std::cos(R) * std::pow(R, alpha - 1); }, pi / 2, X, 8 * M, 16);
  return head + (1 - alpha) * std::pow(X, alpha - 2);
}

// integrand sin^{-alpha} with theta = v^{1/(1-alpha)} removing the endpoint singularity
double brute_sin_power(double alpha) {
  const double p = 1 / (1 - alpha);
  return integrate_composite(
      [alpha, p](double v) {
        if (v == 0) return 0.0;
        const double th = std::pow(v, p);
        return std::pow(std::sin(th), -alpha) * p * std::pow(v, p - 1);
      },
      0.0, std::pow(pi / 2, 1 - alpha), 400, 16);
}

}  // namespace

TEST_CASE("Dirichlet constant and its symmetry") {
  CHECK(std::abs(dirichlet_C0() - 2 * pi) < 1e-6);
  CHECK(dirichlet_signed(-1.0) == doctest::Approx(-dirichlet_C0()));
  CHECK(dirichlet_signed(3.0) == doctest::Approx(dirichlet_C0()).epsilon(1e-8));
  CHECK(std::abs(dirichlet_truncated(1.0, 2000) - 2 * pi) < 1e-3);
  CHECK(std::abs(dirichlet_truncated(1.0, 4000) - 2 * pi) < std::abs(dirichlet_truncated(1.0, 1000) - 2 * pi));
}

TEST_CASE("cos power integral against the Gamma identity and a brute-force oracle") {
  CHECK(std::abs(cos_power_integral(0.5) - std::sqrt(pi / 2)) < 1e-6);
  CHECK(std::abs(cos_power_integral(0.25) - std::tgamma(0.25) * std::cos(pi / 8)) < 1e-5);
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double v = cos_power_integral(a);
    CHECK(v > 0);
    CHECK(v == doctest::Approx(brute_cos_power(a, 4000)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(cos_power_integral(1.0), Error);
}

TEST_CASE("sin power integral against the Beta function and direct quadrature") {
  for (double a : {0.1, 0.5, 0.8}) {
    const double beta = 0.5 * std::tgamma((1 - a) / 2) * std::sqrt(pi) / std::tgamma(1 - a / 2);
    CHECK(sin_power_integral(a) == doctest::Approx(beta).epsilon(1e-9));
    CHECK(sin_power_integral(a) == doctest::Approx(brute_sin_power(a)).epsilon(1e-7));
  }
}

TEST_CASE("K_alpha value, positivity and closed form") {
  CHECK(std::abs(K_alpha(0.5) - 13.1450) < 1e-3);
  CHECK(std::abs(K_alpha(0.5) - 4 * 2.6220575 * 1.2533141) < 1e-4);
  for (double a : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    CHECK(K_alpha(a) > 0);
    CHECK(K_alpha(a) == doctest::Approx(1 / riesz_potential_constant(a)).epsilon(1e-9));
  }
  const double small = 4 * brute_sin_power(0.05) * brute_cos_power(0.05, 4000);
  CHECK(K_alpha(0.05) == doctest::Approx(small).epsilon(1e-6));
  CHECK(surrogate_constant(1.0) == doctest::Approx(2 * pi));
}

TEST_CASE("Gauss-Legendre rules and acceleration") {
  const auto& q = gauss_legendre(8);
  double s = 0;
  for (double w : q.w) s += w;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(integrate_gl([](double x) { return std::pow(x, 15); }, 0, 1, 8) == doctest::Approx(1.0 / 16).epsilon(1e-14));
  std::vector<double> partial;
  double acc = 0;
  for (int k = 0; k < 20; ++k) partial.push_back(acc += (k % 2 ? -1.0 : 1.0) / (2 * k + 1));
  CHECK(std::abs(accelerate_partial_sums(partial) - pi / 4) < 1e-7);
  CHECK(std::abs(partial.back() - pi / 4) > 1e-2);
  const auto f = filon_integral([](double) { return 1.0; }, 0.0, 1.0, 40.0);
  CHECK(f.cos_part == doctest::Approx(std::sin(40.0) / 40).epsilon(1e-10));
  CHECK(f.sin_part == doctest::Approx((1 - std::cos(40.0)) / 40).epsilon(1e-10));
}

TEST_CASE("H_N approaches its limits at large N") {
  OscillatoryIntegralSpec s;
  s.alpha = 0.5;
  s.N = 1e4;
  for (auto [r, g] : {std::pair{1.0, 0.0}, std::pair{1.3, 0.8}}) {
    s.r = r;
    s.gprime = g;
    const double hd = H_N(s, HKind::diffusion), hv = H_N(s, HKind::radial_velocity);
    CHECK(std::abs(hd / H_limit(s, HKind::diffusion) - 1) < 0.03);
    CHECK(std::abs(hv / H_limit(s, HKind::radial_velocity) - 1) < 0.03);
    // multiplying back the prefactor recovers the same constants
    CHECK(hd * std::pow(1 / (r * r) + g * g, 0.25) == doctest::Approx(K_alpha(0.5)).epsilon(0.01));
    CHECK(hv * std::sqrt(1 + r * r * g * g) == doctest::Approx(dirichlet_C0()).epsilon(0.01));
  }
  s.r = 1;
  s.gprime = 0;
  CHECK(std::abs(H_N(s, HKind::diffusion) - K_alpha(0.5)) / K_alpha(0.5) < 0.03);
  CHECK(std::abs(H_N(s, HKind::radial_velocity) - 2 * pi) / (2 * pi) < 0.03);
}

TEST_CASE("Cauchy differences of H_N shrink with N") {
  OscillatoryIntegralSpec s;
  s.alpha = 0.5;
  auto diff = [&](HKind k, double N1) {
    s.N = N1;
    const double a = H_N(s, k);
    s.N = 2 * N1;
    return std::abs(H_N(s, k) - a);
  };
  for (auto [r, g] : {std::pair{1.0, 0.0}, std::pair{1.3, 0.8}}) {
    s.r = r;
    s.gprime = g;
    // diffusion: N^{-1+eps'} trend with eps' = 1/4
    const double d1 = diff(HKind::diffusion, 100), d2 = diff(HKind::diffusion, 1000);
    CHECK(d2 <= 3 * d1 * std::pow(10.0, -1 + s.epsilon_prime));
    // radial velocity: the sqrt(N) window on the first axis limits the trend to N^{-1/2}
    const double v1 = diff(HKind::radial_velocity, 100), v2 = diff(HKind::radial_velocity, 1000);
    CHECK(v2 <= 3 * v1 * std::pow(10.0, -0.5));
  }
}

TEST_CASE("invalid oscillatory specs are rejected") {
  OscillatoryIntegralSpec s;
  s.alpha = 1.2;
  CHECK_THROWS_AS(H_N(s, HKind::diffusion), Error);
  s.alpha = 0.5;
  s.r = 0;
  CHECK_THROWS_AS(H_N(s, HKind::diffusion), Error);
  s.r = 1;
  s.N = 1;
  CHECK_THROWS_AS(H_N(s, HKind::radial_velocity), Error);
}
