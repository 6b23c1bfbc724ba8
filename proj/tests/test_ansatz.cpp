#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "sqg/ansatz.hpp"
#include "sqg/quadrature.hpp"

using namespace sqg;

namespace {

constexpr double pi = std::numbers::pi;

double fifth_derivative_max(const BumpShape& b, double h) {
  double m = 0;
  for (double r = b.center - b.half_width; r <= b.center + b.half_width; r += h / 3) {
    const double d = (b(r + 3 * h) - 4 * b(r + 2 * h) + 5 * b(r + h) - 5 * b(r - h) + 4 * b(r - 2 * h) - b(r - 3 * h)) /
                     (2 * std::pow(h, 5));
    m = std::max(m, std::abs(d));
  }
  return m;
}

RadialProfile concentrated_annulus(double center, double hw) {
  const BumpShape b{center, hw, 0.5};
  const double mass = integrate_composite([&](double s) { return b(s) * s; }, center - hw, center + hw, 32, 16);
  return RadialProfile::sample([&](double s) { return b(s) / mass; }, 4.0, 16384);
}

}  // namespace

TEST_CASE("smooth step and cutoff") {
  CHECK(smooth_step(-1) == 0.0);
  CHECK(smooth_step(2) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  CHECK(highpass_cutoff(0.9) == 0.0);
  CHECK(highpass_cutoff(2.1) == 1.0);
}

TEST_CASE("bump profile plateau and support") {
  const double eps = 0.3;
  const auto f = bump_profile(1.0, eps, 0.5);
  CHECK(f(1.0) == doctest::Approx(1.0));
  CHECK(f(1 - eps / 4) == doctest::Approx(1.0));
  CHECK(std::abs(f(1 - eps)) < 1e-12);
  CHECK(std::abs(f(1 + eps)) < 1e-12);
  for (double r = 0; r < 4; r += 0.01) {
    CHECK(f(r) >= -1e-9);
    CHECK(f(r) <= 1 + 1e-9);
  }
  CHECK_THROWS_AS(bump_profile(1.0, 1.2, 0.5), Error);
  CHECK_THROWS_AS(bump_profile(1.0, 0.2, 1.0), Error);
}

TEST_CASE("bump has a finite fifth derivative under refinement") {
  const BumpShape b{1.0, 0.4, 0.5};
  const double a = fifth_derivative_max(b, 1e-3), c = fifth_derivative_max(b, 5e-4);
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - c) / c < 0.05);
}

TEST_CASE("radial profile spline and CSV round trip") {
  const auto p = RadialProfile::sample([](double r) { return std::exp(-r * r); }, 4.0, 257);
  const auto r = p.r_grid();
  for (std::size_t i = 0; i < r.size(); i += 16) CHECK(p(r[i]) == doctest::Approx(std::exp(-r[i] * r[i])).epsilon(1e-14));
  CHECK(p.d1(1.0) == doctest::Approx(-2 * std::exp(-1.0)).epsilon(1e-4));
  CHECK(p(5.0) == 0.0);
  const auto path = (std::filesystem::temp_directory_path() / "sqg_profile_test.csv").string();
  p.write_csv(path);
  const auto q = RadialProfile::read_csv(path);
  REQUIRE(q.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(q.values()[i] == p.values()[i]);
  std::filesystem::remove(path);
}

TEST_CASE("angular velocity of a concentrated annulus follows 2 pi / r^2") {
  const auto h = concentrated_annulus(0.05, 0.02);
  CHECK(v_theta_radial(h, 1.0) == doctest::Approx(2 * pi).epsilon(0.01));
  CHECK(v_theta_radial(h, 1.5) == doctest::Approx(2 * pi / 2.25).epsilon(0.01));
  CHECK(v_theta_radial(RadialProfile::zero(), 1.0) == 0.0);
  CHECK_THROWS_AS(v_theta_radial(h, 0.0), Error);
}

TEST_CASE("explicit base flow hits the derivative targets") {
  const auto base = construct_base_radial({1, 0, 1});
  CHECK(base.achieved[0] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(base.achieved[1]) < 0.02);
  CHECK(base.achieved[2] == doctest::Approx(1.0).epsilon(0.02));
  const Triple ideal_dirs[3] = {{1, -4, 20}, {1, -6, 42}, {1, -8, 72}};
  for (int i = 0; i < 3; ++i) {
    const double scale = base.basis_triples[i][0];
    for (int j = 0; j < 3; ++j)
      CHECK(base.basis_triples[i][j] == doctest::Approx(scale * ideal_dirs[i][j]).epsilon(0.05));
  }
  const auto zero = construct_base_radial({0, 0, 0});
  CHECK(zero.is_zero());
}

TEST_CASE("smooth base flow hits targets and the neighbouring-radius inequality") {
  const auto base = smooth_base_radial({1, 0, 1});
  CHECK(base.achieved[0] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(base.achieved[1]) < 0.02);
  CHECK(base.achieved[2] == doctest::Approx(1.0).epsilon(0.02));
  const double d1 = base.triple_at(1.0)[0];
  for (double eps : {0.2, 0.4})
    for (double r0 : {1 - eps, 1 - eps / 2, 1 + eps / 2, 1 + eps})
      CHECK(base.triple_at(r0)[0] - d1 >= 0.1 * (1 - r0) * (1 - r0) * 0.9);
}

TEST_CASE("filtered base has no energy below the cutoff") {
  const auto base = smooth_base_radial({1, 0, 1});
  const Grid g(256, 12.0);
  const double lambda = 1.0;
  const auto w = sample_base(base, g, lambda, 1.2);
  double low = 0, total = 0;
  for (int i1 = 0; i1 < g.n(); ++i1)
    for (int i2 = 0; i2 < g.nh(); ++i2) {
      const double e = std::norm(w.at(i1, i2));
      total += e;
      if (g.kmag(i1, i2) < base.cutoff_c * lambda) low += e;
    }
  CHECK(total > 0);
  CHECK(low < 1e-6 * total);
  CHECK(std::abs(w.mean()) < 1e-14);
}

TEST_CASE("sampled ansatz matches direct evaluation") {
  OscillatoryAnsatz a;
  a.f = bump_profile(1.0, 0.35, 0.5);
  a.g_phase = RadialProfile::zero();
  a.p = RadialProfile::zero();
  a.N = 8;
  const Grid g(512, 2.5);
  const auto w = sample_ansatz(a, g);
  CHECK(std::abs(w.mean()) < 1e-10);
  for (auto [x, y] : {std::pair{1.0, 0.0}, std::pair{0.3, 0.8}, std::pair{-0.9, 0.4}}) {
    const double r = std::hypot(x, y), th = std::atan2(y, x);
    CHECK(w.value_at(x, y) == doctest::Approx(a.f(r) * std::cos(8 * th)).epsilon(1e-4));
    const double th2 = th + 2 * pi / 8;
    CHECK(w.value_at(r * std::cos(th2), r * std::sin(th2)) == doctest::Approx(w.value_at(x, y)).epsilon(1e-4));
  }
  const double radial = integrate_composite([&](double r) { return a.f(r) * a.f(r) * r; }, 0.65, 1.35, 32, 16);
  CHECK(l2_norm(w) == doctest::Approx(std::sqrt(pi * radial)).epsilon(1e-3));
}

TEST_CASE("coarse grids are rejected as under-resolved") {
  OscillatoryAnsatz a;
  a.f = bump_profile(1.0, 0.35, 0.5);
  a.g_phase = RadialProfile::zero();
  a.p = RadialProfile::zero();
  a.N = 64;
  const Grid g(64, 2.5);
  try {
    sample_ansatz(a, g);
    FAIL("expected UnderResolved");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnderResolved);
  }
}
