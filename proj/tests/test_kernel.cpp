#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "lifespan/gauss_hermite.hpp"
#include "lifespan/kernel.hpp"

using namespace lifespan;

namespace {

double gaussian_closed_form(int n, double amp, double sigma, const Point& z, double t) {
  double r2 = 0.0;
  for (double c : z) r2 += c * c;
  const double s2 = sigma * sigma;
  return amp * std::pow(s2 / (s2 + 2.0 * t), n / 2.0) * std::exp(-r2 / (2.0 * (s2 + 2.0 * t)));
}

// e^{tΔ} of the trapezoidal stripe at a plateau centre, from its cosine
// series: a_k = (4/P)(cos κc - cos κ(c+w)) / (w κ²), κ = 2πk/P, c = duty P/2.
double stripe_semigroup_at_center(double period, double duty, double w, double t) {
  const double c = 0.5 * duty * period;
  double v = (duty * period + w) / period;
  for (int k = 1; k < 20000; ++k) {
    const double kappa = 2.0 * std::numbers::pi * k / period;
    v += 4.0 / period * (std::cos(kappa * c) - std::cos(kappa * (c + w))) / (w * kappa * kappa) *
         std::exp(-kappa * kappa * t);
  }
  return v;
}

}  // namespace

TEST_CASE("Gauss-Hermite rule") {
  for (int order : {1, 2, 5, 16, 64, 128, 255, 256, 512}) {
    const auto& r = gauss_hermite(order);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(order));
    double sum = 0.0, m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < order; ++i) {
      sum += r.weights[i];
      m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
      m4 += r.weights[i] * std::pow(r.nodes[i], 4);
      CHECK(r.nodes[i] == doctest::Approx(-r.nodes[order - 1 - i]).scale(1.0));
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    // Moments of e^{-x^2}/sqrt(pi): 1/2 and 3/4.
    if (order >= 2) CHECK(m2 == doctest::Approx(0.5).epsilon(1e-13));
    if (order >= 3) CHECK(m4 == doctest::Approx(0.75).epsilon(1e-13));
  }
  CHECK(gauss_hermite(3).nodes[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_hermite(513), std::invalid_argument);
}

TEST_CASE("heat kernel examples") {
  const Point x{0.3};
  CHECK(heat_kernel(x, x, 1.0 / (4.0 * std::numbers::pi)) == doctest::Approx(1.0).epsilon(1e-15));
  const Point y{1.0, -2.0};
  CHECK(heat_kernel(y, y, 1.0) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)).epsilon(1e-15));
  const Point a{0.0, 0.0}, b{2.0, 0.0};
  CHECK(heat_kernel(a, b, 0.5) == doctest::Approx(std::exp(-2.0) / (2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(heat_kernel(a, b, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel(a, b, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel(a, x, 1.0), std::invalid_argument);
}

TEST_CASE("heat kernel symmetry on random points") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0), tt(0.01, 5.0);
  for (int i = 0; i < 1000; ++i) {
    Point x{u(rng), u(rng), u(rng)}, y{u(rng), u(rng), u(rng)};
    const double t = tt(rng);
    CHECK(heat_kernel(x, y, t) == heat_kernel(y, x, t));
  }
}

TEST_CASE("semigroup of a constant is the constant, for every t") {
  const InitialDatum d(2, Constant{3.0});
  QuadratureConfig q;
  const Point z{1.0, -7.0};
  const double ref = semigroup_eval(d, z, 0.1, q);
  CHECK(std::fabs(ref - 3.0) < 1e-12);
  for (double t : {0.5, 1.0, 10.0, 1000.0}) CHECK(std::fabs(semigroup_eval(d, z, t, q) - ref) < 1e-12);
}

TEST_CASE("semigroup of a Gaussian matches the convolution formula") {
  QuadratureConfig q;
  for (int n : {1, 2}) {
    const InitialDatum d(n, GaussianBump{Point(static_cast<std::size_t>(n), 0.0), 1.7, 0.8});
    for (double t : {0.05, 0.5, 1.0}) {
      for (double zc : {0.0, 0.7, -2.5}) {
        Point z(static_cast<std::size_t>(n), zc);
        CHECK(std::fabs(semigroup_eval(d, z, t, q) - gaussian_closed_form(n, 1.7, 0.8, z, t)) < 1e-10);
      }
    }
  }
  QuadratureConfig q3;
  q3.nodes_per_axis = 32;
  const InitialDatum d3(3, GaussianBump{{0.0, 0.0, 0.0}, 1.0, 1.0});
  const Point z{0.4, -0.2, 1.0};
  CHECK(std::fabs(semigroup_eval(d3, z, 1.0, q3) - gaussian_closed_form(3, 1.0, 1.0, z, 1.0)) < 1e-10);
}

TEST_CASE("semigroup at the edge of a sharp step is one half") {
  // Plateau edge at 250, ramp width 0.01 outward: the step sits at 250.005.
  const InitialDatum d(1, PeriodicStripe{1000.0, 0.5, 1.0, 0.01});
  QuadratureConfig q;
  q.nodes_per_axis = 256;
  const Point z{250.005};
  for (double t : {1.0, 4.0}) CHECK(std::fabs(semigroup_eval(d, z, t, q) - 0.5) < 0.01);
}

TEST_CASE("maximum principle at the quadrature level") {
  const std::vector<InitialDatum> data{
      InitialDatum(1, RadialRings{{1, 2, 6, 24}, 1.0, 0.25}),
      InitialDatum(2, ConicSector{{0.6, 0.8}, 0.5, 2.0, 1.0, 0.25}),
      InitialDatum(1, PeriodicStripe{8.0, 0.5, 1.0, 0.1}),
      InitialDatum(2, MaxOf{{Constant{0.2}, GaussianBump{{1.0, 1.0}, 1.0, 0.5}}}),
  };
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-30.0, 30.0), tt(0.01, 10.0);
  QuadratureConfig q;
  q.nodes_per_axis = 24;
  for (const InitialDatum& d : data) {
    Point z(static_cast<std::size_t>(d.dimension()));
    for (int i = 0; i < 200; ++i) {
      for (double& c : z) c = u(rng);
      const double v = semigroup_eval(d, z, tt(rng), q);
      CHECK(v >= -1e-9);
      CHECK(v <= d.sup_norm() + 1e-9);
    }
  }
}

TEST_CASE("semigroup_sup") {
  QuadratureConfig q;
  SUBCASE("constant") {
    const auto r = semigroup_sup(InitialDatum(2, Constant{0.7}), 1.0, q);
    CHECK(r.value == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("gaussian is maximised at its centre") {
    const InitialDatum d(2, GaussianBump{{1.5, -0.5}, 1.0, 1.0});
    const auto r = semigroup_sup(d, 0.5, q);
    CHECK(r.center[0] == doctest::Approx(1.5).epsilon(1e-3).scale(1.0));
    CHECK(r.center[1] == doctest::Approx(-0.5).epsilon(1e-3).scale(1.0));
    CHECK(r.value == doctest::Approx(gaussian_closed_form(2, 1.0, 1.0, {0.0, 0.0}, 0.5)).epsilon(1e-8));
    CHECK(r.value <= d.sup_norm());
    CHECK(r.evaluations > 0);
  }
  SUBCASE("stripe against its Fourier series") {
    // Sharp ramps make the quadrature error first order in the node
    // spacing 2 sqrt(t) pi / sqrt(2 order), so the fine rule is used here.
    const double period = 8.0, duty = 0.5, w = 0.1;
    const InitialDatum d(1, PeriodicStripe{period, duty, 1.0, w});
    QuadratureConfig fine = q;
    fine.nodes_per_axis = 512;
    for (double t : {0.5, 2.0}) {
      const auto r = semigroup_sup(d, t, fine);
      CHECK(std::fabs(r.value - stripe_semigroup_at_center(period, duty, w, t)) < 0.02);
      CHECK(std::fabs(std::remainder(r.center[0], period)) < 0.5);
    }
  }
  SUBCASE("worker count does not change the result") {
    const InitialDatum d(2, ConicSector{{1.0, 0.0}, 0.5, 1.0, 0.0, 0.25});
    QuadratureConfig q1 = q, q4 = q;
    q1.nodes_per_axis = q4.nodes_per_axis = 16;
    q4.workers = 4;
    const auto a = semigroup_sup(d, 1.0, q1);
    const auto b = semigroup_sup(d, 1.0, q4);
    CHECK(a.value == b.value);
    CHECK(a.center == b.center);
  }
  SUBCASE("empty search grid is rejected") {
    QuadratureConfig bad = q;
    bad.search_resolution = 0;
    CHECK_THROWS_AS(semigroup_sup(InitialDatum(1, Constant{1.0}), 1.0, bad), std::invalid_argument);
    bad = q;
    bad.box = SearchBox{{1.0}, {0.0}};
    CHECK_THROWS_AS(semigroup_sup(InitialDatum(1, Constant{1.0}), 1.0, bad), std::invalid_argument);
  }
  CHECK_THROWS_AS(semigroup_sup(InitialDatum(1, Constant{1.0}), 0.0, q), std::invalid_argument);
}

TEST_CASE("kernel self-check residuals") {
  for (int n : {1, 2, 3}) {
    const auto r = kernel_selfcheck(n, 1.0, 1.0, {n == 3 ? 32 : 64, 8, 1});
    CHECK(r.dimension == n);
    CHECK(r.symmetry_residual == 0.0);
    CHECK(r.translation_residual == 0.0);
    CHECK(r.semigroup_residual < 1e-8);
    CHECK(r.conservation_residual < 1e-10);
  }
  const auto r = kernel_selfcheck(1, 0.3, 2.0);
  CHECK(r.semigroup_residual < 1e-8);
  CHECK_THROWS_AS(kernel_selfcheck(1, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_selfcheck(4, 1.0, 1.0), std::invalid_argument);
}
