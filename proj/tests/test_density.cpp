#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "lifespan/density.hpp"

using namespace lifespan;

namespace {

// φ = 1 on 1 <= |x| <= 2 with ramps of width 0.01, plus a tiny cap at
// the origin that the ring convention always carries.
InitialDatum annulus() { return InitialDatum(2, RadialRings{{0.01, 1.0, 2.0}, 1.0, 0.01}); }

// Analytic area fraction of {φ >= 1/2} in B(0, 2): the set is
// |x| <= 0.015 together with 0.995 <= |x| <= 2.
double annulus_fraction_r2() { return (0.015 * 0.015 + 4.0 - 0.995 * 0.995) / 4.0; }

double dot_origin(const InitialDatum& d, double alpha, double r, const Estimator& e) {
  const Point o(static_cast<std::size_t>(d.dimension()), 0.0);
  return density_in_ball(d, alpha, o, r, e);
}

}  // namespace

TEST_CASE("unit ball volume") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));
}

TEST_CASE("grids") {
  const auto a = default_alpha_grid(2.0, 16);
  REQUIRE(a.size() == 16);
  CHECK(a.back() == 2.0);
  CHECK(a.front() == doctest::Approx(0.02));
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
  const auto r = geometric_radii(10.0, 1000.0, 3);
  CHECK(r[0] == doctest::Approx(10.0));
  CHECK(r[1] == doctest::Approx(100.0));
  CHECK(r[2] == doctest::Approx(1000.0));
  CHECK(top_quartile_begin(1) == 0);
  CHECK(top_quartile_begin(5) == 3);
  CHECK(top_quartile_begin(8) == 6);
  const InitialDatum rings(1, RadialRings{{1, 2, 6, 24, 120}, 1.0, 0.25});
  const std::vector<double> raw{5.0, 100.0, 130.0};
  CHECK(snap_radii_to_rings(rings, raw) == std::vector<double>{6.0, 120.0});
  CHECK(snap_radii_to_rings(InitialDatum(1, Constant{1.0}), raw) == raw);
}

TEST_CASE("density_in_ball examples") {
  const MonteCarlo mc{100000, 42};
  const GridOracle grid{512};
  SUBCASE("constant") {
    const InitialDatum d(2, Constant{1.0});
    CHECK(dot_origin(d, 1.0, 3.0, mc) == 1.0);
    CHECK(dot_origin(d, 1.0, 3.0, grid) == 1.0);
    const Point c{100.0, -4.0};
    CHECK(density_in_ball(d, 1.0, c, 0.5, mc) == 1.0);
  }
  SUBCASE("annulus area ratio") {
    CHECK(dot_origin(annulus(), 0.5, 2.0, mc) == doctest::Approx(0.75).epsilon(0.01 / 0.75));
    CHECK(std::fabs(dot_origin(annulus(), 0.5, 2.0, grid) - annulus_fraction_r2()) < 2e-3);
  }
  SUBCASE("rings (1,2,6,24) in one dimension") {
    // {φ >= 1} ∩ [-24, 24] = ±[0, 1] ∪ ±[2, 6]: length 10 out of 48.
    const InitialDatum d(1, RadialRings{{1, 2, 6, 24}, 1.0, 0.25});
    CHECK(std::fabs(dot_origin(d, 1.0, 24.0, mc) - 10.0 / 48.0) < 0.01);
    CHECK(std::fabs(dot_origin(d, 1.0, 24.0, GridOracle{4800}) - 10.0 / 48.0) < 1e-3);
  }
  SUBCASE("threshold above the supremum") {
    CHECK(dot_origin(InitialDatum(1, Constant{0.5}), 0.6, 10.0, mc) == 0.0);
  }
  SUBCASE("errors") {
    const InitialDatum d(2, Constant{1.0});
    const Point o{0.0, 0.0}, bad{0.0};
    CHECK_THROWS_AS(density_in_ball(d, 1.0, o, 0.0, mc), std::invalid_argument);
    CHECK_THROWS_AS(density_in_ball(d, 0.0, o, 1.0, mc), std::invalid_argument);
    CHECK_THROWS_AS(density_in_ball(d, 1.0, bad, 1.0, mc), std::invalid_argument);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const InitialDatum d(2, ConicSector{{0.6, 0.8}, 0.5, 1.0, 1.0, 0.25});
  const Point c{3.0, 4.0};
  const MonteCarlo mc{50000, 9};
  CHECK(density_in_ball(d, 0.5, c, 4.0, mc, 1) == density_in_ball(d, 0.5, c, 4.0, mc, 3));
  DensityRequest req;
  req.alphas = {0.25, 0.5, 1.0};
  req.radii = {5.0, 10.0, 20.0};
  req.estimator = MonteCarlo{20000, 9};
  const auto a = density_profile(d, req);
  req.workers = 4;
  const auto b = density_profile(d, req);
  REQUIRE(a.estimates.size() == b.estimates.size());
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    CHECK(a.estimates[i].d_bar == b.estimates[i].d_bar);
    CHECK(a.estimates[i].d_bar_center == b.estimates[i].d_bar_center);
    CHECK(a.estimates[i].d_origin == b.estimates[i].d_origin);
  }
}

TEST_CASE("oracle_density") {
  CHECK(oracle_density(InitialDatum(3, Constant{1.0}), 1.0, Point{1.0, 2.0, 3.0}, 5.0, 64) == 1.0);
  CHECK(oracle_density(InitialDatum(2, Constant{1.0}), 1.5, Point{0.0, 0.0}, 5.0, 64) == 0.0);
  CHECK_THROWS_AS(oracle_density(InitialDatum(1, Constant{1.0}), 1.0, Point{0.0}, 5.0, 32), std::invalid_argument);
  const double mc = dot_origin(annulus(), 0.5, 2.0, MonteCarlo{1000000, 5});
  const double grid = oracle_density(annulus(), 0.5, Point{0.0, 0.0}, 2.0, 1024);
  CHECK(std::fabs(mc - grid) < 2e-3);
}

TEST_CASE("origin densities of factorial rings near the overflow limit") {
  // At r = a_{2j+1} the outermost ring [a_{2j}, a_{2j+1}] dominates:
  // the density is 1 - 1/(2j+1) up to terms of order 1/(2j)^2.
  const int k = max_factorial_rings();
  const InitialDatum d = build_factorial_rings(k, 1);
  const auto& b = std::get<RadialRings>(d.shape().value).radii;
  const double r = b[k - 2];
  const double expected = 1.0 - (b[k - 3] - b[k - 4]) / r - (b[k - 5] - b[k - 6]) / r;
  CHECK(std::fabs(oracle_density(d, 1.0, Point{0.0}, r, 1 << 16) - expected) < 1e-4);
  CHECK(std::fabs(density_in_ball(d, 1.0, Point{0.0}, r, MonteCarlo{200000, 3}) - expected) < 5e-3);
}

TEST_CASE("monotone in alpha for a fixed ball") {
  const InitialDatum d(2, MaxOf{{GaussianBump{{0.0, 0.0}, 1.0, 2.0}, PeriodicStripe{3.0, 0.3, 0.6, 0.2}}});
  const Point c{0.5, -1.0};
  double prev_grid = 1.0, prev_mc = 1.0;
  for (double a = 0.05; a <= 1.0; a += 0.05) {
    const double g = oracle_density(d, a, c, 4.0, 128);
    const double m = density_in_ball(d, a, c, 4.0, MonteCarlo{20000, 3});
    CHECK(g <= prev_grid);
    CHECK(m <= prev_mc);  // same sample set for every α, so exact
    prev_grid = g;
    prev_mc = m;
  }
}

TEST_CASE("density_profile") {
  SUBCASE("stripe: D_bar close to the duty cycle") {
    const double period = 8.0, duty = 0.5, w = 0.1;
    const InitialDatum d(1, PeriodicStripe{period, duty, 1.0, w});
    DensityRequest req;
    req.alphas = {0.5, 1.0};
    req.radii = geometric_radii(64.0, 1024.0, 5);
    req.estimator = MonteCarlo{100000, 11};
    const auto rep = density_profile(d, req);
    // {φ >= 1/2} keeps half of each ramp; {φ >= 1} is the plateau.
    CHECK(std::fabs(rep.find(0.5)->d_bar - (duty * period + w) / period) < 0.01);
    CHECK(std::fabs(rep.find(1.0)->d_bar - duty) < 0.02);
  }
  SUBCASE("factorial rings along a_{2k+1}") {
    const auto d = build_factorial_rings(7, 1);
    DensityRequest req;
    req.alphas = {1.0};
    req.radii = {1.0, 6.0, 120.0, 5040.0};
    req.centers = OriginCenter{};
    req.estimator = GridOracle{20000};
    const auto rep = density_profile(d, req);
    const double a[] = {1, 2, 6, 24, 120, 720, 5040};
    for (const DensitySample& s : rep.samples) {
      if (s.radius < 6.0) continue;
      const std::size_t k = s.radius == 6.0 ? 1 : s.radius == 120.0 ? 2 : 3;
      CHECK(s.origin_density >= 1.0 - a[2 * k - 1] / a[2 * k] - 0.01);
    }
  }
  SUBCASE("constant above its level") {
    DensityRequest req;
    req.alphas = {2.0, 3.0};
    req.radii = {10.0, 20.0};
    req.estimator = GridOracle{64};
    const auto rep = density_profile(InitialDatum(2, Constant{1.0}), req);
    for (const auto& e : rep.estimates) {
      CHECK(e.d_origin == 0.0);
      CHECK(e.d_bar == 0.0);
    }
  }
  SUBCASE("D_bar dominates D_origin and all values lie in [0, 1]") {
    const InitialDatum d(2, ConicSector{{1.0, 0.0}, 0.5, 1.0, 0.0, 0.25});
    DensityRequest req;
    req.radii = geometric_radii(5.0, 80.0, 5);
    req.estimator = MonteCarlo{20000, 2};
    const auto rep = density_profile(d, req);
    CHECK(rep.estimates.size() == 16);
    for (const auto& e : rep.estimates) {
      CHECK(e.d_bar >= e.d_origin);
      CHECK(e.d_origin >= 0.0);
      CHECK(e.d_bar <= 1.0);
    }
    for (const auto& s : rep.samples) CHECK(s.best_density >= s.origin_density);
  }
  SUBCASE("request validation") {
    const InitialDatum d(1, Constant{1.0});
    DensityRequest req;
    req.radii = {};
    CHECK_THROWS_AS(density_profile(d, req), std::invalid_argument);
    req.radii = {2.0, 1.0};
    CHECK_THROWS_AS(density_profile(d, req), std::invalid_argument);
    req.radii = {1.0};
    req.estimator = MonteCarlo{9999, 1};
    CHECK_THROWS_AS(density_profile(d, req), std::invalid_argument);
    req.estimator = GridOracle{63};
    CHECK_THROWS_AS(density_profile(d, req), std::invalid_argument);
    req.estimator = GridOracle{64};
    req.alphas = {0.0};
    CHECK_THROWS_AS(density_profile(d, req), std::invalid_argument);
  }
}

TEST_CASE("auto_center_search") {
  SUBCASE("cone: a ball of radius 10 fits on the axis") {
    const InitialDatum d(2, ConicSector{{1.0, 0.0}, 0.5, 1.0, 0.0, 0.25});
    const auto best = auto_center_search(d, 1.0, 10.0, MonteCarlo{100000, 1});
    CHECK(best.density >= 0.95);
    CHECK(best.center[1] == 0.0);
    CHECK(best.center[0] > 0.0);
    CHECK(oracle_density(d, 1.0, best.center, 10.0, 512) >= 0.95);
  }
  SUBCASE("constant") {
    const auto best = auto_center_search(InitialDatum(2, Constant{1.0}), 1.0, 7.0, MonteCarlo{10000, 1});
    CHECK(best.density == 1.0);
  }
  SUBCASE("gaussian is rarefied") {
    const InitialDatum d(2, GaussianBump{{0.0, 0.0}, 1.0, 1.0});
    double prev = 1.0;
    for (double r : {2.0, 20.0, 200.0, 2000.0}) {
      const auto best = auto_center_search(d, 0.5, r, MonteCarlo{100000, 1});
      CHECK(best.density <= prev);
      prev = best.density;
    }
    CHECK(prev < 1e-3);
  }
  SUBCASE("origin comes first among candidates") {
    const auto c = auto_center_candidates(InitialDatum(2, Constant{1.0}), 3.0, 1, 4);
    REQUIRE(!c.empty());
    CHECK(c.front() == Point{0.0, 0.0});
  }
}

TEST_CASE("cone scaling: dilated balls stay inside the cone") {
  const Point axis{0.6, 0.8};
  const double delta = 0.5;
  const InitialDatum d(2, ConicSector{axis, delta, 1.0, 0.0, 0.25});
  const Point x0{axis[0] * 6.0, axis[1] * 6.0};
  const double r = 2.0;
  auto inside = [&](std::span<const double> x) {
    const double rho = std::hypot(x[0], x[1]);
    if (rho == 0.0) return false;
    return std::hypot(axis[0] - x[0] / rho, axis[1] - x[1] / rho) < delta;
  };
  const double base = lattice_fraction(2, x0, r, 256, inside);
  for (double lambda : {2.0, 5.0, 10.0}) {
    const Point c{lambda * x0[0], lambda * x0[1]};
    CHECK(oracle_density(d, 1.0, c, lambda * r, 256) >= base - 0.01);
  }
}
