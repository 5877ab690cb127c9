#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "lifespan/datum.hpp"
#include "lifespan/datum_json.hpp"

using namespace lifespan;

namespace {

double at(const InitialDatum& d, std::initializer_list<double> x) {
  Point p(x);
  return d.eval(p);
}

std::vector<InitialDatum> sample_data() {
  std::vector<InitialDatum> out;
  out.emplace_back(2, Constant{1.5});
  out.emplace_back(1, RadialRings{{1, 2, 6, 24}, 1.0, 0.25});
  out.emplace_back(2, RadialRings{{1, 2, 6, 24, 120}, 2.0, 0.5});
  out.emplace_back(3, RadialRings{{0.5, 2}, 1.0, 0.25});
  out.emplace_back(2, ConicSector{{1.0, 0.0}, 0.5, 1.0, 2.0, 0.25});
  out.emplace_back(3, ConicSector{{0.0, 0.6, 0.8}, 0.9, 3.0, 0.0, 0.5});
  out.emplace_back(1, GaussianBump{{0.5}, 2.0, 1.5});
  out.emplace_back(2, PeriodicStripe{8.0, 0.5, 1.0, 0.1});
  out.emplace_back(2, MaxOf{{Constant{0.5}, GaussianBump{{0.0, 1.0}, 2.0, 1.0},
                             PeriodicStripe{4.0, 0.25, 1.0, 0.5}}});
  return out;
}

// Lipschitz constant (per unit distance) of each ramped shape above.
const double kLipschitz[] = {0.0, 4.0, 4.0, 4.0, 4.0 * 4.0, 6.0 * 4.0, 2.0, 10.0, 2.0};

}  // namespace

TEST_CASE("eval examples") {
  CHECK(at(InitialDatum(2, Constant{1.0}), {5, -3}) == 1.0);
  CHECK(at(InitialDatum(2, GaussianBump{{0.0, 0.0}, 2.0, 1.0}), {0, 0}) == 2.0);
  const InitialDatum rings(1, RadialRings{{1, 2, 6, 24}, 1.0, 0.25});
  // Zero annulus [a_3 + 1/4, a_4 - 1/4] = [6.25, 23.75].
  CHECK(at(rings, {12}) == 0.0);
  CHECK(at(rings, {-12}) == 0.0);
  // Unit plateaus on [0, a_1] and [a_2, a_3].
  CHECK(at(rings, {0.5}) == 1.0);
  CHECK(at(rings, {4}) == 1.0);
  // Ramps: half-way into the ramp width on each side.
  CHECK(at(rings, {1.125}) == doctest::Approx(0.5));
  CHECK(at(rings, {1.875}) == doctest::Approx(0.5));
  CHECK(at(rings, {1.5}) == 0.0);
  // Four radii: the pattern continues with amplitude past a_4.
  CHECK(at(rings, {1000}) == 1.0);
}

TEST_CASE("eval rejects dimension mismatch") {
  const InitialDatum d(2, Constant{1.0});
  CHECK_THROWS_AS(at(d, {1}), std::invalid_argument);
  CHECK_THROWS_AS(at(d, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("sup_norm examples") {
  CHECK(InitialDatum(1, Constant{3.0}).sup_norm() == 3.0);
  CHECK(InitialDatum(1, MaxOf{{Constant{1.0}, GaussianBump{{0.0}, 2.0, 1.0}}}).sup_norm() == 2.0);
  CHECK(InitialDatum(1, RadialRings{{1, 2}, 1.0, 0.25}).sup_norm() == 1.0);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(InitialDatum(0, Constant{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(4, Constant{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(1, Constant{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(1, Constant{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(1, RadialRings{{2, 1}, 1.0, 0.25}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(1, RadialRings{{1, 1.3}, 1.0, 0.25}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(1, RadialRings{{1, 2}, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(2, ConicSector{{1.0, 1.0}, 0.5, 1.0, 0.0, 0.25}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(2, ConicSector{{1.0, 0.0}, 1.5, 1.0, 0.0, 0.25}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(2, ConicSector{{1.0}, 0.5, 1.0, 0.0, 0.25}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(1, GaussianBump{{0.0}, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(1, PeriodicStripe{8.0, 1.0, 1.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(1, PeriodicStripe{1.0, 0.9, 1.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(1, MaxOf{}), std::invalid_argument);
}

TEST_CASE("factorial rings") {
  const auto d4 = build_factorial_rings(4, 1);
  CHECK(std::get<RadialRings>(d4.shape().value).radii == std::vector<double>{1, 2, 6, 24});
  const auto d5 = build_factorial_rings(5, 2);
  CHECK(std::get<RadialRings>(d5.shape().value).radii == std::vector<double>{1, 2, 6, 24, 120});
  CHECK(std::get<RadialRings>(d5.shape().value).smoothing_width == 0.25);
  CHECK_THROWS_AS(build_factorial_rings(1, 1), std::invalid_argument);
  CHECK(max_factorial_rings() == 170);
  CHECK_NOTHROW(build_factorial_rings(170, 1));
  CHECK_THROWS_WITH_AS(build_factorial_rings(171, 1), doctest::Contains("overflows"), std::invalid_argument);
}

TEST_CASE("factorial rings vanish and saturate on the prescribed annuli") {
  const int k_max = 8;
  const auto d = build_factorial_rings(k_max, 1);
  std::vector<double> a{0.0};
  double f = 1.0;
  for (int k = 1; k <= k_max; ++k) a.push_back(f *= k);
  for (int k = 1; 2 * k <= k_max; ++k) {
    // zero on [a_{2k-1} + 1/4, a_{2k} - 1/4]
    const double lo = a[2 * k - 1] + 0.25, hi = a[2 * k] - 0.25;
    for (int i = 0; i <= 200; ++i) CHECK(at(d, {lo + (hi - lo) * i / 200.0}) == 0.0);
  }
  for (int k = 0; 2 * k + 1 <= k_max; ++k) {
    // one on [a_{2k}, a_{2k+1}]
    const double lo = a[2 * k], hi = a[2 * k + 1];
    for (int i = 0; i <= 200; ++i) CHECK(at(d, {lo + (hi - lo) * i / 200.0}) == 1.0);
  }
}

TEST_CASE("factorial rings at the top of the double range") {
  const int k = max_factorial_rings();
  const InitialDatum d = build_factorial_rings(k, 2);
  const auto& b = std::get<RadialRings>(d.shape().value).radii;
  // (k-2)! .. (k-1)! carries the amplitude, (k-1)! .. k! is a zero annulus
  // and with an even number of radii the datum is 1 again past k!.
  const double on = 0.5 * (b[k - 3] + b[k - 2]);
  const double off = 0.5 * (b[k - 2] + b[k - 1]);
  CHECK(d.eval(Point{0.6 * on, 0.8 * on}) == 1.0);
  CHECK(d.eval(Point{0.8 * off, -0.6 * off}) == 0.0);
  CHECK(d.eval(Point{-1.5 * b[k - 1], 0.0}) == 1.0);
}

TEST_CASE("values stay in [0, sup_norm] on random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (const InitialDatum& d : sample_data()) {
    Point x(static_cast<std::size_t>(d.dimension()));
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
      for (double& c : x) c = u(rng);
      const double v = d.eval(x);
      if (!(v >= 0.0 && v <= d.sup_norm())) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("Lipschitz bound on random close pairs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-40.0, 40.0), e(-1e-3, 1e-3);
  const auto data = sample_data();
  for (std::size_t k = 0; k < data.size(); ++k) {
    const InitialDatum& d = data[k];
    Point x(static_cast<std::size_t>(d.dimension())), y = x;
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
      double dist2 = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) {
        x[c] = u(rng);
        y[c] = x[c] + e(rng);
        dist2 += (x[c] - y[c]) * (x[c] - y[c]);
      }
      // Cones are Lipschitz away from the apex; skip a small ball there.
      if (std::holds_alternative<ConicSector>(d.shape().value) && std::sqrt(x[0] * x[0] + x[1] * x[1]) < 1.0)
        continue;
      if (std::fabs(d.eval(x) - d.eval(y)) > kLipschitz[k] * std::sqrt(dist2) * (1 + 1e-9) + 1e-15) ++violations;
    }
    CHECK_MESSAGE(violations == 0, "datum index " << k);
  }
}

TEST_CASE("cone: full amplitude inside, zero outside") {
  const InitialDatum d(2, ConicSector{{1.0, 0.0}, 0.5, 1.0, 2.0, 0.25});
  CHECK(at(d, {10, 0}) == 1.0);
  CHECK(at(d, {1, 0}) == 0.0);     // inside B(0, R0)
  CHECK(at(d, {0, 10}) == 0.0);    // outside the cone
  CHECK(at(d, {-10, 0}) == 0.0);
  CHECK(at(d, {0, 0}) == 0.0);
  // Direction at chord distance 0.4 < 0.5, far enough out: full amplitude.
  const double theta = 2.0 * std::asin(0.2);
  CHECK(at(d, {100 * std::cos(theta), 100 * std::sin(theta)}) == 1.0);
}

TEST_CASE("stripe tiles with its period") {
  const InitialDatum d(1, PeriodicStripe{8.0, 0.5, 2.0, 0.1});
  CHECK(at(d, {0}) == 2.0);
  CHECK(at(d, {1.99}) == 2.0);
  CHECK(at(d, {2.05}) == doctest::Approx(1.0));
  CHECK(at(d, {3}) == 0.0);
  for (double x : {-13.7, -2.2, 0.3, 5.1, 19.9}) CHECK(at(d, {x}) == doctest::Approx(at(d, {x + 8.0})).epsilon(1e-12));
}

TEST_CASE("periodize") {
  SUBCASE("stripe with period 2L is unchanged on the fundamental cell") {
    const InitialDatum d(1, PeriodicStripe{8.0, 0.5, 1.0, 0.1});
    const auto s = periodize(d, 4.0);
    for (int i = 0; i < 800; ++i) {
      const double x = -4.0 + i * 0.01;
      CHECK(s(std::span<const double>(&x, 1)) == d.eval(std::span<const double>(&x, 1)));
      const double shifted = x + 24.0;
      CHECK(s(std::span<const double>(&shifted, 1)) == doctest::Approx(d.eval(std::span<const double>(&x, 1))));
    }
  }
  SUBCASE("constant") {
    const auto s = periodize(InitialDatum(2, Constant{2.5}), 1.0);
    for (double a : {-7.1, 0.0, 3.3}) {
      Point x{a, -a};
      CHECK(s(x) == 2.5);
    }
  }
  SUBCASE("gaussian wrap-around at L = 10 sigma") {
    const double sigma = 0.7, L = 10 * sigma;
    const InitialDatum d(1, GaussianBump{{0.0}, 1.0, sigma});
    const auto s = periodize(d, L);
    // Exact periodic extension: sum of images.
    auto images = [&](double x) {
      double sum = 0.0;
      for (int k = -20; k <= 20; ++k) sum += std::exp(-std::pow(x + 2 * k * L, 2) / (2 * sigma * sigma));
      return sum;
    };
    for (double x : {-L, -L + 1e-3, L - 1e-3, 0.5 * L}) {
      Point p{x};
      CHECK(std::fabs(s(p) - images(x)) / images(0.0) < 1e-10);
    }
  }
  CHECK_THROWS_AS(periodize(InitialDatum(1, Constant{1.0}), 0.0), std::invalid_argument);
}

TEST_CASE("JSON round trip") {
  for (const InitialDatum& d : sample_data()) {
    const auto j = datum_to_json(d);
    const InitialDatum back = datum_from_json(j);
    CHECK(datum_to_json(back) == j);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    Point x(static_cast<std::size_t>(d.dimension()));
    for (int i = 0; i < 200; ++i) {
      for (double& c : x) c = u(rng);
      CHECK(back.eval(x) == d.eval(x));
    }
  }
  const auto j = nlohmann::json::parse(R"({"dimension":1,"shape":"factorial_rings","k_max":4})");
  CHECK(std::get<RadialRings>(datum_from_json(j).shape().value).radii == std::vector<double>{1, 2, 6, 24});
}

TEST_CASE("JSON errors") {
  using nlohmann::json;
  CHECK_THROWS_AS(datum_from_json(json::parse(R"({"dimension":1,"shape":"square"})")), std::invalid_argument);
  CHECK_THROWS_AS(datum_from_json(json::parse(R"({"dimension":1,"shape":"constant","amplitude":1,"x":2})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(datum_from_json(json::parse(R"({"dimension":1,"shape":"constant","amplitude":"1"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(datum_from_json(json::parse(R"({"shape":"constant","amplitude":1})")), std::invalid_argument);
  CHECK_THROWS_AS(datum_from_json(json::parse(R"({"dimension":1,"shape":"constant","amplitude":-1})")),
                  std::invalid_argument);
}
