#pragma once

// Initial data for u_t = Δu + |u|^{p-1}u: non-negative, bounded and
// continuous profiles built from a small set of shapes.

#include <span>
#include <variant>
#include <vector>

namespace lifespan {

using Point = std::vector<double>;

inline constexpr int kMaxDimension = 3;

struct Constant {
  double amplitude = 0.0;
};

/// Breakpoints b_0 = 0 < a_1 < ... < a_m. The datum equals `amplitude` on
/// |x| in [b_{2k}, b_{2k+1}] and vanishes on [b_{2k+1} + w, b_{2k+2} - w],
/// with linear ramps of width w in between. Past the last radius the
/// pattern continues: zero if m is odd, amplitude if m is even.
struct RadialRings {
  std::vector<double> radii;
  double amplitude = 1.0;
  double smoothing_width = 0.25;
};

/// Cone of directions with chord distance |axis - x/|x|| < half_width.
/// Equals amplitude once |x| >= inner_radius + w and the direction is at
/// least w/|x| inside the cone boundary; zero outside the cone and inside
/// B(0, inner_radius).
struct ConicSector {
  Point axis;
  double half_width = 0.5;
  double amplitude = 1.0;
  double inner_radius = 0.0;
  double smoothing_width = 0.25;
};

/// amplitude * exp(-|x - center|^2 / (2 width^2))
struct GaussianBump {
  Point center;
  double amplitude = 1.0;
  double width = 1.0;
};

/// Along the first coordinate: plateau of length duty*period centred on
/// the origin, ramps of width w outside the plateau, zero elsewhere,
/// repeated with the given period.
struct PeriodicStripe {
  double period = 1.0;
  double duty = 0.5;
  double amplitude = 1.0;
  double smoothing_width = 0.1;
};

struct Shape;

struct MaxOf {
  std::vector<Shape> parts;
};

struct Shape {
  using Variant = std::variant<Constant, RadialRings, ConicSector, GaussianBump, PeriodicStripe, MaxOf>;
  Variant value;

  Shape() = default;
  template <class T>
    requires std::is_constructible_v<Variant, T&&> &&
             (!std::is_same_v<std::remove_cvref_t<T>, Shape>)
  Shape(T&& v) : value(std::forward<T>(v)) {}
};

/// Immutable, validated initial datum. Construction throws
/// std::invalid_argument when a parameter breaks the shape's constraints.
class InitialDatum {
 public:
  InitialDatum(int dimension, Shape shape);

  int dimension() const { return dimension_; }
  const Shape& shape() const { return shape_; }

  /// φ(x); throws std::invalid_argument if x has the wrong dimension.
  double eval(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return eval(x); }

  /// Exact ‖φ‖∞.
  double sup_norm() const { return sup_norm_; }

  /// φ(x) without the dimension check; x must hold dimension() values.
  double eval_unchecked(const double* x) const;

 private:
  int dimension_;
  Shape shape_;
  double sup_norm_;
};

/// Rings with radii (1!, 2!, ..., k_max!), amplitude 1 and ramp width 1/4.
InitialDatum build_factorial_rings(int k_max, int dimension);

/// Largest k with k! finite in double precision.
int max_factorial_rings();

/// Samples a datum restricted to [-L, L)^n and tiled periodically.
class PeriodicSampler {
 public:
  PeriodicSampler(InitialDatum datum, double half_period);

  double operator()(std::span<const double> x) const;
  double half_period() const { return half_period_; }
  const InitialDatum& datum() const { return datum_; }

 private:
  InitialDatum datum_;
  double half_period_;
};

PeriodicSampler periodize(const InitialDatum& datum, double half_period);

}  // namespace lifespan
