#pragma once

// Life-span bounds for u_t = Δu + |u|^{p-1}u with datum φ:
//
//   lower      (1/(p-1)) ‖φ‖∞^{1-p}                    <= T*
//   thm1       (1/(p-1)) min_α (α D(α))^{1-p}          >= T*
//   thm2       (1/(p-1)) (α D̄(α))^{1-p}                >= T*
//   yamauchi   (1/(p-1)) (essinf_{cone} φ_∞)^{1-p}     >= T*
//   weissler   first t with (1/(p-1)) S(t)^{1-p} = t, S(t) = sup_z e^{tΔ}φ(z)
//
// An unavailable bound (zero density, zero liminf, no crossing) is an
// ordinary outcome and is represented by an empty value.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lifespan/datum.hpp"
#include "lifespan/density.hpp"
#include "lifespan/kernel.hpp"

namespace lifespan {

struct ProblemSpec {
  InitialDatum datum;
  double p;

  ProblemSpec(InitialDatum d, double exponent);
};

/// (1/(p-1)) (α d̄)^{1-p}; empty when d̄ = 0. Throws for α <= 0, d̄ outside
/// [0, 1] or p <= 1.
std::optional<double> upper_bound_thm2(double alpha, double d_bar, double p);

struct GridBound {
  std::optional<double> value;
  double alpha = 0.0;
  double density = 0.0;
};

/// Minimum over the report's α grid using the origin densities.
GridBound upper_bound_thm1(const DensityReport& report, double p);

/// Minimum over the report's α grid using the centre-sup densities.
GridBound best_thm2(const DensityReport& report, double p);

double lower_bound(const ProblemSpec& spec);

struct WeisslerOptions {
  double horizon = 100.0;
  double rel_tol = 1e-10;  // bisection stops when the bracket is this small relative to t
  double growth = 1.05;    // geometric scan factor from the lower bound upward
};

struct WeisslerResult {
  std::optional<double> crossing;
  std::size_t sup_evaluations = 0;
};

WeisslerResult weissler_bound(const ProblemSpec& spec, const QuadratureConfig& quad, const WeisslerOptions& options = {});

struct ConeProbe {
  Point axis;               // unit vector (ignored for n = 1)
  double half_width = 0.5;  // chord distance, in (0, sqrt 2)
  std::vector<double> radii;  // radial probe grid, increasing
  int directions = 64;
  std::uint64_t seed = 1;
};

/// Default probe: the datum's own cone at half its width for conic data,
/// e_1 with half width 0.5 otherwise; radii geometric over [10, 1e6].
ConeProbe default_cone_probe(const InitialDatum& datum);

/// Directions in S_axis(half_width) examined by yamauchi_bound.
std::vector<Point> cone_directions(int dimension, const ConeProbe& probe);

struct YamauchiResult {
  std::optional<double> value;
  double essinf = 0.0;  // A
};

/// n >= 2: A = min over probe directions x' of min_{r in top quartile}
/// φ(r x'). n = 1: A = max of the one-sided proxies at ±∞.
YamauchiResult yamauchi_bound(const ProblemSpec& spec, const ConeProbe& probe);

struct BoundRow {
  std::string name;
  std::optional<double> value;
  std::string parameters;
  std::string note;
};

struct ConsistencyFlag {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct LifespanBounds {
  BoundRow lower;
  BoundRow thm1;
  BoundRow thm2;
  BoundRow yamauchi;
  BoundRow weissler;
  std::vector<ConsistencyFlag> flags;

  bool consistent() const;
  std::vector<const BoundRow*> rows() const;
  std::vector<const BoundRow*> available_uppers() const;
};

struct BoundsOptions {
  WeisslerOptions weissler;
  std::optional<ConeProbe> cone;  // yamauchi is computed when set or for conic data
  int workers = 1;
};

bool has_conic_part(const InitialDatum& datum);

LifespanBounds bounds_report(const ProblemSpec& spec, const DensityReport& density, const QuadratureConfig& quad,
                             const BoundsOptions& options = {});

}  // namespace lifespan
