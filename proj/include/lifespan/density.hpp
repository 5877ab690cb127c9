#pragma once

// Densities of superlevel sets {φ >= α} in large balls:
//   D(α; r) = sup_x mes(B(x,r) ∩ {φ >= α}) / mes(B(x,r))
//   D(α)    = limsup_r of the same ratio with the ball centred at 0
//   D̄(α)    = limsup_r D(α; r)
// limsup is approximated by the max over the top quartile of a finite
// radius grid, and the sup over centres by a candidate search.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lifespan/datum.hpp"

namespace lifespan {

struct MonteCarlo {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
};

struct GridOracle {
  int resolution = 256;
};

using Estimator = std::variant<MonteCarlo, GridOracle>;

std::string estimator_name(const Estimator& e);
std::size_t estimator_size(const Estimator& e);

struct OriginCenter {};
struct ExplicitCenters {
  std::vector<Point> points;
};
struct AutoSearch {
  int scatter = 16;  // random candidates from the estimator's seed
};

using CenterStrategy = std::variant<OriginCenter, ExplicitCenters, AutoSearch>;

struct DensityRequest {
  std::vector<double> alphas;  // empty: default_alpha_grid(sup_norm)
  std::vector<double> radii;   // increasing, positive
  bool snap_to_rings = true;
  CenterStrategy centers = AutoSearch{};
  Estimator estimator = MonteCarlo{};
  int workers = 1;

  /// Throws std::invalid_argument when the request breaks its invariants.
  void validate() const;
};

/// One (α, r) cell of a density profile.
struct DensitySample {
  double alpha = 0.0;
  double radius = 0.0;
  double origin_density = 0.0;
  Point best_center;
  double best_density = 0.0;
};

/// Limsup proxies for one α, with the radius/centre that achieved them.
struct DensityEstimate {
  double alpha = 0.0;
  double d_origin = 0.0;
  double d_origin_radius = 0.0;
  double d_bar = 0.0;
  double d_bar_radius = 0.0;
  Point d_bar_center;
};

struct DensityReport {
  int dimension = 1;
  std::vector<double> radii;  // after snapping
  Estimator estimator = MonteCarlo{};
  std::vector<DensitySample> samples;
  std::vector<DensityEstimate> estimates;  // one per α, in request order

  const DensityEstimate* find(double alpha) const;
};

/// ω_n = π^{n/2} / Γ(n/2 + 1)
double unit_ball_volume(int dimension);

/// n log-spaced thresholds from sup/100 up to exactly sup.
std::vector<double> default_alpha_grid(double sup_norm, int count = 16);

/// `count` geometric radii from r_min to r_max inclusive.
std::vector<double> geometric_radii(double r_min, double r_max, int count);

/// For radial rings, moves each radius to the nearest (in log scale) ring
/// outer radius a_{2k+1} and removes duplicates; other data are unchanged.
std::vector<double> snap_radii_to_rings(const InitialDatum& datum, std::span<const double> radii);

/// Top-quartile indices of a sorted grid of size n: [n - ceil(n/4), n).
std::size_t top_quartile_begin(std::size_t n);

/// mes(B(center, r) ∩ {φ >= α}) / mes(B(center, r)).
double density_in_ball(const InitialDatum& datum, double alpha, std::span<const double> center, double r,
                       const Estimator& estimator, int workers = 1);

struct CenterResult {
  Point center;
  double density = 0.0;
};

/// Best centre among the origin, datum-specific ray points and a seeded
/// random scatter; ties go to the lexicographically smallest centre.
CenterResult auto_center_search(const InitialDatum& datum, double alpha, double r, const Estimator& estimator,
                                int workers = 1, int scatter = 16);

/// Candidate centres examined by auto_center_search, origin first.
std::vector<Point> auto_center_candidates(const InitialDatum& datum, double r, std::uint64_t seed, int scatter);

DensityReport density_profile(const InitialDatum& datum, const DensityRequest& request);

/// Brute-force lattice count: cell centres of a resolution^n lattice over
/// the bounding cube of the ball; fraction of in-ball cells with φ >= α.
double oracle_density(const InitialDatum& datum, double alpha, std::span<const double> center, double r,
                      int resolution, int workers = 1);

/// Same lattice, arbitrary membership predicate.
double lattice_fraction(int dimension, std::span<const double> center, double r, int resolution,
                        const std::function<bool(std::span<const double>)>& member, int workers = 1);

}  // namespace lifespan
