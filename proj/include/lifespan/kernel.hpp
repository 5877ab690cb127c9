#pragma once

// Gaussian heat kernel on R^n and Gauss–Hermite evaluation of the heat
// semigroup e^{tΔ}φ.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lifespan/datum.hpp"
#include "lifespan/gauss_hermite.hpp"

namespace lifespan {

/// g(x, y, t) = (4πt)^{-n/2} exp(-|x - y|² / (4t)). Throws for t <= 0 or
/// mismatched dimensions.
double heat_kernel(std::span<const double> x, std::span<const double> y, double t);

struct SearchBox {
  Point lower;
  Point upper;
};

struct QuadratureConfig {
  int nodes_per_axis = 64;    // Gauss–Hermite order, >= 8
  int search_resolution = 33; // coarse candidates per search line (or per box axis)
  int refinement_rounds = 3;  // coordinate golden-section rounds, >= 0
  std::optional<SearchBox> box;  // explicit search region; datum-derived when absent
  int workers = 1;

  void validate(int dimension) const;
};

/// ∫ g(z, y, t) f(y) dy ≈ Σ_i w_i f(z + 2√t ξ_i) on the tensor-product rule.
/// f receives a point of size dim.
double gaussian_average(int dim, std::span<const double> z, double t, const GaussHermiteRule& rule,
                        const std::function<double(std::span<const double>)>& f);

/// (e^{tΔ}φ)(z)
double semigroup_eval(const InitialDatum& datum, std::span<const double> z, double t,
                      const QuadratureConfig& quad);

struct SupResult {
  double value = 0.0;
  Point center;
  std::size_t evaluations = 0;
  SearchBox region;  // bounding box of the coarse candidates, for audit
};

/// sup_z (e^{tΔ}φ)(z) over a coarse candidate set refined by coordinate
/// golden-section search. The result never exceeds the true supremum by
/// more than quadrature error; it may undershoot it.
SupResult semigroup_sup(const InitialDatum& datum, double t, const QuadratureConfig& quad);

/// Coarse candidate centres used by semigroup_sup, with the local scale
/// used to start refinement around each.
struct SearchCandidate {
  Point center;
  double scale = 1.0;
};
std::vector<SearchCandidate> sup_candidates(const InitialDatum& datum, double t, const QuadratureConfig& quad);

/// Residuals of the four heat-kernel identities: symmetry, translation
/// invariance, the semigroup property and conservation of probability.
struct KernelCheckReport {
  int dimension = 1;
  double symmetry_residual = 0.0;
  double translation_residual = 0.0;
  double semigroup_residual = 0.0;
  double conservation_residual = 0.0;
};

struct KernelCheckOptions {
  int nodes_per_axis = 64;
  int trials = 16;
  std::uint64_t seed = 1;
};

KernelCheckReport kernel_selfcheck(int dimension, double t, double s, const KernelCheckOptions& options = {});

}  // namespace lifespan
