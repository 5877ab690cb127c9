#pragma once

#include <vector>

namespace lifespan {

/// Gauss–Hermite rule for ∫ e^{-ξ²} f(ξ) dξ, with the weights divided by
/// √π so that they sum to one: Σ w_i f(ξ_i) ≈ E[f(Z/√2)], Z ~ N(0,1).
struct GaussHermiteRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // normalised, positive
};

/// Cached rule of the given order (1 <= order <= 512). Thread-safe; the
/// returned reference stays valid for the life of the process.
const GaussHermiteRule& gauss_hermite(int order);

}  // namespace lifespan
