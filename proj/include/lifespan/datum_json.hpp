#pragma once

// JSON form of an initial datum:
//
//   {"dimension": 2, "shape": "radial_rings", "radii": [...], "amplitude": 1,
//    "smoothing_width": 0.25}
//
// Shapes and their fields:
//   constant         amplitude
//   radial_rings     radii, amplitude, smoothing_width
//   conic_sector     axis, half_width, amplitude, inner_radius, smoothing_width
//   gaussian_bump    center, amplitude, width
//   periodic_stripe  period, duty, amplitude, smoothing_width
//   max              parts (array of shape objects without "dimension")
//   factorial_rings  k_max (input only; expands to radial_rings)
//
// datum_to_json(datum_from_json(j)) reproduces j for every shape except
// factorial_rings, and datum_from_json(datum_to_json(d)) reproduces d.

#include "json.hpp"
#include "lifespan/datum.hpp"

namespace lifespan {

/// Throws std::invalid_argument on unknown shapes, missing or mistyped
/// fields, and on parameter values the datum constructor rejects.
InitialDatum datum_from_json(const nlohmann::json& j);

nlohmann::json datum_to_json(const InitialDatum& datum);

}  // namespace lifespan
