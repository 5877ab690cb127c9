#pragma once

// Run configuration (JSON). Every section is optional except where a
// subcommand needs it; unknown keys are rejected.
//
// {
//   "seed": 7,                       required when the estimator is monte_carlo
//   "workers": 1,
//   "problem":   {"p": 2, "datum": {...datum JSON...}},
//   "density":   {"alphas": [1] | "alpha_count": 16,
//                 "radii": [..] | {"min": 8, "max": 1024, "count": 8},
//                 "snap_to_rings": true,
//                 "centers": "origin" | "auto" | {"auto": {"scatter": 16}} | [[x..], ...],
//                 "estimator": {"kind": "monte_carlo", "samples": 100000}
//                            | {"kind": "grid", "resolution": 256},
//                 "from_csv": "path/to/density.csv"},
//   "quadrature": {"nodes": 64, "search_resolution": 33, "refinement_rounds": 3,
//                  "box": {"lower": [..], "upper": [..]}},
//   "bounds":    {"weissler": {"horizon": 100, "tolerance": 1e-10, "growth": 1.05},
//                 "yamauchi": {"axis": [..], "half_width": 0.5,
//                              "radii": [..] | {"min", "max", "count"}, "directions": 64}},
//   "simulate":  {"half_period": 4, "grid_points": 256, "blowup_threshold": 1e8,
//                 "safety": 0.5, "t_max": 10, "snapshot_stride": 1000,
//                 "fit_window": 20, "laplacian": "fourier" | "stencil"},
//   "verify":    {"sandwich_tolerance": 0.02, "semigroup_times": [0.5, 1, 2],
//                 "semigroup_tolerance": 0.02, "jensen_lag": 0.2, "jensen_floor": -1e-9,
//                 "kernel": {"dimensions": [1, 2], "t": 1, "s": 1, "nodes": 64, "trials": 16}},
//   "outputs":   {"dir": "out", "history": true, "snapshots": false}
// }
//
// The config hash is FNV-1a 64 over the canonical dump of the effective
// configuration (after --seed), leaving out "workers" and "outputs".

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lifespan/bounds.hpp"
#include "lifespan/density.hpp"
#include "lifespan/kernel.hpp"
#include "lifespan/simulate.hpp"

namespace lifespan::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KernelCheckSection {
  std::vector<int> dimensions{1, 2};
  double t = 1.0;
  double s = 1.0;
  int nodes = 64;
  int trials = 16;
};

struct VerifySection {
  double sandwich_tolerance = 0.02;
  std::vector<double> semigroup_times{0.5, 1.0, 2.0};
  double semigroup_tolerance = 0.02;
  double jensen_lag = 0.2;
  double jensen_floor = -1e-9;
  KernelCheckSection kernel;
};

struct OutputSection {
  std::string dir = "out";
  bool history = true;
  bool snapshots = false;
};

struct OverrideFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
};

struct RunConfig {
  nlohmann::json effective;  // parsed document with overrides applied
  std::string hash;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::optional<ProblemSpec> problem;
  bool has_density = false;  // a density section (or from_csv) was given
  DensityRequest density;
  std::optional<std::string> density_csv;
  QuadratureConfig quadrature;
  BoundsOptions bounds;
  bool has_simulate = false;  // verify skips the simulation checks without it
  SimulationConfig simulate;
  VerifySection verify;
  OutputSection outputs;

  /// Throws ConfigError when the problem section is missing.
  const ProblemSpec& require_problem() const;
};

/// Validates and converts a parsed document. Throws ConfigError.
RunConfig parse_config(nlohmann::json doc, const OverrideFlags& overrides = {});

RunConfig load_config(const std::string& path, const OverrideFlags& overrides = {});

/// 16 hex digits of FNV-1a 64.
std::string config_hash(const nlohmann::json& effective);

}  // namespace lifespan::app
