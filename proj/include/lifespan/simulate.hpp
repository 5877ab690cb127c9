#pragma once

// Method-of-lines integration of u_t = Δu + |u|^{p-1}u on the torus
// [-L, L)^n with N points per axis, explicit Euler steps under a diffusive
// and a reaction time-step cap, and extrapolation of the blow-up time from
// the tail of the sup-norm history.

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lifespan/bounds.hpp"
#include "lifespan/gauss_hermite.hpp"

namespace lifespan {

enum class LaplacianRoute {
  Fourier,  // FFT with the symbol of the second-order difference operator
  Stencil,  // the same operator applied directly in physical space
};

struct SimulationConfig {
  double half_period = 4.0;
  int grid_points = 256;  // per axis, power of two, >= 64
  double blowup_threshold = 1e8;
  double safety = 0.5;    // θ
  double t_max = 10.0;
  int snapshot_stride = 1000;  // accepted steps between stored snapshots; 0 disables
  int fit_window = 20;
  LaplacianRoute laplacian = LaplacianRoute::Fourier;

  void validate() const;
};

/// Periodic grid field: values at x_j = -L + j h, h = 2L/N, row-major
/// with the last axis contiguous.
struct Snapshot {
  double t = 0.0;
  int dimension = 1;
  int grid_points = 0;
  double half_period = 0.0;
  std::vector<double> values;

  /// Periodic multilinear interpolation.
  double sample(std::span<const double> x) const;

  /// Text dump: header line "n N L t", then one value per line.
  void write(std::ostream& os) const;
  static Snapshot read(std::istream& is);
};

enum class BlowupStatus { BlewUp, NoBlowupWithinHorizon };

struct HistoryPoint {
  double t = 0.0;
  double sup_norm = 0.0;
};

struct BlowupEstimate {
  BlowupStatus status = BlowupStatus::NoBlowupWithinHorizon;
  std::optional<double> t_num;
  double fit_residual = 0.0;
  double t_stop = 0.0;
  std::size_t steps = 0;
  double min_value = 0.0;  // smallest grid value over all accepted steps
  std::vector<HistoryPoint> history;
  std::vector<Snapshot> snapshots;
};

/// Non-finite values appeared before the threshold was reached.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Grid coordinates and initial field for a config.
Snapshot initial_field(const InitialDatum& datum, const SimulationConfig& config);

/// Applies the periodic discrete Laplacian through the chosen route.
void apply_laplacian(const Snapshot& field, LaplacianRoute route, std::span<double> out);

BlowupEstimate run(const ProblemSpec& spec, const SimulationConfig& config);

struct BlowupFit {
  double t_num = 0.0;
  double residual = 0.0;
};

/// Least-squares line through (t, ‖u‖∞^{1-p}); T is its zero. Throws
/// std::invalid_argument for fewer than 5 points or a tail that is not
/// strictly increasing in both t and the sup-norm.
BlowupFit extrapolate_blowup(std::span<const HistoryPoint> tail, double p);

/// ∫ g(z, y, t - s) u(y)^p dy - (∫ g(z, y, t - s) u(y) dy)^p for the
/// snapshot u at time s, using the periodic interpolant and Gauss–Hermite
/// nodes. Non-negative by Jensen's inequality.
double jensen_check(const Snapshot& snapshot, double t, std::span<const double> z, const GaussHermiteRule& rule,
                    double p);

}  // namespace lifespan
