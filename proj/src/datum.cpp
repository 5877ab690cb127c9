#include "lifespan/datum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lifespan {

namespace {

[[noreturn]] void reject(const std::string& what) { throw std::invalid_argument("datum: " + what); }

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) reject(std::string(name) + " must be finite and >= 0");
}

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) reject(std::string(name) + " must be finite and > 0");
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// |x| without overflow for the huge radii of factorial rings.
double norm(const double* x, int dim) {
  switch (dim) {
    case 1:
      return std::fabs(x[0]);
    case 2:
      return std::hypot(x[0], x[1]);
    default:
      return std::hypot(x[0], x[1], x[2]);
  }
}

struct Validator {
  int dim;

  double operator()(const Constant& s) const {
    require_finite_nonneg(s.amplitude, "amplitude");
    return s.amplitude;
  }

  double operator()(const RadialRings& s) const {
    require_finite_nonneg(s.amplitude, "amplitude");
    require_positive(s.smoothing_width, "smoothing_width");
    if (s.radii.empty()) reject("radial_rings needs at least one radius");
    double prev = 0.0;
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
      const double r = s.radii[i];
      if (!std::isfinite(r) || r <= prev) reject("radii must be finite, positive and strictly increasing");
      // radii[i-1] .. radii[i] with i odd (1-based j = i) is a zero interval.
      if (i % 2 == 1 && r - prev < 2.0 * s.smoothing_width)
        reject("zero annulus narrower than twice the smoothing width");
      prev = r;
    }
    return s.amplitude;
  }

  double operator()(const ConicSector& s) const {
    require_finite_nonneg(s.amplitude, "amplitude");
    require_finite_nonneg(s.inner_radius, "inner_radius");
    require_positive(s.smoothing_width, "smoothing_width");
    if (static_cast<int>(s.axis.size()) != dim) reject("cone axis dimension mismatch");
    double norm2 = 0.0;
    for (double a : s.axis) norm2 += a * a;
    if (!(std::fabs(std::sqrt(norm2) - 1.0) <= 1e-9)) reject("cone axis must be a unit vector");
    if (!(s.half_width > 0.0 && s.half_width < std::sqrt(2.0))) reject("half_width must lie in (0, sqrt 2)");
    return s.amplitude;
  }

  double operator()(const GaussianBump& s) const {
    require_finite_nonneg(s.amplitude, "amplitude");
    require_positive(s.width, "width");
    if (static_cast<int>(s.center.size()) != dim) reject("gaussian center dimension mismatch");
    for (double c : s.center)
      if (!std::isfinite(c)) reject("gaussian center must be finite");
    return s.amplitude;
  }

  double operator()(const PeriodicStripe& s) const {
    require_finite_nonneg(s.amplitude, "amplitude");
    require_positive(s.period, "period");
    require_positive(s.smoothing_width, "smoothing_width");
    if (!(s.duty > 0.0 && s.duty < 1.0)) reject("duty must lie in (0, 1)");
    if (s.duty * s.period + 2.0 * s.smoothing_width > s.period)
      reject("stripe ramps overlap: need duty*period + 2*smoothing_width <= period");
    return s.amplitude;
  }

  double operator()(const MaxOf& s) const {
    if (s.parts.empty()) reject("max needs at least one part");
    double sup = 0.0;
    for (const Shape& part : s.parts) sup = std::max(sup, std::visit(*this, part.value));
    return sup;
  }
};

double eval_rings(const RadialRings& s, double rho) {
  const auto& b = s.radii;
  const std::size_t m = b.size();
  // Interval index j: b_j <= rho < b_{j+1}, with b_0 = 0.
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), rho) - b.begin());
  if (j % 2 == 0) return s.amplitude;
  const double w = s.smoothing_width;
  const double left = b[j - 1];
  double v = 1.0 - (rho - left) / w;
  if (j < m) v = std::max(v, 1.0 - (b[j] - rho) / w);
  return s.amplitude * clamp01(v);
}

double eval_cone(const ConicSector& s, const double* x, int dim) {
  const double rho = norm(x, dim);
  if (rho == 0.0) return 0.0;
  const double radial = clamp01((rho - s.inner_radius) / s.smoothing_width);
  if (radial == 0.0) return 0.0;
  double d2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double diff = s.axis[i] - x[i] / rho;
    d2 += diff * diff;
  }
  const double angular = clamp01((s.half_width - std::sqrt(d2)) * rho / s.smoothing_width);
  return s.amplitude * std::min(radial, angular);
}

double eval_stripe(const PeriodicStripe& s, double x0) {
  const double q = x0 - s.period * std::floor(x0 / s.period + 0.5);
  const double excess = std::fabs(q) - 0.5 * s.duty * s.period;
  if (excess <= 0.0) return s.amplitude;
  return s.amplitude * clamp01(1.0 - excess / s.smoothing_width);
}

double eval_shape(const Shape& shape, const double* x, int dim) {
  struct Eval {
    const double* x;
    int dim;
    double operator()(const Constant& s) const { return s.amplitude; }
    double operator()(const RadialRings& s) const { return eval_rings(s, norm(x, dim)); }
    double operator()(const ConicSector& s) const { return eval_cone(s, x, dim); }
    double operator()(const GaussianBump& s) const {
      double d2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double d = x[i] - s.center[i];
        d2 += d * d;
      }
      return s.amplitude * std::exp(-d2 / (2.0 * s.width * s.width));
    }
    double operator()(const PeriodicStripe& s) const { return eval_stripe(s, x[0]); }
    double operator()(const MaxOf& s) const {
      double v = 0.0;
      for (const Shape& part : s.parts) v = std::max(v, eval_shape(part, x, dim));
      return v;
    }
  };
  return std::visit(Eval{x, dim}, shape.value);
}

}  // namespace

InitialDatum::InitialDatum(int dimension, Shape shape) : dimension_(dimension), shape_(std::move(shape)) {
  if (dimension_ < 1 || dimension_ > kMaxDimension) reject("dimension must be 1, 2 or 3");
  sup_norm_ = std::visit(Validator{dimension_}, shape_.value);
  if (!(sup_norm_ > 0.0)) reject("datum is identically zero");
}

double InitialDatum::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension_)
    throw std::invalid_argument("datum: point has dimension " + std::to_string(x.size()) + ", expected " +
                                std::to_string(dimension_));
  return eval_unchecked(x.data());
}

double InitialDatum::eval_unchecked(const double* x) const { return eval_shape(shape_, x, dimension_); }

int max_factorial_rings() {
  double f = 1.0;
  int k = 1;
  while (std::isfinite(f * (k + 1))) {
    f *= (k + 1);
    ++k;
  }
  return k;
}

InitialDatum build_factorial_rings(int k_max, int dimension) {
  if (k_max < 2) throw std::invalid_argument("factorial rings: k_max must be >= 2 for one full ring");
  if (k_max > max_factorial_rings())
    throw std::invalid_argument("factorial rings: " + std::to_string(k_max) +
                                "! overflows double precision (limit k_max = " +
                                std::to_string(max_factorial_rings()) + ")");
  RadialRings rings;
  rings.amplitude = 1.0;
  rings.smoothing_width = 0.25;
  double f = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    f *= k;
    rings.radii.push_back(f);
  }
  return InitialDatum(dimension, std::move(rings));
}

PeriodicSampler::PeriodicSampler(InitialDatum datum, double half_period)
    : datum_(std::move(datum)), half_period_(half_period) {
  if (!std::isfinite(half_period) || half_period <= 0.0)
    throw std::invalid_argument("periodize: half period must be > 0");
}

double PeriodicSampler::operator()(std::span<const double> x) const {
  const int dim = datum_.dimension();
  if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("periodize: dimension mismatch");
  double wrapped[kMaxDimension];
  const double period = 2.0 * half_period_;
  for (int i = 0; i < dim; ++i) {
    const double v = x[i];
    wrapped[i] = (v >= -half_period_ && v < half_period_)
                     ? v
                     : v - period * std::floor((v + half_period_) / period);
  }
  return datum_.eval_unchecked(wrapped);
}

PeriodicSampler periodize(const InitialDatum& datum, double half_period) {
  return PeriodicSampler(datum, half_period);
}

}  // namespace lifespan
