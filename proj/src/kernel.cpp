#include "lifespan/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lifespan/parallel.hpp"
#include "lifespan/simd.hpp"

namespace lifespan {

namespace {

std::size_t tensor_size(int dim, std::size_t order) {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= order;
  return total;
}

bool lexicographically_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Candidate line from `from` to `to` with `count` evenly spaced points.
void add_line(std::vector<SearchCandidate>& out, const Point& from, const Point& to, int count) {
  const int k = std::max(count, 2);
  double len2 = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) len2 += (to[i] - from[i]) * (to[i] - from[i]);
  const double spacing = std::sqrt(len2) / (k - 1);
  for (int j = 0; j < k; ++j) {
    const double s = static_cast<double>(j) / (k - 1);
    Point p(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) p[i] = from[i] + s * (to[i] - from[i]);
    out.push_back({std::move(p), spacing > 0.0 ? spacing : 1.0});
  }
}

Point unit(int dim, int axis, double scale = 1.0) {
  Point p(static_cast<std::size_t>(dim), 0.0);
  p[static_cast<std::size_t>(axis)] = scale;
  return p;
}

void shape_candidates(const Shape& shape, int dim, double t, int res, std::vector<SearchCandidate>& out) {
  const Point origin(static_cast<std::size_t>(dim), 0.0);
  const double spread = std::sqrt(t);
  struct Visitor {
    int dim;
    double spread;
    int res;
    const Point& origin;
    std::vector<SearchCandidate>& out;

    void operator()(const Constant&) const { out.push_back({origin, 1.0}); }

    void operator()(const GaussianBump& s) const {
      out.push_back({s.center, s.width});
      Point a = s.center, b = s.center;
      a[0] -= 3.0 * s.width;
      b[0] += 3.0 * s.width;
      add_line(out, a, b, res);
    }

    void operator()(const PeriodicStripe& s) const {
      add_line(out, unit(dim, 0, -0.5 * s.period), unit(dim, 0, 0.5 * s.period), res);
    }

    void operator()(const RadialRings& s) const {
      const double outer = s.radii.back() + s.smoothing_width + 2.0 * spread;
      add_line(out, origin, unit(dim, 0, outer), res);
      double prev = 0.0;
      for (std::size_t i = 0; i < s.radii.size(); ++i) {
        if (i % 2 == 0) {
          const double mid = 0.5 * (prev + s.radii[i]);
          out.push_back({unit(dim, 0, mid), std::max(0.5 * (s.radii[i] - prev), s.smoothing_width)});
        }
        prev = s.radii[i];
      }
      if (s.radii.size() % 2 == 0) {
        const double far = s.radii.back() + s.smoothing_width + 10.0 * (1.0 + spread);
        out.push_back({unit(dim, 0, far), 1.0 + spread});
      }
    }

    void operator()(const ConicSector& s) const {
      // Along the axis: the farther inside the cone, the closer the
      // semigroup gets to the amplitude.
      const double start = s.inner_radius + s.smoothing_width + 1.0;
      const double stop = start * 1e4 * (1.0 + spread);
      const int k = std::max(res, 2);
      for (int j = 0; j < k; ++j) {
        const double d = start * std::pow(stop / start, static_cast<double>(j) / (k - 1));
        Point p(s.axis);
        for (double& c : p) c *= d;
        out.push_back({std::move(p), 0.1 * d});
      }
    }

    void operator()(const MaxOf& s) const {
      for (const Shape& part : s.parts) std::visit(*this, part.value);
    }
  };
  std::visit(Visitor{dim, spread, res, origin, out}, shape.value);
}

double golden_max(const std::function<double(double)>& f, double a, double b, double& best_value) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  const double tol = 1e-6 * (b - a);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc >= fd) {
    best_value = fc;
    return c;
  }
  best_value = fd;
  return d;
}

}  // namespace

double heat_kernel(std::span<const double> x, std::span<const double> y, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("heat_kernel: t must be > 0");
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("heat_kernel: dimension mismatch");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    d2 += d * d;
  }
  const double n = static_cast<double>(x.size());
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(-d2 / (4.0 * t));
}

void QuadratureConfig::validate(int dimension) const {
  if (nodes_per_axis < 8 || nodes_per_axis > 512)
    throw std::invalid_argument("quadrature: nodes_per_axis must lie in [8, 512]");
  if (search_resolution < 1) throw std::invalid_argument("quadrature: empty search grid");
  if (refinement_rounds < 0) throw std::invalid_argument("quadrature: refinement_rounds must be >= 0");
  if (box) {
    if (static_cast<int>(box->lower.size()) != dimension || static_cast<int>(box->upper.size()) != dimension)
      throw std::invalid_argument("quadrature: search box dimension mismatch");
    for (int i = 0; i < dimension; ++i)
      if (!(box->lower[i] <= box->upper[i])) throw std::invalid_argument("quadrature: empty search box");
  }
}

double gaussian_average(int dim, std::span<const double> z, double t, const GaussHermiteRule& rule,
                        const std::function<double(std::span<const double>)>& f) {
  if (!(t > 0.0)) throw std::invalid_argument("gaussian_average: t must be > 0");
  if (static_cast<int>(z.size()) != dim || dim < 1 || dim > kMaxDimension)
    throw std::invalid_argument("gaussian_average: dimension mismatch");
  const std::size_t order = rule.nodes.size();
  const std::size_t total = tensor_size(dim, order);
  thread_local std::vector<double> weights, values;
  weights.resize(total);
  values.resize(total);
  const double scale = 2.0 * std::sqrt(t);
  double y[kMaxDimension];
  std::size_t idx[kMaxDimension] = {0, 0, 0};
  for (std::size_t k = 0; k < total; ++k) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      y[d] = z[d] + scale * rule.nodes[idx[d]];
      w *= rule.weights[idx[d]];
    }
    weights[k] = w;
    values[k] = f(std::span<const double>(y, static_cast<std::size_t>(dim)));
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < order) break;
      idx[d] = 0;
    }
  }
  return simd::weighted_sum(weights, values);
}

double semigroup_eval(const InitialDatum& datum, std::span<const double> z, double t,
                      const QuadratureConfig& quad) {
  if (!(t > 0.0)) throw std::invalid_argument("semigroup_eval: t must be > 0");
  quad.validate(datum.dimension());
  const GaussHermiteRule& rule = gauss_hermite(quad.nodes_per_axis);
  return gaussian_average(datum.dimension(), z, t, rule,
                          [&](std::span<const double> y) { return datum.eval_unchecked(y.data()); });
}

std::vector<SearchCandidate> sup_candidates(const InitialDatum& datum, double t, const QuadratureConfig& quad) {
  quad.validate(datum.dimension());
  const int dim = datum.dimension();
  std::vector<SearchCandidate> out;
  if (quad.box) {
    const int res = quad.search_resolution;
    const std::size_t total = tensor_size(dim, static_cast<std::size_t>(res));
    double spacing = 0.0;
    for (int d = 0; d < dim; ++d)
      spacing = std::max(spacing, (quad.box->upper[d] - quad.box->lower[d]) / std::max(res - 1, 1));
    std::size_t idx[kMaxDimension] = {0, 0, 0};
    for (std::size_t k = 0; k < total; ++k) {
      Point p(static_cast<std::size_t>(dim));
      for (int d = 0; d < dim; ++d) {
        const double s = res == 1 ? 0.5 : static_cast<double>(idx[d]) / (res - 1);
        p[d] = quad.box->lower[d] + s * (quad.box->upper[d] - quad.box->lower[d]);
      }
      out.push_back({std::move(p), spacing > 0.0 ? spacing : 1.0});
      for (int d = dim - 1; d >= 0; --d) {
        if (++idx[d] < static_cast<std::size_t>(res)) break;
        idx[d] = 0;
      }
    }
  } else {
    shape_candidates(datum.shape(), dim, t, quad.search_resolution, out);
  }
  if (out.empty()) throw std::invalid_argument("semigroup_sup: empty search grid");
  return out;
}

SupResult semigroup_sup(const InitialDatum& datum, double t, const QuadratureConfig& quad) {
  if (!(t > 0.0)) throw std::invalid_argument("semigroup_sup: t must be > 0");
  const std::vector<SearchCandidate> candidates = sup_candidates(datum, t, quad);
  const int dim = datum.dimension();

  std::vector<double> values(candidates.size());
  parallel_for(candidates.size(), quad.workers,
               [&](std::size_t i) { values[i] = semigroup_eval(datum, candidates[i].center, t, quad); });

  SupResult result;
  result.evaluations = candidates.size();
  result.region.lower = candidates[0].center;
  result.region.upper = candidates[0].center;
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (int d = 0; d < dim; ++d) {
      result.region.lower[d] = std::min(result.region.lower[d], candidates[i].center[d]);
      result.region.upper[d] = std::max(result.region.upper[d], candidates[i].center[d]);
    }
    if (values[i] > values[best] ||
        (values[i] == values[best] && lexicographically_less(candidates[i].center, candidates[best].center)))
      best = i;
  }

  Point center = candidates[best].center;
  double value = values[best];
  double step = candidates[best].scale;
  for (int round = 0; round < quad.refinement_rounds; ++round) {
    for (int axis = 0; axis < dim; ++axis) {
      const double base = center[axis];
      Point probe = center;
      auto along = [&](double s) {
        probe[axis] = base + s;
        ++result.evaluations;
        return semigroup_eval(datum, probe, t, quad);
      };
      double found = 0.0;
      const double s = golden_max(along, -step, step, found);
      if (found > value) {
        value = found;
        center[axis] = base + s;
      }
    }
    step *= 0.5;
  }
  result.value = value;
  result.center = std::move(center);
  return result;
}

KernelCheckReport kernel_selfcheck(int dimension, double t, double s, const KernelCheckOptions& options) {
  if (dimension < 1 || dimension > kMaxDimension) throw std::invalid_argument("kernel_selfcheck: bad dimension");
  if (!(t > 0.0) || !(s > 0.0)) throw std::invalid_argument("kernel_selfcheck: t and s must be > 0");
  const GaussHermiteRule& rule = gauss_hermite(options.nodes_per_axis);
  const auto n = static_cast<std::size_t>(dimension);

  // Dyadic points k/64, |k| <= 128: sums and differences are exact, so the
  // translation identity is tested without rounding in the shift itself.
  std::uint64_t counter = 0;
  auto dyadic_point = [&] {
    Point p(n);
    for (double& c : p) {
      const auto k = static_cast<std::int64_t>(counter_hash(options.seed, counter++, 7) % 257) - 128;
      c = static_cast<double>(k) / 64.0;
    }
    return p;
  };

  KernelCheckReport report;
  report.dimension = dimension;
  const double pi_n2 = std::pow(std::numbers::pi, 0.5 * dimension);
  const double jac = std::pow(2.0 * std::sqrt(t), static_cast<double>(dimension));
  for (int trial = 0; trial < options.trials; ++trial) {
    const Point x = dyadic_point();
    const Point y = dyadic_point();
    const Point z = dyadic_point();
    const Point h = dyadic_point();

    report.symmetry_residual =
        std::max(report.symmetry_residual, std::fabs(heat_kernel(x, y, t) - heat_kernel(y, x, t)));

    Point xh(n), yh(n);
    for (std::size_t i = 0; i < n; ++i) {
      xh[i] = x[i] + h[i];
      yh[i] = y[i] + h[i];
    }
    report.translation_residual =
        std::max(report.translation_residual, std::fabs(heat_kernel(xh, yh, t) - heat_kernel(x, y, t)));

    // ∫ g(x,y,t) g(y,z,s) dy: the quadrature weight carries g(x,·,t).
    const double composed = gaussian_average(dimension, x, t, rule,
                                             [&](std::span<const double> yy) { return heat_kernel(yy, z, s); });
    report.semigroup_residual =
        std::max(report.semigroup_residual, std::fabs(composed - heat_kernel(x, z, s + t)));

    // ∫ g(x,y,t) dy with the kernel evaluated explicitly: divide out the
    // Hermite weight e^{-|ξ|²} and apply the Jacobian of y = x + 2√t ξ.
    const double mass = gaussian_average(dimension, x, t, rule, [&](std::span<const double> yy) {
      double xi2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = (yy[i] - x[i]) / (2.0 * std::sqrt(t));
        xi2 += xi * xi;
      }
      return heat_kernel(x, yy, t) * std::exp(xi2) * jac * pi_n2;
    });
    report.conservation_residual = std::max(report.conservation_residual, std::fabs(mass - 1.0));
  }
  return report;
}

}  // namespace lifespan
