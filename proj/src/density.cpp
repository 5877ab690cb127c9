#include "lifespan/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lifespan/parallel.hpp"

namespace lifespan {

namespace {

constexpr std::size_t kChunk = 16384;
constexpr std::uint64_t kScatterStream = 0x5CA77E5ULL;

bool lexicographically_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void check_ball(const InitialDatum& datum, std::span<const double> center, double r) {
  if (static_cast<int>(center.size()) != datum.dimension())
    throw std::invalid_argument("density: centre dimension mismatch");
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("density: radius must be > 0");
}

// Point set filling the unit ball, indexed so that any subrange can be
// produced independently: Monte Carlo samples keyed by (seed, index), or
// the cell centres of a lattice over [-1, 1]^n (cells outside the ball are
// skipped).
class UnitBallPoints {
 public:
  UnitBallPoints(int dim, const Estimator& estimator) : dim_(dim) {
    if (const auto* mc = std::get_if<MonteCarlo>(&estimator)) {
      monte_carlo_ = true;
      count_ = mc->samples;
      offsets_.resize(count_ * static_cast<std::size_t>(dim));
      const std::uint64_t seed = mc->seed;
      for (std::size_t i = 0; i < count_; ++i) sample(seed, i, offsets_.data() + i * dim);
    } else {
      const auto& grid = std::get<GridOracle>(estimator);
      resolution_ = grid.resolution;
      count_ = 1;
      for (int d = 0; d < dim; ++d) count_ *= static_cast<std::size_t>(resolution_);
    }
  }

  std::size_t index_count() const { return count_; }

  // Writes the offset for index i; false when the lattice cell lies outside the ball.
  bool offset(std::size_t i, double* v) const {
    if (monte_carlo_) {
      for (int d = 0; d < dim_; ++d) v[d] = offsets_[i * dim_ + d];
      return true;
    }
    double norm2 = 0.0;
    std::size_t rem = i;
    for (int d = dim_ - 1; d >= 0; --d) {
      const auto j = rem % static_cast<std::size_t>(resolution_);
      rem /= static_cast<std::size_t>(resolution_);
      v[d] = (static_cast<double>(j) + 0.5) * 2.0 / resolution_ - 1.0;
      norm2 += v[d] * v[d];
    }
    return norm2 <= 1.0;
  }

 private:
  void sample(std::uint64_t seed, std::size_t i, double* v) const {
    const double u0 = counter_uniform(seed, i, 0);
    const double u1 = counter_uniform(seed, i, 1);
    switch (dim_) {
      case 1:
        v[0] = (u0 < 0.5 ? -1.0 : 1.0) * u1;
        break;
      case 2: {
        const double theta = 2.0 * std::numbers::pi * u0;
        const double rho = std::sqrt(u1);
        v[0] = rho * std::cos(theta);
        v[1] = rho * std::sin(theta);
        break;
      }
      default: {
        const double z = 1.0 - 2.0 * u0;
        const double phi = 2.0 * std::numbers::pi * u1;
        const double rho = std::cbrt(counter_uniform(seed, i, 2));
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        v[0] = rho * s * std::cos(phi);
        v[1] = rho * s * std::sin(phi);
        v[2] = rho * z;
        break;
      }
    }
  }

  int dim_;
  bool monte_carlo_ = false;
  int resolution_ = 0;
  std::size_t count_ = 0;
  std::vector<double> offsets_;
};

struct LevelCounts {
  std::vector<std::uint64_t> hits;  // per threshold
  std::uint64_t total = 0;
};

LevelCounts count_levels(const InitialDatum& datum, std::span<const double> alphas, std::span<const double> center,
                         double r, const UnitBallPoints& points, int workers) {
  const int dim = datum.dimension();
  const std::size_t chunks = (points.index_count() + kChunk - 1) / kChunk;
  std::vector<LevelCounts> partial(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    LevelCounts& out = partial[c];
    out.hits.assign(alphas.size(), 0);
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(begin + kChunk, points.index_count());
    double v[kMaxDimension];
    double x[kMaxDimension];
    for (std::size_t i = begin; i < end; ++i) {
      if (!points.offset(i, v)) continue;
      for (int d = 0; d < dim; ++d) x[d] = center[d] + r * v[d];
      const double value = datum.eval_unchecked(x);
      ++out.total;
      for (std::size_t a = 0; a < alphas.size(); ++a) out.hits[a] += value >= alphas[a] ? 1 : 0;
    }
  });
  LevelCounts sum;
  sum.hits.assign(alphas.size(), 0);
  for (const LevelCounts& part : partial) {
    sum.total += part.total;
    for (std::size_t a = 0; a < alphas.size(); ++a) sum.hits[a] += part.hits[a];
  }
  return sum;
}

double fraction(std::uint64_t hits, std::uint64_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

void ray_candidates(const Shape& shape, int dim, double r, std::vector<Point>& out) {
  struct Visitor {
    int dim;
    double r;
    std::vector<Point>& out;

    Point on_axis0(double d) const {
      Point p(static_cast<std::size_t>(dim), 0.0);
      p[0] = d;
      return p;
    }

    void operator()(const Constant&) const {}
    void operator()(const GaussianBump& s) const { out.push_back(s.center); }
    void operator()(const PeriodicStripe& s) const { out.push_back(on_axis0(0.5 * s.period)); }
    void operator()(const RadialRings& s) const {
      double prev = 0.0;
      for (std::size_t i = 0; i < s.radii.size(); ++i) {
        if (i % 2 == 0) out.push_back(on_axis0(0.5 * (prev + s.radii[i])));
        prev = s.radii[i];
      }
      if (s.radii.size() % 2 == 0)
        for (double lambda : {1.0, 2.0}) out.push_back(on_axis0(s.radii.back() + s.smoothing_width + lambda * r));
    }
    void operator()(const ConicSector& s) const {
      // A ball of radius r sits inside the cone once its centre is at
      // distance r / sin(half-angle) along the axis, beyond the inner radius.
      const double half_angle = 2.0 * std::asin(0.5 * s.half_width);
      const double sin_half = dim == 1 ? 1.0 : std::sin(std::min(half_angle, std::numbers::pi / 2));
      const double base = s.inner_radius + s.smoothing_width;
      for (double lambda : {1.0, 1.1, 1.25, 1.5, 2.0, 3.0, 5.0}) {
        Point p(s.axis);
        const double d = base + lambda * r / sin_half;
        for (double& c : p) c *= d;
        out.push_back(std::move(p));
      }
    }
    void operator()(const MaxOf& s) const {
      for (const Shape& part : s.parts) std::visit(*this, part.value);
    }
  };
  std::visit(Visitor{dim, r, out}, shape.value);
}

std::uint64_t estimator_seed(const Estimator& e) {
  if (const auto* mc = std::get_if<MonteCarlo>(&e)) return mc->seed;
  return 0;
}

struct Best {
  std::size_t index = 0;
  double density = -1.0;
};

void consider(Best& best, const std::vector<Point>& candidates, std::size_t i, double density) {
  if (density > best.density ||
      (density == best.density && lexicographically_less(candidates[i], candidates[best.index]))) {
    best.index = i;
    best.density = density;
  }
}

}  // namespace

std::string estimator_name(const Estimator& e) {
  return std::holds_alternative<MonteCarlo>(e) ? "monte_carlo" : "grid_oracle";
}

std::size_t estimator_size(const Estimator& e) {
  if (const auto* mc = std::get_if<MonteCarlo>(&e)) return mc->samples;
  return static_cast<std::size_t>(std::get<GridOracle>(e).resolution);
}

const DensityEstimate* DensityReport::find(double alpha) const {
  for (const DensityEstimate& e : estimates)
    if (e.alpha == alpha) return &e;
  return nullptr;
}

void DensityRequest::validate() const {
  if (radii.empty()) throw std::invalid_argument("density request: radius grid is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
      throw std::invalid_argument("density request: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw std::invalid_argument("density request: radii must increase");
  }
  for (double a : alphas)
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("density request: alpha must be > 0");
  if (const auto* mc = std::get_if<MonteCarlo>(&estimator)) {
    if (mc->samples < 10000) throw std::invalid_argument("density request: Monte Carlo needs >= 10^4 samples");
  } else if (std::get<GridOracle>(estimator).resolution < 64) {
    throw std::invalid_argument("density request: grid oracle needs resolution >= 64");
  }
  if (workers < 0) throw std::invalid_argument("density request: workers must be >= 0");
}

double unit_ball_volume(int dimension) {
  if (dimension < 1) throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
  const double n = dimension;
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

std::vector<double> default_alpha_grid(double sup_norm, int count) {
  if (!(sup_norm > 0.0)) throw std::invalid_argument("alpha grid: sup norm must be > 0");
  if (count < 1) throw std::invalid_argument("alpha grid: count must be >= 1");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double expo = count == 1 ? 0.0 : -2.0 * (1.0 - static_cast<double>(i) / (count - 1));
    out.push_back(i + 1 == count ? sup_norm : sup_norm * std::pow(10.0, expo));
  }
  return out;
}

std::vector<double> geometric_radii(double r_min, double r_max, int count) {
  if (!(r_min > 0.0) || !(r_max >= r_min) || count < 1)
    throw std::invalid_argument("geometric_radii: need 0 < r_min <= r_max and count >= 1");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    if (count == 1) {
      out.push_back(r_max);
      break;
    }
    const double s = static_cast<double>(i) / (count - 1);
    out.push_back(i + 1 == count ? r_max : r_min * std::pow(r_max / r_min, s));
  }
  return out;
}

std::vector<double> snap_radii_to_rings(const InitialDatum& datum, std::span<const double> radii) {
  const auto* rings = std::get_if<RadialRings>(&datum.shape().value);
  std::vector<double> out(radii.begin(), radii.end());
  if (!rings) return out;
  std::vector<double> outer;
  for (std::size_t i = 0; i < rings->radii.size(); i += 2) outer.push_back(rings->radii[i]);
  for (double& r : out) {
    double best = outer.front();
    for (double o : outer)
      if (std::fabs(std::log(o / r)) < std::fabs(std::log(best / r))) best = o;
    r = best;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t top_quartile_begin(std::size_t n) { return n - (n + 3) / 4; }

double density_in_ball(const InitialDatum& datum, double alpha, std::span<const double> center, double r,
                       const Estimator& estimator, int workers) {
  check_ball(datum, center, r);
  if (!(alpha > 0.0)) throw std::invalid_argument("density: alpha must be > 0");
  const UnitBallPoints points(datum.dimension(), estimator);
  const double alphas[1] = {alpha};
  const LevelCounts c = count_levels(datum, alphas, center, r, points, workers);
  return fraction(c.hits[0], c.total);
}

std::vector<Point> auto_center_candidates(const InitialDatum& datum, double r, std::uint64_t seed, int scatter) {
  const int dim = datum.dimension();
  std::vector<Point> out;
  out.emplace_back(static_cast<std::size_t>(dim), 0.0);
  ray_candidates(datum.shape(), dim, r, out);
  const double extent = 2.0 * r;
  for (int k = 0; k < scatter; ++k) {
    Point p(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d)
      p[d] = extent * (2.0 * counter_uniform(seed ^ kScatterStream, static_cast<std::uint64_t>(k), d) - 1.0);
    out.push_back(std::move(p));
  }
  return out;
}

CenterResult auto_center_search(const InitialDatum& datum, double alpha, double r, const Estimator& estimator,
                                int workers, int scatter) {
  if (!(alpha > 0.0)) throw std::invalid_argument("density: alpha must be > 0");
  if (!(r > 0.0)) throw std::invalid_argument("density: radius must be > 0");
  const std::vector<Point> candidates = auto_center_candidates(datum, r, estimator_seed(estimator), scatter);
  const UnitBallPoints points(datum.dimension(), estimator);
  const double alphas[1] = {alpha};
  Best best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const LevelCounts c = count_levels(datum, alphas, candidates[i], r, points, workers);
    consider(best, candidates, i, fraction(c.hits[0], c.total));
  }
  return {candidates[best.index], best.density};
}

DensityReport density_profile(const InitialDatum& datum, const DensityRequest& request) {
  request.validate();
  const int dim = datum.dimension();
  DensityReport report;
  report.dimension = dim;
  report.estimator = request.estimator;
  report.radii = request.snap_to_rings ? snap_radii_to_rings(datum, request.radii) : request.radii;
  const std::vector<double> alphas =
      request.alphas.empty() ? default_alpha_grid(datum.sup_norm()) : request.alphas;

  const UnitBallPoints points(dim, request.estimator);
  const Point origin(static_cast<std::size_t>(dim), 0.0);
  const std::uint64_t seed = estimator_seed(request.estimator);

  // samples[r * |alphas| + a]
  report.samples.resize(report.radii.size() * alphas.size());
  for (std::size_t ri = 0; ri < report.radii.size(); ++ri) {
    const double r = report.radii[ri];
    std::vector<Point> candidates;
    if (std::holds_alternative<AutoSearch>(request.centers)) {
      candidates = auto_center_candidates(datum, r, seed, std::get<AutoSearch>(request.centers).scatter);
    } else {
      candidates.push_back(origin);
      if (const auto* explicit_list = std::get_if<ExplicitCenters>(&request.centers)) {
        for (const Point& p : explicit_list->points) {
          if (static_cast<int>(p.size()) != dim) throw std::invalid_argument("density: centre dimension mismatch");
          candidates.push_back(p);
        }
      }
    }

    std::vector<Best> best(alphas.size());
    std::vector<double> origin_density(alphas.size(), 0.0);
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      const LevelCounts c = count_levels(datum, alphas, candidates[ci], r, points, request.workers);
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double f = fraction(c.hits[a], c.total);
        if (ci == 0) origin_density[a] = f;
        consider(best[a], candidates, ci, f);
      }
    }
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      DensitySample& s = report.samples[ri * alphas.size() + a];
      s.alpha = alphas[a];
      s.radius = r;
      s.origin_density = origin_density[a];
      s.best_center = candidates[best[a].index];
      s.best_density = best[a].density;
    }
  }

  const std::size_t top = top_quartile_begin(report.radii.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    DensityEstimate e;
    e.alpha = alphas[a];
    bool first = true;
    for (std::size_t ri = top; ri < report.radii.size(); ++ri) {
      const DensitySample& s = report.samples[ri * alphas.size() + a];
      if (first || s.origin_density > e.d_origin) {
        e.d_origin = s.origin_density;
        e.d_origin_radius = s.radius;
      }
      if (first || s.best_density > e.d_bar) {
        e.d_bar = s.best_density;
        e.d_bar_radius = s.radius;
        e.d_bar_center = s.best_center;
      }
      first = false;
    }
    report.estimates.push_back(std::move(e));
  }
  return report;
}

double lattice_fraction(int dimension, std::span<const double> center, double r, int resolution,
                        const std::function<bool(std::span<const double>)>& member, int workers) {
  if (dimension < 1 || dimension > kMaxDimension || static_cast<int>(center.size()) != dimension)
    throw std::invalid_argument("lattice: dimension mismatch");
  if (resolution < 64) throw std::invalid_argument("lattice: resolution must be >= 64");
  if (!(r > 0.0)) throw std::invalid_argument("lattice: radius must be > 0");
  const double h = 2.0 / resolution;
  const std::size_t res = static_cast<std::size_t>(resolution);
  // One slab per index along the first axis.
  std::vector<std::uint64_t> in_ball(res, 0), in_set(res, 0);
  parallel_for(res, workers, [&](std::size_t i0) {
    double x[kMaxDimension];
    double off[kMaxDimension];
    // Offsets in units of r, so that the in-ball test cannot overflow.
    off[0] = -1.0 + (static_cast<double>(i0) + 0.5) * h;
    const std::size_t inner = dimension == 1 ? 1 : (dimension == 2 ? res : res * res);
    for (std::size_t k = 0; k < inner; ++k) {
      if (dimension >= 2) off[1] = -1.0 + (static_cast<double>(dimension == 2 ? k : k / res) + 0.5) * h;
      if (dimension == 3) off[2] = -1.0 + (static_cast<double>(k % res) + 0.5) * h;
      double norm2 = 0.0;
      for (int d = 0; d < dimension; ++d) norm2 += off[d] * off[d];
      if (norm2 > 1.0) continue;
      for (int d = 0; d < dimension; ++d) x[d] = center[d] + r * off[d];
      ++in_ball[i0];
      if (member(std::span<const double>(x, static_cast<std::size_t>(dimension)))) ++in_set[i0];
    }
  });
  std::uint64_t ball = 0, set = 0;
  for (std::size_t i = 0; i < res; ++i) {
    ball += in_ball[i];
    set += in_set[i];
  }
  return fraction(set, ball);
}

double oracle_density(const InitialDatum& datum, double alpha, std::span<const double> center, double r,
                      int resolution, int workers) {
  check_ball(datum, center, r);
  return lattice_fraction(
      datum.dimension(), center, r, resolution,
      [&](std::span<const double> x) { return datum.eval_unchecked(x.data()) >= alpha; }, workers);
}

}  // namespace lifespan
