#include "lifespan/bounds.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lifespan/parallel.hpp"

namespace lifespan {

namespace {

constexpr double kRelSlack = 1e-12;

double ode_time(double level, double p) { return std::pow(level, 1.0 - p) / (p - 1.0); }

std::string fmt(double v) {
  char buf[32];
  auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

const ConicSector* find_cone(const Shape& shape) {
  if (const auto* c = std::get_if<ConicSector>(&shape.value)) return c;
  if (const auto* m = std::get_if<MaxOf>(&shape.value)) {
    for (const Shape& part : m->parts)
      if (const ConicSector* c = find_cone(part)) return c;
  }
  return nullptr;
}

void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be > 1");
}

GridBound grid_min(const DensityReport& report, double p, bool use_bar) {
  check_p(p);
  GridBound out;
  for (const DensityEstimate& e : report.estimates) {
    const double d = use_bar ? e.d_bar : e.d_origin;
    const std::optional<double> b = upper_bound_thm2(e.alpha, d, p);
    if (b && (!out.value || *b < *out.value)) {
      out.value = b;
      out.alpha = e.alpha;
      out.density = d;
    }
  }
  return out;
}

}  // namespace

ProblemSpec::ProblemSpec(InitialDatum d, double exponent) : datum(std::move(d)), p(exponent) { check_p(p); }

std::optional<double> upper_bound_thm2(double alpha, double d_bar, double p) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("thm2 bound: alpha must be > 0");
  if (!(d_bar >= 0.0 && d_bar <= 1.0)) throw std::invalid_argument("thm2 bound: density must lie in [0, 1]");
  check_p(p);
  if (d_bar == 0.0) return std::nullopt;
  return ode_time(alpha * d_bar, p);
}

GridBound upper_bound_thm1(const DensityReport& report, double p) { return grid_min(report, p, false); }

GridBound best_thm2(const DensityReport& report, double p) { return grid_min(report, p, true); }

double lower_bound(const ProblemSpec& spec) { return ode_time(spec.datum.sup_norm(), spec.p); }

WeisslerResult weissler_bound(const ProblemSpec& spec, const QuadratureConfig& quad, const WeisslerOptions& options) {
  if (!(options.horizon > 0.0) || !(options.growth > 1.0) || !(options.rel_tol > 0.0))
    throw std::invalid_argument("weissler: need horizon > 0, growth > 1 and rel_tol > 0");
  WeisslerResult result;
  auto gap = [&](double t) {
    const double s = semigroup_sup(spec.datum, t, quad).value;
    ++result.sup_evaluations;
    if (!(s > 0.0)) throw std::runtime_error("weissler: semigroup supremum vanished at t = " + fmt(t));
    return ode_time(s, spec.p) - t;
  };

  // S(t) <= ‖φ‖∞ forces the gap to be non-negative below the lower bound.
  const double start = lower_bound(spec);
  if (start > options.horizon) return result;
  if (gap(start) <= 0.0) {
    result.crossing = start;
    return result;
  }
  double lo = start;
  double hi = start;
  bool bracketed = false;
  while (hi < options.horizon) {
    hi = std::min(lo * options.growth, options.horizon);
    if (gap(hi) <= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed) return result;
  while (hi - lo > options.rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  result.crossing = hi;
  return result;
}

bool has_conic_part(const InitialDatum& datum) { return find_cone(datum.shape()) != nullptr; }

ConeProbe default_cone_probe(const InitialDatum& datum) {
  ConeProbe probe;
  const int dim = datum.dimension();
  double start = 10.0;
  if (const ConicSector* cone = find_cone(datum.shape())) {
    probe.axis = cone->axis;
    probe.half_width = 0.5 * cone->half_width;
    start = std::max(start, 10.0 * (cone->inner_radius + cone->smoothing_width));
  } else {
    probe.axis.assign(static_cast<std::size_t>(dim), 0.0);
    probe.axis[0] = 1.0;
    probe.half_width = 0.5;
  }
  probe.radii = geometric_radii(start, start * 1e5, 32);
  return probe;
}

std::vector<Point> cone_directions(int dimension, const ConeProbe& probe) {
  if (probe.directions < 1) throw std::invalid_argument("yamauchi: empty direction sample");
  std::vector<Point> out;
  if (dimension == 1) {
    out.push_back({1.0});
    out.push_back({-1.0});
    return out;
  }
  if (static_cast<int>(probe.axis.size()) != dimension) throw std::invalid_argument("yamauchi: axis dimension mismatch");
  if (!(probe.half_width > 0.0 && probe.half_width < std::sqrt(2.0)))
    throw std::invalid_argument("yamauchi: half_width must lie in (0, sqrt 2)");
  const double half_angle = 2.0 * std::asin(0.5 * probe.half_width);
  const int k = probe.directions;
  if (dimension == 2) {
    const double base = std::atan2(probe.axis[1], probe.axis[0]);
    for (int i = 0; i < k; ++i) {
      const double a = base + half_angle * (2.0 * (i + 0.5) / k - 1.0);
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  // n = 3: seeded uniform sample of the spherical cap around the axis.
  const Point& e = probe.axis;
  Point u = std::fabs(e[0]) < 0.9 ? Point{1.0, 0.0, 0.0} : Point{0.0, 1.0, 0.0};
  const double dot = u[0] * e[0] + u[1] * e[1] + u[2] * e[2];
  for (int i = 0; i < 3; ++i) u[i] -= dot * e[i];
  const double un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  for (double& c : u) c /= un;
  const Point v{e[1] * u[2] - e[2] * u[1], e[2] * u[0] - e[0] * u[2], e[0] * u[1] - e[1] * u[0]};
  const double cos_min = std::cos(half_angle);
  for (int i = 0; i < k; ++i) {
    // Keep strictly inside the open cap.
    const double c = cos_min + (1.0 - cos_min) * (0.5 + 0.5 * counter_uniform(probe.seed, i, 0));
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double az = 2.0 * std::numbers::pi * counter_uniform(probe.seed, i, 1);
    Point d(3);
    for (int j = 0; j < 3; ++j) d[j] = c * e[j] + s * (std::cos(az) * u[j] + std::sin(az) * v[j]);
    out.push_back(std::move(d));
  }
  return out;
}

YamauchiResult yamauchi_bound(const ProblemSpec& spec, const ConeProbe& probe) {
  if (probe.radii.empty()) throw std::invalid_argument("yamauchi: radial probe grid is empty");
  for (std::size_t i = 1; i < probe.radii.size(); ++i)
    if (!(probe.radii[i] > probe.radii[i - 1])) throw std::invalid_argument("yamauchi: radii must increase");
  const int dim = spec.datum.dimension();
  const std::vector<Point> dirs = cone_directions(dim, probe);
  if (dirs.empty()) throw std::invalid_argument("yamauchi: empty direction sample");
  const std::size_t top = top_quartile_begin(probe.radii.size());

  auto liminf_proxy = [&](const Point& dir) {
    double m = spec.datum.sup_norm();
    Point x(dir.size());
    for (std::size_t ri = top; ri < probe.radii.size(); ++ri) {
      for (std::size_t i = 0; i < dir.size(); ++i) x[i] = probe.radii[ri] * dir[i];
      m = std::min(m, spec.datum.eval(x));
    }
    return m;
  };

  YamauchiResult result;
  if (dim == 1) {
    result.essinf = std::max(liminf_proxy(dirs[0]), liminf_proxy(dirs[1]));
  } else {
    result.essinf = spec.datum.sup_norm();
    for (const Point& d : dirs) result.essinf = std::min(result.essinf, liminf_proxy(d));
  }
  if (result.essinf > 0.0) result.value = ode_time(result.essinf, spec.p);
  return result;
}

bool LifespanBounds::consistent() const {
  return std::all_of(flags.begin(), flags.end(), [](const ConsistencyFlag& f) { return f.pass; });
}

std::vector<const BoundRow*> LifespanBounds::rows() const { return {&lower, &thm1, &thm2, &yamauchi, &weissler}; }

std::vector<const BoundRow*> LifespanBounds::available_uppers() const {
  std::vector<const BoundRow*> out;
  for (const BoundRow* r : {&thm1, &thm2, &yamauchi, &weissler})
    if (r->value) out.push_back(r);
  return out;
}

LifespanBounds bounds_report(const ProblemSpec& spec, const DensityReport& density, const QuadratureConfig& quad,
                             const BoundsOptions& options) {
  LifespanBounds b;
  const double p = spec.p;
  const double sup = spec.datum.sup_norm();

  b.lower = {"lower", lower_bound(spec), "sup_norm=" + fmt(sup) + ";p=" + fmt(p), ""};

  const GridBound t1 = upper_bound_thm1(density, p);
  b.thm1 = {"thm1", t1.value, "alpha=" + fmt(t1.alpha) + ";D=" + fmt(t1.density) + ";alphas=" +
                                  std::to_string(density.estimates.size()),
            t1.value ? "" : "all origin densities zero"};

  const GridBound t2 = best_thm2(density, p);
  std::string t2_params = "alpha=" + fmt(t2.alpha) + ";D_bar=" + fmt(t2.density);
  if (t2.value) {
    if (const DensityEstimate* e = density.find(t2.alpha)) t2_params += ";r=" + fmt(e->d_bar_radius);
  }
  b.thm2 = {"thm2", t2.value, t2_params, t2.value ? "" : "all centre-sup densities zero"};

  b.yamauchi = {"yamauchi", std::nullopt, "", "not applicable: no conic probe"};
  std::optional<YamauchiResult> yam;
  if (options.cone || has_conic_part(spec.datum)) {
    const ConeProbe probe = options.cone ? *options.cone : default_cone_probe(spec.datum);
    yam = yamauchi_bound(spec, probe);
    b.yamauchi.value = yam->value;
    b.yamauchi.parameters = "A=" + fmt(yam->essinf) + ";half_width=" + fmt(probe.half_width) +
                            ";directions=" + std::to_string(probe.directions);
    b.yamauchi.note = yam->value ? "" : "liminf along probed rays is zero";
  }

  QuadratureConfig q = quad;
  if (q.workers == 1 && options.workers != 1) q.workers = options.workers;
  const WeisslerResult w = weissler_bound(spec, q, options.weissler);
  b.weissler = {"weissler", w.crossing, "horizon=" + fmt(options.weissler.horizon) + ";rel_tol=" +
                                            fmt(options.weissler.rel_tol),
                w.crossing ? "" : "no crossing within horizon"};

  for (const BoundRow* upper : b.available_uppers()) {
    const bool ok = *b.lower.value <= *upper->value * (1.0 + kRelSlack);
    b.flags.push_back({"lower_le_" + upper->name, ok, fmt(*b.lower.value) + " <= " + fmt(*upper->value)});
  }
  if (b.thm1.value && b.thm2.value) {
    const bool ok = *b.thm2.value <= *b.thm1.value * (1.0 + kRelSlack);
    b.flags.push_back({"thm2_le_thm1", ok, fmt(*b.thm2.value) + " <= " + fmt(*b.thm1.value)});
  }
  if (yam && yam->value && has_conic_part(spec.datum)) {
    // The cone infimum A gives D̄(A - ε) = 1 for every ε > 0.
    const double alpha = 0.99 * yam->essinf;
    const double formula = *upper_bound_thm2(alpha, 1.0, p);
    b.flags.push_back({"thm2_at_A_le_yamauchi", formula <= 1.05 * *yam->value,
                       fmt(formula) + " <= 1.05 * " + fmt(*yam->value)});
    double d_bar = 0.0;
    for (std::size_t ri = top_quartile_begin(density.radii.size()); ri < density.radii.size(); ++ri)
      d_bar = std::max(d_bar, auto_center_search(spec.datum, alpha, density.radii[ri], density.estimator,
                                                 options.workers)
                                  .density);
    b.flags.push_back({"cone_density_at_A", d_bar >= 0.95, "D_bar(" + fmt(alpha) + ")=" + fmt(d_bar) + " >= 0.95"});
  }
  return b;
}

}  // namespace lifespan
