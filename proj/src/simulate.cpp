#include "lifespan/simulate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <istream>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "lifespan/kernel.hpp"
#include "lifespan/simd.hpp"

namespace lifespan {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t grid_size(int dim, int n) {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n);
  return total;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string num(double v) {
  char buf[32];
  auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

// r2c/c2r transform pair with the discrete Laplacian symbol
// -(4/h²) Σ_d sin²(π m_d / N), normalised by 1/N^n.
class FourierLaplacian {
 public:
  FourierLaplacian(int dim, int n, double h) : dim_(dim), n_(n), real_size_(grid_size(dim, n)) {
    complex_size_ = grid_size(dim - 1, n) * static_cast<std::size_t>(n / 2 + 1);
    real_ = fftw_alloc_real(real_size_);
    spectrum_ = fftw_alloc_complex(complex_size_);
    int dims[kMaxDimension];
    for (int d = 0; d < dim; ++d) dims[d] = n;
    {
      std::lock_guard lock(fftw_planner_mutex());
      forward_ = fftw_plan_dft_r2c(dim, dims, real_, spectrum_, FFTW_ESTIMATE);
      backward_ = fftw_plan_dft_c2r(dim, dims, spectrum_, real_, FFTW_ESTIMATE);
    }
    symbol_.resize(complex_size_);
    const double scale = 1.0 / static_cast<double>(real_size_);
    const std::size_t half = static_cast<std::size_t>(n / 2 + 1);
    for (std::size_t k = 0; k < complex_size_; ++k) {
      std::size_t rem = k;
      double s = 0.0;
      for (int d = dim - 1; d >= 0; --d) {
        const std::size_t extent = d == dim - 1 ? half : static_cast<std::size_t>(n);
        const std::size_t m = rem % extent;
        rem /= extent;
        const double sn = std::sin(std::numbers::pi * static_cast<double>(m) / n);
        s += sn * sn;
      }
      symbol_[k] = -4.0 / (h * h) * s * scale;
    }
  }

  ~FourierLaplacian() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(backward_);
    fftw_destroy_plan(forward_);
    fftw_free(spectrum_);
    fftw_free(real_);
  }

  FourierLaplacian(const FourierLaplacian&) = delete;
  FourierLaplacian& operator=(const FourierLaplacian&) = delete;

  void apply(std::span<const double> u, std::span<double> out) {
    std::copy(u.begin(), u.end(), real_);
    fftw_execute(forward_);
    simd::scale_spectrum(std::span(reinterpret_cast<std::complex<double>*>(spectrum_), complex_size_), symbol_);
    fftw_execute(backward_);
    std::copy(real_, real_ + real_size_, out.begin());
  }

 private:
  int dim_;
  int n_;
  std::size_t real_size_;
  std::size_t complex_size_ = 0;
  double* real_ = nullptr;
  fftw_complex* spectrum_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::vector<double> symbol_;
};

class LaplacianOperator {
 public:
  LaplacianOperator(int dim, int n, double h, LaplacianRoute route)
      : dim_(dim), n_(n), inv_h2_(1.0 / (h * h)) {
    if (route == LaplacianRoute::Fourier) fourier_ = std::make_unique<FourierLaplacian>(dim, n, h);
  }

  void apply(std::span<const double> u, std::span<double> out) {
    if (fourier_)
      fourier_->apply(u, out);
    else
      simd::laplacian_periodic(u, dim_, n_, inv_h2_, out);
  }

 private:
  int dim_;
  int n_;
  double inv_h2_;
  std::unique_ptr<FourierLaplacian> fourier_;
};

}  // namespace

void SimulationConfig::validate() const {
  if (!(half_period > 0.0) || !std::isfinite(half_period))
    throw std::invalid_argument("simulation: half_period must be > 0");
  if (grid_points < 64 || !power_of_two(grid_points))
    throw std::invalid_argument("simulation: grid_points must be a power of two >= 64");
  if (!(blowup_threshold >= 1e4)) throw std::invalid_argument("simulation: blowup_threshold must be >= 1e4");
  if (!(safety > 0.0 && safety < 1.0)) throw std::invalid_argument("simulation: safety factor must lie in (0, 1)");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("simulation: t_max must be > 0");
  if (snapshot_stride < 0) throw std::invalid_argument("simulation: snapshot_stride must be >= 0");
  if (fit_window < 5) throw std::invalid_argument("simulation: fit_window must be >= 5");
}

double Snapshot::sample(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension) throw std::invalid_argument("snapshot: dimension mismatch");
  const double h = 2.0 * half_period / grid_points;
  std::size_t lo[kMaxDimension];
  double frac[kMaxDimension];
  const auto n = static_cast<std::size_t>(grid_points);
  for (int d = 0; d < dimension; ++d) {
    const double s = (x[d] + half_period) / h;
    const double f = std::floor(s);
    frac[d] = s - f;
    const long long i = static_cast<long long>(f) % static_cast<long long>(n);
    lo[d] = static_cast<std::size_t>(i < 0 ? i + static_cast<long long>(n) : i);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << dimension); ++corner) {
    double w = 1.0;
    std::size_t index = 0;
    for (int d = 0; d < dimension; ++d) {
      const bool up = (corner >> d) & 1;
      w *= up ? frac[d] : 1.0 - frac[d];
      index = index * n + (up ? (lo[d] + 1) % n : lo[d]);
    }
    acc += w * values[index];
  }
  return acc;
}

void Snapshot::write(std::ostream& os) const {
  os << dimension << ' ' << grid_points << ' ' << num(half_period) << ' ' << num(t) << '\n';
  for (double v : values) os << num(v) << '\n';
}

Snapshot Snapshot::read(std::istream& is) {
  Snapshot s;
  if (!(is >> s.dimension >> s.grid_points >> s.half_period >> s.t))
    throw std::invalid_argument("snapshot: malformed header");
  if (s.dimension < 1 || s.dimension > kMaxDimension || s.grid_points < 1)
    throw std::invalid_argument("snapshot: bad grid shape");
  s.values.resize(grid_size(s.dimension, s.grid_points));
  for (double& v : s.values)
    if (!(is >> v)) throw std::invalid_argument("snapshot: truncated values");
  return s;
}

Snapshot initial_field(const InitialDatum& datum, const SimulationConfig& config) {
  config.validate();
  const PeriodicSampler sampler = periodize(datum, config.half_period);
  Snapshot s;
  s.dimension = datum.dimension();
  s.grid_points = config.grid_points;
  s.half_period = config.half_period;
  s.values.resize(grid_size(s.dimension, s.grid_points));
  const double h = 2.0 * config.half_period / config.grid_points;
  const auto n = static_cast<std::size_t>(config.grid_points);
  double x[kMaxDimension];
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    std::size_t rem = k;
    for (int d = s.dimension - 1; d >= 0; --d) {
      x[d] = -config.half_period + static_cast<double>(rem % n) * h;
      rem /= n;
    }
    s.values[k] = sampler(std::span<const double>(x, static_cast<std::size_t>(s.dimension)));
  }
  return s;
}

void apply_laplacian(const Snapshot& field, LaplacianRoute route, std::span<double> out) {
  const double h = 2.0 * field.half_period / field.grid_points;
  LaplacianOperator op(field.dimension, field.grid_points, h, route);
  op.apply(field.values, out);
}

BlowupEstimate run(const ProblemSpec& spec, const SimulationConfig& config) {
  Snapshot u = initial_field(spec.datum, config);
  const int dim = u.dimension;
  const double p = spec.p;
  const double h = 2.0 * config.half_period / config.grid_points;
  const double diffusive_cap = h * h / (2.0 * dim) * 0.5;
  LaplacianOperator laplacian(dim, config.grid_points, h, config.laplacian);
  std::vector<double> lap(u.values.size()), react(u.values.size());

  BlowupEstimate est;
  double sup = simd::max_abs(u.values);
  est.min_value = simd::min_value(u.values);
  est.history.push_back({0.0, sup});
  if (config.snapshot_stride > 0) est.snapshots.push_back(u);

  double t = 0.0;
  while (true) {
    if (sup >= config.blowup_threshold) {
      est.status = BlowupStatus::BlewUp;
      break;
    }
    if (t >= config.t_max) break;
    const double reaction_cap = sup > 0.0 ? 1.0 / ((p - 1.0) * std::pow(sup, p - 1.0)) : diffusive_cap;
    double dt = config.safety * std::min(diffusive_cap, reaction_cap);
    if (t + dt > config.t_max) dt = config.t_max - t;

    laplacian.apply(u.values, lap);
    simd::reaction(u.values, p, react);
    simd::euler_update(u.values, lap, react, dt);
    t = std::min(t + dt, config.t_max);
    ++est.steps;
    u.t = t;

    sup = simd::max_abs(u.values);
    if (!std::isfinite(sup))
      throw NumericalFailure("simulation: non-finite values at t = " + num(t), t);
    est.min_value = std::min(est.min_value, simd::min_value(u.values));
    est.history.push_back({t, sup});
    if (config.snapshot_stride > 0 && est.steps % static_cast<std::size_t>(config.snapshot_stride) == 0)
      est.snapshots.push_back(u);
  }
  est.t_stop = t;
  if (config.snapshot_stride > 0 && (est.snapshots.empty() || est.snapshots.back().t != u.t))
    est.snapshots.push_back(u);

  if (est.status == BlowupStatus::BlewUp) {
    const double floor_level = 0.9 * std::sqrt(config.blowup_threshold);
    for (std::size_t window = static_cast<std::size_t>(config.fit_window); window >= 5; window /= 2) {
      const std::size_t count = std::min(window, est.history.size());
      std::span<const HistoryPoint> tail(est.history.data() + est.history.size() - count, count);
      std::size_t skip = 0;
      while (skip < tail.size() && tail[skip].sup_norm <= floor_level) ++skip;
      tail = tail.subspan(skip);
      try {
        const BlowupFit fit = extrapolate_blowup(tail, p);
        est.t_num = fit.t_num;
        est.fit_residual = fit.residual;
        break;
      } catch (const std::invalid_argument&) {
        if (window < 10) break;
      }
    }
    if (!est.t_num) throw NumericalFailure("simulation: blow-up tail could not be extrapolated", t);
  }
  return est;
}

BlowupFit extrapolate_blowup(std::span<const HistoryPoint> tail, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("extrapolate: p must be > 1");
  if (tail.size() < 5) throw std::invalid_argument("extrapolate: need at least 5 points");
  for (std::size_t i = 1; i < tail.size(); ++i) {
    if (!(tail[i].t > tail[i - 1].t) || !(tail[i].sup_norm > tail[i - 1].sup_norm))
      throw std::invalid_argument("extrapolate: tail is not strictly increasing");
  }
  const double m = static_cast<double>(tail.size());
  double tbar = 0.0, ybar = 0.0;
  std::vector<double> y(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) {
    y[i] = std::pow(tail[i].sup_norm, 1.0 - p);
    tbar += tail[i].t;
    ybar += y[i];
  }
  tbar /= m;
  ybar /= m;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    stt += (tail[i].t - tbar) * (tail[i].t - tbar);
    sty += (tail[i].t - tbar) * (y[i] - ybar);
  }
  const double slope = sty / stt;
  if (!(slope < 0.0)) throw std::invalid_argument("extrapolate: fitted slope is not negative");
  BlowupFit fit;
  fit.t_num = tbar - ybar / slope;
  double sse = 0.0;
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const double r = y[i] - (ybar + slope * (tail[i].t - tbar));
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / m) / (*ymax - *ymin);
  return fit;
}

double jensen_check(const Snapshot& snapshot, double t, std::span<const double> z, const GaussHermiteRule& rule,
                    double p) {
  const double lag = t - snapshot.t;
  if (!(lag > 0.0)) throw std::invalid_argument("jensen_check: need t > snapshot time");
  const double mean = gaussian_average(snapshot.dimension, z, lag, rule,
                                       [&](std::span<const double> y) { return snapshot.sample(y); });
  const double mean_pow = gaussian_average(snapshot.dimension, z, lag, rule, [&](std::span<const double> y) {
    return std::pow(std::fabs(snapshot.sample(y)), p);
  });
  return mean_pow - std::pow(std::fabs(mean), p);
}

}  // namespace lifespan
