#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lifespan/simd.hpp"
#include "line_stencil.hpp"

namespace lifespan::simd::scalar {

// NaN anywhere in the input propagates to the result.
double max_abs(std::span<const double> v) {
  double m = 0.0;
  bool has_nan = false;
  for (double x : v) {
    if (std::isnan(x)) has_nan = true;
    const double a = std::fabs(x);
    m = a > m ? a : m;
  }
  return has_nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

double min_value(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("min_value: empty input");
  double m = v[0];
  bool has_nan = false;
  for (double x : v) {
    if (std::isnan(x)) has_nan = true;
    m = x < m ? x : m;
  }
  return has_nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

double weighted_sum(std::span<const double> w, std::span<const double> v) {
  if (w.size() != v.size()) throw std::invalid_argument("weighted_sum: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * v[i];
  return s;
}

void reaction(std::span<const double> u, double p, std::span<double> out) {
  if (u.size() != out.size()) throw std::invalid_argument("reaction: size mismatch");
  const double pm1 = p - 1.0;
  const int ip = static_cast<int>(p);
  if (static_cast<double>(ip) == p && ip >= 2 && ip <= 8) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double a = std::fabs(u[i]);
      double m = a;
      for (int k = 2; k < ip; ++k) m *= a;
      out[i] = u[i] * m;
    }
    return;
  }
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * std::pow(std::fabs(u[i]), pm1);
}

void euler_update(std::span<double> u, std::span<const double> lap,
                  std::span<const double> react, double dt) {
  if (u.size() != lap.size() || u.size() != react.size())
    throw std::invalid_argument("euler_update: size mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += dt * (lap[i] + react[i]);
}

void scale_spectrum(std::span<std::complex<double>> c, std::span<const double> symbol) {
  if (c.size() != symbol.size()) throw std::invalid_argument("scale_spectrum: size mismatch");
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = std::complex<double>(c[i].real() * symbol[i], c[i].imag() * symbol[i]);
  }
}

void laplacian_periodic(std::span<const double> u, int dim, int n, double inv_h2,
                        std::span<double> out) {
  detail::check_grid(u.size(), dim, n);
  if (out.size() != u.size()) throw std::invalid_argument("laplacian: output size mismatch");
  const double twice_dim = 2.0 * dim;
  const std::size_t nn = static_cast<std::size_t>(n);
  detail::for_each_row(u.data(), dim, n, [&](std::size_t row, const detail::RowNeighbours& nb) {
    double* o = out.data() + row * nn;
    const double* c = nb.center;
    for (std::size_t j = 0; j < nn; ++j) {
      const double left = c[j == 0 ? nn - 1 : j - 1];
      const double right = c[j + 1 == nn ? 0 : j + 1];
      o[j] = detail::stencil_point(nb, left, right, j, twice_dim, inv_h2);
    }
  });
}

}  // namespace lifespan::simd::scalar
