#include <cmath>
#include <limits>
#include <stdexcept>

#include "lifespan/simd.hpp"
#include "line_stencil.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace lifespan::simd::avx2 {

#if defined(__AVX2__)

namespace {

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline double hmax(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  double m = lane[0];
  for (int i = 1; i < 4; ++i) m = lane[i] > m ? lane[i] : m;
  return m;
}

inline double hmin(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  double m = lane[0];
  for (int i = 1; i < 4; ++i) m = lane[i] < m ? lane[i] : m;
  return m;
}

inline bool any_unordered(__m256d mask) { return _mm256_movemask_pd(mask) != 0; }

}  // namespace

bool compiled() { return true; }

double max_abs(std::span<const double> v) {
  const std::size_t n = v.size();
  const double* x = v.data();
  __m256d acc = _mm256_setzero_pd();
  __m256d nan = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x + i);
    nan = _mm256_or_pd(nan, _mm256_cmp_pd(a, a, _CMP_UNORD_Q));
    acc = _mm256_max_pd(abs_pd(a), acc);
  }
  double m = hmax(acc);
  bool has_nan = any_unordered(nan);
  for (; i < n; ++i) {
    if (std::isnan(x[i])) has_nan = true;
    const double a = std::fabs(x[i]);
    m = a > m ? a : m;
  }
  return has_nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

double min_value(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("min_value: empty input");
  const std::size_t n = v.size();
  const double* x = v.data();
  double m = x[0];
  bool has_nan = false;
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_set1_pd(x[0]);
    __m256d nan = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
      const __m256d a = _mm256_loadu_pd(x + i);
      nan = _mm256_or_pd(nan, _mm256_cmp_pd(a, a, _CMP_UNORD_Q));
      acc = _mm256_min_pd(a, acc);
    }
    m = hmin(acc);
    has_nan = any_unordered(nan);
  }
  for (; i < n; ++i) {
    if (std::isnan(x[i])) has_nan = true;
    m = x[i] < m ? x[i] : m;
  }
  return has_nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

double weighted_sum(std::span<const double> w, std::span<const double> v) {
  if (w.size() != v.size()) throw std::invalid_argument("weighted_sum: size mismatch");
  const std::size_t n = w.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(w.data() + i),
                                             _mm256_loadu_pd(v.data() + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(w.data() + i + 4),
                                             _mm256_loadu_pd(v.data() + i + 4)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, _mm256_add_pd(acc0, acc1));
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) s += w[i] * v[i];
  return s;
}

void reaction(std::span<const double> u, double p, std::span<double> out) {
  if (u.size() != out.size()) throw std::invalid_argument("reaction: size mismatch");
  const int ip = static_cast<int>(p);
  if (!(static_cast<double>(ip) == p && ip >= 2 && ip <= 8)) {
    scalar::reaction(u, p, out);
    return;
  }
  const std::size_t n = u.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(u.data() + i);
    const __m256d a = abs_pd(x);
    __m256d m = a;
    for (int k = 2; k < ip; ++k) m = _mm256_mul_pd(m, a);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(x, m));
  }
  if (i < n) scalar::reaction(u.subspan(i), p, out.subspan(i));
}

void euler_update(std::span<double> u, std::span<const double> lap,
                  std::span<const double> react, double dt) {
  if (u.size() != lap.size() || u.size() != react.size())
    throw std::invalid_argument("euler_update: size mismatch");
  const std::size_t n = u.size();
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d inc = _mm256_mul_pd(
        vdt, _mm256_add_pd(_mm256_loadu_pd(lap.data() + i), _mm256_loadu_pd(react.data() + i)));
    _mm256_storeu_pd(u.data() + i, _mm256_add_pd(_mm256_loadu_pd(u.data() + i), inc));
  }
  for (; i < n; ++i) u[i] += dt * (lap[i] + react[i]);
}

void scale_spectrum(std::span<std::complex<double>> c, std::span<const double> symbol) {
  if (c.size() != symbol.size()) throw std::invalid_argument("scale_spectrum: size mismatch");
  const std::size_t n = c.size();
  double* d = reinterpret_cast<double*>(c.data());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m128d s2 = _mm_loadu_pd(symbol.data() + i);
    const __m256d s = _mm256_permute4x64_pd(_mm256_castpd128_pd256(s2), _MM_SHUFFLE(1, 1, 0, 0));
    _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(d + 2 * i), s));
  }
  for (; i < n; ++i) c[i] = std::complex<double>(c[i].real() * symbol[i], c[i].imag() * symbol[i]);
}

void laplacian_periodic(std::span<const double> u, int dim, int n, double inv_h2,
                        std::span<double> out) {
  detail::check_grid(u.size(), dim, n);
  if (out.size() != u.size()) throw std::invalid_argument("laplacian: output size mismatch");
  const double twice_dim = 2.0 * dim;
  const std::size_t nn = static_cast<std::size_t>(n);
  const __m256d vtwice = _mm256_set1_pd(twice_dim);
  const __m256d vinv = _mm256_set1_pd(inv_h2);
  detail::for_each_row(u.data(), dim, n, [&](std::size_t row, const detail::RowNeighbours& nb) {
    double* o = out.data() + row * nn;
    const double* c = nb.center;
    o[0] = detail::stencil_point(nb, c[nn - 1], c[1], 0, twice_dim, inv_h2);
    std::size_t j = 1;
    for (; j + 4 <= nn - 1; j += 4) {
      __m256d s = _mm256_add_pd(_mm256_loadu_pd(c + j - 1), _mm256_loadu_pd(c + j + 1));
      for (int a = 0; a < nb.axes; ++a) {
        s = _mm256_add_pd(s, _mm256_loadu_pd(nb.up[a] + j));
        s = _mm256_add_pd(s, _mm256_loadu_pd(nb.down[a] + j));
      }
      const __m256d r = _mm256_mul_pd(
          _mm256_sub_pd(s, _mm256_mul_pd(vtwice, _mm256_loadu_pd(c + j))), vinv);
      _mm256_storeu_pd(o + j, r);
    }
    for (; j + 1 < nn; ++j) o[j] = detail::stencil_point(nb, c[j - 1], c[j + 1], j, twice_dim, inv_h2);
    o[nn - 1] = detail::stencil_point(nb, c[nn - 2], c[0], nn - 1, twice_dim, inv_h2);
  });
}

#else  // no AVX2 at compile time: forward to the reference kernels

bool compiled() { return false; }
double max_abs(std::span<const double> v) { return scalar::max_abs(v); }
double min_value(std::span<const double> v) { return scalar::min_value(v); }
double weighted_sum(std::span<const double> w, std::span<const double> v) {
  return scalar::weighted_sum(w, v);
}
void reaction(std::span<const double> u, double p, std::span<double> out) {
  scalar::reaction(u, p, out);
}
void euler_update(std::span<double> u, std::span<const double> lap,
                  std::span<const double> react, double dt) {
  scalar::euler_update(u, lap, react, dt);
}
void scale_spectrum(std::span<std::complex<double>> c, std::span<const double> symbol) {
  scalar::scale_spectrum(c, symbol);
}
void laplacian_periodic(std::span<const double> u, int dim, int n, double inv_h2,
                        std::span<double> out) {
  scalar::laplacian_periodic(u, dim, n, inv_h2, out);
}

#endif

}  // namespace lifespan::simd::avx2
