#pragma once

// Data-parallel inner loops used by the quadrature and the simulator.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2 implementation selected at runtime. Element-wise kernels and the
// max/min reductions produce bit-identical results on both paths; the
// weighted sum reassociates and agrees to a few ulps.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace lifespan::simd {

enum class Level { Scalar, Avx2 };

/// Best level supported by the running CPU.
Level detected_level();

/// Level currently used by the dispatching entry points. Defaults to
/// detected_level(), or Scalar when LIFESPAN_SIMD=scalar is set.
Level active_level();

/// Requests a level; a request above detected_level() is clamped.
void set_level(Level level);

std::string_view level_name(Level level);

double max_abs(std::span<const double> v);
double min_value(std::span<const double> v);

/// sum_i w[i] * v[i]
double weighted_sum(std::span<const double> w, std::span<const double> v);

/// out[i] = |u[i]|^(p-1) * u[i]. Integer p in [2, 8] is evaluated by
/// repeated multiplication; other p go through std::pow.
void reaction(std::span<const double> u, double p, std::span<double> out);

/// u[i] += dt * (lap[i] + react[i])
void euler_update(std::span<double> u, std::span<const double> lap,
                  std::span<const double> react, double dt);

/// c[i] *= symbol[i] for a half-complex spectrum.
void scale_spectrum(std::span<std::complex<double>> c, std::span<const double> symbol);

/// Second-order periodic Laplacian on an N^dim grid with row-major layout
/// (last axis contiguous). out may not alias u.
void laplacian_periodic(std::span<const double> u, int dim, int n, double inv_h2,
                        std::span<double> out);

// Direct access to each implementation, for equivalence tests.
namespace scalar {
double max_abs(std::span<const double> v);
double min_value(std::span<const double> v);
double weighted_sum(std::span<const double> w, std::span<const double> v);
void reaction(std::span<const double> u, double p, std::span<double> out);
void euler_update(std::span<double> u, std::span<const double> lap,
                  std::span<const double> react, double dt);
void scale_spectrum(std::span<std::complex<double>> c, std::span<const double> symbol);
void laplacian_periodic(std::span<const double> u, int dim, int n, double inv_h2,
                        std::span<double> out);
}  // namespace scalar

namespace avx2 {
bool compiled();
double max_abs(std::span<const double> v);
double min_value(std::span<const double> v);
double weighted_sum(std::span<const double> w, std::span<const double> v);
void reaction(std::span<const double> u, double p, std::span<double> out);
void euler_update(std::span<double> u, std::span<const double> lap,
                  std::span<const double> react, double dt);
void scale_spectrum(std::span<std::complex<double>> c, std::span<const double> symbol);
void laplacian_periodic(std::span<const double> u, int dim, int n, double inv_h2,
                        std::span<double> out);
}  // namespace avx2

}  // namespace lifespan::simd
