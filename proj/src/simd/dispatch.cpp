#include <atomic>
#include <cstdlib>
#include <string>

#include "lifespan/simd.hpp"

namespace lifespan::simd {

namespace {

Level probe_cpu() {
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
  if (avx2::compiled() && __builtin_cpu_supports("avx2")) return Level::Avx2;
#endif
  return Level::Scalar;
}

Level initial_level() {
  const Level best = detected_level();
  if (const char* env = std::getenv("LIFESPAN_SIMD")) {
    if (std::string(env) == "scalar") return Level::Scalar;
  }
  return best;
}

std::atomic<Level>& current() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

}  // namespace

Level detected_level() {
  static const Level level = probe_cpu();
  return level;
}

Level active_level() { return current().load(std::memory_order_relaxed); }

void set_level(Level level) {
  if (level == Level::Avx2 && detected_level() != Level::Avx2) level = Level::Scalar;
  current().store(level, std::memory_order_relaxed);
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Avx2:
      return "avx2";
    case Level::Scalar:
      break;
  }
  return "scalar";
}

#define LIFESPAN_DISPATCH(fn, ...) \
  (active_level() == Level::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))

double max_abs(std::span<const double> v) { return LIFESPAN_DISPATCH(max_abs, v); }

double min_value(std::span<const double> v) { return LIFESPAN_DISPATCH(min_value, v); }

double weighted_sum(std::span<const double> w, std::span<const double> v) {
  return LIFESPAN_DISPATCH(weighted_sum, w, v);
}

void reaction(std::span<const double> u, double p, std::span<double> out) {
  LIFESPAN_DISPATCH(reaction, u, p, out);
}

void euler_update(std::span<double> u, std::span<const double> lap,
                  std::span<const double> react, double dt) {
  LIFESPAN_DISPATCH(euler_update, u, lap, react, dt);
}

void scale_spectrum(std::span<std::complex<double>> c, std::span<const double> symbol) {
  LIFESPAN_DISPATCH(scale_spectrum, c, symbol);
}

void laplacian_periodic(std::span<const double> u, int dim, int n, double inv_h2,
                        std::span<double> out) {
  LIFESPAN_DISPATCH(laplacian_periodic, u, dim, n, inv_h2, out);
}

#undef LIFESPAN_DISPATCH

}  // namespace lifespan::simd
