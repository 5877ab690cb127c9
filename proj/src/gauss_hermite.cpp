#include "lifespan/gauss_hermite.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lifespan {

namespace {

// Orthonormal Hermite recurrence at z: returns p_n(z) and its derivative.
std::pair<double, double> hermite(int n, double z) {
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  double p1 = pim4;
  double p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
  }
  return {p1, std::sqrt(2.0 * n) * p2};
}

// Positive roots are bracketed by a sign scan finer than the smallest root
// gap, then polished by Newton steps kept inside the bracket.
GaussHermiteRule compute_rule(int order) {
  const int n = order;
  std::vector<double> roots;
  if (n % 2 == 1) roots.push_back(0.0);
  const double step = 0.25 * std::numbers::pi / std::sqrt(2.0 * n + 1.0);
  const double top = std::sqrt(2.0 * n + 1.0) + 1.0;
  double a = 0.5 * step;
  double fa = hermite(n, a).first;
  while (a < top && static_cast<int>(roots.size()) < (n + 1) / 2) {
    const double b = a + step;
    const double fb = hermite(n, b).first;
    if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      double lo = a, hi = b, flo = fa;
      double z = 0.5 * (lo + hi);
      for (int iter = 0; iter < 200; ++iter) {
        const auto [f, df] = hermite(n, z);
        if (f == 0.0) break;
        if ((f < 0.0) == (flo < 0.0)) {
          lo = z;
          flo = f;
        } else {
          hi = z;
        }
        double next = z - f / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - z) <= 1e-15 * std::max(1.0, std::fabs(z))) {
          z = next;
          break;
        }
        z = next;
      }
      roots.push_back(z);
    }
    a = b;
    fa = fb;
  }
  if (static_cast<int>(roots.size()) != (n + 1) / 2)
    throw std::runtime_error("gauss_hermite: root scan found " + std::to_string(roots.size()) + " of " +
                             std::to_string((n + 1) / 2) + " roots for order " + std::to_string(n));

  // x holds the rule in descending order.
  std::vector<double> x(n), w(n);
  for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
    const double z = roots[roots.size() - 1 - i];
    const double pp = hermite(n, z).second;
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }

  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += w[i];
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i] / sqrt_pi;
  }
  if (std::fabs(total / sqrt_pi - 1.0) > 1e-10)
    throw std::runtime_error("gauss_hermite: weights fail to sum to sqrt(pi) for order " + std::to_string(n));
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1 || order > 512) throw std::invalid_argument("gauss_hermite: order must lie in [1, 512]");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(compute_rule(order));
  return *slot;
}

}  // namespace lifespan
