// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

namespace stnc {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> node;
  std::vector<double> weight;
};

namespace detail {

// Newton iteration on P_n, long double internally so the n=64 rule is good
// to the last double bit. Classic gauleg construction.
inline GaussLegendreRule make_gauss_legendre(int n) {
  GaussLegendreRule r;
  r.node.resize(n);
  r.weight.resize(n);
  const long double pi = 3.14159265358979323846264338327950288L;
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    long double z = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p1 = 1.0L, p2 = 0.0L;
      for (int j = 0; j < n; ++j) {
        long double p3 = p2;
        p2 = p1;
        p1 = ((2.0L * j + 1.0L) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0L);
      long double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) < 1e-20L) break;
    }
    r.node[i] = static_cast<double>(-z);
    r.node[n - 1 - i] = static_cast<double>(z);
    double w = static_cast<double>(2.0L / ((1.0L - z * z) * pp * pp));
    r.weight[i] = w;
    r.weight[n - 1 - i] = w;
  }
  return r;
}

}  // namespace detail

/// Cached n-point Gauss-Legendre rule on [-1, 1]. Thread safe.
inline const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::make_gauss_legendre(n)).first;
  return it->second;
}

/// ∫_a^b f with a fixed n-point rule.
template <class F>
double gl_integrate(F&& f, double a, double b, int n) {
  const GaussLegendreRule& r = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += r.weight[i] * f(mid + half * r.node[i]);
  return half * s;
}

namespace detail {

template <class F>
double adaptive_rec(F& f, double a, double b, double scale, double rel_tol,
                    int depth, int max_depth) {
  double coarse = gl_integrate(f, a, b, 15);
  double fine = gl_integrate(f, a, b, 31);
  if (depth >= max_depth ||
      std::fabs(fine - coarse) <= rel_tol * std::max(scale, std::fabs(fine)))
    return fine;
  double m = 0.5 * (a + b);
  return adaptive_rec(f, a, m, scale, rel_tol, depth + 1, max_depth) +
         adaptive_rec(f, m, b, scale, rel_tol, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive ∫_a^b f by interval halving with paired 15/31-point estimates.
/// Intended for smooth integrands; rel_tol is relative to the result scale.
template <class F>
double adaptive_integrate(F&& f, double a, double b, double rel_tol = 1e-12,
                          int max_depth = 40) {
  double rough = gl_integrate(f, a, b, 31);
  return detail::adaptive_rec(f, a, b, std::fabs(rough), rel_tol, 0, max_depth);
}

}  // namespace stnc
