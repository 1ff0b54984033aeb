#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ssf {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return half * sum;
  }
};

/// Nodes by Newton iteration on the Legendre three-term recurrence.
inline GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre needs n >= 1");
  // P_n(x) and P_n'(x)
  auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const auto kd = static_cast<double>(k);
      const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    return std::pair{p1, static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0)};
  };
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

inline const GaussRule& gauss16() {
  static const GaussRule rule = gauss_legendre(16);
  return rule;
}

namespace detail {

template <class F>
double adaptive_gauss16(F& f, double a, double b, double whole, double rel_tol, double abs_floor, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss16().integrate(f, a, mid);
  const double right = gauss16().integrate(f, mid, b);
  const double halves = left + right;
  const double err = std::abs(halves - whole);
  if (depth <= 0 || err <= rel_tol * std::abs(halves) || err <= abs_floor * (b - a)) return halves;
  return adaptive_gauss16(f, a, mid, left, rel_tol, abs_floor, depth - 1) +
         adaptive_gauss16(f, mid, b, right, rel_tol, abs_floor, depth - 1);
}

}  // namespace detail

/// Order-16 Gauss with interval bisection until two successive levels agree
/// to `rel_tol`. Exact (to rounding) for polynomials of degree <= 31.
template <class F>
double integrate_smooth(F&& f, double a, double b, double rel_tol = 1e-10) {
  if (!(b > a)) return 0.0;
  double scale = 0.0;
  const auto& rule = gauss16();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double whole = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(mid + half * rule.nodes[i]);
    scale = std::max(scale, std::abs(v));
    whole += rule.weights[i] * v;
  }
  whole *= half;
  return detail::adaptive_gauss16(f, a, b, whole, rel_tol, 1e-15 * scale, 30);
}

}  // namespace ssf
