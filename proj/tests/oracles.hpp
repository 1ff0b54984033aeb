#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "ssf/seeding.hpp"

namespace oracle {

/// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const auto n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30 * (1.0 + a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline long count_at_most(const std::vector<double>& ev, double x) {
  return static_cast<long>(std::count_if(ev.begin(), ev.end(), [x](double e) { return e <= x; }));
}

/// Smallest distance from x to any of the values.
inline double distance(const std::vector<double>& ev, double x) {
  double d = INFINITY;
  for (double e : ev) d = std::min(d, std::abs(e - x));
  return d;
}

/// #{k = 1..L : 2 cos(k pi / (L+1)) <= lambda}, from k >= (L+1) acos(lambda/2) / pi.
inline long free_chain_count(long L, double lambda) {
  if (lambda >= 2.0) return L;
  if (lambda < -2.0) return 0;
  const double kmin = static_cast<double>(L + 1) * std::acos(lambda / 2.0) / std::numbers::pi;
  const double r = std::round(kmin);
  const double first = std::abs(kmin - r) < 1e-9 ? r : std::ceil(kmin);
  const long from = std::max<long>(1, static_cast<long>(first));
  return from > L ? 0 : L - from + 1;
}

/// Dense adjacency of a path (or cycle) of n sites.
inline Eigen::MatrixXd chain(long n, bool periodic) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = 1.0;
  if (periodic && n >= 3) h(0, n - 1) = h(n - 1, 0) = 1.0;
  return h;
}

/// Kronecker sum of chain adjacencies, last dimension fastest.
inline Eigen::MatrixXd box_adjacency(const std::vector<long>& lengths, bool periodic) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(1, 1);
  for (long n : lengths) {
    const Eigen::MatrixXd c = chain(n, periodic);
    const Eigen::Index m = h.rows();
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(m * n, m * n);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (h(i, j) != 0.0) next.block(i * n, j * n, n, n) += h(i, j) * Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < m; ++i) next.block(i * n, i * n, n, n) += c;
    h = next;
  }
  return h;
}

}  // namespace oracle
