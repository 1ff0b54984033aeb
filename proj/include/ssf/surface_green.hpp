#pragma once

// Structured evaluation of surface spectral shift functions on large boxes.
// The free operator on a box is a Kronecker sum of 1D chains, so its Green
// function restricted to the disorder hyperplane has a closed form. The SSF
// then follows from the inertia of a matrix of the window's size, and the
// k = 1 resolvent difference from a Woodbury identity.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <span>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ssf/error.hpp"
#include "ssf/model.hpp"
#include "ssf/spectral.hpp"

namespace ssf {

/// Eigenpairs of the adjacency operator of a chain of n sites. Column k of
/// `vectors` is the mode with energy `energies[k]`; rows are chain positions.
struct ChainModes {
  std::vector<double> energies;
  Eigen::MatrixXd vectors;
};

inline ChainModes chain_modes(long n, Boundary boundary) {
  if (n < 1) throw std::invalid_argument("chain_modes needs n >= 1");
  const auto N = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  ChainModes m;
  m.vectors.resize(N, N);
  if (boundary == Boundary::dirichlet) {
    const double norm = std::sqrt(2.0 / (nd + 1.0));
    for (Eigen::Index k = 1; k <= N; ++k) {
      m.energies.push_back(2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / (nd + 1.0)));
      for (Eigen::Index j = 1; j <= N; ++j)
        m.vectors(j - 1, k - 1) = norm * std::sin(static_cast<double>(j * k) * std::numbers::pi / (nd + 1.0));
    }
    return m;
  }
  if (n < 3) throw std::invalid_argument("periodic chain needs n >= 3");
  Eigen::Index col = 0;
  auto add = [&](double energy, auto&& f) {
    m.energies.push_back(energy);
    for (Eigen::Index j = 0; j < N; ++j) m.vectors(j, col) = f(static_cast<double>(j));
    ++col;
  };
  add(2.0, [nd](double) { return 1.0 / std::sqrt(nd); });
  const double norm = std::sqrt(2.0 / nd);
  for (long k = 1; 2 * k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / nd;
    add(2.0 * std::cos(theta), [=](double j) { return norm * std::cos(theta * j); });
    add(2.0 * std::cos(theta), [=](double j) { return norm * std::sin(theta * j); });
  }
  if (n % 2 == 0) add(-2.0, [nd](double j) { return (static_cast<long>(j) % 2 == 0 ? 1.0 : -1.0) / std::sqrt(nd); });
  return m;
}

/// Green function of the free box operator between window sites of the
/// hyperplane {n2 = 0}.
class SurfaceGreen {
 public:
  explicit SurfaceGreen(const LatticeBox& box) : box_(box) {
    box_.validate();
    if (box_.nu2() < 1) throw std::invalid_argument("SurfaceGreen needs nu2 >= 1");
    for (int d = box_.nu1; d < box_.nu; ++d)
      if (!box_.extents[static_cast<std::size_t>(d)].contains(0)) throw std::invalid_argument("SurfaceGreen: hyperplane n2 = 0 misses the box");

    std::vector<ChainModes> surface;
    for (int d = 0; d < box_.nu1; ++d) surface.push_back(chain_modes(box_.extents[static_cast<std::size_t>(d)].length(), box_.boundary));
    free_bottom_ = 0.0;
    for (const auto& e : box_.extents) {
      const auto cm = chain_modes(e.length(), box_.boundary);
      free_bottom_ += *std::min_element(cm.energies.begin(), cm.energies.end());
    }

    // transverse modes: weight prod phi_b(0)^2, energy sum e_b
    std::vector<std::pair<double, double>> trans{{0.0, 1.0}};
    for (int d = box_.nu1; d < box_.nu; ++d) {
      const auto& e = box_.extents[static_cast<std::size_t>(d)];
      const auto cm = chain_modes(e.length(), box_.boundary);
      const auto row = static_cast<Eigen::Index>(0 - e.lo);
      std::vector<std::pair<double, double>> next;
      for (const auto& [eta, w] : trans)
        for (std::size_t k = 0; k < cm.energies.size(); ++k) {
          const double phi = cm.vectors(row, static_cast<Eigen::Index>(k));
          next.emplace_back(eta + cm.energies[k], w * phi * phi);
        }
      trans = std::move(next);
    }
    std::sort(trans.begin(), trans.end());
    for (const auto& [eta, w] : trans) {
      if (w < 1e-24) continue;
      if (!eta_.empty() && eta - eta_.back() <= 1e-13) {
        weight_.back() += w;
      } else {
        eta_.push_back(eta);
        weight_.push_back(w);
      }
    }

    // surface modes restricted to the window
    std::size_t modes = 1;
    for (const auto& cm : surface) modes *= cm.energies.size();
    const auto S = box_.window_site_count();
    u_.resize(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(modes));
    eps_.assign(modes, 0.0);
    std::vector<std::size_t> mode_index(surface.size());
    for (std::size_t a = 0; a < modes; ++a) {
      std::size_t rem = a;
      double energy = 0.0;
      for (std::size_t d = surface.size(); d-- > 0;) {
        mode_index[d] = rem % surface[d].energies.size();
        rem /= surface[d].energies.size();
        energy += surface[d].energies[mode_index[d]];
      }
      eps_[a] = energy;
    }
    detail::for_each_window_site(box_, [&](std::size_t j, std::span<const long> x) {
      window_index_.push_back(box_.site_index(x));
      for (std::size_t a = 0; a < modes; ++a) {
        std::size_t rem = a;
        double v = 1.0;
        for (std::size_t d = surface.size(); d-- > 0;) {
          const auto k = rem % surface[d].energies.size();
          rem /= surface[d].energies.size();
          v *= surface[d].vectors(static_cast<Eigen::Index>(x[d] - box_.extents[d].lo), static_cast<Eigen::Index>(k));
        }
        u_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a)) = v;
      }
    });

    for (double e : eps_)
      for (double h : eta_) poles_.push_back(e + h);
    std::sort(poles_.begin(), poles_.end());
    scale_ = 1.0;
    if (!poles_.empty()) scale_ = std::max({1.0, std::abs(poles_.front()), std::abs(poles_.back())});
  }

  const LatticeBox& box() const noexcept { return box_; }
  std::size_t window_sites() const noexcept { return window_index_.size(); }
  /// Box site index of each window site, ascending.
  const std::vector<std::size_t>& window_box_indices() const noexcept { return window_index_; }
  double scale() const noexcept { return scale_; }
  /// Lowest eigenvalue of h0 on the box.
  double free_bottom() const noexcept { return free_bottom_; }

  /// Window position of a box site, or nullopt if it is not a window site.
  std::optional<std::size_t> window_position(std::size_t box_site) const {
    const auto it = std::lower_bound(window_index_.begin(), window_index_.end(), box_site);
    if (it == window_index_.end() || *it != box_site) return std::nullopt;
    return static_cast<std::size_t>(it - window_index_.begin());
  }

  /// Distance from lambda to the nearest eigenvalue of h0 visible on the
  /// hyperplane.
  double pole_distance(double lambda) const {
    if (poles_.empty()) return std::numeric_limits<double>::infinity();
    const auto it = std::lower_bound(poles_.begin(), poles_.end(), lambda);
    double d = std::numeric_limits<double>::infinity();
    if (it != poles_.end()) d = *it - lambda;
    if (it != poles_.begin()) d = std::min(d, lambda - *std::prev(it));
    return d;
  }

  /// lambda moved up by 1e-9 * scale steps until it clears every pole by
  /// 1e-10 * scale. Sets *shifted when a move was needed.
  double regularize(double lambda, bool* shifted = nullptr) const {
    const double step = 1e-9 * scale_;
    for (int i = 0; i < 64 && pole_distance(lambda) <= 1e-10 * scale_; ++i) {
      lambda += step;
      if (shifted) *shifted = true;
    }
    return lambda;
  }

  /// Pi (h0 - lambda)^{-power} Pi^T over all window sites.
  Eigen::MatrixXd green(double lambda, int power = 1) const {
    Eigen::VectorXd gamma(static_cast<Eigen::Index>(eps_.size()));
    for (std::size_t a = 0; a < eps_.size(); ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < eta_.size(); ++b) s += weight_[b] / std::pow(eps_[a] + eta_[b] - lambda, power);
      gamma[static_cast<Eigen::Index>(a)] = s;
    }
    Eigen::MatrixXd g = u_ * gamma.asDiagonal() * u_.transpose();
    return 0.5 * (g + g.transpose());
  }

 private:
  LatticeBox box_;
  std::vector<double> eta_;
  std::vector<double> weight_;
  std::vector<double> eps_;
  Eigen::MatrixXd u_;
  std::vector<std::size_t> window_index_;
  std::vector<double> poles_;
  double scale_ = 1.0;
  double free_bottom_ = 0.0;
};

namespace detail {

struct Inertia {
  std::size_t positive = 0;
  std::size_t zero = 0;
  std::size_t negative = 0;
};

inline Inertia inertia(const Eigen::MatrixXd& q) {
  Inertia in;
  if (q.rows() == 0) return in;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  const double tol = 1e-13 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > tol) ++in.positive;
    else if (ev[i] < -tol) ++in.negative;
    else ++in.zero;
  }
  return in;
}

}  // namespace detail

/// Nonzero couplings of a surface potential, located in the window.
struct WindowCouplings {
  std::vector<std::size_t> positions;  // window positions, ascending
  std::vector<double> values;

  static WindowCouplings from(const SurfaceGreen& g, const DiagonalPotential& v) {
    WindowCouplings wc;
    for (const auto& [site, value] : v.values) {
      if (value == 0.0) continue;
      const auto pos = g.window_position(site);
      if (!pos) throw std::invalid_argument("structured route: potential has support off the window hyperplane");
      wc.positions.push_back(*pos);
      wc.values.push_back(value);
    }
    return wc;
  }

  std::size_t size() const noexcept { return values.size(); }

  Eigen::MatrixXd restrict(const Eigen::MatrixXd& full) const {
    const auto m = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd out(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        out(i, j) = full(static_cast<Eigen::Index>(positions[static_cast<std::size_t>(i)]), static_cast<Eigen::Index>(positions[static_cast<std::size_t>(j)]));
    return out;
  }

  std::size_t positive_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double x) { return x > 0.0; }));
  }
};

/// xi(lambda; h0 + V, h0) from the window Green function G = G(lambda):
/// n+(D) - n+(D^{-1} + G) - n0(D^{-1} + G).
inline long surface_shift_from_green(const WindowCouplings& wc, const Eigen::MatrixXd& green) {
  if (wc.size() == 0) return 0;
  Eigen::MatrixXd q = wc.restrict(green);
  for (std::size_t i = 0; i < wc.size(); ++i) q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += 1.0 / wc.values[i];
  const auto in = detail::inertia(q);
  return static_cast<long>(wc.positive_count()) - static_cast<long>(in.positive) - static_cast<long>(in.zero);
}

/// Samples xi(.; h0 + V, h0) of surface potentials on a fixed grid, sharing
/// the Green functions across potentials.
class SurfaceShiftSampler {
 public:
  SurfaceShiftSampler(const LatticeBox& box, std::vector<double> grid) : green_(box), grid_(std::move(grid)) {
    greens_.reserve(grid_.size());
    for (double lambda : grid_) {
      bool shifted = false;
      const double at = green_.regularize(lambda, &shifted);
      shifted_.push_back(shifted);
      greens_.push_back(green_.green(at));
    }
  }

  const SurfaceGreen& green() const noexcept { return green_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  /// Grid points that had to be moved off an eigenvalue of h0.
  std::size_t shifted_points() const { return static_cast<std::size_t>(std::count(shifted_.begin(), shifted_.end(), true)); }

  std::vector<long> sample(const DiagonalPotential& v) const {
    const auto wc = WindowCouplings::from(green_, v);
    std::vector<long> xi(grid_.size(), 0);
    if (wc.size() == 0) return xi;
    for (std::size_t i = 0; i < grid_.size(); ++i) xi[i] = surface_shift_from_green(wc, greens_[i]);
    return xi;
  }

 private:
  SurfaceGreen green_;
  std::vector<double> grid_;
  std::vector<Eigen::MatrixXd> greens_;
  std::vector<bool> shifted_;
};

/// Singular values of (h0 + V + c)^{-1} - (h0 + c)^{-1} for a surface
/// potential V. The difference equals -B M B^T with M = (D^{-1} + G(-c))^{-1}
/// and B^T B = G_2(-c), so its nonzero singular values are |eig(L^T M L)|
/// with L L^T = G_2(-c).
inline SingularValueList structured_resolvent_difference(const SurfaceGreen& g, const DiagonalPotential& v, double c) {
  if (!(c + g.free_bottom() > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "structured_resolvent_difference: shift c = " << c << " does not clear the free spectrum (lambda_min = " << g.free_bottom() << ")";
    throw margin_error(os.str());
  }
  const auto wc = WindowCouplings::from(g, v);
  SingularValueList out;
  if (wc.size() == 0) return out;
  Eigen::MatrixXd q = wc.restrict(g.green(-c));
  for (std::size_t i = 0; i < wc.size(); ++i) q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += 1.0 / wc.values[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qs(q);
  const auto& ev = qs.eigenvalues();
  const double tol = 1e-13 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::size_t positive = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) <= tol) {
      std::ostringstream os;
      os.precision(17);
      os << "structured_resolvent_difference: -c = " << -c << " is an eigenvalue of h0 + V";
      throw margin_error(os.str());
    }
    if (ev[i] > 0.0) ++positive;
  }
  if (positive != wc.positive_count()) {
    std::ostringstream os;
    os.precision(17);
    os << "structured_resolvent_difference: shift c = " << c << " does not clear the spectrum of h0 + V";
    throw margin_error(os.str());
  }
  const Eigen::MatrixXd m = qs.eigenvectors() * ev.cwiseInverse().asDiagonal() * qs.eigenvectors().transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(wc.restrict(g.green(-c, 2)));
  if (llt.info() != Eigen::Success) throw std::runtime_error("structured_resolvent_difference: G_2 is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd core = l.transpose() * m * l;
  core = 0.5 * (core + core.transpose());
  return singular_values(core);
}

}  // namespace ssf
