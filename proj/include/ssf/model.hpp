#pragma once

// Finite-volume lattice geometry, free Hamiltonians and random diagonal
// potentials (surface or bulk disorder).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ssf/seeding.hpp"

namespace ssf {

enum class Boundary { dirichlet, periodic };

inline std::string to_string(Boundary b) { return b == Boundary::dirichlet ? "dirichlet" : "periodic"; }

/// Half-open integer interval [lo, hi).
struct Extent {
  long lo = 0;
  long hi = 0;

  long length() const noexcept { return hi - lo; }
  bool contains(long x) const noexcept { return lo <= x && x < hi; }
  friend bool operator==(const Extent&, const Extent&) = default;
};

/// Finite sublattice of Z^nu split as Z^nu1 (+) Z^nu2. Sites are enumerated
/// lexicographically with the last coordinate running fastest.
struct LatticeBox {
  int nu = 1;
  int nu1 = 0;
  std::vector<Extent> extents;
  Boundary boundary = Boundary::dirichlet;
  /// Disorder window in the first nu1 coordinates; empty means the
  /// projection of `extents`.
  std::vector<Extent> window;

  int nu2() const noexcept { return nu - nu1; }

  void validate() const {
    std::ostringstream err;
    if (nu < 1) err << "nu must be >= 1; ";
    if (nu1 < 0 || nu1 > nu) err << "nu1 must lie in [0, nu]; ";
    if (static_cast<int>(extents.size()) != nu) err << "expected " << nu << " extents, got " << extents.size() << "; ";
    for (std::size_t d = 0; d < extents.size(); ++d) {
      if (extents[d].length() < 1) err << "extent " << d << " is empty; ";
      if (boundary == Boundary::periodic && extents[d].length() < 3)
        err << "periodic boundary needs extent length >= 3 (dimension " << d << " has " << extents[d].length() << "); ";
    }
    if (!window.empty()) {
      if (static_cast<int>(window.size()) != nu1) err << "window must have nu1 intervals; ";
      for (std::size_t d = 0; d < window.size() && d < extents.size(); ++d) {
        if (window[d].length() < 1) err << "window interval " << d << " is empty; ";
        if (window[d].lo < extents[d].lo || window[d].hi > extents[d].hi)
          err << "window interval " << d << " leaves the box; ";
      }
    }
    const auto msg = err.str();
    if (!msg.empty()) throw std::invalid_argument("invalid LatticeBox: " + msg.substr(0, msg.size() - 2));
  }

  std::size_t site_count() const {
    std::size_t n = 1;
    for (const auto& e : extents) n *= static_cast<std::size_t>(e.length());
    return n;
  }

  std::vector<long> coordinates(std::size_t site) const {
    std::vector<long> x(extents.size());
    for (std::size_t d = extents.size(); d-- > 0;) {
      const auto len = static_cast<std::size_t>(extents[d].length());
      x[d] = extents[d].lo + static_cast<long>(site % len);
      site /= len;
    }
    return x;
  }

  std::size_t site_index(std::span<const long> x) const {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < extents.size(); ++d)
      idx = idx * static_cast<std::size_t>(extents[d].length()) + static_cast<std::size_t>(x[d] - extents[d].lo);
    return idx;
  }

  bool contains(std::span<const long> x) const {
    for (std::size_t d = 0; d < extents.size(); ++d)
      if (!extents[d].contains(x[d])) return false;
    return true;
  }

  std::vector<Extent> surface_window() const {
    if (!window.empty()) return window;
    return {extents.begin(), extents.begin() + nu1};
  }

  /// meas_{nu1}(window): number of lattice points of the disorder window.
  std::size_t window_site_count() const {
    std::size_t n = 1;
    for (const auto& e : surface_window()) n *= static_cast<std::size_t>(e.length());
    return n;
  }

  friend bool operator==(const LatticeBox&, const LatticeBox&) = default;
};

/// Box for a surface model: window [0, L)^nu1 padded by P on each side in
/// the surface directions, transverse extent [-W, W] in the others.
inline LatticeBox make_surface_box(int nu, int nu1, long L, long W, long P, Boundary boundary = Boundary::dirichlet) {
  if (nu1 >= nu) throw std::invalid_argument("surface model needs nu2 = nu - nu1 >= 1");
  if (L < 1 || W < 0 || P < 0) throw std::invalid_argument("surface box needs L >= 1, W >= 0, P >= 0");
  LatticeBox box;
  box.nu = nu;
  box.nu1 = nu1;
  box.boundary = boundary;
  for (int d = 0; d < nu; ++d) box.extents.push_back(d < nu1 ? Extent{-P, L + P} : Extent{-W, W + 1});
  for (int d = 0; d < nu1; ++d) box.window.push_back({0, L});
  box.validate();
  return box;
}

/// Cube [0, L)^nu without a surface split.
inline LatticeBox make_bulk_box(int nu, long L, Boundary boundary = Boundary::dirichlet) {
  if (L < 1) throw std::invalid_argument("bulk box needs L >= 1");
  LatticeBox box;
  box.nu = nu;
  box.nu1 = 0;
  box.boundary = boundary;
  box.extents.assign(static_cast<std::size_t>(nu), Extent{0, L});
  box.validate();
  return box;
}

/// Generator of surface boxes indexed by the window length L.
/// W and P default to L and L/2.
struct SurfaceFamily {
  int nu = 2;
  int nu1 = 1;
  std::optional<long> W;
  std::optional<long> P;
  Boundary boundary = Boundary::dirichlet;

  LatticeBox box(long L) const { return make_surface_box(nu, nu1, L, W.value_or(L), P.value_or(L / 2), boundary); }
};

// ---------------------------------------------------------------------------
// Disorder laws

struct PointMass {
  double alpha = 0.0;
};
struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
};
/// Value `b` with probability `prob`, `a` otherwise.
struct BernoulliLaw {
  double a = 0.0;
  double b = 1.0;
  double prob = 0.5;
};
struct DiscreteLaw {
  std::vector<double> values;
  std::vector<double> weights;
};

/// Common law of the i.i.d. couplings.
struct DisorderSpec {
  std::variant<PointMass, UniformLaw, BernoulliLaw, DiscreteLaw> kind = PointMass{};
  /// sup of the density when the law is absolutely continuous.
  std::optional<double> density_sup;

  static DisorderSpec point_mass(double alpha) { return {PointMass{alpha}, std::nullopt}; }
  static DisorderSpec uniform(double lo, double hi) { return {UniformLaw{lo, hi}, hi > lo ? std::optional(1.0 / (hi - lo)) : std::nullopt}; }
  static DisorderSpec bernoulli(double a, double b, double prob) { return {BernoulliLaw{a, b, prob}, std::nullopt}; }
  static DisorderSpec discrete(std::vector<double> values, std::vector<double> weights) {
    return {DiscreteLaw{std::move(values), std::move(weights)}, std::nullopt};
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("invalid disorder: " + m); };
    if (const auto* u = std::get_if<UniformLaw>(&kind)) {
      if (!(std::isfinite(u->lo) && std::isfinite(u->hi) && u->lo < u->hi)) fail("uniform law needs finite lo < hi");
    } else if (const auto* b = std::get_if<BernoulliLaw>(&kind)) {
      if (!(b->prob >= 0.0 && b->prob <= 1.0)) fail("bernoulli probability must lie in [0, 1]");
      if (!std::isfinite(b->a) || !std::isfinite(b->b)) fail("bernoulli values must be finite");
    } else if (const auto* f = std::get_if<DiscreteLaw>(&kind)) {
      if (f->values.empty() || f->values.size() != f->weights.size()) fail("discrete law needs matching nonempty values and weights");
      double total = 0.0;
      for (std::size_t i = 0; i < f->values.size(); ++i) {
        if (!(f->weights[i] >= 0.0)) fail("discrete weights must be nonnegative");
        if (!std::isfinite(f->values[i])) fail("discrete values must be finite");
        total += f->weights[i];
      }
      if (std::abs(total - 1.0) > 1e-12) fail("discrete weights must sum to 1");
    } else if (!std::isfinite(std::get<PointMass>(kind).alpha)) {
      fail("point mass must be finite");
    }
  }

  /// Declared support [alpha_-, alpha_+].
  std::pair<double, double> support() const {
    return std::visit(
        [](const auto& law) -> std::pair<double, double> {
          using T = std::decay_t<decltype(law)>;
          if constexpr (std::is_same_v<T, PointMass>) {
            return {law.alpha, law.alpha};
          } else if constexpr (std::is_same_v<T, UniformLaw>) {
            return {law.lo, law.hi};
          } else if constexpr (std::is_same_v<T, BernoulliLaw>) {
            return {std::min(law.a, law.b), std::max(law.a, law.b)};
          } else {
            const auto [lo, hi] = std::minmax_element(law.values.begin(), law.values.end());
            return {*lo, *hi};
          }
        },
        kind);
  }

  double mean() const {
    return std::visit(
        [](const auto& law) -> double {
          using T = std::decay_t<decltype(law)>;
          if constexpr (std::is_same_v<T, PointMass>) {
            return law.alpha;
          } else if constexpr (std::is_same_v<T, UniformLaw>) {
            return 0.5 * (law.lo + law.hi);
          } else if constexpr (std::is_same_v<T, BernoulliLaw>) {
            return (1.0 - law.prob) * law.a + law.prob * law.b;
          } else {
            double m = 0.0;
            for (std::size_t i = 0; i < law.values.size(); ++i) m += law.values[i] * law.weights[i];
            return m;
          }
        },
        kind);
  }

  /// Maps 64 random bits to one coupling. This mapping is part of the
  /// reproducibility contract.
  double draw(std::uint64_t bits) const {
    const double u = seeding::unit_interval(bits);
    return std::visit(
        [u](const auto& law) -> double {
          using T = std::decay_t<decltype(law)>;
          if constexpr (std::is_same_v<T, PointMass>) {
            return law.alpha;
          } else if constexpr (std::is_same_v<T, UniformLaw>) {
            return law.lo + (law.hi - law.lo) * u;
          } else if constexpr (std::is_same_v<T, BernoulliLaw>) {
            return u < law.prob ? law.b : law.a;
          } else {
            double cum = 0.0;
            for (std::size_t i = 0; i < law.values.size(); ++i) {
              cum += law.weights[i];
              if (u < cum) return law.values[i];
            }
            return law.values.back();
          }
        },
        kind);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& law) {
          using T = std::decay_t<decltype(law)>;
          if constexpr (std::is_same_v<T, PointMass>) {
            os << "point_mass(" << law.alpha << ")";
          } else if constexpr (std::is_same_v<T, UniformLaw>) {
            os << "uniform(" << law.lo << ";" << law.hi << ")";
          } else if constexpr (std::is_same_v<T, BernoulliLaw>) {
            os << "bernoulli(" << law.a << ";" << law.b << ";" << law.prob << ")";
          } else {
            os << "discrete(";
            for (std::size_t i = 0; i < law.values.size(); ++i) os << (i ? ";" : "") << law.values[i] << ":" << law.weights[i];
            os << ")";
          }
        },
        kind);
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// Operators

/// Diagonal multiplication operator on a box, stored sparsely by site index.
struct DiagonalPotential {
  LatticeBox box;
  std::map<std::size_t, double> values;
  /// Set when a surface potential was requested but {n2 = 0} misses the box.
  bool hyperplane_missing = false;

  std::size_t rank() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](const auto& kv) { return kv.second != 0.0; }));
  }

  Eigen::VectorXd diagonal() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(box.site_count()));
    for (const auto& [site, v] : values) d[static_cast<Eigen::Index>(site)] = v;
    return d;
  }
};

/// Dense real symmetric matrix. The strict lower triangle is always an exact
/// mirror of the upper one.
class SymmetricOperator {
 public:
  SymmetricOperator() = default;

  explicit SymmetricOperator(Eigen::MatrixXd entries, std::optional<LatticeBox> box = std::nullopt)
      : entries_(std::move(entries)), box_(std::move(box)) {
    if (entries_.rows() != entries_.cols()) throw std::invalid_argument("SymmetricOperator needs a square matrix");
    if (box_ && static_cast<Eigen::Index>(box_->site_count()) != entries_.rows())
      throw std::invalid_argument("SymmetricOperator dimension does not match its box");
    const double scale = entries_.size() ? 1.0 + entries_.cwiseAbs().maxCoeff() : 1.0;
    for (Eigen::Index j = 0; j < entries_.cols(); ++j)
      for (Eigen::Index i = j + 1; i < entries_.rows(); ++i) {
        if (std::abs(entries_(i, j) - entries_(j, i)) > 1e-12 * scale)
          throw std::invalid_argument("SymmetricOperator: matrix is not symmetric");
        entries_(i, j) = entries_(j, i);
      }
  }

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const std::optional<LatticeBox>& box() const noexcept { return box_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  SymmetricOperator plus_diagonal(const Eigen::VectorXd& d) const {
    if (d.size() != dim()) throw std::invalid_argument("diagonal size mismatch");
    SymmetricOperator out = *this;
    out.entries_.diagonal() += d;
    return out;
  }

 private:
  Eigen::MatrixXd entries_;
  std::optional<LatticeBox> box_;
};

inline SymmetricOperator operator+(const SymmetricOperator& h, const DiagonalPotential& v) {
  if (static_cast<std::size_t>(h.dim()) != v.box.site_count()) throw std::invalid_argument("potential does not match operator dimension");
  SymmetricOperator out = h;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(h.dim());
  for (const auto& [site, value] : v.values) d[static_cast<Eigen::Index>(site)] = value;
  return out.plus_diagonal(d);
}

/// Nearest-neighbour adjacency operator (zero diagonal) of the box.
inline SymmetricOperator build_box_laplacian(const LatticeBox& box) {
  box.validate();
  const auto n = static_cast<Eigen::Index>(box.site_count());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < box.site_count(); ++s) {
    auto x = box.coordinates(s);
    for (std::size_t d = 0; d < x.size(); ++d) {
      const auto& e = box.extents[d];
      const long here = x[d];
      long next = here + 1;
      if (next >= e.hi) {
        if (box.boundary != Boundary::periodic) continue;
        next = e.lo;
      }
      x[d] = next;
      const auto t = box.site_index(x);
      x[d] = here;
      h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = 1.0;
      h(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = 1.0;
    }
  }
  return SymmetricOperator(std::move(h), box);
}

namespace detail {

// Calls fn(window_index, coords) for every window site, lexicographically.
template <class Fn>
void for_each_window_site(const LatticeBox& box, Fn&& fn) {
  const auto win = box.surface_window();
  std::vector<long> x(static_cast<std::size_t>(box.nu), 0);
  std::size_t count = 1;
  for (const auto& e : win) count *= static_cast<std::size_t>(e.length());
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t rem = j;
    for (std::size_t d = win.size(); d-- > 0;) {
      const auto len = static_cast<std::size_t>(win[d].length());
      x[d] = win[d].lo + static_cast<long>(rem % len);
      rem /= len;
    }
    fn(j, std::span<const long>(x));
  }
}

}  // namespace detail

/// Couplings on the hyperplane {n2 = 0}, one per window site. The coupling of
/// window site j (lexicographic in the window) in realization r is
/// draw(site_bits(realization_seed(master_seed, r), j)).
inline DiagonalPotential sample_surface_potential(const LatticeBox& box, const DisorderSpec& disorder, std::uint64_t master_seed,
                                                  std::uint64_t realization) {
  box.validate();
  disorder.validate();
  if (box.nu2() < 1) throw std::invalid_argument("surface potential needs nu2 >= 1");
  DiagonalPotential v{box, {}, false};
  for (int d = box.nu1; d < box.nu; ++d) {
    if (!box.extents[static_cast<std::size_t>(d)].contains(0)) {
      v.hyperplane_missing = true;
      return v;
    }
  }
  const auto rseed = seeding::realization_seed(master_seed, realization);
  detail::for_each_window_site(box, [&](std::size_t j, std::span<const long> x) {
    v.values.emplace(box.site_index(x), disorder.draw(seeding::site_bits(rseed, j)));
  });
  return v;
}

/// Couplings on every site of the box, keyed by the box site index.
inline DiagonalPotential sample_bulk_potential(const LatticeBox& box, const DisorderSpec& disorder, std::uint64_t master_seed,
                                               std::uint64_t realization) {
  box.validate();
  disorder.validate();
  DiagonalPotential v{box, {}, false};
  const auto rseed = seeding::realization_seed(master_seed, realization);
  for (std::size_t s = 0; s < box.site_count(); ++s) v.values.emplace_hint(v.values.end(), s, disorder.draw(seeding::site_bits(rseed, s)));
  return v;
}

/// Positive and negative parts, V = V+ + V- entrywise.
inline std::pair<DiagonalPotential, DiagonalPotential> split_potential(const DiagonalPotential& v) {
  DiagonalPotential plus{v.box, {}, v.hyperplane_missing};
  DiagonalPotential minus{v.box, {}, v.hyperplane_missing};
  for (const auto& [site, value] : v.values) {
    plus.values.emplace_hint(plus.values.end(), site, value > 0.0 ? value : 0.0);
    minus.values.emplace_hint(minus.values.end(), site, value < 0.0 ? value : 0.0);
  }
  return {std::move(plus), std::move(minus)};
}

}  // namespace ssf
