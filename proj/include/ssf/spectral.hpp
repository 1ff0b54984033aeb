#pragma once

// Exact finite-dimensional spectral computations: eigendecomposition,
// eigenvalue counting, spectral shift functions as step functions, Schatten
// quasi-norms and resolvent powers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ssf/error.hpp"
#include "ssf/model.hpp"
#include "ssf/quadrature.hpp"

namespace ssf {

/// Relative tolerance below which eigenvalues of two spectra are treated as
/// one breakpoint.
inline constexpr double merge_tolerance = 1e-12;

struct Spectrum {
  std::vector<double> eigenvalues;                 // ascending
  std::optional<Eigen::MatrixXd> eigenvectors;     // columns, same order

  std::size_t dim() const noexcept { return eigenvalues.size(); }

  double scale() const noexcept {
    double s = 1.0;
    for (double e : eigenvalues) s = std::max(s, std::abs(e));
    return s;
  }
};

inline Spectrum eigen_decompose(const Eigen::MatrixXd& s, bool want_vectors = false) {
  if (s.rows() != s.cols()) throw std::invalid_argument("eigen_decompose needs a square matrix");
  if (!s.allFinite()) throw std::invalid_argument("eigen_decompose: non-finite entries");
  const auto n = s.rows();
  Spectrum out;
  bool diagonal = true;
  for (Eigen::Index j = 0; j < n && diagonal; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j && s(i, j) != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    // exact: eigenvalues are the diagonal itself
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return s(a, a) < s(b, b); });
    out.eigenvalues.reserve(order.size());
    for (auto i : order) out.eigenvalues.push_back(s(i, i));
    if (want_vectors) {
      Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index c = 0; c < n; ++c) q(order[static_cast<std::size_t>(c)], c) = 1.0;
      out.eigenvectors = std::move(q);
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen_decompose: eigensolver did not converge");
  out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  if (want_vectors) out.eigenvectors = solver.eigenvectors();
  return out;
}

inline Spectrum eigen_decompose(const SymmetricOperator& s, bool want_vectors = false) {
  return eigen_decompose(s.entries(), want_vectors);
}

/// #{eigenvalues <= lambda + tol}; tol = 0 gives the plain closed count.
inline std::size_t counting_function(const Spectrum& spec, double lambda, double tol = 0.0) {
  return static_cast<std::size_t>(std::upper_bound(spec.eigenvalues.begin(), spec.eigenvalues.end(), lambda + tol) -
                                  spec.eigenvalues.begin());
}

// ---------------------------------------------------------------------------

/// Piecewise-constant function with strictly ascending breakpoints
/// b_1 < ... < b_m and m+1 values on (-inf, b_1), [b_1, b_2), ..., [b_m, inf).
class StepFunction {
 public:
  StepFunction() : values_{0.0} {}

  StepFunction(std::vector<double> breakpoints, std::vector<double> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (values_.size() != breakpoints_.size() + 1) throw std::invalid_argument("StepFunction needs one more value than breakpoints");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      if (!std::isfinite(breakpoints_[i])) throw std::invalid_argument("StepFunction breakpoints must be finite");
      if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1])) throw std::invalid_argument("StepFunction breakpoints must be strictly ascending");
    }
  }

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t pieces() const noexcept { return values_.size(); }

  /// Right-continuous evaluation.
  double operator()(double x) const {
    const auto idx = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin();
    return values_[static_cast<std::size_t>(idx)];
  }

  bool compactly_supported() const noexcept { return values_.front() == 0.0 && values_.back() == 0.0; }

  /// Bounds of piece i; the outer pieces are unbounded.
  std::pair<double, double> piece(std::size_t i) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {i == 0 ? -inf : breakpoints_[i - 1], i == breakpoints_.size() ? inf : breakpoints_[i]};
  }

  /// Same function with redundant breakpoints removed.
  StepFunction canonical() const {
    std::vector<double> b;
    std::vector<double> v{values_.front()};
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      if (values_[i + 1] != v.back()) {
        b.push_back(breakpoints_[i]);
        v.push_back(values_[i + 1]);
      }
    }
    return {std::move(b), std::move(v)};
  }

  StepFunction operator-() const {
    auto v = values_;
    for (auto& x : v) x = x == 0.0 ? 0.0 : -x;
    return {breakpoints_, std::move(v)};
  }

  friend StepFunction combine(const StepFunction& f, const StepFunction& g, const std::function<double(double, double)>& op) {
    std::vector<double> b;
    b.reserve(f.breakpoints_.size() + g.breakpoints_.size());
    std::set_union(f.breakpoints_.begin(), f.breakpoints_.end(), g.breakpoints_.begin(), g.breakpoints_.end(), std::back_inserter(b));
    b.erase(std::unique(b.begin(), b.end()), b.end());
    std::vector<double> v;
    v.reserve(b.size() + 1);
    v.push_back(op(f.values_.front(), g.values_.front()));
    for (double x : b) v.push_back(op(f(x), g(x)));
    return StepFunction(std::move(b), std::move(v)).canonical();
  }

  friend StepFunction operator+(const StepFunction& f, const StepFunction& g) {
    return combine(f, g, [](double a, double b) { return a + b; });
  }
  friend StepFunction operator-(const StepFunction& f, const StepFunction& g) {
    return combine(f, g, [](double a, double b) { return a - b; });
  }

  friend bool operator==(const StepFunction& f, const StepFunction& g) {
    return f.breakpoints_ == g.breakpoints_ && f.values_ == g.values_;
  }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

namespace detail {

// Sorted values grouped into clusters whose consecutive gaps are <= tol.
// Each cluster is represented by its smallest member.
inline std::vector<double> cluster_points(std::vector<double> pts, double tol, bool* merged = nullptr) {
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!out.empty() && pts[i] - pts[i - 1] <= tol) {
      if (merged && pts[i] != pts[i - 1]) *merged = true;
      continue;
    }
    out.push_back(pts[i]);
  }
  return out;
}

}  // namespace detail

/// xi(.; B, A) = N_A - N_B for spectra of equal dimension. Breakpoints closer
/// than merge_tolerance * scale are merged and zero net jumps are dropped.
inline StepFunction spectral_shift(const Spectrum& a, const Spectrum& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("spectral_shift: dimension mismatch");
  struct Event {
    double x;
    int jump;
  };
  std::vector<Event> events;
  events.reserve(a.dim() + b.dim());
  for (double e : a.eigenvalues) events.push_back({e, +1});
  for (double e : b.eigenvalues) events.push_back({e, -1});
  std::sort(events.begin(), events.end(), [](const Event& l, const Event& r) { return l.x < r.x; });
  const double tol = merge_tolerance * std::max(a.scale(), b.scale());

  std::vector<double> bps;
  std::vector<double> vals{0.0};
  int level = 0;
  std::size_t i = 0;
  while (i < events.size()) {
    const double at = events[i].x;
    int jump = 0;
    std::size_t j = i;
    while (j < events.size() && (j == i || events[j].x - events[j - 1].x <= tol)) jump += events[j++].jump;
    if (jump != 0) {
      level += jump;
      bps.push_back(at);
      vals.push_back(static_cast<double>(level));
    }
    i = j;
  }
  return {std::move(bps), std::move(vals)};
}

/// xi(.; B, A): spectral shift of B relative to A, N_A - N_B.
inline StepFunction spectral_shift(const SymmetricOperator& a, const SymmetricOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("spectral_shift: dimension mismatch");
  return spectral_shift(eigen_decompose(a), eigen_decompose(b));
}

// ---------------------------------------------------------------------------
// Singular values and Schatten quasi-norms

struct SingularValueList {
  std::vector<double> values;  // descending
};

/// Descending singular values. Values at or below max(m, n) * eps * max(s_1,
/// reference) are roundoff and are set to 0, so quasi-norms with p < 1 see
/// exact zeros. Pass the norm of the operands as `reference` when t was
/// formed by cancellation.
inline SingularValueList singular_values(const Eigen::MatrixXd& t, double reference = 0.0) {
  SingularValueList out;
  if (t.size() == 0) return out;
  if (t.rows() == t.cols() && t == t.transpose()) {
    for (double e : eigen_decompose(t).eigenvalues) out.values.push_back(std::abs(e));
  } else if (std::min(t.rows(), t.cols()) <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(t);
    out.values.assign(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size());
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(t);
    out.values.assign(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size());
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  if (!out.values.empty()) {
    const double floor = static_cast<double>(std::max(t.rows(), t.cols())) * std::numeric_limits<double>::epsilon() * std::max(out.values.front(), reference);
    for (double& v : out.values)
      if (v <= floor) v = 0.0;
  }
  return out;
}

/// sum_j s_j^p, accumulated from the largest term down.
inline double schatten_power_sum(const SingularValueList& s, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("Schatten exponent must be positive");
  double sum = 0.0;
  for (double v : s.values) sum += std::pow(v, p);
  return sum;
}

/// |T|_p = (sum_j s_j^p)^{1/p}; p = inf gives s_1.
inline double schatten_quasi_norm(const SingularValueList& s, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("Schatten exponent must be positive");
  if (std::isinf(p)) return s.values.empty() ? 0.0 : s.values.front();
  return std::pow(schatten_power_sum(s, p), 1.0 / p);
}

inline double schatten_quasi_norm(const Eigen::MatrixXd& t, double p) { return schatten_quasi_norm(singular_values(t), p); }

/// #{s_j > tol * s_1}.
inline std::size_t matrix_rank(const SingularValueList& s, double tol = 1e-10) {
  if (s.values.empty() || s.values.front() == 0.0) return 0;
  const double cut = tol * s.values.front();
  return static_cast<std::size_t>(std::count_if(s.values.begin(), s.values.end(), [cut](double v) { return v > cut; }));
}

inline std::size_t matrix_rank(const Eigen::MatrixXd& t, double tol = 1e-10) { return matrix_rank(singular_values(t), tol); }

// ---------------------------------------------------------------------------
// Step function norms and integrals

struct Interval {
  double lo;
  double hi;
};

namespace detail {

inline std::pair<double, double> clip(std::pair<double, double> piece, const std::optional<Interval>& iv) {
  if (!iv) return piece;
  return {std::max(piece.first, iv->lo), std::min(piece.second, iv->hi)};
}

inline void require_bounded(const StepFunction& f, const std::optional<Interval>& iv, const char* who) {
  if (!iv && !f.compactly_supported()) throw std::domain_error(std::string(who) + ": unbounded support and no interval");
}

}  // namespace detail

/// int |f|^q over the real line or over [a, b], q > 0; exact piecewise.
inline double step_abs_power_integral(const StepFunction& f, double q, std::optional<Interval> interval = std::nullopt) {
  if (!(q > 0.0) || std::isinf(q)) throw std::invalid_argument("step_abs_power_integral needs finite q > 0");
  detail::require_bounded(f, interval, "step_abs_power_integral");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    const double v = f.values()[i];
    if (v == 0.0) continue;
    const auto [lo, hi] = detail::clip(f.piece(i), interval);
    if (hi > lo) sum += std::pow(std::abs(v), q) * (hi - lo);
  }
  return sum;
}

/// L^q norm (q in (0, inf]) over the real line or over [a, b]; exact piecewise.
inline double step_lp_norm(const StepFunction& f, double q, std::optional<Interval> interval = std::nullopt) {
  if (!(q > 0.0)) throw std::invalid_argument("step_lp_norm needs q > 0");
  if (std::isinf(q)) {
    double sup = 0.0;
    for (std::size_t i = 0; i < f.pieces(); ++i) {
      const auto [lo, hi] = detail::clip(f.piece(i), interval);
      if (hi > lo) sup = std::max(sup, std::abs(f.values()[i]));
    }
    return sup;
  }
  return std::pow(step_abs_power_integral(f, q, interval), 1.0 / q);
}

/// Exact integral of f over the real line or over [a, b].
inline double step_integral(const StepFunction& f, std::optional<Interval> interval = std::nullopt) {
  detail::require_bounded(f, interval, "step_integral");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    const double v = f.values()[i];
    if (v == 0.0) continue;
    const auto [lo, hi] = detail::clip(f.piece(i), interval);
    if (hi > lo) sum += v * (hi - lo);
  }
  return sum;
}

/// Integral of g * f, piecewise adaptive order-16 Gauss on each piece.
template <class G>
double step_integrate(const StepFunction& f, G&& g, std::optional<Interval> interval = std::nullopt, double rel_tol = 1e-10) {
  detail::require_bounded(f, interval, "step_integrate");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    const double v = f.values()[i];
    if (v == 0.0) continue;
    const auto [lo, hi] = detail::clip(f.piece(i), interval);
    if (hi > lo) sum += v * integrate_smooth(g, lo, hi, rel_tol);
  }
  return sum;
}

/// Integral of g * f given an antiderivative G of g; exact up to rounding.
template <class G>
double step_integrate_antiderivative(const StepFunction& f, G&& antiderivative, std::optional<Interval> interval = std::nullopt) {
  detail::require_bounded(f, interval, "step_integrate_antiderivative");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    const double v = f.values()[i];
    if (v == 0.0) continue;
    const auto [lo, hi] = detail::clip(f.piece(i), interval);
    if (hi > lo) sum += v * (antiderivative(hi) - antiderivative(lo));
  }
  return sum;
}

struct MidpointComparison {
  double max_discrepancy = 0.0;
  bool degenerate_merge = false;
  std::size_t points = 0;
};

/// Compares f(x) with g(map(x)) at the midpoints of the merged breakpoint set
/// (plus one point beyond each end). Breakpoints closer than `tol` are merged
/// and flagged; pieces shorter than `tol` are not sampled.
template <class Map>
MidpointComparison compare_at_midpoints(const StepFunction& f, const std::function<double(double)>& g, const std::vector<double>& extra_breakpoints,
                                        double tol, Map&& admissible) {
  std::vector<double> pts = f.breakpoints();
  pts.insert(pts.end(), extra_breakpoints.begin(), extra_breakpoints.end());
  MidpointComparison out;
  const auto merged = detail::cluster_points(std::move(pts), tol, &out.degenerate_merge);
  std::vector<double> probes;
  if (merged.empty()) {
    probes.push_back(0.0);
  } else {
    probes.push_back(merged.front() - 1.0);
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) probes.push_back(0.5 * (merged[i] + merged[i + 1]));
    probes.push_back(merged.back() + 1.0);
  }
  for (double x : probes) {
    if (!admissible(x)) continue;
    out.max_discrepancy = std::max(out.max_discrepancy, std::abs(f(x) - g(x)));
    ++out.points;
  }
  return out;
}

inline MidpointComparison compare_at_midpoints(const StepFunction& f, const StepFunction& g, double tol) {
  return compare_at_midpoints(
      f, [&g](double x) { return g(x); }, g.breakpoints(), tol, [](double) { return true; });
}

// ---------------------------------------------------------------------------

/// (S + c I)^{-k} through the eigendecomposition of S.
inline SymmetricOperator resolvent_power(const SymmetricOperator& s, double c, int k) {
  if (k < 1) throw std::invalid_argument("resolvent_power needs k >= 1");
  const auto spec = eigen_decompose(s, true);
  const double lowest = spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues.front();
  if (!(lowest + c > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "resolvent_power: shift c = " << c << " does not clear the spectrum (lambda_min = " << lowest << ", margin " << lowest + c
       << ")";
    throw margin_error(os.str());
  }
  const auto& q = *spec.eigenvectors;
  Eigen::VectorXd d(static_cast<Eigen::Index>(spec.dim()));
  for (std::size_t i = 0; i < spec.dim(); ++i) d[static_cast<Eigen::Index>(i)] = std::pow(spec.eigenvalues[i] + c, -k);
  Eigen::MatrixXd r = q * d.asDiagonal() * q.transpose();
  Eigen::MatrixXd sym = 0.5 * (r + r.transpose());
  return SymmetricOperator(std::move(sym), s.box());
}

}  // namespace ssf
