#pragma once

// Executable checks of the identities and inequalities satisfied by spectral
// shift functions of finite matrices. Every check returns a BoundReport.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ssf/error.hpp"
#include "ssf/format.hpp"
#include "ssf/model.hpp"
#include "ssf/parallel.hpp"
#include "ssf/quadrature.hpp"
#include "ssf/seeding.hpp"
#include "ssf/spectral.hpp"
#include "ssf/surface_green.hpp"

namespace ssf {

inline constexpr double bound_tolerance = 1e-9;

inline bool within_bound(double lhs, double rhs) { return lhs <= rhs + bound_tolerance * (1.0 + std::abs(rhs)); }

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  double slack = 0.0;
  /// Named parameters and auxiliary values, in insertion order.
  std::vector<std::pair<std::string, double>> details;
  std::vector<std::string> flags;

  BoundReport() = default;
  BoundReport(std::string n, double l, double r) : name(std::move(n)), lhs(l), rhs(r), holds(within_bound(l, r)), slack(r - l) {}

  BoundReport& with(std::string key, double value) {
    details.emplace_back(std::move(key), value);
    return *this;
  }
  BoundReport& flag(std::string f) {
    if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(std::move(f));
    return *this;
  }

  std::optional<double> detail(const std::string& key) const {
    for (const auto& [k, v] : details)
      if (k == key) return v;
    return std::nullopt;
  }
  bool flagged(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

  /// `key=value` pairs and flags joined by ';'.
  std::string context() const {
    std::string out;
    for (const auto& [k, v] : details) {
      if (!out.empty()) out += ';';
      out += k + '=' + format_double(v);
    }
    for (const auto& f : flags) {
      if (!out.empty()) out += ';';
      out += f;
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Test functions

struct TestFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  /// Interval on which the function is defined; nullopt means all of R.
  std::optional<Interval> domain;

  static TestFunction polynomial(std::vector<double> coeffs) {
    auto c = std::make_shared<std::vector<double>>(std::move(coeffs));
    TestFunction f;
    f.name = "polynomial";
    f.value = [c](double x) {
      double s = 0.0;
      for (auto it = c->rbegin(); it != c->rend(); ++it) s = s * x + *it;
      return s;
    };
    f.derivative = [c](double x) {
      double s = 0.0;
      for (std::size_t i = c->size(); i-- > 1;) s = s * x + static_cast<double>(i) * (*c)[i];
      return s;
    };
    return f;
  }

  /// exp(-((x - center) / width)^2)
  static TestFunction gaussian(double center, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    TestFunction f;
    f.name = "gaussian";
    f.value = [=](double x) {
      const double u = (x - center) / width;
      return std::exp(-u * u);
    };
    f.derivative = [=](double x) {
      const double u = (x - center) / width;
      return -2.0 * u / width * std::exp(-u * u);
    };
    return f;
  }

  /// exp(-1 / (1 - u^2)) for |u| < 1, u = (x - center) / width; 0 elsewhere.
  static TestFunction smooth_bump(double center, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("bump width must be positive");
    TestFunction f;
    f.name = "bump";
    f.value = [=](double x) {
      const double u = (x - center) / width;
      return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    };
    f.derivative = [=](double x) {
      const double u = (x - center) / width;
      if (!(std::abs(u) < 1.0)) return 0.0;
      const double q = 1.0 - u * u;
      return std::exp(-1.0 / q) * (-2.0 * u / (q * q)) / width;
    };
    return f;
  }
};

// ---------------------------------------------------------------------------
// Checks

/// |tr phi(A+C) - tr phi(A) - int phi' xi| against 1e-8 (1 + |tr phi(A+C)|).
inline BoundReport check_trace_formula(const SymmetricOperator& a, const SymmetricOperator& c, const TestFunction& phi) {
  if (a.dim() != c.dim()) throw std::invalid_argument("check_trace_formula: dimension mismatch");
  const SymmetricOperator b(a.entries() + c.entries());
  const auto sa = eigen_decompose(a);
  const auto sb = eigen_decompose(b);
  if (phi.domain) {
    for (const auto* s : {&sa, &sb})
      if (!s->eigenvalues.empty() && (s->eigenvalues.front() < phi.domain->lo || s->eigenvalues.back() > phi.domain->hi))
        throw std::invalid_argument("check_trace_formula: test function does not cover the spectra");
  }
  double tr_b = 0.0;
  double tr_a = 0.0;
  for (double e : sb.eigenvalues) tr_b += phi.value(e);
  for (double e : sa.eigenvalues) tr_a += phi.value(e);
  const auto xi = spectral_shift(sa, sb);
  const double integral = step_integrate(xi, phi.derivative);
  const double residual = std::abs((tr_b - tr_a) - integral);
  BoundReport r("trace_formula", residual, 1e-8 * (1.0 + std::abs(tr_b)));
  r.with("dim", static_cast<double>(a.dim())).with("trace_difference", tr_b - tr_a).with("integral", integral);
  r.flag(phi.name);
  return r;
}

/// ||xi(.; A+C, A)||_p <= |C|_{1/p}^{1/p} = sum_j s_j(C)^{1/p}.
inline BoundReport check_chn_lp_bound(const SymmetricOperator& a, const SymmetricOperator& c, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("check_chn_lp_bound needs p >= 1");
  if (a.dim() != c.dim()) throw std::invalid_argument("check_chn_lp_bound: dimension mismatch");
  const SymmetricOperator b(a.entries() + c.entries());
  const auto xi = spectral_shift(a, b);
  const double lhs = step_lp_norm(xi, p);
  const double rhs = schatten_power_sum(singular_values(c.entries()), 1.0 / p);
  BoundReport r("chn_lp_bound", lhs, rhs);
  r.with("p", p).with("dim", static_cast<double>(a.dim()));
  return r;
}

/// sup |xi(.; A+C, A)| <= rank C.
inline BoundReport check_rank_bound(const SymmetricOperator& a, const SymmetricOperator& c) {
  if (a.dim() != c.dim()) throw std::invalid_argument("check_rank_bound: dimension mismatch");
  const SymmetricOperator b(a.entries() + c.entries());
  const auto xi = spectral_shift(a, b);
  const double lhs = step_lp_norm(xi, std::numeric_limits<double>::infinity());
  const auto rank = matrix_rank(c.entries());
  BoundReport r("rank_bound", lhs, static_cast<double>(rank));
  r.holds = lhs <= static_cast<double>(rank);
  r.with("dim", static_cast<double>(a.dim()));
  return r;
}

/// xi(lambda; B, A) against -xi((lambda+a)^{-k}; (B+a)^{-k}, (A+a)^{-k}),
/// compared at midpoints of the merged breakpoints. Expected discrepancy 0.
inline BoundReport check_invariance_principle(const SymmetricOperator& a, const SymmetricOperator& b, double shift, int k) {
  if (a.dim() != b.dim()) throw std::invalid_argument("check_invariance_principle: dimension mismatch");
  if (k < 1) throw std::invalid_argument("check_invariance_principle needs k >= 1");
  const auto sa = eigen_decompose(a);
  const auto sb = eigen_decompose(b);
  const double bottom = std::min(sa.eigenvalues.empty() ? 0.0 : sa.eigenvalues.front(), sb.eigenvalues.empty() ? 0.0 : sb.eigenvalues.front());
  if (!(bottom + shift > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "check_invariance_principle: a = " << shift << " does not clear the spectra (lambda_min = " << bottom << ")";
    throw margin_error(os.str());
  }
  const auto direct = spectral_shift(sa, sb);
  const auto mapped = spectral_shift(resolvent_power(a, shift, k), resolvent_power(b, shift, k));

  std::vector<double> pulled;
  for (double t : mapped.breakpoints())
    if (t > 0.0) pulled.push_back(std::pow(t, -1.0 / k) - shift);

  const double scale = std::max(sa.scale(), sb.scale()) + std::abs(shift);
  const double tol = 1e-8 * scale;
  auto mapped_at = [&](double x) { return -mapped(std::pow(x + shift, -k)); };
  const auto cmp = compare_at_midpoints(direct, mapped_at, pulled, tol, [shift](double x) { return x + shift > 0.0; });

  // distinct eigenvalues of A and B closer than the probe tolerance
  std::vector<double> all = sa.eigenvalues;
  all.insert(all.end(), sb.eigenvalues.begin(), sb.eigenvalues.end());
  bool degenerate = false;
  detail::cluster_points(std::move(all), tol, &degenerate);

  BoundReport r("invariance_principle", cmp.max_discrepancy, 0.0);
  r.with("a", shift).with("k", k).with("probes", static_cast<double>(cmp.points));
  if (degenerate) {
    r.flag("degenerate_merge");
    r.holds = true;
  }
  return r;
}

/// xi(h0+V, h0) = xi(h0+V, h0+V+) + xi(h0+V+, h0), with the first term <= 0
/// and the second >= 0. lhs is the largest violation of any of the three.
inline BoundReport check_chain_rule(const SymmetricOperator& h0, const DiagonalPotential& v) {
  const auto [vp, vm] = split_potential(v);
  const auto hp = h0 + vp;
  const auto h = hp + vm;
  const auto sh0 = eigen_decompose(h0);
  const auto shp = eigen_decompose(hp);
  const auto sh = eigen_decompose(h);
  const auto total = spectral_shift(sh0, sh);
  const auto first = spectral_shift(shp, sh);
  const auto second = spectral_shift(sh0, shp);
  const auto sum = first + second;
  const double scale = std::max({sh0.scale(), shp.scale(), sh.scale()});
  const auto cmp = compare_at_midpoints(total, sum, 1e-9 * scale);
  double first_max = 0.0;
  for (double x : first.values()) first_max = std::max(first_max, x);
  double second_min = 0.0;
  for (double x : second.values()) second_min = std::min(second_min, x);
  const double violation = std::max({cmp.max_discrepancy, first_max, -second_min});
  BoundReport r("chain_rule", violation, 0.0);
  r.with("identity_discrepancy", cmp.max_discrepancy).with("first_term_max", first_max).with("second_term_min", second_min);
  r.with("rank_plus", static_cast<double>(vp.rank())).with("rank_minus", static_cast<double>(vm.rank()));
  return r;
}

/// |T1 T2|_p <= |T1|_{p1} |T2|_{p2}, 1/p = 1/p1 + 1/p2.
inline BoundReport check_schatten_product(const Eigen::MatrixXd& t1, const Eigen::MatrixXd& t2, double p1, double p2) {
  if (!(p1 > 0.0) || !(p2 > 0.0)) throw std::invalid_argument("check_schatten_product needs p1, p2 > 0");
  if (t1.cols() != t2.rows()) throw std::invalid_argument("check_schatten_product: shapes do not compose");
  const double inv = (std::isinf(p1) ? 0.0 : 1.0 / p1) + (std::isinf(p2) ? 0.0 : 1.0 / p2);
  const double p = inv == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv;
  const double lhs = schatten_quasi_norm(Eigen::MatrixXd(t1 * t2), p);
  const double rhs = schatten_quasi_norm(t1, p1) * schatten_quasi_norm(t2, p2);
  BoundReport r("schatten_product", lhs, rhs);
  r.with("p1", p1).with("p2", p2).with("p", p);
  return r;
}

namespace detail {

// #{eigenvalues of A + sV strictly below e}
inline std::size_t count_below(const Eigen::MatrixXd& a, const Eigen::VectorXd& v, double s, double e) {
  Eigen::MatrixXd m = a;
  m.diagonal() += s * v;
  const auto spec = eigen_decompose(m);
  return static_cast<std::size_t>(std::lower_bound(spec.eigenvalues.begin(), spec.eigenvalues.end(), e) - spec.eigenvalues.begin());
}

// Coupling values in (s0, s1) where the count below e changes; the count is
// nonincreasing in s because V >= 0.
inline void find_crossings(const Eigen::MatrixXd& a, const Eigen::VectorXd& v, double e, double s0, std::size_t c0, double s1, std::size_t c1,
                           std::vector<double>& out) {
  if (c0 == c1) return;
  if (s1 - s0 <= 1e-14 * (1.0 + std::abs(s0) + std::abs(s1))) {
    out.push_back(0.5 * (s0 + s1));
    return;
  }
  const double mid = 0.5 * (s0 + s1);
  const auto cm = count_below(a, v, mid, e);
  find_crossings(a, v, e, s0, c0, mid, cm, out);
  find_crossings(a, v, e, mid, cm, s1, c1, out);
}

}  // namespace detail

/// int_I xi(lambda; A+a_- V, A+a_+ V) dlambda against
/// int_{a_-}^{a_+} tr(V^{1/2} E_{A+sV}([l1, l2)) V^{1/2}) ds for V >= 0.
/// The coupling integral is split at every s where an eigenvalue crosses an
/// endpoint of I, and each smooth piece uses Gauss-Legendre with `nodes`
/// points. lhs of the report is the residual, rhs the tolerance
/// 1e-6 (1 + |int xi|).
inline BoundReport check_spectral_averaging(const SymmetricOperator& a, const Eigen::VectorXd& v, double alpha_minus, double alpha_plus,
                                            Interval interval, std::size_t nodes = 512) {
  if (v.size() != a.dim()) throw std::invalid_argument("check_spectral_averaging: potential size mismatch");
  if ((v.array() < 0.0).any()) throw std::invalid_argument("check_spectral_averaging needs V >= 0");
  if (!(alpha_minus < alpha_plus)) throw std::invalid_argument("check_spectral_averaging needs alpha_- < alpha_+");
  if (!(interval.lo < interval.hi)) throw std::invalid_argument("check_spectral_averaging needs a nonempty interval");
  if (nodes < 1) throw std::invalid_argument("check_spectral_averaging needs at least one node");

  const auto& am = a.entries();
  const SymmetricOperator lo_op = a.plus_diagonal(alpha_minus * v);
  const SymmetricOperator hi_op = a.plus_diagonal(alpha_plus * v);
  const auto s_lo = eigen_decompose(lo_op);
  const auto s_hi = eigen_decompose(hi_op);
  const double energy_integral = step_integral(spectral_shift(s_lo, s_hi), interval);
  const double literal_order = step_integral(spectral_shift(s_hi, s_lo), interval);

  std::vector<double> cuts{alpha_minus, alpha_plus};
  for (double e : {interval.lo, interval.hi}) {
    const auto c0 = detail::count_below(am, v, alpha_minus, e);
    const auto c1 = detail::count_below(am, v, alpha_plus, e);
    detail::find_crossings(am, v, e, alpha_minus, c0, alpha_plus, c1, cuts);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto rule = gauss_legendre(nodes);
  bool jittered = false;
  auto integrand = [&](double s) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd m = am;
      m.diagonal() += s * v;
      const auto spec = eigen_decompose(m, true);
      const double tol = 1e-12 * spec.scale();
      bool collide = false;
      for (double e : spec.eigenvalues)
        if (std::abs(e - interval.lo) <= tol || std::abs(e - interval.hi) <= tol) collide = true;
      if (collide) {
        s += 1e-9;
        jittered = true;
        continue;
      }
      double sum = 0.0;
      const auto& q = *spec.eigenvectors;
      for (std::size_t j = 0; j < spec.dim(); ++j) {
        const double e = spec.eigenvalues[j];
        if (e < interval.lo || e >= interval.hi) continue;
        sum += (q.col(static_cast<Eigen::Index>(j)).array().square() * v.array()).sum();
      }
      return sum;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  double coupling_integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) coupling_integral += rule.integrate(integrand, cuts[i], cuts[i + 1]);

  const double residual = std::abs(energy_integral - coupling_integral);
  BoundReport r("spectral_averaging", std::isnan(residual) ? std::numeric_limits<double>::infinity() : residual,
                1e-6 * (1.0 + std::abs(energy_integral)));
  r.with("energy_integral", energy_integral).with("coupling_integral", coupling_integral).with("literal_order_integral", literal_order);
  r.with("pieces", static_cast<double>(cuts.size() - 1)).with("nodes", static_cast<double>(nodes));
  if (jittered) r.flag("endpoint_jitter");
  return r;
}

inline BoundReport check_spectral_averaging(const SymmetricOperator& a, const DiagonalPotential& v, double alpha_minus, double alpha_plus,
                                            Interval interval, std::size_t nodes = 512) {
  return check_spectral_averaging(a, v.diagonal(), alpha_minus, alpha_plus, interval, nodes);
}

// ---------------------------------------------------------------------------
// Volume scaling of resolvent differences

struct ScalingRow {
  long L = 0;
  double meas = 0.0;
  double mean_value = 0.0;  // mean over realizations of |R_V^k - R_0^k|_p^p
  double constant = 0.0;    // mean_value / meas
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double p = 1.0;
  int k = 1;
  double c = 0.0;
  /// Least-squares slope of log(mean_value) against log(meas); NaN if some
  /// value is not positive.
  double fit_slope = std::numeric_limits<double>::quiet_NaN();
  /// (max C - min C) / min C over the rows.
  double constant_variation = std::numeric_limits<double>::quiet_NaN();
};

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

namespace detail {

// |rv - r0|_p^p; the max row sum bounds the operand norms for the roundoff floor
inline double resolvent_difference_power(const SymmetricOperator& r0, const SymmetricOperator& rv, double p) {
  const double reference = std::max(r0.entries().cwiseAbs().rowwise().sum().maxCoeff(), rv.entries().cwiseAbs().rowwise().sum().maxCoeff());
  return schatten_power_sum(singular_values(Eigen::MatrixXd(rv.entries() - r0.entries()), reference), p);
}

}  // namespace detail

/// |(h0+V+c)^{-k} - (h0+c)^{-k}|_p^p for one surface potential, dense.
inline double dense_resolvent_difference_power(const SymmetricOperator& h0, const DiagonalPotential& v, double p, int k, double c) {
  return detail::resolvent_difference_power(resolvent_power(h0, c, k), resolvent_power(h0 + v, c, k), p);
}

inline ScalingStudy resolvent_scaling_study(const SurfaceFamily& family, const std::vector<long>& L_list, const DisorderSpec& disorder, double p,
                                            int k, double c, std::size_t realizations, std::uint64_t master_seed,
                                            const ExecutionOptions& exec = {}) {
  if (L_list.empty()) throw std::invalid_argument("resolvent_scaling_study needs at least one L");
  if (!std::is_sorted(L_list.begin(), L_list.end())) throw std::invalid_argument("resolvent_scaling_study needs ascending L_list");
  if (realizations < 1) throw std::invalid_argument("resolvent_scaling_study needs realizations >= 1");
  if (!(p > 0.0) || k < 1) throw std::invalid_argument("resolvent_scaling_study needs p > 0 and k >= 1");
  disorder.validate();
  ScalingStudy study;
  study.p = p;
  study.k = k;
  study.c = c;
  std::vector<double> meas;
  std::vector<double> values;
  for (long L : L_list) {
    const auto box = family.box(L);
    std::vector<double> per(realizations, 0.0);
    if (k == 1 && exec.route == Route::structured) {
      const SurfaceGreen green(box);
      parallel_for(realizations, exec.workers, [&](std::size_t r) {
        const auto v = sample_surface_potential(box, disorder, master_seed, r);
        per[r] = schatten_power_sum(structured_resolvent_difference(green, v, c), p);
      });
    } else {
      const auto h0 = build_box_laplacian(box);
      const auto r0 = resolvent_power(h0, c, k);
      parallel_for(realizations, exec.workers, [&](std::size_t r) {
        const auto v = sample_surface_potential(box, disorder, master_seed, r);
        per[r] = detail::resolvent_difference_power(r0, resolvent_power(h0 + v, c, k), p);
      });
    }
    double sum = 0.0;
    for (double x : per) sum += x;
    ScalingRow row;
    row.L = L;
    row.meas = static_cast<double>(box.window_site_count());
    row.mean_value = sum / static_cast<double>(realizations);
    row.constant = row.mean_value / row.meas;
    study.rows.push_back(row);
    meas.push_back(row.meas);
    values.push_back(row.mean_value);
  }
  study.fit_slope = loglog_slope(meas, values);
  double cmin = std::numeric_limits<double>::infinity();
  double cmax = -std::numeric_limits<double>::infinity();
  for (const auto& row : study.rows) {
    cmin = std::min(cmin, row.constant);
    cmax = std::max(cmax, row.constant);
  }
  if (cmin > 0.0) study.constant_variation = (cmax - cmin) / cmin;
  return study;
}

// ---------------------------------------------------------------------------
// Random instances

namespace random_instances {

inline Eigen::MatrixXd symmetric(Eigen::Index n, seeding::SplitMix64& rng, double amplitude = 1.0) {
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) m(i, j) = m(j, i) = rng.uniform(-amplitude, amplitude);
  return m;
}

inline Eigen::MatrixXd general(Eigen::Index rows, Eigen::Index cols, seeding::SplitMix64& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

/// sum_{i < rank} sigma_i u_i u_i^T with random unit u_i; sigma_i in
/// [0.1, 2], with random signs unless `positive`.
inline Eigen::MatrixXd low_rank(Eigen::Index n, Eigen::Index rank, seeding::SplitMix64& rng, bool positive = false) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < rank; ++i) {
    Eigen::VectorXd u(n);
    for (Eigen::Index j = 0; j < n; ++j) u[j] = rng.uniform(-1.0, 1.0);
    u.normalize();
    double sigma = rng.uniform(0.1, 2.0);
    if (!positive && rng.uniform() < 0.5) sigma = -sigma;
    c += sigma * u * u.transpose();
  }
  return 0.5 * (c + c.transpose());
}

/// Diagonal with `rank` entries in [0.1, 2] at distinct random positions.
inline Eigen::VectorXd nonnegative_diagonal(Eigen::Index n, Eigen::Index rank, seeding::SplitMix64& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < std::min(rank, n); ++i) v[idx[static_cast<std::size_t>(i)]] = rng.uniform(0.1, 2.0);
  return v;
}

inline Eigen::Index dimension(seeding::SplitMix64& rng, Eigen::Index max_dim) {
  return 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(max_dim));
}

}  // namespace random_instances

struct CheckSuiteOptions {
  std::size_t instances = 20;
  Eigen::Index max_dim = 8;
  std::uint64_t seed = 0;
  std::size_t averaging_nodes = 512;
};

/// One report per check and instance. Instance i draws from
/// realization_seed(seed, i); reports are ordered by instance, then check.
inline std::vector<BoundReport> random_check_suite(const CheckSuiteOptions& opt, const ExecutionOptions& exec = {}) {
  if (opt.instances < 1) throw std::invalid_argument("check suite needs instances >= 1");
  if (opt.max_dim < 1) throw std::invalid_argument("check suite needs max_dim >= 1");
  std::vector<std::vector<BoundReport>> per(opt.instances);
  parallel_for(opt.instances, exec.workers, [&](std::size_t i) {
    seeding::SplitMix64 rng(seeding::realization_seed(opt.seed, i));
    auto& out = per[i];
    const auto n = random_instances::dimension(rng, opt.max_dim);
    const auto rank = std::min<Eigen::Index>(n, 1 + static_cast<Eigen::Index>(rng() % 3));
    const SymmetricOperator a(random_instances::symmetric(n, rng));
    const SymmetricOperator c(random_instances::low_rank(n, rank, rng));
    out.push_back(check_trace_formula(a, c, TestFunction::polynomial({0.3, -1.0, 0.5, 0.25})));
    out.push_back(check_trace_formula(a, c, TestFunction::gaussian(rng.uniform(-1.0, 1.0), 0.75)));
    for (double p : {1.0, 2.0, 4.0}) out.push_back(check_chn_lp_bound(a, c, p));
    out.push_back(check_rank_bound(a, c));

    const SymmetricOperator b(a.entries() + c.entries());
    const double bottom = std::min(eigen_decompose(a).eigenvalues.front(), eigen_decompose(b).eigenvalues.front());
    const int k = 1 + static_cast<int>(rng() % 3);
    out.push_back(check_invariance_principle(a, b, 0.5 - bottom + rng.uniform(), k));

    static constexpr double exps[] = {0.5, 1.0, 2.0, 4.0};
    const Eigen::Index m = random_instances::dimension(rng, opt.max_dim);
    const auto t1 = random_instances::general(n, m, rng);
    const auto t2 = random_instances::general(m, random_instances::dimension(rng, opt.max_dim), rng);
    out.push_back(check_schatten_product(t1, t2, exps[rng() % 4], exps[rng() % 4]));

    const auto v = random_instances::nonnegative_diagonal(n, std::min<Eigen::Index>(n, 1 + static_cast<Eigen::Index>(rng() % 2)), rng);
    const double lo = rng.uniform(-2.0, 0.0);
    out.push_back(check_spectral_averaging(a, v, 0.0, rng.uniform(0.5, 2.0), {lo, lo + rng.uniform(0.5, 3.0)}, opt.averaging_nodes));

    const auto box = make_surface_box(2, 1, 2 + static_cast<long>(rng() % 4), 2, 1);
    const auto h0 = build_box_laplacian(box);
    out.push_back(check_chain_rule(h0, sample_surface_potential(box, DisorderSpec::uniform(-1.0, 1.0), opt.seed, i)));
  });
  std::vector<BoundReport> all;
  for (auto& v : per)
    for (auto& r : v) all.push_back(std::move(r));
  return all;
}

}  // namespace ssf
