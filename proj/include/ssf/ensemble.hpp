#pragma once

// Monte Carlo estimators over disorder realizations: normalized surface SSF
// on a grid, the surface functional and its sign split, the bulk IDS,
// Hoelder diagnostics and the uniform-bound monitor.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssf/bounds.hpp"
#include "ssf/format.hpp"
#include "ssf/model.hpp"
#include "ssf/parallel.hpp"
#include "ssf/spectral.hpp"
#include "ssf/surface_green.hpp"

namespace ssf {

struct LambdaGrid {
  double a = -1.0;
  double b = 1.0;
  std::size_t n = 2;

  void validate() const {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b)) throw std::invalid_argument("LambdaGrid needs finite a < b");
    if (n < 2) throw std::invalid_argument("LambdaGrid needs n >= 2");
  }

  double step() const { return (b - a) / static_cast<double>(n - 1); }
  double point(std::size_t i) const { return i + 1 == n ? b : a + static_cast<double>(i) * (b - a) / static_cast<double>(n - 1); }

  std::vector<double> points() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = point(i);
    return out;
  }

  /// [-2 nu + alpha_- - 1/2, 2 nu + alpha_+ + 1/2] with n points.
  static LambdaGrid covering(int nu, const DisorderSpec& disorder, std::size_t n = 513) {
    const auto [lo, hi] = disorder.support();
    const double edge = 2.0 * static_cast<double>(nu);
    return {-edge + std::min(lo, 0.0) - 0.5, edge + std::max(hi, 0.0) + 0.5, n};
  }
};

struct EnsembleMeta {
  std::string estimator;
  LatticeBox box;
  std::string disorder;
  std::uint64_t master_seed = 0;
  double normalization = 1.0;
  long L = 0;
  long W = 0;
  long P = 0;
};

struct EnsembleResult {
  LambdaGrid grid;
  std::vector<double> mean;
  std::vector<double> variance;
  std::size_t realizations = 0;
  EnsembleMeta meta;
  /// Per realization: sup |xi| / normalization (surface estimators).
  std::vector<double> sup_normalized;
  std::vector<std::string> warnings;
};

namespace detail {

// mean and unbiased variance of count / norm from exact integer sums
inline void integer_moments(const std::vector<std::vector<long>>& samples, double norm, std::vector<double>& mean, std::vector<double>& var) {
  const std::size_t R = samples.size();
  const std::size_t n = R ? samples.front().size() : 0;
  mean.assign(n, 0.0);
  var.assign(n, 0.0);
  const auto Rd = static_cast<long double>(R);
  for (std::size_t i = 0; i < n; ++i) {
    __int128 s = 0;
    __int128 s2 = 0;
    for (const auto& row : samples) {
      s += row[i];
      s2 += static_cast<__int128>(row[i]) * row[i];
    }
    mean[i] = static_cast<double>(static_cast<long double>(s) / (Rd * norm));
    if (R > 1) {
      const __int128 num = static_cast<__int128>(R) * s2 - s * s;
      var[i] = static_cast<double>(static_cast<long double>(num) / (Rd * (Rd - 1.0) * norm * norm));
    }
  }
}

inline void edge_warnings(EnsembleResult& res, const std::vector<std::vector<long>>& samples) {
  bool lo = false;
  bool hi = false;
  for (const auto& row : samples) {
    lo = lo || row.front() != 0;
    hi = hi || row.back() != 0;
  }
  if (lo || hi)
    res.warnings.push_back(std::string("xi is nonzero at the ") + (lo && hi ? "both grid edges" : lo ? "lower grid edge" : "upper grid edge") +
                           "; the grid may not cover the perturbed spectrum");
}

inline std::vector<long> sample_step(const StepFunction& f, const std::vector<double>& pts) {
  std::vector<long> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = std::lround(f(pts[i]));
  return out;
}

}  // namespace detail

/// Mean and variance over realizations of xi(lambda; h0 + V, h0) / S on the
/// grid, S the number of window sites.
inline EnsembleResult estimate_surface_density(const SurfaceFamily& family, long L, const DisorderSpec& disorder,
                                               std::optional<LambdaGrid> grid, std::size_t realizations, std::uint64_t master_seed,
                                               const ExecutionOptions& exec = {}) {
  if (realizations < 1) throw std::invalid_argument("estimate_surface_density needs realizations >= 1");
  disorder.validate();
  const auto box = family.box(L);
  if (box.nu2() < 1) throw std::invalid_argument("estimate_surface_density needs a surface model (nu2 >= 1)");
  EnsembleResult res;
  res.grid = grid.value_or(LambdaGrid::covering(box.nu, disorder));
  res.grid.validate();
  res.realizations = realizations;
  const double S = static_cast<double>(box.window_site_count());
  res.meta = {"surface-density", box, disorder.describe(), master_seed, S, L, family.W.value_or(L), family.P.value_or(L / 2)};

  const auto pts = res.grid.points();
  std::vector<std::vector<long>> samples(realizations);
  std::vector<double> sups(realizations, 0.0);
  bool missing = false;

  if (exec.route == Route::structured) {
    const auto probe = sample_surface_potential(box, disorder, master_seed, 0);
    missing = probe.hyperplane_missing;
    std::optional<SurfaceShiftSampler> sampler;
    if (!missing) sampler.emplace(box, pts);
    parallel_for(realizations, exec.workers, [&](std::size_t r) {
      const auto v = sample_surface_potential(box, disorder, master_seed, r);
      samples[r] = sampler ? sampler->sample(v) : std::vector<long>(pts.size(), 0);
      long sup = 0;
      for (long x : samples[r]) sup = std::max(sup, std::abs(x));
      sups[r] = static_cast<double>(sup) / S;
    });
    if (sampler && sampler->shifted_points() > 0)
      res.warnings.push_back(std::to_string(sampler->shifted_points()) + " grid points were moved off free eigenvalues by 1e-9 * scale");
  } else {
    const auto h0 = build_box_laplacian(box);
    const auto s0 = eigen_decompose(h0);
    parallel_for(realizations, exec.workers, [&](std::size_t r) {
      const auto v = sample_surface_potential(box, disorder, master_seed, r);
      if (r == 0) missing = v.hyperplane_missing;
      const auto xi = spectral_shift(s0, eigen_decompose(h0 + v));
      samples[r] = detail::sample_step(xi, pts);
      sups[r] = step_lp_norm(xi, std::numeric_limits<double>::infinity()) / S;
    });
  }
  if (missing) res.warnings.push_back("hyperplane n2 = 0 misses the box; potential is empty");
  detail::integer_moments(samples, S, res.mean, res.variance);
  res.sup_normalized = std::move(sups);
  detail::edge_warnings(res, samples);
  return res;
}

// ---------------------------------------------------------------------------

struct FunctionalRow {
  long L = 0;
  double mu = 0.0;
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  double stderr_mu = 0.0;
};

struct SurfaceFunctionalResult {
  std::vector<FunctionalRow> rows;
  /// |mu(L_i) - mu(L_{i+1})| for consecutive rows.
  std::vector<double> cauchy_differences;
  std::size_t realizations = 0;
};

/// mu(g) = E[int g xi(.; h0 + V, h0)] / S, with mu+ from xi(h0 + V+, h0) and
/// mu- from xi(h0 + V, h0 + V+).
inline SurfaceFunctionalResult estimate_surface_functional(const SurfaceFamily& family, const std::vector<long>& L_list,
                                                           const DisorderSpec& disorder, const TestFunction& g, std::size_t realizations,
                                                           std::uint64_t master_seed, const ExecutionOptions& exec = {}) {
  if (realizations < 1) throw std::invalid_argument("estimate_surface_functional needs realizations >= 1");
  if (L_list.empty()) throw std::invalid_argument("estimate_surface_functional needs at least one L");
  disorder.validate();
  SurfaceFunctionalResult out;
  out.realizations = realizations;
  for (long L : L_list) {
    const auto box = family.box(L);
    const double S = static_cast<double>(box.window_site_count());
    const auto h0 = build_box_laplacian(box);
    const auto s0 = eigen_decompose(h0);
    std::vector<double> mu(realizations), mp(realizations), mm(realizations);
    parallel_for(realizations, exec.workers, [&](std::size_t r) {
      const auto v = sample_surface_potential(box, disorder, master_seed, r);
      const auto [vp, vm] = split_potential(v);
      const auto sv = eigen_decompose(h0 + v);
      const auto sp = vm.rank() == 0 ? sv : vp.rank() == 0 ? s0 : eigen_decompose(h0 + vp);
      mu[r] = step_integrate(spectral_shift(s0, sv), g.value) / S;
      mp[r] = vp.rank() == 0 ? 0.0 : step_integrate(spectral_shift(s0, sp), g.value) / S;
      mm[r] = vm.rank() == 0 ? 0.0 : step_integrate(spectral_shift(sp, sv), g.value) / S;
    });
    FunctionalRow row;
    row.L = L;
    const double R = static_cast<double>(realizations);
    for (std::size_t r = 0; r < realizations; ++r) {
      row.mu += mu[r];
      row.mu_plus += mp[r];
      row.mu_minus += mm[r];
    }
    row.mu /= R;
    row.mu_plus /= R;
    row.mu_minus /= R;
    if (realizations > 1) {
      double ss = 0.0;
      for (double x : mu) ss += (x - row.mu) * (x - row.mu);
      row.stderr_mu = std::sqrt(ss / (R - 1.0) / R);
    }
    out.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) out.cauchy_differences.push_back(std::abs(out.rows[i].mu - out.rows[i + 1].mu));
  return out;
}

// ---------------------------------------------------------------------------

/// Mean and variance over realizations of #{eig <= lambda} / |box| for bulk
/// disorder on [0, L)^nu.
inline EnsembleResult estimate_bulk_ids(int nu, long L, Boundary boundary, const DisorderSpec& disorder, std::optional<LambdaGrid> grid,
                                        std::size_t realizations, std::uint64_t master_seed, const ExecutionOptions& exec = {}) {
  if (realizations < 1) throw std::invalid_argument("estimate_bulk_ids needs realizations >= 1");
  disorder.validate();
  const auto box = make_bulk_box(nu, L, boundary);
  EnsembleResult res;
  res.grid = grid.value_or(LambdaGrid::covering(nu, disorder));
  res.grid.validate();
  res.realizations = realizations;
  const double volume = static_cast<double>(box.site_count());
  res.meta = {"bulk-ids", box, disorder.describe(), master_seed, volume, L, 0, 0};
  const auto pts = res.grid.points();
  const auto h0 = build_box_laplacian(box);
  std::vector<std::vector<long>> samples(realizations);
  parallel_for(realizations, exec.workers, [&](std::size_t r) {
    const auto spec = eigen_decompose(h0 + sample_bulk_potential(box, disorder, master_seed, r));
    const double tol = merge_tolerance * spec.scale();
    auto& row = samples[r];
    row.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) row[i] = static_cast<long>(counting_function(spec, pts[i], tol));
  });
  detail::integer_moments(samples, volume, res.mean, res.variance);
  return res;
}

// ---------------------------------------------------------------------------

struct HolderRow {
  std::size_t width_steps = 0;
  double width = 0.0;
  double sup_ratio = 0.0;
  double mean_ratio = 0.0;
};

struct HolderReport {
  double theta = 1.0;
  double sup_ratio = 0.0;
  std::pair<double, double> argmax{0.0, 0.0};
  std::vector<HolderRow> table;
};

/// sup over grid windows of (mean_j - mean_i) / (lambda_j - lambda_i)^theta,
/// and per-width sup and mean of the same ratio for windows of `widths`
/// grid steps (default: dyadic 1, 2, 4, ...).
inline HolderReport holder_modulus(const EnsembleResult& result, double theta, std::vector<std::size_t> widths = {}) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("holder_modulus needs theta in (0, 1]");
  const auto& m = result.mean;
  const auto n = m.size();
  if (n != result.grid.n) throw std::invalid_argument("holder_modulus: mean does not match the grid");
  for (std::size_t i = 1; i < n; ++i)
    if (m[i] < m[i - 1]) {
      std::ostringstream os;
      os.precision(17);
      os << "holder_modulus: mean decreases at lambda = " << result.grid.point(i) << " (" << m[i - 1] << " -> " << m[i] << ")";
      throw std::domain_error(os.str());
    }
  const auto pts = result.grid.points();
  HolderReport rep;
  rep.theta = theta;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ratio = (m[j] - m[i]) / std::pow(pts[j] - pts[i], theta);
      if (ratio > rep.sup_ratio) {
        rep.sup_ratio = ratio;
        rep.argmax = {pts[i], pts[j]};
      }
    }
  if (widths.empty())
    for (std::size_t w = 1; w < n; w *= 2) widths.push_back(w);
  for (std::size_t w : widths) {
    if (w < 1 || w >= n) throw std::invalid_argument("holder_modulus: window width out of range");
    HolderRow row;
    row.width_steps = w;
    row.width = static_cast<double>(w) * result.grid.step();
    double sum = 0.0;
    for (std::size_t i = 0; i + w < n; ++i) {
      const double ratio = (m[i + w] - m[i]) / std::pow(pts[i + w] - pts[i], theta);
      row.sup_ratio = std::max(row.sup_ratio, ratio);
      sum += ratio;
    }
    row.mean_ratio = sum / static_cast<double>(n - w);
    rep.table.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------

struct WeakLimitRow {
  long L = 0;
  double mean = 0.0;
  double max = 0.0;
};

/// Per L: mean and max over realizations of int_a^b |xi / S|^{1/p} dlambda.
inline std::vector<WeakLimitRow> weak_limit_monitor(const SurfaceFamily& family, const std::vector<long>& L_list, const DisorderSpec& disorder,
                                                    double p, Interval interval, std::size_t realizations, std::uint64_t master_seed,
                                                    const ExecutionOptions& exec = {}) {
  if (!(p > 1.0)) throw std::invalid_argument("weak_limit_monitor needs p > 1");
  if (!(interval.lo < interval.hi)) throw std::invalid_argument("weak_limit_monitor needs a < b");
  if (realizations < 1) throw std::invalid_argument("weak_limit_monitor needs realizations >= 1");
  disorder.validate();
  std::vector<WeakLimitRow> rows;
  for (long L : L_list) {
    const auto box = family.box(L);
    const double S = static_cast<double>(box.window_site_count());
    const auto h0 = build_box_laplacian(box);
    const auto s0 = eigen_decompose(h0);
    std::vector<double> vals(realizations);
    parallel_for(realizations, exec.workers, [&](std::size_t r) {
      const auto xi = spectral_shift(s0, eigen_decompose(h0 + sample_surface_potential(box, disorder, master_seed, r)));
      auto v = xi.values();
      for (auto& x : v) x /= S;
      vals[r] = step_abs_power_integral(StepFunction(xi.breakpoints(), std::move(v)), 1.0 / p, interval);
    });
    WeakLimitRow row;
    row.L = L;
    for (double x : vals) {
      row.mean += x;
      row.max = std::max(row.max, x);
    }
    row.mean /= static_cast<double>(realizations);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ssf
