#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "ssf/bounds.hpp"
#include "ssf/quadrature.hpp"
#include "ssf/spectral.hpp"

using namespace ssf;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

SymmetricOperator op(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return SymmetricOperator(m);
}

SymmetricOperator random_op(Eigen::Index n, seeding::SplitMix64& rng) { return SymmetricOperator(random_instances::symmetric(n, rng)); }

// value of f at the midpoint of every piece of the merged breakpoint set
void expect_same_function(const StepFunction& f, const StepFunction& g) {
  const auto cmp = compare_at_midpoints(f, g, 1e-9);
  EXPECT_EQ(cmp.max_discrepancy, 0.0);
}

}  // namespace

TEST(EigenDecompose, Examples) {
  EXPECT_EQ(eigen_decompose(op({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}})).eigenvalues, (std::vector<double>{1, 2, 3}));
  const auto ev = eigen_decompose(op({{0, 1}, {1, 0}})).eigenvalues;
  EXPECT_NEAR(ev[0], -1.0, 1e-15);
  EXPECT_NEAR(ev[1], 1.0, 1e-15);
  const auto path = eigen_decompose(op({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}})).eigenvalues;
  EXPECT_NEAR(path[0], -std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(path[1], 0.0, 1e-14);
  EXPECT_NEAR(path[2], std::sqrt(2.0), 1e-14);
}

TEST(EigenDecompose, InvariantsOnRandomMatrices) {
  seeding::SplitMix64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = 1 + static_cast<Eigen::Index>(rng() % 30);
    const auto s = random_op(n, rng);
    const auto spec = eigen_decompose(s, true);
    ASSERT_TRUE(std::is_sorted(spec.eigenvalues.begin(), spec.eigenvalues.end()));
    const auto& q = *spec.eigenvectors;
    EXPECT_LE((q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(spec.eigenvalues.data(), n);
    EXPECT_LE((s.entries() - q * d.asDiagonal() * q.transpose()).cwiseAbs().maxCoeff(), 1e-8 * (1 + s.entries().cwiseAbs().maxCoeff()));
    const auto ref = oracle::jacobi_eigenvalues(s.entries());
    for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(spec.eigenvalues[static_cast<std::size_t>(i)], ref[static_cast<std::size_t>(i)], 1e-12);
  }
}

TEST(EigenDecompose, DiagonalVectorsArePermutation) {
  const auto spec = eigen_decompose(op({{2, 0}, {0, -1}}), true);
  EXPECT_EQ(spec.eigenvalues, (std::vector<double>{-1, 2}));
  EXPECT_EQ((*spec.eigenvectors)(1, 0), 1.0);
  EXPECT_EQ((*spec.eigenvectors)(0, 1), 1.0);
}

TEST(EigenDecompose, RejectsNonFinite) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = std::nan("");
  EXPECT_THROW(eigen_decompose(m), std::invalid_argument);
  m(0, 0) = inf;
  EXPECT_THROW(eigen_decompose(m), std::invalid_argument);
}

TEST(CountingFunction, Examples) {
  Spectrum s{{-1.0, 1.0}, std::nullopt};
  EXPECT_EQ(counting_function(s, 0.0), 1u);
  EXPECT_EQ(counting_function(s, -5.0), 0u);
  EXPECT_EQ(counting_function(s, 1.0), 2u);
  EXPECT_EQ(counting_function(s, 7.0), 2u);
  Spectrum d{{-3.0, -3.0, 4.0}, std::nullopt};
  EXPECT_EQ(counting_function(d, -3.0), 2u);
}

TEST(StepFunction, ConstructionAndEvaluation) {
  EXPECT_THROW(StepFunction({1.0, 1.0}, {0, 1, 0}), std::invalid_argument);
  EXPECT_THROW(StepFunction({1.0}, {0}), std::invalid_argument);
  const StepFunction f({0.0, 1.0}, {0, 2, 0});
  EXPECT_EQ(f(-1e-300), 0.0);
  EXPECT_EQ(f(0.0), 2.0);
  EXPECT_EQ(f(0.999), 2.0);
  EXPECT_EQ(f(1.0), 0.0);
  EXPECT_EQ(StepFunction({0.0, 1.0, 2.0}, {0, 1, 1, 0}).canonical(), StepFunction({0.0, 2.0}, {0, 1, 0}));
  EXPECT_EQ((f - f), StepFunction());
}

TEST(SpectralShift, RankOneExample) {
  const auto xi = spectral_shift(op({{0}}), op({{1}}));
  EXPECT_EQ(xi, StepFunction({0.0, 1.0}, {0, 1, 0}));
}

TEST(SpectralShift, IdenticalOperatorsGiveZero) {
  seeding::SplitMix64 rng(2);
  const auto a = random_op(7, rng);
  EXPECT_EQ(spectral_shift(a, a), StepFunction());
}

TEST(SpectralShift, TwoByTwoHandComputed) {
  const auto a = op({{0, 1}, {1, 0}});
  const auto b = op({{2, 1}, {1, 0}});
  const auto xi = spectral_shift(a, b);
  const double r2 = std::sqrt(2.0);
  ASSERT_EQ(xi.breakpoints().size(), 4u);
  const std::vector<double> bp{-1.0, 1.0 - r2, 1.0, 1.0 + r2};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(xi.breakpoints()[i], bp[i], 1e-14);
  EXPECT_EQ(xi.values(), (std::vector<double>{0, 1, 0, 1, 0}));
  EXPECT_NEAR(step_lp_norm(xi, 1.0), 2.0, 1e-14);
  EXPECT_NEAR(step_integrate(xi, [](double) { return 1.0; }), 2.0, 1e-14);
}

TEST(SpectralShift, DimensionMismatch) { EXPECT_THROW(spectral_shift(op({{0}}), op({{0, 0}, {0, 0}})), std::invalid_argument); }

TEST(SpectralShift, PropertiesOnRandomPairs) {
  seeding::SplitMix64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = random_instances::dimension(rng, 10);
    const auto a = random_op(n, rng);
    const auto rank = std::min<Eigen::Index>(n, 1 + static_cast<Eigen::Index>(rng() % 3));
    const Eigen::MatrixXd c1 = random_instances::low_rank(n, rank, rng);
    const Eigen::MatrixXd c2 = random_instances::low_rank(n, 1, rng);
    const SymmetricOperator b(a.entries() + c1);
    const SymmetricOperator bc(a.entries() + c1 + c2);
    const auto xi = spectral_shift(a, b);

    // antisymmetry, exact
    EXPECT_EQ(spectral_shift(b, a), -xi);
    // chain rule
    expect_same_function(spectral_shift(a, bc), spectral_shift(b, bc) + xi);
    // integer values bounded by the rank; compact support
    EXPECT_TRUE(xi.compactly_supported());
    for (double v : xi.values()) {
      EXPECT_EQ(v, std::round(v));
      EXPECT_LE(std::abs(v), static_cast<double>(rank));
    }
    // trace identity and L1 bound
    const double trace = c1.trace();
    EXPECT_NEAR(step_integral(xi), trace, 1e-8 * (1.0 + std::abs(trace)) * static_cast<double>(n));
    EXPECT_LE(step_lp_norm(xi, 1.0), schatten_quasi_norm(c1, 1.0) + 1e-9);
    // agrees with brute-force counting away from breakpoints
    const auto ea = oracle::jacobi_eigenvalues(a.entries());
    const auto eb = oracle::jacobi_eigenvalues(b.entries());
    for (int probe = 0; probe < 20; ++probe) {
      const double x = rng.uniform(-6.0, 6.0);
      if (oracle::distance(ea, x) < 1e-8 || oracle::distance(eb, x) < 1e-8) continue;
      EXPECT_EQ(xi(x), static_cast<double>(oracle::count_at_most(ea, x) - oracle::count_at_most(eb, x)));
    }
  }
}

TEST(SpectralShift, MonotonePerturbationSign) {
  seeding::SplitMix64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = random_instances::dimension(rng, 8);
    const auto a = random_op(n, rng);
    const Eigen::MatrixXd c = random_instances::low_rank(n, std::min<Eigen::Index>(n, 2), rng, true);
    const auto up = spectral_shift(a, SymmetricOperator(a.entries() + c));
    const auto down = spectral_shift(a, SymmetricOperator(a.entries() - c));
    for (double v : up.values()) EXPECT_GE(v, 0.0);
    for (double v : down.values()) EXPECT_LE(v, 0.0);
  }
}

TEST(SpectralShift, SharedEigenvaluesMerge) {
  const auto xi = spectral_shift(op({{1, 0}, {0, 5}}), op({{1, 0}, {0, 6}}));
  EXPECT_EQ(xi, StepFunction({5.0, 6.0}, {0, 1, 0}));
}

TEST(Schatten, DiagonalExamples) {
  Eigen::MatrixXd d = Eigen::Vector2d(3, 4).asDiagonal();
  EXPECT_DOUBLE_EQ(schatten_quasi_norm(d, 1.0), 7.0);
  EXPECT_DOUBLE_EQ(schatten_quasi_norm(d, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(schatten_quasi_norm(d, inf), 4.0);
  EXPECT_NEAR(schatten_quasi_norm(d, 0.5), std::pow(std::sqrt(3.0) + 2.0, 2.0), 1e-12);
  EXPECT_NEAR(schatten_quasi_norm(d, 0.5), 13.9282, 1e-4);
  EXPECT_EQ(matrix_rank(Eigen::MatrixXd(Eigen::Vector3d(1, 1e-15, 0).asDiagonal())), 1u);
  EXPECT_THROW(schatten_quasi_norm(d, 0.0), std::invalid_argument);
}

TEST(Schatten, SingularValuesOfRectangularAndMonotoneInP) {
  seeding::SplitMix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_instances::general(1 + static_cast<Eigen::Index>(rng() % 7), 1 + static_cast<Eigen::Index>(rng() % 7), rng);
    const auto s = singular_values(t);
    EXPECT_TRUE(std::is_sorted(s.values.rbegin(), s.values.rend()));
    EXPECT_NEAR(schatten_quasi_norm(s, 2.0), t.norm(), 1e-12 * (1 + t.norm()));
    double prev = inf;
    for (double p : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, inf}) {
      const double v = schatten_quasi_norm(s, p);
      EXPECT_LE(v, prev * (1 + 1e-12));
      prev = v;
    }
  }
}

TEST(StepNorms, Examples) {
  const StepFunction ind({0.0, 1.0}, {0, 1, 0});
  EXPECT_DOUBLE_EQ(step_lp_norm(ind, 2.0), 1.0);
  const double s = 2.5;
  const StepFunction ind_s({0.0, s}, {0, 1, 0});
  for (double p : {1.0, 2.0, 3.0}) EXPECT_DOUBLE_EQ(step_lp_norm(ind_s, p), std::pow(s, 1.0 / p));
  EXPECT_EQ(step_lp_norm(StepFunction({0.0, 1.0, 2.0}, {0, -3, 2, 0}), inf), 3.0);
  EXPECT_EQ(step_lp_norm(StepFunction({0.0, 1.0, 2.0}, {0, -3, 2, 0}), inf, Interval{1.5, 5.0}), 2.0);
  EXPECT_DOUBLE_EQ(step_integral(StepFunction({0.0, 1.0, 2.0}, {0, -3, 2, 0}), Interval{0.5, 1.5}), -0.5);
}

TEST(StepNorms, UnboundedSupportNeedsInterval) {
  const StepFunction tail({0.0}, {0, 1});
  EXPECT_THROW(step_lp_norm(tail, 1.0), std::domain_error);
  EXPECT_THROW(step_integral(tail), std::domain_error);
  EXPECT_DOUBLE_EQ(step_lp_norm(tail, 1.0, Interval{-1.0, 3.0}), 3.0);
  EXPECT_EQ(step_lp_norm(tail, inf), 1.0);
}

TEST(StepIntegrate, Examples) {
  const StepFunction ind({0.0, 1.0}, {0, 1, 0});
  EXPECT_DOUBLE_EQ(step_integrate(ind, [](double) { return 1.0; }), 1.0);
  EXPECT_DOUBLE_EQ(step_integrate(ind, [](double x) { return x; }), 0.5);
  EXPECT_NEAR(step_integrate_antiderivative(ind, [](double x) { return x * x / 2; }), 0.5, 1e-16);
  // degree-31 polynomial is exact on one Gauss-16 panel
  EXPECT_NEAR(step_integrate(ind, [](double x) { return 32.0 * std::pow(x, 31); }), 1.0, 1e-14);
  EXPECT_NEAR(step_integrate(StepFunction({0.0, M_PI}, {0, 1, 0}), [](double x) { return std::sin(x); }), 2.0, 1e-12);
}

TEST(Quadrature, GaussLegendreRules) {
  for (std::size_t n : {1u, 2u, 5u, 16u, 64u, 512u}) {
    const auto rule = gauss_legendre(n);
    double w = 0.0;
    for (double x : rule.weights) w += x;
    EXPECT_NEAR(w, 2.0, 1e-13);
    EXPECT_TRUE(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
    const auto deg = static_cast<int>(std::min<std::size_t>(2 * n - 1, 40));
    EXPECT_NEAR(rule.integrate([deg](double x) { return std::pow(x, deg - (deg % 2)); }, -1.0, 1.0),
                2.0 / (deg - (deg % 2) + 1), 1e-13);
  }
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
}

TEST(ResolventPower, Examples) {
  EXPECT_EQ(resolvent_power(op({{0}}), 1.0, 2).entries()(0, 0), 1.0);
  const auto r = resolvent_power(op({{1, 0}, {0, 3}}), 1.0, 1);
  EXPECT_DOUBLE_EQ(r(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(r(1, 1), 0.25);
  EXPECT_EQ(r(0, 1), 0.0);
}

TEST(ResolventPower, MarginViolationRejected) {
  EXPECT_THROW(resolvent_power(op({{-2, 0}, {0, 1}}), 2.0, 1), margin_error);
  EXPECT_THROW(resolvent_power(op({{0}}), 1.0, 0), std::invalid_argument);
}

TEST(ResolventPower, ReconstructionResidual) {
  seeding::SplitMix64 rng(6);
  for (int k = 1; k <= 3; ++k) {
    const auto s = random_op(20, rng);
    const double c = 1.0 - eigen_decompose(s).eigenvalues.front();
    const auto r = resolvent_power(s, c, k);
    Eigen::MatrixXd shifted = s.entries() + c * Eigen::MatrixXd::Identity(20, 20);
    Eigen::MatrixXd pk = Eigen::MatrixXd::Identity(20, 20);
    for (int i = 0; i < k; ++i) pk = pk * shifted;
    EXPECT_LE((pk * r.entries() - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-8);
    const auto ev = eigen_decompose(r).eigenvalues;
    EXPECT_GT(ev.front(), 0.0);
    EXPECT_LE(ev.back(), 1.0 + 1e-12);
  }
}
