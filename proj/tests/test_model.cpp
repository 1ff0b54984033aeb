#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "ssf/model.hpp"
#include "ssf/spectral.hpp"

using namespace ssf;

namespace {

LatticeBox line(long n, Boundary b = Boundary::dirichlet) { return make_bulk_box(1, n, b); }

}  // namespace

TEST(Laplacian, SingleSiteIsZero) {
  const auto h = build_box_laplacian(line(1));
  ASSERT_EQ(h.dim(), 1);
  EXPECT_EQ(h(0, 0), 0.0);
}

TEST(Laplacian, ThreeSitePathClosedForm) {
  const auto ev = eigen_decompose(build_box_laplacian(line(3))).eigenvalues;
  ASSERT_EQ(ev.size(), 3u);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(ev[3 - k], 2.0 * std::cos(k * M_PI / 4.0), 1e-14);
  EXPECT_NEAR(ev[0], -std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(ev[1], 0.0, 1e-14);
}

TEST(Laplacian, FourSiteCycleFourier) {
  const auto ev = eigen_decompose(build_box_laplacian(line(4, Boundary::periodic))).eigenvalues;
  const std::vector<double> expected{-2.0, 0.0, 0.0, 2.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(ev[i], expected[i], 1e-14);
}

TEST(Laplacian, PeriodicShortExtentRejected) {
  EXPECT_THROW(build_box_laplacian(line(2, Boundary::periodic)), std::invalid_argument);
  LatticeBox box;
  box.nu = 2;
  box.nu1 = 1;
  box.boundary = Boundary::periodic;
  box.extents = {{0, 5}, {0, 2}};
  EXPECT_THROW(build_box_laplacian(box), std::invalid_argument);
}

TEST(Laplacian, MatchesKroneckerOracleAndGershgorin) {
  for (bool periodic : {false, true}) {
    LatticeBox box;
    box.nu = 3;
    box.nu1 = 1;
    box.boundary = periodic ? Boundary::periodic : Boundary::dirichlet;
    box.extents = {{-1, 3}, {0, 3}, {2, 7}};
    const auto h = build_box_laplacian(box);
    const auto ref = oracle::box_adjacency({4, 3, 5}, periodic);
    EXPECT_EQ(h.entries(), ref);
    EXPECT_EQ(h.entries(), h.entries().transpose());
    const auto ev = eigen_decompose(h).eigenvalues;
    EXPECT_GE(ev.front(), -6.0 - 1e-12);
    EXPECT_LE(ev.back(), 6.0 + 1e-12);
  }
}

TEST(LatticeBox, EnumerationRoundTrip) {
  const auto box = make_surface_box(3, 2, 3, 1, 1);
  std::set<std::size_t> seen;
  for (std::size_t s = 0; s < box.site_count(); ++s) {
    const auto x = box.coordinates(s);
    EXPECT_TRUE(box.contains(x));
    EXPECT_EQ(box.site_index(x), s);
    seen.insert(s);
  }
  EXPECT_EQ(seen.size(), 5u * 5u * 3u);
  EXPECT_EQ(box.window_site_count(), 9u);
}

TEST(LatticeBox, InvalidBoxesRejected) {
  EXPECT_THROW(make_surface_box(2, 2, 4, 1, 1), std::invalid_argument);
  EXPECT_THROW(make_surface_box(2, 1, 0, 1, 1), std::invalid_argument);
  LatticeBox box;
  box.nu = 2;
  box.nu1 = 3;
  box.extents = {{0, 2}, {0, 2}};
  EXPECT_THROW(box.validate(), std::invalid_argument);
  box.nu1 = 1;
  box.extents = {{0, 2}, {3, 3}};
  EXPECT_THROW(box.validate(), std::invalid_argument);
}

TEST(SurfacePotential, PointMassZeroIsZero) {
  const auto box = make_surface_box(2, 1, 6, 2, 1);
  const auto v = sample_surface_potential(box, DisorderSpec::point_mass(0.0), 1, 0);
  EXPECT_EQ(v.rank(), 0u);
  EXPECT_TRUE(v.diagonal().isZero());
}

TEST(SurfacePotential, PointMassIndicatorOfSurface) {
  const auto box = make_surface_box(3, 2, 3, 2, 1);
  const auto v = sample_surface_potential(box, DisorderSpec::point_mass(1.5), 9, 4);
  EXPECT_EQ(v.rank(), 9u);
  for (std::size_t s = 0; s < box.site_count(); ++s) {
    const auto x = box.coordinates(s);
    const bool surface = x[2] == 0 && x[0] >= 0 && x[0] < 3 && x[1] >= 0 && x[1] < 3;
    EXPECT_EQ(v.diagonal()[static_cast<Eigen::Index>(s)], surface ? 1.5 : 0.0);
  }
}

TEST(SurfacePotential, UniformMeanMonteCarlo) {
  const auto box = make_surface_box(2, 1, 4, 1, 0);
  const auto law = DisorderSpec::uniform(0.0, 1.0);
  const std::size_t N = 10000;
  double sum = 0.0;
  for (std::size_t r = 0; r < N; ++r) sum += sample_surface_potential(box, law, 2024, r).values.begin()->second;
  const double sigma = std::sqrt(1.0 / 12.0);
  EXPECT_NEAR(sum / N, 0.5, 3.0 * sigma / std::sqrt(static_cast<double>(N)));
}

TEST(SurfacePotential, DeterministicAndSupportedOnHyperplane) {
  const auto box = make_surface_box(2, 1, 8, 3, 2);
  const auto law = DisorderSpec::uniform(-1.0, 1.0);
  const auto a = sample_surface_potential(box, law, 5, 17);
  const auto b = sample_surface_potential(box, law, 5, 17);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, sample_surface_potential(box, law, 5, 18).values);
  EXPECT_NE(a.values, sample_surface_potential(box, law, 6, 17).values);
  for (const auto& [site, value] : a.values) {
    const auto x = box.coordinates(site);
    EXPECT_EQ(x[1], 0);
    EXPECT_TRUE(x[0] >= 0 && x[0] < 8);
  }
  EXPECT_EQ(a.values.size(), 8u);
}

TEST(SurfacePotential, CouplingsFollowWindowOrder) {
  const auto box = make_surface_box(2, 1, 5, 1, 2);
  const auto law = DisorderSpec::uniform(0.0, 1.0);
  const auto v = sample_surface_potential(box, law, 3, 2);
  const auto rseed = seeding::realization_seed(3, 2);
  for (long j = 0; j < 5; ++j) {
    const std::vector<long> x{j, 0};
    EXPECT_EQ(v.values.at(box.site_index(x)), law.draw(seeding::site_bits(rseed, static_cast<std::uint64_t>(j))));
  }
}

TEST(SurfacePotential, HyperplaneOutsideBoxFlagged) {
  LatticeBox box;
  box.nu = 2;
  box.nu1 = 1;
  box.extents = {{0, 4}, {1, 4}};
  const auto v = sample_surface_potential(box, DisorderSpec::point_mass(1.0), 0, 0);
  EXPECT_TRUE(v.hyperplane_missing);
  EXPECT_TRUE(v.values.empty());
}

TEST(SurfacePotential, RequiresTransverseDimension) {
  auto box = make_bulk_box(2, 3);
  box.nu1 = 2;
  EXPECT_THROW(sample_surface_potential(box, DisorderSpec::point_mass(1.0), 0, 0), std::invalid_argument);
}

TEST(BulkPotential, PointMassIsScalar) {
  const auto box = make_bulk_box(2, 4);
  const auto v = sample_bulk_potential(box, DisorderSpec::point_mass(0.75), 1, 1);
  EXPECT_TRUE(v.diagonal().isApproxToConstant(0.75));
  EXPECT_EQ(v.rank(), 16u);
}

TEST(BulkPotential, BernoulliFrequency) {
  const auto box = make_bulk_box(2, 10);
  const double p = 0.3;
  const auto law = DisorderSpec::bernoulli(0.0, 1.0, p);
  double ones = 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < 200; ++r) {
    for (const auto& [s, x] : sample_bulk_potential(box, law, 11, r).values) {
      ASSERT_TRUE(x == 0.0 || x == 1.0);
      ones += x;
      total += 1.0;
    }
  }
  EXPECT_NEAR(ones / total, p, 4.0 * std::sqrt(p * (1 - p) / total));
}

TEST(BulkPotential, DiscreteSupport) {
  const auto box = make_bulk_box(1, 50);
  const auto law = DisorderSpec::discrete({-1.0, 1.0}, {0.5, 0.5});
  std::set<double> seen;
  for (std::size_t r = 0; r < 10; ++r)
    for (const auto& [s, x] : sample_bulk_potential(box, law, 0, r).values) seen.insert(x);
  EXPECT_EQ(seen, (std::set<double>{-1.0, 1.0}));
}

TEST(Disorder, ValidationAndSupport) {
  EXPECT_THROW(DisorderSpec::uniform(1.0, 1.0).validate(), std::invalid_argument);
  EXPECT_THROW(DisorderSpec::bernoulli(0.0, 1.0, 1.5).validate(), std::invalid_argument);
  EXPECT_THROW(DisorderSpec::discrete({1.0, 2.0}, {0.5, 0.4}).validate(), std::invalid_argument);
  EXPECT_THROW(DisorderSpec::discrete({1.0}, {-1.0}).validate(), std::invalid_argument);
  EXPECT_NO_THROW(DisorderSpec::discrete({1.0, 2.0}, {0.25, 0.75}).validate());
  EXPECT_EQ(DisorderSpec::bernoulli(2.0, -1.0, 0.5).support(), std::make_pair(-1.0, 2.0));
  EXPECT_DOUBLE_EQ(*DisorderSpec::uniform(0.0, 4.0).density_sup, 0.25);
  for (std::uint64_t bits : {0ULL, 1ULL << 40, ~0ULL}) {
    const double x = DisorderSpec::uniform(-2.0, 3.0).draw(bits);
    EXPECT_GE(x, -2.0);
    EXPECT_LT(x, 3.0);
  }
}

TEST(SplitPotential, Examples) {
  DiagonalPotential v{make_bulk_box(1, 3), {{0, 1.0}, {1, -2.0}, {2, 0.0}}, false};
  const auto [plus, minus] = split_potential(v);
  EXPECT_EQ(plus.diagonal(), Eigen::Vector3d(1, 0, 0));
  EXPECT_EQ(minus.diagonal(), Eigen::Vector3d(0, -2, 0));

  DiagonalPotential w{make_bulk_box(1, 2), {{0, 1.0}, {1, 3.0}}, false};
  const auto [wp, wm] = split_potential(w);
  EXPECT_EQ(wp.diagonal(), w.diagonal());
  EXPECT_EQ(wm.rank(), 0u);
}

TEST(SplitPotential, ExactReassemblyAndRanks) {
  const auto box = make_surface_box(2, 1, 30, 1, 1);
  for (std::size_t r = 0; r < 20; ++r) {
    const auto v = sample_surface_potential(box, DisorderSpec::uniform(-1.0, 1.0), 77, r);
    const auto [plus, minus] = split_potential(v);
    EXPECT_TRUE((plus.diagonal().array() >= 0.0).all());
    EXPECT_TRUE((minus.diagonal().array() <= 0.0).all());
    EXPECT_EQ(Eigen::VectorXd(plus.diagonal() + minus.diagonal()), v.diagonal());
    EXPECT_EQ(plus.rank() + minus.rank(), v.rank());
  }
}

TEST(Seeding, SplitMixReferenceValue) {
  seeding::SplitMix64 rng(0);
  EXPECT_EQ(rng(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(seeding::unit_interval(~0ULL), 1.0 - 0x1.0p-53);
}

TEST(SymmetricOperator, RejectsAsymmetric) {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 2, 0;
  EXPECT_THROW(SymmetricOperator{m}, std::invalid_argument);
  EXPECT_THROW(SymmetricOperator{Eigen::MatrixXd::Zero(2, 3)}, std::invalid_argument);
}
