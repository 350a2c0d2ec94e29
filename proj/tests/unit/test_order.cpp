#include <gtest/gtest.h>

#include <cmath>

#include "weakot/dual.hpp"
#include "weakot/order.hpp"
#include "weakot/random.hpp"

using namespace weakot;

namespace {

SpacePtr line(std::vector<double> xs) { return make_space(FiniteSpace::line(xs)); }

double call(const DiscreteMeasure& m, double a) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * std::max(m.space()->coord(i)[0] - a, 0.0);
  return s;
}

// nu = mu K for a martingale kernel K that spreads part of each interior atom to its neighbours,
// keeping the mean of every row at its source point.
DiscreteMeasure dilate(const DiscreteMeasure& mu, std::mt19937_64& rng) {
  const auto& X = *mu.space();
  std::vector<double> w(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (i == 0 || i + 1 == mu.size()) {
      w[i] += mu[i];
      continue;
    }
    const double x = X.coord(i)[0], l = X.coord(i - 1)[0], r = X.coord(i + 1)[0];
    const double s = uniform(rng, 0.0, 1.0);  // fraction moved
    // split s between l and r with mean x
    const double pr = (x - l) / (r - l);
    w[i] += mu[i] * (1 - s);
    w[i - 1] += mu[i] * s * (1 - pr);
    w[i + 1] += mu[i] * s * pr;
  }
  return DiscreteMeasure::normalized(mu.space(), w);
}

}  // namespace

TEST(ConvexOrder, IdenticalMeasuresAreOrdered) {
  auto X = line({-1.0, 0.0, 2.0});
  DiscreteMeasure mu(X, {0.2, 0.5, 0.3});
  auto r = convex_order_1d(mu, mu);
  EXPECT_TRUE(r.ordered);
  EXPECT_LE(r.t_bar_1, 1e-12);
}

TEST(ConvexOrder, DilationOfAPointMass) {
  auto X = line({-1.0, 0.0, 1.0});
  auto r = convex_order_1d(DiscreteMeasure::dirac(X, 1), DiscreteMeasure(X, {0.5, 0.0, 0.5}));
  EXPECT_TRUE(r.ordered);
  ASSERT_TRUE(r.kernel.has_value());
  EXPECT_NEAR(r.kernel->rows(1, 0), 0.5, 1e-9);
  EXPECT_NEAR(r.kernel->rows(1, 2), 0.5, 1e-9);
}

TEST(ConvexOrder, ContractionIsNotOrdered) {
  auto X = line({-1.0, 0.0, 1.0});
  DiscreteMeasure mu(X, {0.5, 0.0, 0.5});
  auto nu = DiscreteMeasure::dirac(X, 1);
  auto r = convex_order_1d(mu, nu);
  EXPECT_FALSE(r.ordered);
  ASSERT_TRUE(r.witness_a.has_value());
  EXPECT_EQ(*r.witness_a, 0.0);
  // (x)_+ integrates to 1/2 under mu and 0 under nu
  EXPECT_NEAR(call(mu, 0.0) - call(nu, 0.0), 0.5, 1e-15);
}

TEST(ConvexOrder, RandomPairsAgreeWithTheirCertificates) {
  auto X = line({-2.0, -1.0, -0.5, 0.0, 0.7, 1.5, 3.0});
  for (std::uint64_t k = 0; k < 60; ++k) {
    auto rng = trial_rng(83, k);
    DiscreteMeasure mu(X, dirichlet(rng, 7));
    auto nu = k % 2 ? dilate(mu, rng) : DiscreteMeasure(X, dirichlet(rng, 7));
    auto r = convex_order_1d(mu, nu);
    if (r.ordered) {
      EXPECT_LE(r.t_bar_1, 1e-7);
      ASSERT_TRUE(r.kernel.has_value());
      EXPECT_LE(martingale_residual(*r.kernel, mu), 1e-6);
    } else if (r.witness_a) {
      EXPECT_GT(call(mu, *r.witness_a), call(nu, *r.witness_a));
    } else {
      EXPECT_GT(std::abs(r.mean_gap), 1e-10);
    }
    if (k % 2) {
      EXPECT_TRUE(r.ordered);
    }
  }
}

TEST(Strassen, OrderedPairGivesExactMartingale) {
  auto X = line({-1.0, 0.0, 1.0});
  DiscreteMeasure nu(X, {0.5, 0.0, 0.5});
  auto s = strassen_coupling(DiscreteMeasure::dirac(X, 1), nu, 0.0);
  ASSERT_TRUE(s.success);
  EXPECT_NEAR(s.kernel->rows(1, 0), 0.5, 1e-12);
  EXPECT_NEAR(s.kernel->rows(1, 2), 0.5, 1e-12);
  EXPECT_NEAR(s.residual, 0.0, 1e-12);
}

TEST(Strassen, FailureCarriesDualWitness) {
  auto X = line({-1.0, 0.0, 1.0});
  DiscreteMeasure mu(X, {0.5, 0.0, 0.5});
  auto nu = DiscreteMeasure::dirac(X, 1);
  auto s = strassen_coupling(mu, nu, 0.0);
  EXPECT_FALSE(s.success);
  EXPECT_NEAR(s.t_bar_1, 1.0, 1e-12);
  ASSERT_TRUE(s.witness.has_value());
  EXPECT_NEAR(s.witness_gap, 1.0, 1e-12);
  // |x|-like: the witness separates the measures by exactly the gap
  const double gap = 0.5 * (*s.witness)(-1.0) + 0.5 * (*s.witness)(1.0) - (*s.witness)(0.0);
  EXPECT_NEAR(gap, 1.0, 1e-12);

  auto ok = strassen_coupling(mu, nu, 1.0);
  EXPECT_TRUE(ok.success);
  EXPECT_THROW(strassen_coupling(mu, nu, -1.0), std::domain_error);
}

TEST(TBar1Dual, TrivialAndContraction) {
  auto X = line({-1.0, 0.0, 1.0});
  DiscreteMeasure mu(X, {0.5, 0.0, 0.5});
  EXPECT_EQ(t_bar_1_dual(mu, mu).value, 0.0);
  auto d = t_bar_1_dual(mu, DiscreteMeasure::dirac(X, 1));
  EXPECT_NEAR(d.value, 1.0, 1e-12);
  for (double x : {-1.0, 0.0, 1.0}) EXPECT_NEAR(d.witness(x) - d.witness(0.0), std::abs(x), 1e-12);
}

TEST(TBar1Dual, MatchesPrimalOnRandomPairs) {
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    auto rng = trial_rng(89, k);
    const std::size_t n = 2 + uniform_index(rng, 6);
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(uniform(rng, -3.0, 3.0));
    std::sort(xs.begin(), xs.end());
    auto X = line(xs);
    DiscreteMeasure mu(X, dirichlet(rng, n)), nu(X, dirichlet(rng, n));
    const double p = solve_weak_ot(t_bar_1_cost(), mu, nu).primal_value;
    const double d = t_bar_1_dual(mu, nu).value;
    worst = std::max(worst, std::abs(p - d));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(TBar1Dual, WitnessIsConvexAndOneLipschitz) {
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto rng = trial_rng(97, k);
    auto X = line({-2.0, -0.3, 0.0, 1.0, 2.5});
    DiscreteMeasure mu(X, dirichlet(rng, 5)), nu(X, dirichlet(rng, 5));
    auto d = t_bar_1_dual(mu, nu);
    const auto& w = d.witness;
    double prev = -kInf;
    for (std::size_t i = 0; i + 1 < w.knots.size(); ++i) {
      const double s = (w.values[i + 1] - w.values[i]) / (w.knots[i + 1] - w.knots[i]);
      EXPECT_LE(std::abs(s), 1.0 + 1e-12);
      EXPECT_GE(s, prev - 1e-12);
      prev = s;
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < 5; ++i) gap += (mu[i] - nu[i]) * w(X->coord(i)[0]);
    EXPECT_NEAR(gap, d.value, 1e-10);
  }
}

TEST(ConvexOrder, RejectsMultiDimensionalSpaces) {
  auto X = make_space(FiniteSpace::from_coords({"a", "b"}, {{0.0, 0.0}, {1.0, 1.0}}));
  auto mu = DiscreteMeasure::dirac(X, 0);
  EXPECT_THROW(convex_order_1d(mu, mu), std::domain_error);
}
