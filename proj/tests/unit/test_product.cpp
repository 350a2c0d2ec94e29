#include <gtest/gtest.h>

#include <cmath>

#include "weakot/product.hpp"
#include "weakot/random.hpp"

using namespace weakot;

namespace {

SpacePtr line(std::vector<double> xs) { return make_space(FiniteSpace::line(xs)); }

Coupling independent(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  Table j(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) j(i, k) = a[i] * b[k];
  return Coupling(std::move(j), a, b);
}

Coupling identity(const DiscreteMeasure& a) {
  Table j(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) j(i, i) = a[i];
  return Coupling(std::move(j), a, a);
}

std::vector<double> quarter_grid() {
  std::vector<double> t;
  for (int k = 0; k <= 12; ++k) t.push_back(0.25 * k);
  return t;
}

}  // namespace

TEST(ProductSpace, HammingSquare) {
  auto P = product_space(bernoulli(0.5).space(), 2);
  ASSERT_EQ(P.size(), 4u);
  // (0,0) (0,1) (1,0) (1,1)
  EXPECT_EQ(P.space->dist(0, 3), 2.0);
  EXPECT_EQ(P.space->dist(1, 2), 2.0);
  EXPECT_EQ(P.space->dist(0, 1), 1.0);
  EXPECT_EQ(P.digits[2], (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(P.index(P.digits[3]), 3u);
}

TEST(ProductSpace, OnePointFactor) {
  auto P = product_space(line({4.0}), 3);
  ASSERT_EQ(P.size(), 1u);
  EXPECT_EQ(P.space->dist(0, 0), 0.0);
}

TEST(ProductSpace, DistancesMatchDirectFormula) {
  auto X = line({0.0, 0.5, 2.0});
  auto P = product_space(X, 3);
  auto P2 = product_space(X, 3, ProductMetric::d2);
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto rng = trial_rng(113, k);
    const std::size_t a = uniform_index(rng, P.size()), b = uniform_index(rng, P.size());
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double d = std::abs(X->coord(P.digits[a][i])[0] - X->coord(P.digits[b][i])[0]);
      l1 += d;
      l2 += d * d;
    }
    EXPECT_NEAR(P.space->dist(a, b), l1, 1e-14);
    EXPECT_NEAR(P2.space->dist(a, b), std::sqrt(l2), 1e-14);
  }
}

TEST(ProductSpace, CapRaisesResourceError) {
  EXPECT_THROW(product_space(line({0.0, 1.0, 2.0}), 9), ResourceError);
  EXPECT_NO_THROW(product_space(line({0.0, 1.0}), 12));
  EXPECT_THROW(product_space(line({0.0, 1.0}), 13), ResourceError);
}

TEST(ProductCost, SumOfCoordinateCosts) {
  auto X = line({0.0, 1.0, 3.0});
  auto P = product_space(X, 2);
  const auto base = CostSpec::marton(ScalarFn::power(2.0), GammaSpec::power(1.0));
  ProductCostModel pc(base, P);
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto rng = trial_rng(127, k);
    auto p = dirichlet(rng, P.size());
    const std::size_t x = uniform_index(rng, P.size());
    double oracle = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      std::vector<double> pi(3, 0.0);
      for (std::size_t y = 0; y < P.size(); ++y) pi[P.digits[y][i]] += p[y];
      oracle += eval_cost(base, X, P.digits[x][i], pi).value();
    }
    EXPECT_NEAR(pc.value(x, p), oracle, 1e-12);
  }
}

TEST(ChainRule, IdentityFactorsGiveIdentity) {
  auto mu = bernoulli(0.3);
  auto P = product_space(mu.space(), 2);
  auto nu = DiscreteMeasure::normalized(P.space, {0.1, 0.2, 0.3, 0.4});
  auto n1 = marginal(P, nu, 0);
  std::map<std::pair<std::size_t, std::size_t>, Coupling> cond;
  for (std::size_t x1 = 0; x1 < 2; ++x1) cond.emplace(std::make_pair(x1, x1), identity(*conditional_second(P, nu, x1)));
  auto c = chain_rule_coupling(P, nu, identity(n1), cond);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(c.joint(i, j), i == j ? nu[i] : 0.0, 1e-15);
}

TEST(ChainRule, IndependentFactorsGiveProduct) {
  auto X = line({0.0, 1.0});
  auto P = product_space(X, 2);
  DiscreteMeasure a1(X, {0.3, 0.7}), a2(X, {0.6, 0.4}), b1(X, {0.5, 0.5}), b2(X, {0.2, 0.8});
  auto nu = product_measure(P, {a1, a2}), nup = product_measure(P, {b1, b2});
  std::map<std::pair<std::size_t, std::size_t>, Coupling> cond;
  for (std::size_t x1 = 0; x1 < 2; ++x1)
    for (std::size_t y1 = 0; y1 < 2; ++y1) cond.emplace(std::make_pair(x1, y1), independent(a2, b2));
  auto c = chain_rule_coupling(P, nu, independent(a1, b1), cond);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(c.joint(i, j), nu[i] * nup[j], 1e-15);
  EXPECT_THROW(chain_rule_coupling(P, nu, independent(a1, b1), {}), std::domain_error);
}

TEST(ChainRule, ComposedCostWithinBound) {
  auto X = line({0.0, 1.0, 2.0});
  auto P = product_space(X, 2);
  for (auto base : {CostSpec::marton(ScalarFn::alpha(0.5), GammaSpec::hamming()),
                    CostSpec::barycentric(ScalarFn::power(2.0))}) {
    for (std::uint64_t k = 0; k < 10; ++k) {
      auto rng = trial_rng(131, k);
      DiscreteMeasure nu(P.space, dirichlet(rng, 9)), nup(P.space, dirichlet(rng, 9));
      auto r = chain_rule_check(base, P, nu, nup);
      EXPECT_LE(r.composed, r.bound + 1e-9);
      EXPECT_LE(r.direct, r.composed + 1e-9);
      ASSERT_TRUE(r.coupling.has_value());
      EXPECT_NEAR(coupling_cost(ProductCostModel(base, P), r.coupling->joint, nu.weights()), r.composed, 1e-14);
    }
  }
}

TEST(Enlargement, PointInsideCostsNothing) {
  auto P = product_space(bernoulli(0.5).space(), 2);
  ProductCostModel pc(CostSpec::marton(ScalarFn::power(2.0), GammaSpec::hamming()), P);
  std::vector<std::size_t> A{1, 2};
  EXPECT_EQ(enlargement_cost(pc, A, 2).value, 0.0);
}

TEST(Enlargement, SingletonForcesTheCoupling) {
  auto P = product_space(bernoulli(0.5).space(), 2);
  ProductCostModel pc(CostSpec::marton(ScalarFn::power(2.0), GammaSpec::hamming()), P);
  std::vector<std::size_t> A{0};
  EXPECT_NEAR(enlargement_cost(pc, A, 3).value, 2.0, 1e-12);
}

TEST(Enlargement, BarycenterInsideHull) {
  auto P = product_space(line({-1.0, 0.0, 1.0}), 1);
  ProductCostModel pc(CostSpec::barycentric(ScalarFn::power(2.0)), P);
  std::vector<std::size_t> A{0, 2};
  EXPECT_NEAR(enlargement_cost(pc, A, 1).value, 0.0, 1e-10);
}

TEST(Concentration, WholeSpaceHasNothingOutside) {
  auto mu = bernoulli(0.5);
  ConcentrationOptions o;
  auto r = concentration_check(CostSpec::marton(ScalarFn::power(2.0, 0.5), GammaSpec::hamming()), mu, 2, 2, 2,
                               quarter_grid(), o);
  const auto& full = r.sets.back();  // mask with every bit set
  ASSERT_EQ(full.A.size(), 4u);
  for (double v : full.lhs) EXPECT_EQ(v, 0.0);
}

TEST(Concentration, ExhaustiveTwoCubeQuadraticHamming) {
  auto mu = bernoulli(0.5);
  auto r = concentration_check(CostSpec::marton(ScalarFn::power(2.0, 0.5), GammaSpec::hamming()), mu, 2, 2, 2,
                               quarter_grid());
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.sets.size(), 15u);
  EXPECT_LE(r.worst_ratio, 1 + 1e-8);
}

TEST(Concentration, TalagrandBound) {
  auto mu = bernoulli(0.5);
  auto r = talagrand_check(mu, 2, quarter_grid());
  EXPECT_EQ(r.sets.size(), 15u);
  EXPECT_LE(r.worst_ratio, 1 + 1e-8);
  EXPECT_THROW(talagrand_check(mu, 2, quarter_grid(), 1.0), std::domain_error);
}

TEST(HalfSpace, ExponentTwoAtHalf) {
  EnlargementReport e;
  e.t_grid = {0.5, 5.0, 50.0, 500.0};
  e.mass_A = 0.6;
  e.mass_outside = {0.3, 0.1, 0.01, 0.0};
  auto h = half_space_conversion(e, 2.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(h.exponent_outside, 2.0);
  EXPECT_DOUBLE_EQ(h.exponent_A, 2.0);
  EXPECT_NEAR(h.forward_observed[1], 0.01 * 0.36, 1e-15);
  // a log(2b) = log 2 ~ 0.69
  EXPECT_TRUE(h.vacuous[0]);
  EXPECT_FALSE(h.vacuous[1]);
  for (std::size_t k = 2; k < e.t_grid.size(); ++k) EXPECT_LT(h.eps_of_t[k], h.eps_of_t[k - 1]);
  EXPECT_LT(h.eps_of_t.back(), 0.04);
  // closed form never beats the numeric infimum
  for (std::size_t k = 1; k < e.t_grid.size(); ++k) EXPECT_LE(h.converse_numeric[k], h.converse_closed[k] * (1 + 1e-9));
  EXPECT_THROW(half_space_conversion(e, 1.0, 1.0, 1.0), std::domain_error);
}
