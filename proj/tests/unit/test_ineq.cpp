#include <gtest/gtest.h>

#include <cmath>

#include "weakot/ineq.hpp"
#include "weakot/random.hpp"

using namespace weakot;

namespace {

SpacePtr line(std::vector<double> xs) { return make_space(FiniteSpace::line(xs)); }

}  // namespace

TEST(TeCheck, BernoulliSharpConstantHolds) {
  const auto mu = bernoulli(0.3);
  auto spec = InequalitySpec::te_plus(CostSpec::barycentric(ScalarFn::theta(0.3, 0)), mu, 1.0);
  auto r = te_check(spec, 1001);
  EXPECT_LE(r.worst_violation, 1e-8);
  EXPECT_TRUE(r.passed());
}

TEST(TeCheck, TooSmallConstantIsCaught) {
  const auto mu = bernoulli(0.3);
  auto spec = InequalitySpec::te_plus(CostSpec::barycentric(ScalarFn::theta(0.3, 0)), mu, 0.1);
  auto r = te_check(spec, 201);
  EXPECT_GT(r.worst_violation, 1e-3);
  EXPECT_FALSE(r.passed());
  ASSERT_TRUE(r.witness_nu1.has_value());
  // the witness reproduces the reported violation
  const double v = te_evaluate(spec, *r.witness_nu1, *r.witness_nu1).violation;
  EXPECT_NEAR(v, r.worst_violation, 1e-9);
}

TEST(TeCheck, RejectsBadArguments) {
  const auto mu = bernoulli(0.3);
  auto spec = InequalitySpec::te_plus(CostSpec::barycentric(ScalarFn::theta(0.3, 0)), mu, 1.0);
  EXPECT_THROW(te_check(spec, 0), std::domain_error);
  EXPECT_THROW(InequalitySpec::te_plus(spec.cost, mu, -1.0), std::domain_error);
  auto tau = InequalitySpec::tau_lsi(spec.cost, mu, 0.5, 2.0);
  EXPECT_THROW(te_check(tau, 10), std::domain_error);
}

TEST(BobkovGotze, ZeroPotentialGivesOne) {
  const auto mu = bernoulli(0.4);
  TestFunction zero(mu.space(), {0.0, 0.0});
  for (auto spec : {InequalitySpec::te_plus(CostSpec::barycentric(ScalarFn::theta(0.4, 0)), mu, 1.0),
                    InequalitySpec::te_minus(CostSpec::barycentric(ScalarFn::theta(0.4, 1)), mu, 1.0),
                    InequalitySpec::te(CostSpec::marton(ScalarFn::alpha(0.5), GammaSpec::hamming()), mu, 2.0, 2.0)})
    EXPECT_NEAR(bobkov_gotze_log(spec, zero), 0.0, 1e-15);
}

TEST(BobkovGotze, BinomialConvexPotentials) {
  const auto mu = binomial(4, 0.3);
  const auto phis = random_test_functions(mu.space(), 10000, 5, true);
  auto plus = InequalitySpec::te_plus(CostSpec::barycentric(ScalarFn::theta_n(0.3, 0, 4.0)), mu, 1.0);
  EXPECT_LE(bobkov_gotze_check(plus, phis).worst_violation, 1e-7);
}

TEST(BobkovGotze, DualBoundAgreesWithPrimalSign) {
  // exp(dual log) <= 1 for every phi whenever te_check finds no primal violation; a scaled-up cost
  // breaks both.
  const auto mu = bernoulli(0.3);
  auto ok = InequalitySpec::te_minus(CostSpec::barycentric(ScalarFn::theta(0.3, 1)), mu, 1.0);
  auto bad = InequalitySpec::te_minus(CostSpec::barycentric(ScalarFn::theta(0.3, 1)).scaled(1.5), mu, 1.0);
  const auto phis = random_test_functions(mu.space(), 500, 9, false, 5.0);
  EXPECT_LE(bobkov_gotze_check(ok, phis).worst_violation, 1e-8);
  EXPECT_GT(bobkov_gotze_check(bad, phis).worst_violation, 1e-4);
  EXPECT_GT(te_check(bad, 201).worst_violation, 1e-4);
}

TEST(Poisson, SlopeFamilyIsExtremal) {
  PoissonOptions o;
  o.samples = 500;
  auto c = certify_poisson(1.0, 1e-12, o);
  ASSERT_EQ(c.reports.size(), 4u);
  for (const auto& r : c.reports) EXPECT_TRUE(r.passed()) << r.label << " " << r.worst_violation;
  EXPECT_TRUE(c.reports[0].equality);
  EXPECT_LE(c.reports[0].worst_abs, 1e-6);
}

TEST(Poisson, TailBoundShrinksWithN) {
  const double a = poisson_tail_bound(2.0, 10, 1.0), b = poisson_tail_bound(2.0, 20, 1.0);
  EXPECT_GT(a, b);
  EXPECT_LT(b, 1e-6);
}

TEST(Certify, BernoulliFairCoin) {
  auto c = certify_bernoulli(0.5, 1e-2);
  EXPECT_TRUE(c.passed());
  EXPECT_LE(c.worst_violation(), 1e-8);
  EXPECT_FALSE(certify_bernoulli(0.5, 1e-2, 1.05).passed());
  EXPECT_THROW(certify_bernoulli(1.0), std::domain_error);
}

TEST(Certify, BinomialTwoToFour) {
  BinomialOptions o;
  o.samples = 2000;
  o.lifts = 20;
  auto c = certify_binomial(4, 0.3, o);
  for (const auto& r : c.reports) EXPECT_TRUE(r.passed()) << r.label << " " << r.worst_violation;
  // n = 1 is the Bernoulli law
  auto b = binomial(1, 0.3);
  EXPECT_NEAR(b[1], 0.3, 1e-15);
}

TEST(Dembo, SameMeasuresNeverViolate) {
  const auto X = line({0.0, 1.0, 2.0});
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto rng = trial_rng(101, k);
    DiscreteMeasure mu(X, dirichlet(rng, 3));
    const double t = uniform(rng, 0.05, 0.95);
    EXPECT_LE(dembo_check(t, mu, mu, mu), 1e-12);
    EXPECT_LE(samson_check(t, mu, mu, mu), 1e-12);
  }
}

TEST(Dembo, RandomInstances) {
  const auto X = line({0.0, 1.0, 2.0});
  double worst_d = -kInf, worst_s = -kInf;
  for (std::uint64_t k = 0; k < 40; ++k) {
    auto rng = trial_rng(103, k);
    DiscreteMeasure mu(X, dirichlet(rng, 3)), n1(X, dirichlet(rng, 3)), n2(X, dirichlet(rng, 3));
    const double t = uniform(rng, 0.05, 0.95);
    worst_d = std::max(worst_d, dembo_check(t, mu, n1, n2));
    worst_s = std::max(worst_s, samson_check(t, mu, n1, n2));
  }
  EXPECT_LE(worst_d, 1e-8);
  EXPECT_LE(worst_s, 1e-6);
}

TEST(Samson, EndpointOne) {
  const auto X = line({0.0, 1.0, 2.0, 3.0});
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto rng = trial_rng(107, k);
    DiscreteMeasure mu(X, dirichlet(rng, 4)), nu(X, dirichlet(rng, 4));
    EXPECT_LE(samson_check(1.0, mu, nu, nu), 1e-8);
    EXPECT_LE(dembo_check(0.0, mu, nu, nu), 1e-8);
  }
  EXPECT_THROW(samson_check(1.5, bernoulli(0.5), bernoulli(0.5), bernoulli(0.5)), std::domain_error);
}

TEST(LemSam07, ConstantFunctionIsTight) {
  const auto mu = bernoulli(0.2);
  TestFunction v(mu.space(), {1.7, 1.7});
  for (double t : {0.0, 0.3, 1.0}) EXPECT_NEAR(lem_sam07_check(t, v, mu), 0.0, 1e-15);
}

TEST(LemSam07, RandomFunctions) {
  const auto X = line({0.0, 1.0, 2.0, 3.0});
  double worst = -kInf;
  for (std::uint64_t k = 0; k < 200; ++k) {
    auto rng = trial_rng(109, k);
    DiscreteMeasure mu(X, dirichlet(rng, 4));
    std::vector<double> v(4);
    for (double& x : v) x = uniform(rng, -5.0, 5.0);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) worst = std::max(worst, lem_sam07_check(t, TestFunction(X, v), mu));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(TauLsi, ConstantFunctionGivesZero) {
  const auto mu = bernoulli(0.3);
  auto spec = InequalitySpec::tau_lsi(CostSpec::barycentric(ScalarFn::theta(0.3, 1)), mu, 0.5, 2.0);
  EXPECT_NEAR(tau_lsi_value(spec, TestFunction(mu.space(), {0.4, 0.4})), 0.0, 1e-14);
}

TEST(TauLsi, ConstantTwoHoldsAndTenthFails) {
  const auto mu = bernoulli(0.3);
  const auto cost = CostSpec::barycentric(ScalarFn::theta(0.3, 1));
  const auto fs = random_test_functions(mu.space(), 100, 3, false, 10.0);
  EXPECT_TRUE(tau_lsi_check(InequalitySpec::tau_lsi(cost, mu, 0.5, 2.0), fs).passed());
  auto r = tau_lsi_check(InequalitySpec::tau_lsi(cost, mu, 0.5, 0.2), fs);
  EXPECT_FALSE(r.passed());
  EXPECT_TRUE(r.witness_f.has_value());
}

TEST(Adamczak, ExponentialTailsHold) {
  std::vector<double> xs, w;
  for (int k = -40; k <= 40; ++k) {
    xs.push_back(k);
    w.push_back(std::exp(-std::abs(k)));
  }
  auto r = adamczak_condition(xs, w, 1.0, 0.5);
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.worst_ratio, std::exp(-1.0) + 1e-12);
}

TEST(Adamczak, PolynomialTailsFail) {
  std::vector<double> xs, w;
  for (int k = -50; k <= 50; ++k) {
    if (k == 0) continue;
    xs.push_back(k);
    w.push_back(1.0 / (k * k));
  }
  auto r = adamczak_condition(xs, w, 1.0, 0.5);
  EXPECT_FALSE(r.holds);
  EXPECT_GT(r.worst_ratio, 0.5);
}

TEST(Adamczak, PointMassIsVacuous) {
  auto r = adamczak_condition({0.0}, {1.0}, 1.0, 0.5);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.worst_x.has_value());
  EXPECT_THROW(adamczak_condition({0.0, 1.0}, {0.5, 0.5}, 1.0, 0.5), std::domain_error);
}

TEST(Alpha, HalfDominatesQuadratic) {
  const auto a = ScalarFn::alpha(0.5);
  for (int i = 0; i <= 1000; ++i) {
    const double u = i / 1000.0;
    EXPECT_GE(a.raw(u), u * u / 2 - 1e-15) << u;
  }
}

TEST(Tensorization, BernoulliProductSmallRun) {
  const auto mu = bernoulli(0.3);
  auto spec = InequalitySpec::te_plus(CostSpec::barycentric(ScalarFn::theta(0.3, 0)), mu, 1.0);
  auto r = tensorization_check(spec, 2, 30);
  EXPECT_TRUE(r.chain_checked);
  EXPECT_TRUE(r.passed()) << r.worst_violation << " " << r.worst_chain_excess << " " << r.worst_direct_excess;
}
