#include <gtest/gtest.h>

#include <cmath>

#include "weakot/primal.hpp"
#include "weakot/random.hpp"

using namespace weakot;

namespace {

SpacePtr line(std::vector<double> xs) { return make_space(FiniteSpace::line(xs)); }

// Minimum of <omega, pi> over all basic feasible solutions of the transportation polytope. A basis
// is a set of n+m-1 cells forming a spanning tree; its plan is found by peeling leaves.
double vertex_enumeration_min(const Table& omega, const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size(), m = b.size(), cells = n * m, k = n + m - 1;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  double best = kInf;
  std::vector<double> plan(cells), ra(n), cb(m);
  std::vector<int> rdeg(n), cdeg(m);
  std::vector<char> done(k);
  while (true) {
    std::fill(rdeg.begin(), rdeg.end(), 0);
    std::fill(cdeg.begin(), cdeg.end(), 0);
    for (std::size_t e : pick) {
      ++rdeg[e / m];
      ++cdeg[e % m];
    }
    ra = a;
    cb = b;
    std::fill(done.begin(), done.end(), 0);
    std::fill(plan.begin(), plan.end(), 0.0);
    std::size_t assigned = 0;
    bool progress = true;
    while (progress && assigned < k) {
      progress = false;
      for (std::size_t q = 0; q < k; ++q) {
        if (done[q]) continue;
        const std::size_t i = pick[q] / m, j = pick[q] % m;
        double v;
        if (rdeg[i] == 1) v = ra[i];
        else if (cdeg[j] == 1) v = cb[j];
        else continue;
        plan[pick[q]] = v;
        ra[i] -= v;
        cb[j] -= v;
        --rdeg[i];
        --cdeg[j];
        done[q] = 1;
        ++assigned;
        progress = true;
      }
    }
    if (assigned == k) {
      bool feasible = true;
      for (double v : plan) feasible = feasible && v >= -1e-12;
      for (double v : ra) feasible = feasible && std::abs(v) < 1e-12;
      for (double v : cb) feasible = feasible && std::abs(v) < 1e-12;
      if (feasible) {
        double s = 0.0;
        for (std::size_t c = 0; c < cells; ++c) s += omega.data[c] * plan[c];
        best = std::min(best, s);
      }
    }
    // next k-combination of cells
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == cells - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

// I_c[pi] evaluated row by row through eval_cost.
double coupling_cost_oracle(const CostSpec& c, const Coupling& pi) {
  const auto& X = pi.first.space();
  double s = 0.0;
  for (std::size_t x = 0; x < pi.joint.rows; ++x) {
    if (pi.first[x] <= 0.0) continue;
    std::vector<double> p(pi.joint.cols);
    for (std::size_t y = 0; y < p.size(); ++y) p[y] = pi.joint(x, y) / pi.first[x];
    s += pi.first[x] * eval_cost(c, X, x, p).value();
  }
  return s;
}

}  // namespace

TEST(LinearOt, IdenticalMarginalsCostNothing) {
  auto X = line({0.0, 1.0, 3.0});
  DiscreteMeasure mu(X, {0.2, 0.5, 0.3});
  auto r = linear_ot(X->dist_table(), mu, mu);
  EXPECT_NEAR(r.value, 0.0, 1e-15);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) {
        EXPECT_NEAR(r.coupling.joint(i, j), 0.0, 1e-15);
      }
}

TEST(LinearOt, ForcedCoupling) {
  auto X = line({0.0, 1.0});
  Table w(2, 2);
  w(0, 1) = 3.0;
  w(1, 0) = 3.0;
  auto r = linear_ot(w, DiscreteMeasure::dirac(X, 0), DiscreteMeasure::dirac(X, 1));
  EXPECT_DOUBLE_EQ(r.value, 3.0);
}

TEST(LinearOt, MatchesVertexEnumerationOnFiveByFive) {
  auto X = line({0.0, 1.0, 2.0, 3.0, 4.0});
  for (std::uint64_t k = 0; k < 3; ++k) {
    auto rng = trial_rng(23, k);
    Table w(5, 5);
    for (double& v : w.data) v = uniform(rng, 0.0, 10.0);
    DiscreteMeasure mu(X, dirichlet(rng, 5)), nu(X, dirichlet(rng, 5));
    const double oracle = vertex_enumeration_min(w, mu.weights(), nu.weights());
    EXPECT_NEAR(linear_ot(w, mu, nu).value, oracle, 1e-10);
  }
}

TEST(LinearOt, RejectsShapeMismatch) {
  auto X = line({0.0, 1.0});
  auto mu = DiscreteMeasure::dirac(X, 0);
  EXPECT_THROW(linear_ot(Table(3, 2), mu, mu), std::domain_error);
}

TEST(SolveWeakOt, SameMarginalsGiveZeroAndIdentityKernel) {
  auto X = line({0.0, 1.0, 2.5});
  DiscreteMeasure mu(X, {0.3, 0.3, 0.4});
  for (auto c : {CostSpec::marton(ScalarFn::power(2.0), GammaSpec::hamming()),
                 CostSpec::barycentric(ScalarFn::power(2.0)),
                 CostSpec::samson(ScalarFn::beta(0.5), GammaSpec::hamming(), mu)}) {
    auto r = solve_weak_ot(c, mu, mu);
    EXPECT_NEAR(r.primal_value, 0.0, 1e-12);
    auto k = r.coupling->disintegrate();
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(k.rows(i, i), 1.0, 1e-6);
  }
}

TEST(SolveWeakOt, DilationCostsNothingForBarycentricAbs) {
  auto X = line({-1.0, 0.0, 1.0});
  auto delta0 = DiscreteMeasure::dirac(X, 1);
  DiscreteMeasure spread(X, {0.5, 0.0, 0.5});
  auto c = CostSpec::barycentric(ScalarFn::power(1.0));
  EXPECT_NEAR(solve_weak_ot(c, delta0, spread).primal_value, 0.0, 1e-12);
  // The reverse direction has a unique coupling: every row is delta_0.
  EXPECT_NEAR(solve_weak_ot(c, spread, delta0).primal_value, 1.0, 1e-12);
}

TEST(SolveWeakOt, PrimalValueEqualsCouplingCost) {
  auto X = line({0.0, 0.7, 1.5, 2.0});
  for (std::uint64_t k = 0; k < 30; ++k) {
    auto rng = trial_rng(29, k);
    DiscreteMeasure mu(X, dirichlet(rng, 4)), nu(X, dirichlet(rng, 4));
    std::vector<CostSpec> cs{CostSpec::marton(ScalarFn::power(2.0), GammaSpec::power(1.0)),
                             CostSpec::barycentric(ScalarFn::power(2.0)),
                             CostSpec::samson(ScalarFn::beta(0.4), GammaSpec::hamming(), mu)};
    for (const auto& c : cs) {
      auto r = solve_weak_ot(c, mu, nu);
      ASSERT_TRUE(r.coupling.has_value());
      EXPECT_NEAR(r.primal_value, coupling_cost_oracle(c, *r.coupling), 1e-10);
    }
  }
}

TEST(SolveWeakOt, NoBetterThanAnyFeasibleCoupling) {
  // Random couplings from the polytope (independent mixtures with vertices) bound the optimum.
  auto X = line({0.0, 1.0, 2.0});
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto rng = trial_rng(31, k);
    DiscreteMeasure mu(X, dirichlet(rng, 3)), nu(X, dirichlet(rng, 3));
    auto c = CostSpec::marton(ScalarFn::alpha(0.5), GammaSpec::hamming());
    const double v = solve_weak_ot(c, mu, nu).primal_value;
    Table w(3, 3);
    for (double& e : w.data) e = uniform(rng, 0.0, 1.0);
    auto vert = linear_ot(w, mu, nu).coupling.joint;
    const double s = uniform(rng, 0.0, 1.0);
    Table mix(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) mix(i, j) = s * vert(i, j) + (1 - s) * mu[i] * nu[j];
    EXPECT_LE(v, coupling_cost_oracle(c, Coupling(mix, mu, nu)) + 1e-12);
  }
}

TEST(SolveWeakOt, WarmStartNeverEndsAboveItsStart) {
  auto X = line({0.0, 1.0, 2.0});
  auto c = CostSpec::barycentric(ScalarFn::power(2.0));
  for (std::uint64_t k = 0; k < 10; ++k) {
    auto rng = trial_rng(37, k);
    DiscreteMeasure mu(X, dirichlet(rng, 3)), nu(X, dirichlet(rng, 3));
    Table w(3, 3);
    for (double& e : w.data) e = uniform(rng, 0.0, 1.0);
    SolveOptions o;
    o.initial = linear_ot(w, mu, nu).coupling.joint;
    const double start = coupling_cost_oracle(c, Coupling(*o.initial, mu, nu));
    const auto warm = solve_weak_ot(c, mu, nu, o);
    EXPECT_LE(warm.primal_value, start + 1e-15);
    EXPECT_NEAR(warm.primal_value, solve_weak_ot(c, mu, nu).primal_value, 1e-8);
  }
  SolveOptions bad;
  bad.initial = Table(2, 3);
  EXPECT_THROW(solve_weak_ot(c, DiscreteMeasure::dirac(X, 0), DiscreteMeasure::dirac(X, 1), bad), std::domain_error);
}

TEST(SolveWeakOt, RejectsMismatchedSpaces) {
  auto X = line({0.0, 1.0}), Y = line({0.0, 2.0});
  auto c = CostSpec::marton(ScalarFn::power(2.0), GammaSpec::hamming());
  EXPECT_THROW(solve_weak_ot(c, DiscreteMeasure::dirac(X, 0), DiscreteMeasure::dirac(Y, 0)), std::domain_error);
}

TEST(SimplexSubproblem, ConstantPotential) {
  auto X = line({0.0, 1.0, 2.0});
  CostModel m(CostSpec::marton(ScalarFn::power(2.0), GammaSpec::hamming()), X);
  std::vector<double> phi{2.5, 2.5, 2.5};
  for (std::size_t x = 0; x < 3; ++x) {
    auto r = solve_simplex_subproblem(m, x, phi);
    EXPECT_DOUBLE_EQ(r.value, 2.5);
    EXPECT_EQ(r.p[x], 1.0);
  }
}

TEST(SimplexSubproblem, MartonTwoPointCalculus) {
  // min_q { -q + q^2 } on [0,1]: q = 1/2, value -1/4
  auto X = line({0.0, 1.0});
  CostModel m(CostSpec::marton(ScalarFn::power(2.0), GammaSpec::hamming()), X);
  std::vector<double> phi{0.0, -1.0};
  auto r = solve_simplex_subproblem(m, 0, phi);
  EXPECT_NEAR(r.value, -0.25, 1e-12);
  EXPECT_NEAR(r.p[0], 0.5, 1e-6);
  EXPECT_NEAR(r.p[1], 0.5, 1e-6);
}

TEST(SimplexSubproblem, NeverAbovePhiAtX) {
  auto X = line({0.0, 0.5, 1.0, 4.0});
  DiscreteMeasure mu0(X, {0.25, 0.25, 0.25, 0.25});
  CostModel m(CostSpec::samson(ScalarFn::beta(0.3), GammaSpec::hamming(), mu0), X);
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto rng = trial_rng(37, k);
    std::vector<double> phi(4);
    for (double& v : phi) v = uniform(rng, -2.0, 2.0);
    const std::size_t x = uniform_index(rng, 4);
    EXPECT_LE(solve_simplex_subproblem(m, x, phi).value, phi[x] + 1e-15);
  }
}
