#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "costs.hpp"
#include "parallel.hpp"
#include "primal.hpp"
#include "random.hpp"

namespace weakot {

enum class ProductMetric { l1, d2 };

class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// X^n with points enumerated lexicographically, last coordinate fastest.
struct ProductSpace {
  SpacePtr base;
  std::size_t n = 0;
  SpacePtr space;
  std::vector<std::vector<std::size_t>> digits;  // digits[k][i] = i-th base index of point k

  std::size_t size() const { return digits.size(); }
  std::size_t index(std::span<const std::size_t> d) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) k = k * base->size() + d[i];
    return k;
  }
};

inline ProductSpace product_space(SpacePtr X, std::size_t n, ProductMetric metric = ProductMetric::l1,
                                  std::size_t cap = 4096) {
  if (n == 0) throw std::domain_error("product_space: n must be positive");
  const std::size_t m = X->size();
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(m);
  if (total > static_cast<double>(cap))
    throw ResourceError("product_space: " + std::to_string(m) + "^" + std::to_string(n) + " points exceed the cap of " +
                        std::to_string(cap));
  const std::size_t N = static_cast<std::size_t>(total);
  ProductSpace P;
  P.base = X;
  P.n = n;
  P.digits.assign(N, std::vector<std::size_t>(n, 0));
  for (std::size_t k = 0; k < N; ++k) {
    std::size_t r = k;
    for (std::size_t i = n; i-- > 0;) {
      P.digits[k][i] = r % m;
      r /= m;
    }
  }
  std::vector<std::string> labels(N);
  std::optional<std::vector<std::vector<double>>> coords;
  if (X->has_coords()) coords.emplace(N);
  Table d(N, N);
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      labels[k] += (i ? "," : "") + X->label(P.digits[k][i]);
      if (coords) {
        const auto& c = X->coord(P.digits[k][i]);
        (*coords)[k].insert((*coords)[k].end(), c.begin(), c.end());
      }
    }
    for (std::size_t l = 0; l < N; ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double di = X->dist(P.digits[k][i], P.digits[l][i]);
        s += metric == ProductMetric::l1 ? di : di * di;
      }
      d(k, l) = metric == ProductMetric::l1 ? s : std::sqrt(s);
    }
  }
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t l = 0; l < k; ++l) d(k, l) = d(l, k);  // exact symmetry
  // Block sums of multi-dimensional norms are no norm of the joined coordinates; such products drop them.
  try {
    P.space = make_space(FiniteSpace(labels, std::move(coords), d));
  } catch (const std::domain_error&) {
    P.space = make_space(FiniteSpace(std::move(labels), std::nullopt, std::move(d)));
  }
  return P;
}

// mu_1 (x) ... (x) mu_n; a single factor is repeated.
inline DiscreteMeasure product_measure(const ProductSpace& P, const std::vector<DiscreteMeasure>& factors) {
  if (factors.size() != 1 && factors.size() != P.n) throw std::domain_error("product_measure: need 1 or n factors");
  std::vector<double> w(P.size(), 1.0);
  for (std::size_t k = 0; k < P.size(); ++k)
    for (std::size_t i = 0; i < P.n; ++i) w[k] *= factors[factors.size() == 1 ? 0 : i][P.digits[k][i]];
  return DiscreteMeasure::normalized(P.space, std::move(w));
}

inline DiscreteMeasure marginal(const ProductSpace& P, const DiscreteMeasure& nu, std::size_t i) {
  std::vector<double> w(P.base->size(), 0.0);
  for (std::size_t k = 0; k < P.size(); ++k) w[P.digits[k][i]] += nu[k];
  return DiscreteMeasure::normalized(P.base, std::move(w));
}

// c^n(x,p) = sum_i c(x_i, p_i) with p_i the i-th marginal of p.
class ProductCostModel {
public:
  ProductCostModel(const CostSpec& base, ProductSpace P) : base_(base, P.base), P_(std::move(P)) {}

  std::size_t size() const { return P_.size(); }
  const ProductSpace& product() const { return P_; }
  const CostModel& base() const { return base_; }

  double value(std::size_t x, std::span<const double> p) const {
    double total = 0.0;
    for (std::size_t i = 0; i < P_.n; ++i) {
      const auto pi = marginal_of(p, i);
      const double v = base_.value(P_.digits[x][i], pi);
      if (v == kInf) return kInf;
      total += v;
    }
    return total;
  }

  void gradient(std::size_t x, std::span<const double> p, std::span<double> g) const {
    std::fill(g.begin(), g.end(), 0.0);
    std::vector<double> gi(P_.base->size());
    for (std::size_t i = 0; i < P_.n; ++i) {
      const auto pi = marginal_of(p, i);
      base_.gradient(P_.digits[x][i], pi, gi);
      for (std::size_t k = 0; k < P_.size(); ++k) g[k] += gi[P_.digits[k][i]];
    }
  }

  std::vector<LinearBound> domain_bounds(std::size_t x) const {
    std::vector<LinearBound> out;
    for (std::size_t i = 0; i < P_.n; ++i)
      for (auto& b : base_.domain_bounds(P_.digits[x][i])) {
        LinearBound lifted{std::vector<double>(P_.size()), b.lo, b.hi};
        for (std::size_t k = 0; k < P_.size(); ++k) lifted.coef[k] = b.coef[P_.digits[k][i]];
        out.push_back(std::move(lifted));
      }
    return out;
  }

  bool forbidden(std::size_t x, std::size_t y) const {
    for (std::size_t i = 0; i < P_.n; ++i)
      if (base_.forbidden(P_.digits[x][i], P_.digits[y][i])) return true;
    return false;
  }

private:
  std::vector<double> marginal_of(std::span<const double> p, std::size_t i) const {
    std::vector<double> m(P_.base->size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) m[P_.digits[k][i]] += p[k];
    return m;
  }

  CostModel base_;
  ProductSpace P_;
};

inline SolveReport solve_product(const ProductCostModel& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const SolveOptions& opt = {}) {
  require_same_space(mu, nu, "solve_product");
  return solve_weak_ot_fw(c, mu, nu, opt);
}

// p(x, dy) = p_1(x_1, dy_1) q^{x_1,y_1}(x_2, dy_2) on X_1 x X_2, composed against the source nu.
inline Coupling chain_rule_coupling(const ProductSpace& P, const DiscreteMeasure& nu, const Coupling& pi1,
                                    const std::map<std::pair<std::size_t, std::size_t>, Coupling>& conditional) {
  if (P.n != 2) throw std::domain_error("chain_rule_coupling: needs a two-factor product");
  const std::size_t m = P.base->size();
  const Kernel p1 = pi1.disintegrate();
  std::map<std::pair<std::size_t, std::size_t>, Kernel> q;
  for (std::size_t x1 = 0; x1 < m; ++x1)
    for (std::size_t y1 = 0; y1 < m; ++y1) {
      if (pi1.joint(x1, y1) <= 0.0) continue;
      auto it = conditional.find({x1, y1});
      if (it == conditional.end())
        throw std::domain_error("chain_rule_coupling: missing conditional coupling for (" + P.base->label(x1) + ", " +
                                P.base->label(y1) + ")");
      q.emplace(it->first, it->second.disintegrate());
    }
  const std::size_t N = P.size();
  Table J(N, N);
  std::vector<double> col(N, 0.0);
  for (std::size_t x = 0; x < N; ++x) {
    if (nu[x] == 0.0) continue;
    const std::size_t x1 = P.digits[x][0], x2 = P.digits[x][1];
    for (std::size_t y = 0; y < N; ++y) {
      const std::size_t y1 = P.digits[y][0], y2 = P.digits[y][1];
      if (pi1.joint(x1, y1) <= 0.0) continue;
      const double v = nu[x] * p1.rows(x1, y1) * q.at({x1, y1}).rows(x2, y2);
      J(x, y) = v;
      col[y] += v;
    }
  }
  return Coupling(std::move(J), nu, DiscreteMeasure::normalized(P.space, std::move(col)));
}

// nu_2(x_1, .) for a measure on X_1 x X_2; nullopt where nu_1(x_1) = 0.
inline std::optional<DiscreteMeasure> conditional_second(const ProductSpace& P, const DiscreteMeasure& nu, std::size_t x1) {
  std::vector<double> w(P.base->size(), 0.0);
  double s = 0.0;
  for (std::size_t k = 0; k < P.size(); ++k)
    if (P.digits[k][0] == x1) {
      w[P.digits[k][1]] += nu[k];
      s += nu[k];
    }
  if (s <= 0.0) return std::nullopt;
  return DiscreteMeasure::normalized(P.base, std::move(w));
}

struct ChainRuleReport {
  double direct = 0.0;    // T_{c^2}(nu'|nu) solved on the product
  double composed = 0.0;  // cost of the composed coupling
  double bound = 0.0;     // T_{c_1} + averaged T_{c_2} + 2 eps
  double eps = 0.0;       // optimality slack of the factor solves
  std::optional<Coupling> coupling;
};

// Builds the chain-rule coupling from factor solves and evaluates both sides.
inline ChainRuleReport chain_rule_check(const CostSpec& base, const ProductSpace& P, const DiscreteMeasure& nu,
                                        const DiscreteMeasure& nu_prime, const SolveOptions& opt = {}) {
  if (P.n != 2) throw std::domain_error("chain_rule_check: needs a two-factor product");
  const std::size_t m = P.base->size();
  const auto n1 = marginal(P, nu, 0), n1p = marginal(P, nu_prime, 0);
  const auto s1 = solve_weak_ot(base, n1, n1p, opt);
  ChainRuleReport rep;
  // FW values overshoot the optimum by at most the final surrogate gap.
  double eps1 = s1.fw_gap;
  std::map<std::pair<std::size_t, std::size_t>, Coupling> cond;
  double averaged = 0.0, eps2 = 0.0;
  const Kernel p1 = s1.coupling->disintegrate();
  for (std::size_t x1 = 0; x1 < m; ++x1) {
    const auto a = conditional_second(P, nu, x1);
    if (!a) continue;
    for (std::size_t y1 = 0; y1 < m; ++y1) {
      if (s1.coupling->joint(x1, y1) <= 0.0) continue;
      const auto b = conditional_second(P, nu_prime, y1);
      if (!b) throw std::logic_error("chain_rule_check: coupling charges a null fiber");
      const auto s2 = solve_weak_ot(base, *a, *b, opt);
      averaged += n1[x1] * p1.rows(x1, y1) * s2.primal_value;
      eps2 = std::max(eps2, s2.fw_gap);
      cond.emplace(std::make_pair(x1, y1), *s2.coupling);
    }
  }
  rep.coupling = chain_rule_coupling(P, nu, *s1.coupling, cond);
  ProductCostModel pc(base, P);
  rep.composed = coupling_cost(pc, rep.coupling->joint, nu.weights());
  rep.eps = std::max(eps1, eps2);
  rep.bound = s1.primal_value + averaged + 2.0 * rep.eps;
  // Started from the composed coupling, so direct <= composed holds by monotonicity of the line search.
  SolveOptions warm = opt;
  warm.initial = rep.coupling->joint;
  rep.direct = solve_product(pc, nu, nu_prime, warm).primal_value;
  return rep;
}

struct EnlargementSolution {
  double value = kInf;
  double fw_gap = 0.0;
  std::vector<double> p;  // on the product space, supported in A
};

// c_A(x) = inf { c(x,p) : p(A) = 1 } by pairwise Frank-Wolfe on the simplex over A.
template <WeakCost C>
EnlargementSolution enlargement_cost(const C& cost, std::span<const std::size_t> A, std::size_t x,
                                     const SolveOptions& opt = {}) {
  if (A.empty()) throw std::domain_error("enlargement_cost: A must be nonempty");
  const std::size_t N = cost.size();
  EnlargementSolution s;
  s.p.assign(N, 0.0);
  if (std::find(A.begin(), A.end(), x) != A.end()) {
    s.p[x] = 1.0;
    s.value = 0.0;
    return s;
  }
  std::vector<double> q(N, 0.0), g(N);
  // Start from the cheapest vertex.
  std::size_t start = A[0];
  double best = kInf;
  for (std::size_t a : A) {
    std::fill(q.begin(), q.end(), 0.0);
    q[a] = 1.0;
    const double v = cost.value(x, q);
    if (v < best) {
      best = v;
      start = a;
    }
  }
  s.p[start] = 1.0;
  s.value = best;
  if (best == kInf) return s;
  for (int it = 0; it < opt.max_iter; ++it) {
    cost.gradient(x, s.p, g);
    std::size_t fw = A[0], aw = N;
    double gp = 0.0;
    for (std::size_t a : A) {
      gp += g[a] * s.p[a];
      if (g[a] < g[fw]) fw = a;
      if (s.p[a] > 0.0 && (aw == N || g[a] > g[aw])) aw = a;
    }
    s.fw_gap = std::max(gp - g[fw], 0.0);
    if (s.fw_gap <= opt.tol * std::max(1.0, std::abs(s.value))) break;
    // Bisection on the directional derivative: value-based searches stall near sqrt(eps).
    std::vector<double> gq(N);
    auto line = [&](bool pairwise) {
      const double gm = pairwise ? s.p[aw] : 1.0;
      auto slope = [&](double t) {
        for (std::size_t k = 0; k < N; ++k) q[k] = pairwise ? s.p[k] : (1.0 - t) * s.p[k];
        q[fw] += t;
        if (pairwise) q[aw] = std::max(q[aw] - t, 0.0);
        cost.gradient(x, q, gq);
        const double d = pairwise ? gq[fw] - gq[aw] : gq[fw] - [&] {
          double m = 0.0;
          for (std::size_t k = 0; k < N; ++k) m += gq[k] * s.p[k];
          return m;
        }();
        return std::isnan(d) ? kInf : d;
      };
      if (slope(0.0) >= 0.0) return 0.0;
      if (slope(gm) <= 0.0) return gm;
      double lo = 0.0, hi = gm;
      for (int k = 0; k < 200 && hi - lo > 1e-17 * gm; ++k) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
      }
      for (std::size_t k = 0; k < N; ++k) q[k] = pairwise ? s.p[k] : (1.0 - lo) * s.p[k];
      q[fw] += lo;
      if (pairwise) q[aw] = std::max(q[aw] - lo, 0.0);
      return cost.value(x, q) <= s.value ? lo : 0.0;
    };
    bool pairwise = aw != fw && aw != N;
    double t = pairwise ? line(true) : 0.0;
    if (t == 0.0) {
      pairwise = false;
      t = line(false);
    }
    if (t == 0.0) break;
    if (pairwise) {
      const double take = std::min(t, s.p[aw]);
      s.p[fw] += take;
      s.p[aw] = (t >= s.p[aw]) ? 0.0 : s.p[aw] - take;
    } else {
      for (double& v : s.p) v *= (1.0 - t);
      s.p[fw] += t;
    }
    double tot = 0.0;
    for (double v : s.p) tot += v;
    for (double& v : s.p) v /= tot;
    s.value = cost.value(x, s.p);
  }
  return s;
}

struct EnlargementReport {
  std::vector<std::size_t> A;
  std::vector<double> t_grid;
  std::vector<double> c_A_values;  // per point of the product space
  double mass_A = 0.0;
  std::vector<double> mass_outside;  // mu^n(X^n \ A_t) per t
  std::vector<double> lhs, rhs;      // mu^n(X^n \ A_t)^{a2} mu^n(A)^{a1} and K e^{-t}
  double K = 1.0;
  double r = 0.0;
  std::vector<double> eps_of_t;
};

struct ConcentrationReport {
  std::vector<EnlargementReport> sets;
  double worst_ratio = 0.0;  // max lhs / rhs
  std::size_t worst_set = 0;
  double worst_t = 0.0;
  double empirical_K = 0.0;  // smallest K making every checked bound hold
  bool exhaustive = true;
};

struct ConcentrationOptions {
  std::size_t enumerate_cap = 12;  // full subset enumeration up to this many product points
  std::size_t sampled_sets = 512;
  std::uint64_t seed = 1;
  SolveOptions solve = precise_solve_options();
  double K = 1.0;
};

inline std::vector<std::vector<std::size_t>> candidate_sets(const ProductSpace& P, const ConcentrationOptions& opt,
                                                            bool& exhaustive) {
  const std::size_t N = P.size();
  std::vector<std::vector<std::size_t>> sets;
  exhaustive = N <= opt.enumerate_cap;
  if (exhaustive) {
    for (std::size_t mask = 1; mask < (std::size_t{1} << N); ++mask) {
      std::vector<std::size_t> A;
      for (std::size_t k = 0; k < N; ++k)
        if (mask & (std::size_t{1} << k)) A.push_back(k);
      sets.push_back(std::move(A));
    }
    return sets;
  }
  // Sublevel sets of random linear functionals, then random subsets.
  const bool coords = P.space->has_coords();
  for (std::size_t s = 0; s < opt.sampled_sets; ++s) {
    auto rng = trial_rng(opt.seed, s, 0x5e75);
    std::vector<std::size_t> A;
    if (coords && s % 2 == 0) {
      std::normal_distribution<double> g(0.0, 1.0);
      std::vector<double> dir(P.space->dim());
      for (double& v : dir) v = g(rng);
      std::vector<double> val(N);
      for (std::size_t k = 0; k < N; ++k) {
        val[k] = 0.0;
        for (std::size_t d = 0; d < dir.size(); ++d) val[k] += dir[d] * P.space->coord(k)[d];
      }
      std::vector<double> sorted = val;
      std::sort(sorted.begin(), sorted.end());
      const double level = sorted[uniform_index(rng, N)];
      for (std::size_t k = 0; k < N; ++k)
        if (val[k] <= level) A.push_back(k);
    } else {
      const double keep = uniform(rng, 0.05, 0.95);
      for (std::size_t k = 0; k < N; ++k)
        if (uniform(rng, 0.0, 1.0) < keep) A.push_back(k);
      if (A.empty()) A.push_back(uniform_index(rng, N));
    }
    sets.push_back(std::move(A));
  }
  return sets;
}

namespace detail {

// c_A on every point and the masses mu^n(A), mu^n(X^n \ A_t) for each candidate set; lhs/rhs are left empty.
inline ConcentrationReport enlargements(const CostSpec& base, const DiscreteMeasure& mu, std::size_t n,
                                        const std::vector<double>& t_grid, const ConcentrationOptions& opt) {
  const ProductSpace P = product_space(mu.space(), n);
  const ProductCostModel pc(base, P);
  const DiscreteMeasure mun = product_measure(P, {mu});
  ConcentrationReport rep;
  const auto sets = candidate_sets(P, opt, rep.exhaustive);
  const double slack = default_tolerances().threshold;
  rep.sets.resize(sets.size());
  parallel_for(sets.size(), [&](std::size_t s) {
    EnlargementReport& e = rep.sets[s];
    e.A = sets[s];
    e.t_grid = t_grid;
    e.K = opt.K;
    e.c_A_values.resize(P.size());
    for (std::size_t x = 0; x < P.size(); ++x) e.c_A_values[x] = enlargement_cost(pc, e.A, x, opt.solve).value;
    for (std::size_t a : e.A) e.mass_A += mun[a];
    for (double t : t_grid) {
      double out = 0.0;
      for (std::size_t x = 0; x < P.size(); ++x)
        if (e.c_A_values[x] > t + slack) out += mun[x];
      e.mass_outside.push_back(out);
    }
  });
  return rep;
}

inline void summarize(ConcentrationReport& rep) {
  for (std::size_t s = 0; s < rep.sets.size(); ++s) {
    const auto& e = rep.sets[s];
    for (std::size_t k = 0; k < e.t_grid.size(); ++k) {
      const double ratio = e.lhs[k] / e.rhs[k];
      rep.empirical_K = std::max(rep.empirical_K, e.lhs[k] * e.K / e.rhs[k]);
      if (ratio > rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.worst_set = s;
        rep.worst_t = e.t_grid[k];
      }
    }
  }
}

} // namespace detail

// Checks mu^n(X^n \ A_t)^{a2} mu^n(A)^{a1} <= K e^{-t} over the candidate sets A.
inline ConcentrationReport concentration_check(const CostSpec& base, const DiscreteMeasure& mu, double a1, double a2,
                                               std::size_t n, const std::vector<double>& t_grid,
                                               const ConcentrationOptions& opt = {}) {
  if (!(a1 > 0.0 && a2 > 0.0)) throw std::domain_error("concentration_check: a1, a2 must be positive");
  auto rep = detail::enlargements(base, mu, n, t_grid, opt);
  for (auto& e : rep.sets)
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      e.lhs.push_back(std::pow(e.mass_outside[k], a2) * std::pow(e.mass_A, a1));
      e.rhs.push_back(opt.K * std::exp(-t_grid[k]));
    }
  detail::summarize(rep);
  return rep;
}

// mu^n(X^n \ A_t) <= mu^n(A)^{-s/(1-s)} e^{-st/2} where A_t is cut out by sum_i p(x_i != y_i)^2 <= t.
inline ConcentrationReport talagrand_check(const DiscreteMeasure& mu, std::size_t n, const std::vector<double>& t_grid,
                                           double s = 0.5, const ConcentrationOptions& opt = {}) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("talagrand_check: s must be in (0,1)");
  const auto base = CostSpec::marton(ScalarFn::power(2.0), GammaSpec::hamming());
  auto rep = detail::enlargements(base, mu, n, t_grid, opt);
  for (auto& e : rep.sets)
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      e.lhs.push_back(e.mass_outside[k]);
      e.rhs.push_back(std::pow(e.mass_A, -s / (1.0 - s)) * std::exp(-s * t_grid[k] / 2.0));
    }
  detail::summarize(rep);
  return rep;
}

struct HalfSpaceBounds {
  std::vector<double> t_grid;
  double s = 0.5;
  double exponent_outside = 0.0, exponent_A = 0.0;  // 1/(1-s)^{r-1}, 1/s^{r-1}
  std::vector<double> forward_bound;                // b e^{-t/a}
  std::vector<double> forward_observed;             // from the report
  std::vector<double> converse_numeric;             // inf over s, computed
  std::vector<double> converse_closed;              // b e^{-t(1-eps)^r/a}
  std::vector<double> eps_of_t;
  std::vector<bool> vacuous;                        // t <= max(a log(2b), 0)
  std::vector<double> converse_observed;            // mu^n(X^n \ A_t) when mu^n(A) >= 1/2, else NaN
};

// Two-exponent form vs the median form of concentration, both directions, on the report's t grid.
inline HalfSpaceBounds half_space_conversion(const EnlargementReport& rep, double r, double a, double b, double s = 0.5) {
  if (!(r > 1.0)) throw std::domain_error("half_space_conversion: r must exceed 1");
  if (!(a > 0.0) || !(b >= 1.0)) throw std::domain_error("half_space_conversion: needs a > 0 and b >= 1");
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("half_space_conversion: s must be in (0,1)");
  HalfSpaceBounds h;
  h.t_grid = rep.t_grid;
  h.s = s;
  h.exponent_outside = 1.0 / std::pow(1.0 - s, r - 1.0);
  h.exponent_A = 1.0 / std::pow(s, r - 1.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < rep.t_grid.size(); ++k) {
    const double t = rep.t_grid[k];
    h.forward_bound.push_back(b * std::exp(-t / a));
    h.forward_observed.push_back(k < rep.mass_outside.size()
                                     ? std::pow(rep.mass_outside[k], h.exponent_outside) * std::pow(rep.mass_A, h.exponent_A)
                                     : nan);
    const bool vac = t <= std::max(a * std::log(2.0 * b), 0.0);
    h.vacuous.push_back(vac);
    if (vac) {
      h.eps_of_t.push_back(nan);
      h.converse_closed.push_back(1.0);
      h.converse_numeric.push_back(1.0);
    } else {
      const double eps = std::pow(std::log(2.0) / (t / a - std::log(b)), 1.0 / r);
      h.eps_of_t.push_back(eps);
      h.converse_closed.push_back(eps < 1.0 ? b * std::exp(-t * std::pow(1.0 - eps, r) / a) : 1.0);
      auto logf = [&](double u) {
        const double w = std::pow(1.0 - u, r - 1.0);
        return w * std::log(b) + w / std::pow(u, r - 1.0) * std::log(2.0) - t * w / a;
      };
      // The exponent is not convex in s: scan, then refine around the best grid point.
      const int grid = 2000;
      int best = 1;
      for (int j = 2; j < grid; ++j)
        if (logf(double(j) / grid) < logf(double(best) / grid)) best = j;
      auto [u, lv] = minimize_convex_1d(logf, double(best - 1) / grid, double(best + 1) / grid, 1e-13);
      (void)u;
      h.converse_numeric.push_back(std::min(1.0, std::exp(lv)));
    }
    h.converse_observed.push_back(rep.mass_A >= 0.5 && k < rep.mass_outside.size() ? rep.mass_outside[k] : nan);
  }
  return h;
}

} // namespace weakot
