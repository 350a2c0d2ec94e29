#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "costs.hpp"
#include "dual.hpp"
#include "parallel.hpp"
#include "primal.hpp"
#include "product.hpp"
#include "random.hpp"

namespace weakot {

struct InequalitySpec {
  enum class Kind { te, te_plus, te_minus, tau_lsi };

  Kind kind = Kind::te;
  CostSpec cost;
  DiscreteMeasure base;
  double a1 = 1.0, a2 = 1.0, b = 1.0, lambda = 1.0, C = 1.0;

  InequalitySpec(Kind k, CostSpec c, DiscreteMeasure mu) : kind(k), cost(std::move(c)), base(std::move(mu)) {}

  // T_c(nu1|nu2) <= a1 H(nu1|mu) + a2 H(nu2|mu), nu2 the source.
  static InequalitySpec te(CostSpec c, DiscreteMeasure mu, double a1, double a2) {
    InequalitySpec s{Kind::te, std::move(c), std::move(mu)};
    s.a1 = a1;
    s.a2 = a2;
    s.validate();
    return s;
  }
  // T_c(nu|mu) <= b H(nu|mu)
  static InequalitySpec te_plus(CostSpec c, DiscreteMeasure mu, double b) {
    InequalitySpec s{Kind::te_plus, std::move(c), std::move(mu)};
    s.b = b;
    s.validate();
    return s;
  }
  // T_c(mu|nu) <= b H(nu|mu)
  static InequalitySpec te_minus(CostSpec c, DiscreteMeasure mu, double b) {
    InequalitySpec s{Kind::te_minus, std::move(c), std::move(mu)};
    s.b = b;
    s.validate();
    return s;
  }
  static InequalitySpec tau_lsi(CostSpec c, DiscreteMeasure mu, double lambda, double C) {
    InequalitySpec s{Kind::tau_lsi, std::move(c), std::move(mu)};
    s.lambda = lambda;
    s.C = C;
    s.validate();
    return s;
  }

  void validate() const {
    for (double v : {a1, a2, b, lambda, C})
      if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("InequalitySpec: constants must be positive");
  }
};

inline const char* kind_name(InequalitySpec::Kind k) {
  switch (k) {
    case InequalitySpec::Kind::te: return "T";
    case InequalitySpec::Kind::te_plus: return "T_plus";
    case InequalitySpec::Kind::te_minus: return "T_minus";
    case InequalitySpec::Kind::tau_lsi: return "tau_LSI";
  }
  return "?";
}

enum class SearchMethod { grid, random, dual_sampling };

inline const char* search_name(SearchMethod m) {
  switch (m) {
    case SearchMethod::grid: return "grid";
    case SearchMethod::random: return "random";
    case SearchMethod::dual_sampling: return "dual_sampling";
  }
  return "?";
}

struct InequalityReport {
  InequalitySpec spec;
  std::string label;
  double worst_violation = -kInf;  // positive means a counterexample
  double worst_abs = 0.0;          // max |value|, for equality checks
  std::optional<DiscreteMeasure> witness_nu1, witness_nu2;
  std::optional<TestFunction> witness_f;
  std::size_t trials = 0;
  SearchMethod method = SearchMethod::grid;
  double tolerance = 1e-8;
  bool equality = false;  // pass requires worst_abs <= tolerance
  std::vector<double> values;
  std::uint64_t seed = 0;
  Tolerances tolerances = default_tolerances();

  explicit InequalityReport(InequalitySpec s) : spec(std::move(s)) {}
  bool passed() const { return equality ? worst_abs <= tolerance : worst_violation <= tolerance; }
};

namespace detail {

inline double log_mean_exp(std::span<const double> f, const DiscreteMeasure& mu) {
  double m = -kInf;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mu[i] > 0.0) m = std::max(m, f[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mu[i] > 0.0) s += mu[i] * std::exp(f[i] - m);
  return m + std::log(s);
}

inline DiscreteMeasure on_support(const DiscreteMeasure& mu, const std::vector<std::size_t>& supp,
                                  const std::vector<double>& w) {
  std::vector<double> full(mu.size(), 0.0);
  for (std::size_t k = 0; k < supp.size(); ++k) full[supp[k]] = w[k];
  return DiscreteMeasure::normalized(mu.space(), std::move(full));
}

// All points of the simplex on m vertices with coordinates in (1/k)Z.
inline void simplex_lattice(std::size_t m, std::size_t k, std::vector<std::vector<double>>& out) {
  std::vector<std::size_t> c(m, 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t left) -> void {
    if (i + 1 == m) {
      c[i] = left;
      std::vector<double> w(m);
      for (std::size_t j = 0; j < m; ++j) w[j] = static_cast<double>(c[j]) / static_cast<double>(k);
      out.push_back(std::move(w));
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      c[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, k);
}

inline double lattice_count(std::size_t m, std::size_t k) {
  double c = 1.0;  // C(k + m - 1, m - 1)
  for (std::size_t j = 1; j < m; ++j) c = c * static_cast<double>(k + j) / static_cast<double>(j);
  return c;
}

} // namespace detail

struct TeValue {
  double transport = 0.0, rhs = 0.0, violation = 0.0;
};

// T - rhs for one pair; an infinite entropy skips the pair (-inf), an infinite cost against a finite
// entropy is a genuine counterexample (+inf).
inline TeValue te_evaluate(const InequalitySpec& s, const DiscreteMeasure& nu1, const DiscreteMeasure& nu2,
                           const SolveOptions& opt = {}) {
  const auto& mu = s.base;
  TeValue v;
  const Extended h1 = relative_entropy(nu1, mu);
  switch (s.kind) {
    case InequalitySpec::Kind::te: {
      const Extended h2 = relative_entropy(nu2, mu);
      if (h1.is_infinite() || h2.is_infinite()) return {kInf, kInf, -kInf};
      v.rhs = s.a1 * h1.value() + s.a2 * h2.value();
      v.transport = solve_weak_ot(s.cost, nu2, nu1, opt).primal_value;
      break;
    }
    case InequalitySpec::Kind::te_plus:
      if (h1.is_infinite()) return {kInf, kInf, -kInf};
      v.rhs = s.b * h1.value();
      v.transport = solve_weak_ot(s.cost, mu, nu1, opt).primal_value;
      break;
    case InequalitySpec::Kind::te_minus:
      if (h1.is_infinite()) return {kInf, kInf, -kInf};
      v.rhs = s.b * h1.value();
      v.transport = solve_weak_ot(s.cost, nu1, mu, opt).primal_value;
      break;
    case InequalitySpec::Kind::tau_lsi: throw std::domain_error("te_evaluate: not a transport-entropy spec");
  }
  v.violation = v.transport == kInf ? kInf : v.transport - v.rhs;
  return v;
}

struct TeCheckOptions {
  std::uint64_t seed = 1;
  SolveOptions solve{};
  double tolerance = 1e-8;
};

// Violation search over (nu1, nu2) << mu: lattice grid for at most three free parameters, Dirichlet
// sampling plus local perturbation otherwise. A clean report means no counterexample at this budget.
inline InequalityReport te_check(const InequalitySpec& spec, std::size_t budget, const TeCheckOptions& opt = {}) {
  if (budget == 0) throw std::domain_error("te_check: budget must be positive");
  if (spec.kind == InequalitySpec::Kind::tau_lsi) throw std::domain_error("te_check: tau_LSI specs use tau_lsi_check");
  const auto supp = spec.base.support();
  const std::size_t m = supp.size();
  const bool pair = spec.kind == InequalitySpec::Kind::te;
  const std::size_t free = (pair ? 2 : 1) * (m - 1);
  InequalityReport rep(spec);
  rep.seed = opt.seed;
  rep.tolerance = opt.tolerance;

  std::vector<std::pair<std::vector<double>, std::vector<double>>> cand;
  if (m == 1) {
    cand.push_back({{1.0}, {1.0}});
    rep.method = SearchMethod::grid;
  } else if (free <= 3) {
    rep.method = SearchMethod::grid;
    std::size_t k = 1;
    auto count = [&](std::size_t kk) {
      const double c = detail::lattice_count(m, kk);
      return pair ? c * c : c;
    };
    while (count(k + 1) <= static_cast<double>(budget)) ++k;
    std::vector<std::vector<double>> lat;
    detail::simplex_lattice(m, k, lat);
    if (pair) {
      for (const auto& a : lat)
        for (const auto& b : lat) cand.push_back({a, b});
    } else {
      for (const auto& a : lat) cand.push_back({a, a});
    }
  } else {
    rep.method = SearchMethod::random;
  }

  auto eval = [&](const std::vector<double>& w1, const std::vector<double>& w2) {
    const auto n1 = detail::on_support(spec.base, supp, w1);
    const auto n2 = detail::on_support(spec.base, supp, w2);
    return te_evaluate(spec, n1, n2, opt.solve).violation;
  };

  std::vector<double> values;
  if (rep.method == SearchMethod::grid) {
    values.resize(cand.size());
    parallel_for(cand.size(), [&](std::size_t i) { values[i] = eval(cand[i].first, cand[i].second); });
  } else {
    // Half the budget on Dirichlet draws (mixing concentrated and diffuse shapes), half on perturbing the best.
    const std::size_t draws = std::max<std::size_t>(1, budget / 2);
    cand.resize(draws);
    for (std::size_t i = 0; i < draws; ++i) {
      auto rng = trial_rng(opt.seed, i, 0x7e);
      const double conc = (i % 3 == 0) ? 0.3 : (i % 3 == 1 ? 1.0 : 5.0);
      cand[i].first = dirichlet(rng, m, conc);
      cand[i].second = pair ? dirichlet(rng, m, conc) : cand[i].first;
    }
    values.resize(draws);
    parallel_for(draws, [&](std::size_t i) { values[i] = eval(cand[i].first, cand[i].second); });
    std::size_t best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    auto cur = cand[best];
    double cur_v = values[best];
    const std::size_t rest = budget - draws;
    const std::size_t batch = 16;
    double sigma = 0.5;
    for (std::size_t done = 0; done < rest; done += batch) {
      const std::size_t nb = std::min(batch, rest - done);
      std::vector<std::pair<std::vector<double>, std::vector<double>>> local(nb);
      for (std::size_t j = 0; j < nb; ++j) {
        auto rng = trial_rng(opt.seed, draws + done + j, 0x7f);
        std::normal_distribution<double> g(0.0, sigma);
        auto jiggle = [&](const std::vector<double>& w) {
          std::vector<double> o(m);
          double s = 0.0;
          for (std::size_t q = 0; q < m; ++q) s += (o[q] = std::max(w[q], 1e-12) * std::exp(g(rng)));
          for (double& v : o) v /= s;
          return o;
        };
        local[j].first = jiggle(cur.first);
        local[j].second = pair ? jiggle(cur.second) : local[j].first;
      }
      std::vector<double> lv(nb);
      parallel_for(nb, [&](std::size_t j) { lv[j] = eval(local[j].first, local[j].second); });
      bool improved = false;
      for (std::size_t j = 0; j < nb; ++j) {
        values.push_back(lv[j]);
        cand.push_back(local[j]);
        if (lv[j] > cur_v) {
          cur_v = lv[j];
          cur = local[j];
          improved = true;
        }
      }
      if (!improved) sigma = std::max(sigma * 0.7, 1e-4);
    }
  }
  rep.trials = values.size();
  std::size_t best = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  rep.worst_violation = values[best];
  rep.worst_abs = 0.0;
  for (double v : values)
    if (std::isfinite(v)) rep.worst_abs = std::max(rep.worst_abs, std::abs(v));
  rep.witness_nu1 = detail::on_support(spec.base, supp, cand[best].first);
  if (pair) rep.witness_nu2 = detail::on_support(spec.base, supp, cand[best].second);
  rep.values = std::move(values);
  return rep;
}

struct TensorizationReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  double worst_violation = -kInf;  // T_{c^n} - a1 H(nu1|mu^n) - a2 H(nu2|mu^n), maximized
  std::optional<DiscreteMeasure> witness_nu1, witness_nu2;
  std::vector<double> values;
  // Chain rule (two factors): direct <= composed <= bound on every trial.
  bool chain_checked = false;
  double worst_chain_excess = -kInf;   // max of composed - bound
  double worst_direct_excess = -kInf;  // max of direct - composed
  double tolerance = 1e-7;
  std::uint64_t seed = 0;
  Tolerances tolerances = default_tolerances();

  bool passed() const {
    const double slack = 1e-9;
    return worst_violation <= tolerance &&
           (!chain_checked || (worst_chain_excess <= slack && worst_direct_excess <= slack));
  }
};

// The inequality of `spec` (on X) lifted to X^n with the product cost c^n and product measure mu^n,
// checked on random pairs; with n = 2 the chain-rule coupling is built and checked on the same pairs.
inline TensorizationReport tensorization_check(const InequalitySpec& spec, std::size_t n, std::size_t trials,
                                               std::uint64_t seed = 1, bool chain = true, double tolerance = 1e-7,
                                               const SolveOptions& opt = precise_solve_options()) {
  if (spec.kind == InequalitySpec::Kind::tau_lsi) throw std::domain_error("tensorization_check: needs a transport spec");
  if (n == 0) throw std::domain_error("tensorization_check: n must be positive");
  const auto P = product_space(spec.base.space(), n);
  const auto mun = product_measure(P, {spec.base});
  const ProductCostModel pc(spec.cost, P);
  const bool pair = spec.kind == InequalitySpec::Kind::te;
  const std::size_t N = P.size();
  TensorizationReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  rep.tolerance = tolerance;
  rep.chain_checked = chain && n == 2;
  rep.values.resize(trials);
  std::vector<double> chain_excess(trials, -kInf), direct_excess(trials, -kInf);
  std::vector<std::vector<double>> w1(trials), w2(trials);
  parallel_for(trials, [&](std::size_t k) {
    auto rng = trial_rng(seed, k, 0x7a);
    const double conc = (k % 3 == 0) ? 0.3 : (k % 3 == 1 ? 1.0 : 5.0);
    w1[k] = dirichlet(rng, N, conc);
    w2[k] = pair ? dirichlet(rng, N, conc) : mun.weights();
    const DiscreteMeasure nu1(P.space, w1[k]), nu2(P.space, w2[k]);
    const double h1 = relative_entropy(nu1, mun).value();
    // (source, target) and right-hand side per kind
    const DiscreteMeasure& src = spec.kind == InequalitySpec::Kind::te_minus ? nu1 : (pair ? nu2 : mun);
    const DiscreteMeasure& dst = spec.kind == InequalitySpec::Kind::te_minus ? mun : nu1;
    const double rhs = pair ? spec.a1 * h1 + spec.a2 * relative_entropy(nu2, mun).value() : spec.b * h1;
    double T;
    if (rep.chain_checked) {
      const auto cr = chain_rule_check(spec.cost, P, src, dst, opt);
      T = cr.direct;
      chain_excess[k] = cr.composed - cr.bound;
      direct_excess[k] = cr.direct - cr.composed;
    } else {
      T = solve_product(pc, src, dst, opt).primal_value;
    }
    rep.values[k] = T == kInf ? kInf : T - rhs;
  });
  std::size_t best = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    if (rep.values[k] > rep.values[best]) best = k;
    rep.worst_chain_excess = std::max(rep.worst_chain_excess, chain_excess[k]);
    rep.worst_direct_excess = std::max(rep.worst_direct_excess, direct_excess[k]);
  }
  if (trials > 0) {
    rep.worst_violation = rep.values[best];
    rep.witness_nu1 = DiscreteMeasure(P.space, w1[best]);
    if (pair) rep.witness_nu2 = DiscreteMeasure(P.space, w2[best]);
  }
  return rep;
}

// Convex piecewise-linear functions on a 1-D support (sorted uniform slopes in [-S, S], value 0 at
// the leftmost point), uniform vectors in [-S, S] elsewhere.
inline std::vector<TestFunction> random_test_functions(const SpacePtr& X, std::size_t count, std::uint64_t seed,
                                                       bool convex, double S = 10.0) {
  std::vector<TestFunction> out;
  const std::size_t n = X->size();
  const bool line = convex && X->has_coords() && X->dim() == 1;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (line) std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return X->coord(a)[0] < X->coord(b)[0]; });
  for (std::size_t k = 0; k < count; ++k) {
    auto rng = trial_rng(seed, k, 0xf1);
    std::vector<double> v(n, 0.0);
    if (line) {
      std::vector<double> slopes(n > 0 ? n - 1 : 0);
      for (double& s : slopes) s = uniform(rng, -S, S);
      std::sort(slopes.begin(), slopes.end());
      for (std::size_t j = 1; j < n; ++j) {
        const double dx = X->coord(order[j])[0] - X->coord(order[j - 1])[0];
        v[order[j]] = v[order[j - 1]] + slopes[j - 1] * dx;
      }
    } else {
      for (double& x : v) x = uniform(rng, -S, S);
    }
    out.emplace_back(X, std::move(v));
  }
  return out;
}

// f(x) = -t x on a 1-D space.
inline TestFunction slope_function(const SpacePtr& X, double t) {
  if (!X->has_coords() || X->dim() != 1) throw std::domain_error("slope_function: needs 1-D coordinates");
  std::vector<double> v(X->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -t * X->coord(i)[0];
  return TestFunction(X, std::move(v));
}

namespace detail {

// log of the dual product given R_c phi, for the kind and constants of s, integrated against mu.
inline double bg_log(const InequalitySpec& s, std::span<const double> R, std::span<const double> phi,
                     const DiscreteMeasure& mu) {
  std::vector<double> a(phi.size()), b(phi.size());
  switch (s.kind) {
    case InequalitySpec::Kind::te:
      for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = R[i] / s.a2;
        b[i] = -phi[i] / s.a1;
      }
      return s.a2 * log_mean_exp(a, mu) + s.a1 * log_mean_exp(b, mu);
    case InequalitySpec::Kind::te_plus:
      for (std::size_t i = 0; i < a.size(); ++i) b[i] = -phi[i] / s.b;
      return mu.integrate(R) + s.b * log_mean_exp(b, mu);
    case InequalitySpec::Kind::te_minus:
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = R[i] / s.b;
      return s.b * log_mean_exp(a, mu) - mu.integrate(phi);
    case InequalitySpec::Kind::tau_lsi: break;
  }
  throw std::domain_error("bobkov_gotze_check: not a transport-entropy spec");
}

} // namespace detail

// log of the dual product for one potential; exp of it should not exceed 1.
inline double bobkov_gotze_log(const InequalitySpec& s, const TestFunction& phi, const RcOptions& rc = {}) {
  const auto R = r_c(s.cost, phi, rc);
  return detail::bg_log(s, R.values, phi.values, s.base);
}

// Max over the samples of (dual product - 1).
inline InequalityReport bobkov_gotze_check(const InequalitySpec& spec, const std::vector<TestFunction>& phis,
                                           double tolerance = 1e-8, const RcOptions& rc = {}) {
  InequalityReport rep(spec);
  rep.method = SearchMethod::dual_sampling;
  rep.tolerance = tolerance;
  rep.values.resize(phis.size());
  parallel_for(phis.size(), [&](std::size_t k) { rep.values[k] = std::expm1(bobkov_gotze_log(spec, phis[k], rc)); });
  rep.trials = phis.size();
  for (std::size_t k = 0; k < phis.size(); ++k) {
    rep.worst_abs = std::max(rep.worst_abs, std::abs(rep.values[k]));
    if (rep.values[k] > rep.worst_violation) {
      rep.worst_violation = rep.values[k];
      rep.witness_f = phis[k];
    }
  }
  return rep;
}

// T~_{alpha_t}(nu1|nu2) - H(nu1|mu)/(1-t) - H(nu2|mu)/t with Hamming gamma; the endpoints drop one argument.
inline double dembo_check(double t, const DiscreteMeasure& mu, const DiscreteMeasure& nu1, const DiscreteMeasure& nu2,
                          const SolveOptions& opt = {}) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("dembo_check: t must be in [0,1]");
  const auto c = CostSpec::marton(ScalarFn::alpha(t), GammaSpec::hamming());
  if (t == 0.0) return te_evaluate(InequalitySpec::te_plus(c, mu, 1.0), nu1, nu1, opt).violation;
  if (t == 1.0) return te_evaluate(InequalitySpec::te_minus(c, mu, 1.0), nu2, nu2, opt).violation;
  return te_evaluate(InequalitySpec::te(c, mu, 1.0 / (1.0 - t), 1.0 / t), nu1, nu2, opt).violation;
}

// Same shape with the Samson cost T^_{beta_t}, reference measure mu.
inline double samson_check(double t, const DiscreteMeasure& mu, const DiscreteMeasure& nu1, const DiscreteMeasure& nu2,
                           const SolveOptions& opt = {}) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("samson_check: t must be in [0,1]");
  const auto c = CostSpec::samson(ScalarFn::beta(t), GammaSpec::hamming(), mu);
  if (t == 0.0) return te_evaluate(InequalitySpec::te_plus(c, mu, 1.0), nu1, nu1, opt).violation;
  if (t == 1.0) return te_evaluate(InequalitySpec::te_minus(c, mu, 1.0), nu2, nu2, opt).violation;
  return te_evaluate(InequalitySpec::te(c, mu, 1.0 / (1.0 - t), 1.0 / t), nu1, nu2, opt).violation;
}

// (int e^{t v - t D} dmu)^{1/t} (int e^{-(1-t) v} dmu)^{1/(1-t)} - 1, D(x) = int beta*_t([v(x) - v(y)]_+) dmu(y),
// evaluated in log space; t = 0 and t = 1 are the continuous limits.
inline double lem_sam07_check(double t, const TestFunction& v, const DiscreteMeasure& mu) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("lem_sam07_check: t must be in [0,1]");
  if (!same_space(v.space, mu.space())) throw std::domain_error("lem_sam07_check: v and mu live on different spaces");
  const std::size_t n = v.values.size();
  std::vector<double> vd(n);
  for (std::size_t x = 0; x < n; ++x) {
    double D = 0.0;
    for (std::size_t y = 0; y < n; ++y)
      if (mu[y] > 0.0) D += mu[y] * detail::beta_star(t, std::max(v[x] - v[y], 0.0));
    vd[x] = v[x] - D;
  }
  double first, second;
  if (t == 0.0) {
    first = mu.integrate(vd);
  } else {
    std::vector<double> e(n);
    for (std::size_t x = 0; x < n; ++x) e[x] = t * vd[x];
    first = detail::log_mean_exp(e, mu) / t;
  }
  if (t == 1.0) {
    second = -mu.integrate(v.values);
  } else {
    std::vector<double> e(n);
    for (std::size_t x = 0; x < n; ++x) e[x] = -(1.0 - t) * v[x];
    second = detail::log_mean_exp(e, mu) / (1.0 - t);
  }
  return std::expm1(first + second);
}

// Ent_mu(e^f) - C int (f - R^lambda f) e^f dmu for one f.
inline double tau_lsi_value(const InequalitySpec& s, const TestFunction& f, const RcOptions& rc = {}) {
  const auto& mu = s.base;
  const auto R = r_c_lambda(s.cost, s.lambda, f, rc);
  std::vector<double> ef(f.values.size());
  for (std::size_t i = 0; i < ef.size(); ++i) ef[i] = std::exp(f[i]);
  double rhs = 0.0;
  for (std::size_t i = 0; i < ef.size(); ++i)
    if (mu[i] > 0.0) rhs += mu[i] * (f[i] - R[i]) * ef[i];
  return entropy_functional(ef, mu) - s.C * rhs;
}

inline InequalityReport tau_lsi_check(const InequalitySpec& spec, const std::vector<TestFunction>& fs,
                                      double tolerance = 1e-10, const RcOptions& rc = {}) {
  if (spec.kind != InequalitySpec::Kind::tau_lsi) throw std::domain_error("tau_lsi_check: needs a tau_LSI spec");
  InequalityReport rep(spec);
  rep.method = SearchMethod::dual_sampling;
  rep.tolerance = tolerance;
  rep.values.resize(fs.size());
  parallel_for(fs.size(), [&](std::size_t k) { rep.values[k] = tau_lsi_value(spec, fs[k], rc); });
  rep.trials = fs.size();
  for (std::size_t k = 0; k < fs.size(); ++k) {
    rep.worst_abs = std::max(rep.worst_abs, std::abs(rep.values[k]));
    if (rep.values[k] > rep.worst_violation) {
      rep.worst_violation = rep.values[k];
      rep.witness_f = fs[k];
    }
  }
  return rep;
}

struct Certification {
  std::string name;
  std::vector<InequalityReport> reports;
  std::vector<std::pair<std::string, double>> info;  // run parameters worth reporting

  explicit Certification(std::string n) : name(std::move(n)) {}
  bool passed() const {
    return std::all_of(reports.begin(), reports.end(), [](const InequalityReport& r) { return r.passed(); });
  }
  double worst_violation() const {
    double w = -kInf;
    for (const auto& r : reports) w = std::max(w, r.worst_violation);
    return w;
  }
};

// Both endpoint inequalities for Bernoulli(rho) on a q-grid; `scale` multiplies the cost (1 is the sharp constant).
inline Certification certify_bernoulli(double rho, double grid_step = 1e-3, double scale = 1.0,
                                       const TeCheckOptions& opt = {}) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("certify_bernoulli: rho must be in (0,1)");
  if (!(grid_step > 0.0 && grid_step <= 0.5)) throw std::domain_error("certify_bernoulli: bad grid step");
  const auto mu = bernoulli(rho);
  const auto budget = static_cast<std::size_t>(std::llround(1.0 / grid_step)) + 1;
  Certification c("bernoulli");
  auto plus = InequalitySpec::te_plus(CostSpec::barycentric(ScalarFn::theta(rho, 0)).scaled(scale), mu, 1.0);
  auto minus = InequalitySpec::te_minus(CostSpec::barycentric(ScalarFn::theta(rho, 1)).scaled(scale), mu, 1.0);
  c.reports.push_back(te_check(plus, budget, opt));
  c.reports.back().label = "T_plus theta_rho_0";
  c.reports.push_back(te_check(minus, budget, opt));
  c.reports.back().label = "T_minus theta_rho_1";
  return c;
}

inline DiscreteMeasure binomial(std::size_t n, double rho) {
  std::vector<double> xs(n + 1), w(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    xs[k] = static_cast<double>(k);
    const double kk = static_cast<double>(k), nn = static_cast<double>(n);
    w[k] = std::exp(std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1) + kk * std::log(rho) +
                    (nn - kk) * std::log1p(-rho));
  }
  return DiscreteMeasure::normalized(make_space(FiniteSpace::line(xs)), std::move(w));
}

struct BinomialOptions {
  std::size_t samples = 10000;  // dual potentials per direction
  std::size_t lifts = 100;      // potentials checked through the hypercube
  std::uint64_t seed = 1;
  double tolerance = 1e-7;
};

// Dual sampling over convex potentials for both directions, plus the projection cross-check against
// the product-Bernoulli inequalities on the hypercube.
inline Certification certify_binomial(std::size_t n, double rho, const BinomialOptions& opt = {}) {
  if (n == 0) throw std::domain_error("certify_binomial: n must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("certify_binomial: rho must be in (0,1)");
  const auto mu = binomial(n, rho);
  const double nn = static_cast<double>(n);
  Certification c("binomial");
  const auto plus = InequalitySpec::te_plus(CostSpec::barycentric(ScalarFn::theta_n(rho, 0, nn)), mu, 1.0);
  const auto minus = InequalitySpec::te_minus(CostSpec::barycentric(ScalarFn::theta_n(rho, 1, nn)), mu, 1.0);
  const auto phis = random_test_functions(mu.space(), opt.samples, opt.seed, true);
  c.reports.push_back(bobkov_gotze_check(plus, phis, opt.tolerance));
  c.reports.back().label = "T_plus theta_rho_0_n dual";
  c.reports.push_back(bobkov_gotze_check(minus, phis, opt.tolerance));
  c.reports.back().label = "T_minus theta_rho_1_n dual";

  // Projection in dual form: for psi = phi o (sum of coordinates), R_{c^n} psi >= (R_{theta_n} phi) o sum by
  // convexity, so the binomial product is at most the hypercube product, which must not exceed 1.
  const auto P = product_space(bernoulli(rho).space(), n);
  const auto mun = product_measure(P, {bernoulli(rho)});
  std::vector<std::size_t> weight_of(P.size());
  for (std::size_t k = 0; k < P.size(); ++k)
    for (auto d : P.digits[k]) weight_of[k] += d;
  const auto lifts = random_test_functions(mu.space(), opt.lifts, opt.seed ^ 0x11f7, true);
  for (int t : {0, 1}) {
    const auto& spec = t == 0 ? plus : minus;
    InequalityReport rep(spec);
    rep.label = t == 0 ? "T_plus hypercube projection" : "T_minus hypercube projection";
    rep.method = SearchMethod::dual_sampling;
    rep.tolerance = opt.tolerance;
    rep.seed = opt.seed;
    const auto cube = CostSpec::barycentric(ScalarFn::theta(rho, t));
    const ProductCostModel pc(cube, P);
    const InequalitySpec cube_spec(spec.kind, cube, mun);
    rep.values.resize(opt.lifts);
    parallel_for(opt.lifts, [&](std::size_t i) {
      const auto& phi = lifts[i];
      std::vector<double> psi(P.size()), R(P.size());
      for (std::size_t k = 0; k < P.size(); ++k) psi[k] = phi[weight_of[k]];
      for (std::size_t k = 0; k < P.size(); ++k) R[k] = solve_simplex_subproblem(pc, k, psi, precise_solve_options()).value;
      const double lb = bobkov_gotze_log(spec, phi);
      const double lc = detail::bg_log(cube_spec, R, psi, mun);
      rep.values[i] = std::expm1(std::max(lb - lc, lc));
    });
    rep.trials = opt.lifts;
    for (std::size_t i = 0; i < opt.lifts; ++i) {
      rep.worst_abs = std::max(rep.worst_abs, std::abs(rep.values[i]));
      if (rep.values[i] > rep.worst_violation) {
        rep.worst_violation = rep.values[i];
        rep.witness_f = lifts[i];
      }
    }
    c.reports.push_back(std::move(rep));
  }
  return c;
}

struct PoissonOptions {
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  std::vector<double> slopes{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double tolerance = 1e-6;
};

// Sum over k > N of e^{t k} p_lambda(k), relative to the retained part.
inline double poisson_tail_bound(double lambda, std::size_t N, double t) {
  double kept = 0.0, tail = 0.0;
  const double top = static_cast<double>(N) + lambda * std::exp(t) + 40.0 * std::sqrt(lambda * std::exp(t)) + 400.0;
  for (std::size_t k = 0; static_cast<double>(k) < top; ++k) {
    const double kk = static_cast<double>(k);
    const double v = std::exp(-lambda + kk * std::log(lambda) - std::lgamma(kk + 1) + t * kk);
    (k <= N ? kept : tail) += v;
  }
  return tail / kept;
}

// Poisson(lambda) restricted to {0, ..., N} and renormalized.
inline DiscreteMeasure poisson_on(double lambda, std::size_t N) {
  std::vector<double> xs(N + 1), w(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    const double kk = static_cast<double>(k);
    xs[k] = kk;
    w[k] = std::exp(-lambda + kk * std::log(lambda) - std::lgamma(kk + 1));
  }
  return DiscreteMeasure::normalized(make_space(FiniteSpace::line(xs)), std::move(w));
}

// Endpoint inequalities for the truncated Poisson law: equality at f(x) = -t x and no violation over
// random convex potentials. The cut is placed where both the mass tail and the tail tilted by e^{t x}
// (largest slope) are below tail_tol; the tilted tail is added to the reported tolerance.
inline Certification certify_poisson(double lambda, double tail_tol = 1e-12, const PoissonOptions& opt = {}) {
  std::size_t N = truncate_poisson(lambda, tail_tol).N;
  const double tmax = opt.slopes.empty() ? 0.0 : *std::max_element(opt.slopes.begin(), opt.slopes.end());
  while (poisson_tail_bound(lambda, N, tmax) >= tail_tol) ++N;
  const auto mu = poisson_on(lambda, N);
  double tail = 0.0;
  for (double t : opt.slopes) tail = std::max(tail, poisson_tail_bound(lambda, N, t));
  Certification c("poisson");
  c.info = {{"lambda", lambda}, {"N", static_cast<double>(N)}, {"tail_tol", tail_tol}, {"tail_bound", tail}};
  const auto plus = InequalitySpec::te_plus(CostSpec::barycentric(ScalarFn::c_lambda(lambda, 0)), mu, 1.0);
  const auto minus = InequalitySpec::te_minus(CostSpec::barycentric(ScalarFn::c_lambda(lambda, 1)), mu, 1.0);
  std::vector<TestFunction> fam;
  for (double t : opt.slopes) fam.push_back(slope_function(mu.space(), t));
  for (const auto* s : {&plus, &minus}) {
    auto r = bobkov_gotze_check(*s, fam, opt.tolerance + tail);
    r.equality = true;
    r.label = s == &plus ? "T_plus c_lambda_0 slope equality" : "T_minus c_lambda_1 slope equality";
    c.reports.push_back(std::move(r));
  }
  const auto phis = random_test_functions(mu.space(), opt.samples, opt.seed, true);
  for (const auto* s : {&plus, &minus}) {
    auto r = bobkov_gotze_check(*s, phis, opt.tolerance + tail);
    r.label = s == &plus ? "T_plus c_lambda_0 dual" : "T_minus c_lambda_1 dual";
    r.seed = opt.seed;
    c.reports.push_back(std::move(r));
  }
  return c;
}

struct AdamczakReport {
  bool holds = true;
  double worst_ratio = 0.0;
  std::optional<double> worst_x;
};

// mu([x + c/x, inf)) <= alpha mu([x, inf)) at every positive grid point with a nonzero tail.
inline AdamczakReport adamczak_condition(const std::vector<double>& xs, const std::vector<double>& weights, double c,
                                         double alpha) {
  if (xs.size() != weights.size() || xs.empty()) throw std::domain_error("adamczak_condition: size mismatch");
  if (!(c > 0.0) || !(alpha < 1.0)) throw std::domain_error("adamczak_condition: needs c > 0 and alpha < 1");
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> x(xs.size()), w(xs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    x[i] = xs[order[i]];
    w[i] = weights[order[i]];
    if (!(w[i] >= 0.0)) throw std::domain_error("adamczak_condition: negative weight");
    total += w[i];
  }
  for (double& v : w) v /= total;
  // Symmetry: the weight at x must match the weight at -x.
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w[i] == 0.0) continue;
    const auto it = std::lower_bound(x.begin(), x.end(), -x[i] - 1e-12);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    if (j >= x.size() || std::abs(x[j] + x[i]) > 1e-12 || std::abs(w[j] - w[i]) > 1e-10)
      throw std::domain_error("adamczak_condition: law is not symmetric");
  }
  std::vector<double> tail(x.size() + 1, 0.0);
  for (std::size_t i = x.size(); i-- > 0;) tail[i] = tail[i + 1] + w[i];
  AdamczakReport rep;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || tail[i] <= 0.0) continue;
    const double target = x[i] + c / x[i];
    const std::size_t j = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), target) - x.begin());
    const double ratio = tail[j] / tail[i];
    if (!rep.worst_x || ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_x = x[i];
    }
  }
  rep.holds = !rep.worst_x || rep.worst_ratio <= alpha;
  return rep;
}

} // namespace weakot
