#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "costs.hpp"
#include "hull.hpp"
#include "order.hpp"
#include "primal.hpp"

namespace weakot {

enum class DualMethod { classical_min, generic_fw, marton_hull, bar_envelope, samson_root };

inline const char* method_name(DualMethod m) {
  switch (m) {
    case DualMethod::classical_min: return "classical_min";
    case DualMethod::generic_fw: return "generic_fw";
    case DualMethod::marton_hull: return "marton_hull";
    case DualMethod::bar_envelope: return "bar_envelope";
    case DualMethod::samson_root: return "samson_root";
  }
  return "?";
}

// Value of an inner problem with its minimizer; `lower` bounds the true minimum from below.
struct InnerSolution {
  double value = kInf;
  double lower = kInf;
  std::vector<double> p;
};

// Marton: (sum phi p, sum gamma p) ranges over the hull of (phi(y), gamma(d(x,y))).
inline InnerSolution q_tilde_exact(const ScalarFn& alpha, const GammaSpec& gamma, std::span<const double> phi,
                                   const FiniteSpace& X, std::size_t x, double scale = 1.0) {
  const std::size_t n = X.size();
  std::vector<Point2> pts;
  for (std::size_t y = 0; y < n; ++y) pts.push_back({phi[y], gamma(X.dist(x, y)), y});
  auto hull = convex_hull_2d(pts);
  const Interval dom = alpha.domain();
  auto g = [&](double a, double b) {
    const double v = alpha.raw(b);
    return v == kInf ? kInf : a + scale * v;
  };
  InnerSolution best;
  best.p.assign(n, 0.0);
  std::size_t bi = x, bj = x;
  double blam = 0.0;
  auto consider = [&](std::size_t i, std::size_t j, double lam, double v) {
    if (v < best.value) {
      best.value = v;
      bi = i;
      bj = j;
      blam = lam;
    }
  };
  for (const auto& q : hull) consider(q.id, q.id, 0.0, g(q.a, q.b));
  const std::size_t h = hull.size();
  for (std::size_t k = 0; h >= 2 && k < h; ++k) {
    if (h == 2 && k == 1) break;
    const Point2& P = hull[k];
    const Point2& Q = hull[(k + 1) % h];
    // Restrict lambda to where b stays in alpha's domain.
    double lo = 0.0, hi = 1.0;
    const double db = Q.b - P.b;
    if (db != 0.0) {
      double l1 = (dom.lo - P.b) / db, l2 = (dom.hi - P.b) / db;
      if (l1 > l2) std::swap(l1, l2);
      lo = std::max(lo, l1);
      hi = std::min(hi, l2);
    } else if (!dom.contains(P.b)) {
      continue;
    }
    if (!(lo <= hi)) continue;
    auto f = [&](double lam) { return g((1.0 - lam) * P.a + lam * Q.a, (1.0 - lam) * P.b + lam * Q.b); };
    auto [lam, v] = minimize_convex_1d(f, lo, hi, 1e-14);
    consider(P.id, Q.id, lam, v);
  }
  best.p[bi] += 1.0 - blam;
  best.p[bj] += blam;
  best.lower = best.value;
  return best;
}

// Barycentric on the line: Q_theta applied to the convex envelope of phi.
inline InnerSolution q_bar_exact(const ScalarFn& theta, std::span<const double> phi, const FiniteSpace& X, std::size_t x,
                                 double scale = 1.0) {
  if (!X.has_coords() || X.dim() != 1) throw std::domain_error("q_bar_exact: needs 1-D coordinates");
  const std::size_t n = X.size();
  std::vector<std::size_t> ord(n);
  for (std::size_t i = 0; i < n; ++i) ord[i] = i;
  std::sort(ord.begin(), ord.end(), [&](std::size_t i, std::size_t j) {
    const double ci = X.coord(i)[0], cj = X.coord(j)[0];
    return ci < cj || (ci == cj && phi[i] < phi[j]);
  });
  std::vector<double> xs, vs;
  std::vector<std::size_t> ids;
  for (std::size_t i : ord) {
    const double c = X.coord(i)[0];
    if (!xs.empty() && xs.back() == c) continue;  // keep the smaller value at a repeated coordinate
    xs.push_back(c);
    vs.push_back(phi[i]);
    ids.push_back(i);
  }
  const PiecewiseLinear env = convex_envelope_1d(xs, vs);
  const double cx = X.coord(x)[0];
  const Interval dom = theta.domain();
  auto g = [&](double y, double fy) {
    const double v = theta.raw(cx - y);
    return v == kInf ? kInf : fy + scale * v;
  };
  InnerSolution best;
  best.p.assign(n, 0.0);
  std::size_t bi = 0, bj = 0;
  double blam = 0.0;
  for (std::size_t k = 0; k < env.xs.size(); ++k) {
    const double v = g(env.xs[k], env.ys[k]);
    if (v < best.value) {
      best.value = v;
      bi = bj = k;
      blam = 0.0;
    }
  }
  for (std::size_t k = 0; k + 1 < env.xs.size(); ++k) {
    const double y0 = env.xs[k], y1 = env.xs[k + 1];
    // y in [y0,y1] with cx - y in theta's domain.
    const double lo = std::max(y0, cx - dom.hi), hi = std::min(y1, cx - dom.lo);
    if (!(lo <= hi)) continue;
    const double slope = (env.ys[k + 1] - env.ys[k]) / (y1 - y0);
    auto f = [&](double y) { return g(y, env.ys[k] + slope * (y - y0)); };
    auto [y, v] = minimize_convex_1d(f, lo, hi, 1e-14);
    if (v < best.value) {
      best.value = v;
      bi = k;
      bj = k + 1;
      blam = (y - y0) / (y1 - y0);
    }
  }
  best.p[ids[env.source[bi]]] += 1.0 - blam;
  best.p[ids[env.source[bj]]] += blam;
  best.lower = best.value;
  return best;
}

// Samson with Hamming gamma and beta_t, reference measure mu: root of the balance equation.
inline InnerSolution q_hat_exact(double t, std::span<const double> phi, const DiscreteMeasure& mu, std::size_t x,
                                 double vbar_tol = default_tolerances().vbar) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("q_hat_exact: t must be in [0,1]");
  const std::size_t n = mu.size();
  InnerSolution res;
  res.p.assign(n, 0.0);
  double off = 0.0;
  for (std::size_t y = 0; y < n; ++y)
    if (y != x) off += mu[y];
  if (off == 0.0) {
    res.value = res.lower = phi[x];
    res.p[x] = 1.0;
    return res;
  }
  // Balance: sum_{y != x} (e^{(1-t)s_y} - e^{-t s_y}) mu(y) = 1, s_y = [v - phi(y)]_+, increasing in v.
  auto balance = [&](double v) {
    double s = -1.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x || mu[y] == 0.0) continue;
      s += detail::beta_star_prime(t, std::max(v - phi[y], 0.0)) * mu[y];
    }
    return s;
  };
  // v = min(vbar, phi(x)); when the balance is still negative at phi(x), vbar lies beyond it.
  double v = phi[x];
  if (balance(phi[x]) > 0.0) {
    double lo = *std::min_element(phi.begin(), phi.end()) - 1.0;
    double hi = phi[x];
    for (int k = 0; balance(lo) > 0.0; ++k) {
      if (k > 2000) throw std::runtime_error("q_hat_exact: bracket expansion failed");
      lo -= (hi - lo);
    }
    while (hi - lo > vbar_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (balance(mid) < 0.0) lo = mid; else hi = mid;
    }
    v = 0.5 * (lo + hi);
  }
  double val = v, mass = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    if (y == x || mu[y] == 0.0) continue;
    const double s = std::max(v - phi[y], 0.0);
    val -= detail::beta_star(t, s) * mu[y];
    res.p[y] = mu[y] * detail::beta_star_prime(t, s);
    mass += res.p[y];
  }
  if (mass > 1.0)
    for (double& q : res.p) q /= mass;
  res.p[x] = std::max(0.0, 1.0 - std::min(mass, 1.0));
  res.value = res.lower = val;
  return res;
}

inline bool samson_root_applies(const CostSpec& c) {
  return c.family == CostSpec::Family::samson && c.gamma.tag == GammaSpec::Tag::hamming &&
         c.fn.tag == ScalarFn::Tag::beta_t && c.fn.scale == 1.0 && c.scale == 1.0;
}

inline DualMethod exact_method(const CostSpec& c, const FiniteSpace& X) {
  switch (c.family) {
    case CostSpec::Family::classical: return DualMethod::classical_min;
    case CostSpec::Family::marton: return DualMethod::marton_hull;
    case CostSpec::Family::barycentric:
      return (X.has_coords() && X.dim() == 1) ? DualMethod::bar_envelope : DualMethod::generic_fw;
    case CostSpec::Family::samson: return samson_root_applies(c) ? DualMethod::samson_root : DualMethod::generic_fw;
  }
  return DualMethod::generic_fw;
}

struct RcOptions {
  SolveOptions inner = precise_solve_options();
  bool force_generic = false;
};

struct RcResult {
  std::vector<InnerSolution> rows;
  DualMethod method = DualMethod::generic_fw;
};

inline RcResult r_c_detail(const CostSpec& c, const TestFunction& phi, const RcOptions& opt = {}) {
  const FiniteSpace& X = *phi.space;
  const std::size_t n = X.size();
  RcResult out;
  out.method = opt.force_generic ? DualMethod::generic_fw : exact_method(c, X);
  std::optional<CostModel> model;
  if (out.method == DualMethod::generic_fw) model.emplace(c, phi.space);
  else CostModel(c, phi.space);  // validates the spec against the space
  out.rows.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    InnerSolution& s = out.rows[x];
    switch (out.method) {
      case DualMethod::classical_min: {
        s.p.assign(n, 0.0);
        std::size_t arg = x;
        for (std::size_t y = 0; y < n; ++y) {
          const double v = phi[y] + c.scale * c.omega(x, y);
          if (v < s.value) {
            s.value = v;
            arg = y;
          }
        }
        s.p[arg] = 1.0;
        s.lower = s.value;
        break;
      }
      case DualMethod::marton_hull: s = q_tilde_exact(c.fn, c.gamma, phi.values, X, x, c.scale); break;
      case DualMethod::bar_envelope: s = q_bar_exact(c.fn, phi.values, X, x, c.scale); break;
      case DualMethod::samson_root: s = q_hat_exact(c.fn.t, phi.values, *c.mu0, x); break;
      case DualMethod::generic_fw: {
        auto r = solve_simplex_subproblem(*model, x, phi.values, opt.inner);
        s.value = r.value;
        s.lower = r.value - r.fw_gap;
        s.p = std::move(r.p);
        break;
      }
    }
  }
  return out;
}

inline TestFunction r_c(const CostSpec& c, const TestFunction& phi, const RcOptions& opt = {}) {
  auto d = r_c_detail(c, phi, opt);
  std::vector<double> v;
  for (const auto& s : d.rows) v.push_back(s.value);
  return TestFunction(phi.space, std::move(v));
}

inline TestFunction r_c_lambda(const CostSpec& c, double lambda, const TestFunction& phi, const RcOptions& opt = {}) {
  if (!(lambda > 0.0)) throw std::domain_error("r_c_lambda: lambda must be positive");
  return r_c(c.scaled(lambda), phi, opt);
}

struct DualPotential {
  TestFunction phi;
  TestFunction r_c_phi;
  double dual_value;
  DualMethod method;
};

// int R_c phi dmu - int phi dnu using certified lower bounds of the inner problems.
struct DualEvaluation {
  double value;
  std::vector<double> supergradient;
  RcResult rc;
};

inline DualEvaluation evaluate_dual(const CostSpec& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const std::vector<double>& phi, const RcOptions& opt = {}) {
  TestFunction f(mu.space(), phi);
  DualEvaluation e{0.0, std::vector<double>(phi.size(), 0.0), r_c_detail(c, f, opt)};
  for (std::size_t x = 0; x < mu.size(); ++x) {
    if (mu[x] == 0.0) continue;
    e.value += mu[x] * e.rc.rows[x].lower;
    for (std::size_t y = 0; y < phi.size(); ++y) e.supergradient[y] += mu[x] * e.rc.rows[x].p[y];
  }
  for (std::size_t y = 0; y < phi.size(); ++y) {
    e.value -= nu[y] * phi[y];
    e.supergradient[y] -= nu[y];
  }
  return e;
}

struct DualOptions {
  int restarts = 2;
  int budget = 200;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> warm_start;
  RcOptions rc;
};

// Normalized supergradient ascent with step halving; restarts perturb the best iterate.
inline DualPotential dual_ascent(const CostSpec& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const DualOptions& opt = {}) {
  require_same_space(mu, nu, "dual_ascent");
  if (opt.budget <= 0) throw std::domain_error("dual_ascent: budget must be positive");
  const std::size_t n = mu.size();
  std::vector<double> best_phi = opt.warm_start.value_or(std::vector<double>(n, 0.0));
  if (best_phi.size() != n) throw std::domain_error("dual_ascent: warm start has the wrong length");
  auto best = evaluate_dual(c, mu, nu, best_phi, opt.rc);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int evals = 0;
  for (int r = 0; r <= opt.restarts && evals < opt.budget; ++r) {
    std::vector<double> phi = best_phi;
    auto cur = best;
    if (r > 0) {
      double spread = 0.0;
      for (double v : phi) spread = std::max(spread, std::abs(v));
      for (double& v : phi) v += 0.1 * (1.0 + spread) * gauss(rng);
      cur = evaluate_dual(c, mu, nu, phi, opt.rc);
      ++evals;
    }
    double step = 1.0;
    const int per_run = opt.budget / (opt.restarts + 1) + 1;
    for (int k = 0; k < per_run && evals < opt.budget && step > 1e-14; ++k) {
      double gn = 0.0;
      for (double g : cur.supergradient) gn += g * g;
      gn = std::sqrt(gn);
      if (gn < 1e-15) break;
      std::vector<double> trial = phi;
      for (std::size_t y = 0; y < n; ++y) trial[y] += step * cur.supergradient[y] / gn;
      auto next = evaluate_dual(c, mu, nu, trial, opt.rc);
      ++evals;
      // Gains at the rounding level would let the potential drift.
      if (next.value > cur.value + 1e-14 * (1.0 + std::abs(cur.value))) {
        phi = std::move(trial);
        cur = std::move(next);
      } else {
        step *= 0.5;
      }
    }
    if (cur.value > best.value + 1e-14 * (1.0 + std::abs(best.value))) {
      best = std::move(cur);
      best_phi = phi;
    }
  }
  // Potentials are defined up to an additive constant, since R_c(phi + k) = R_c phi + k.
  const double shift = *std::min_element(best_phi.begin(), best_phi.end());
  for (double& v : best_phi) v -= shift;
  std::vector<double> rv;
  for (const auto& s : best.rc.rows) rv.push_back(s.lower - shift);
  return DualPotential{TestFunction(mu.space(), best_phi), TestFunction(mu.space(), rv), best.value, best.rc.method};
}

inline double relative_gap(const SolveReport& r) { return r.gap / std::max(1.0, std::abs(r.primal_value)); }

// Warm start for the ascent: potentials of the last linear subproblem, or the exact
// convex witness for theta = s|h| on the line.
inline std::vector<double> dual_warm_start(const CostSpec& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                           const SolveReport& primal) {
  const std::size_t n = mu.size();
  std::vector<double> phi(n, 0.0);
  CostModel model(c, mu.space());
  if (is_bary_abs_line(model)) {
    const auto d = t_bar_1_dual(mu, nu);
    const double s = c.scale * c.fn.scale;
    for (std::size_t y = 0; y < n; ++y) phi[y] = s * d.witness(mu.space()->coord(y)[0]);
    return phi;
  }
  if (primal.lmo_v.size() == n)
    for (std::size_t y = 0; y < n; ++y) phi[y] = -primal.lmo_v[y];
  return phi;
}

// solve_weak_ot that may also stop on a dual certificate when R_c has an exact method, which
// is much faster than waiting for the Frank-Wolfe gap on samson costs.
inline SolveReport solve_weak_ot_certified(const CostSpec& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                           SolveOptions sopt = {}) {
  if (!sopt.dual_bound && exact_method(c, *mu.space()) != DualMethod::generic_fw)
    sopt.dual_bound = [&](const std::vector<double>& phi) { return evaluate_dual(c, mu, nu, phi).value; };
  return solve_weak_ot(c, mu, nu, sopt);
}

inline SolveReport duality_gap(const CostSpec& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const SolveOptions& sopt = {}, DualOptions dopt = {}) {
  SolveReport rep = solve_weak_ot_certified(c, mu, nu, sopt);
  if (rep.primal_value == kInf) {
    rep.dual_value = kInf;
    rep.gap = 0.0;
    return rep;
  }
  if (!dopt.warm_start) dopt.warm_start = dual_warm_start(c, mu, nu, rep);
  const auto d = dual_ascent(c, mu, nu, dopt);
  rep.dual_value = d.dual_value;
  rep.gap = rep.primal_value - d.dual_value;
  return rep;
}

// Q f(x_i) = min_j { f(x_j) + theta(x_i - x_j) } on a sorted grid.
inline std::vector<double> inf_convolution(const ScalarFn& theta, std::span<const double> f, std::span<const double> grid) {
  if (f.size() != grid.size()) throw std::domain_error("inf_convolution: grid and values differ in length");
  std::vector<double> out(grid.size(), kInf);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double v = theta.raw(grid[i] - grid[j]);
      if (v != kInf) out[i] = std::min(out[i], f[j] + v);
    }
  return out;
}

// Hopf-Lax semigroup Q_t with theta(h) = h^2/(2t); Q_0 is the identity.
inline std::vector<double> hopf_lax(double t, std::span<const double> f, std::span<const double> grid) {
  if (t < 0.0) throw std::domain_error("hopf_lax: t must be nonnegative");
  if (t == 0.0) return {f.begin(), f.end()};
  return inf_convolution(ScalarFn::power(2.0, 1.0 / (2.0 * t)), f, grid);
}

} // namespace weakot
