#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "config.hpp"
#include "core.hpp"
#include "costs.hpp"
#include "lp.hpp"
#include "transport.hpp"

namespace weakot {

// A cost c(x,p) on a finite space with its gradient in p.
template <class C>
concept WeakCost = requires(const C& c, std::size_t x, std::span<const double> p, std::span<double> g) {
  { c.size() } -> std::convertible_to<std::size_t>;
  { c.value(x, p) } -> std::convertible_to<double>;
  c.gradient(x, p, g);
  { c.forbidden(x, x) } -> std::convertible_to<bool>;
};

enum class SolveStatus { converged, budget_exhausted, infeasible };

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::budget_exhausted: return "budget_exhausted";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "?";
}

struct SolveOptions {
  double tol = default_tolerances().fw_gap;
  int max_iter = default_tolerances().fw_max_iter;
  double line_search_width = default_tolerances().line_search_width;
  // Optional certified lower bound on T_c(nu|mu) from a dual potential; when set, the solver also
  // stops once primal - bound <= tol * max(1, |primal|). Checked every `dual_every` iterations.
  std::function<double(const std::vector<double>&)> dual_bound;
  int dual_every = 25;
  // Starting coupling (joint table with the right marginals); used in place of mu x nu when its cost is finite.
  std::optional<Table> initial;
};

// Tighter settings for inner solves whose values feed other checks.
inline SolveOptions precise_solve_options() {
  SolveOptions o;
  o.tol = 1e-12;
  o.max_iter = 20000;
  o.line_search_width = 1e-13;
  return o;
}

struct SolveReport {
  double primal_value = kInf;
  double dual_value = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::converged;
  std::optional<Coupling> coupling;
  std::vector<double> fw_gap_history;
  double fw_gap = 0.0;
  // Column potentials of the last linear subproblem; -v is a near-optimal dual potential.
  std::vector<double> lmo_v;
  // primal - dual_bound at the stop, when the stop came from the dual certificate
  double certified_gap = std::numeric_limits<double>::quiet_NaN();
  Tolerances tolerances = default_tolerances();
};

// I_c[pi] = sum_x mu(x) c(x, pi_x / mu(x)) over rows of positive mass.
template <WeakCost C>
double coupling_cost(const C& cost, const Table& pi, std::span<const double> mu) {
  std::vector<double> p(pi.cols);
  double total = 0.0;
  for (std::size_t x = 0; x < pi.rows; ++x) {
    if (mu[x] <= 0.0) continue;
    for (std::size_t y = 0; y < pi.cols; ++y) p[y] = std::max(pi(x, y), 0.0) / mu[x];
    const double v = cost.value(x, p);
    if (v == kInf) return kInf;
    total += mu[x] * v;
  }
  return total;
}

namespace detail {

struct Atom {
  std::vector<std::size_t> idx;  // flattened cells
  std::vector<double> val;
  double weight = 0.0;
};

inline Atom atom_from_table(const Table& t) {
  Atom a;
  for (std::size_t k = 0; k < t.data.size(); ++k)
    if (t.data[k] != 0.0) {
      a.idx.push_back(k);
      a.val.push_back(t.data[k]);
    }
  return a;
}

inline bool same_atom(const Atom& a, const Atom& b) {
  if (a.idx != b.idx) return false;
  for (std::size_t k = 0; k < a.val.size(); ++k)
    if (std::abs(a.val[k] - b.val[k]) > 1e-15) return false;
  return true;
}

inline double atom_dot(const Atom& a, const Table& g) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.idx.size(); ++k) s += a.val[k] * g.data[a.idx[k]];
  return s;
}

// Gradient table with forbidden cells priced far above everything else.
template <WeakCost C>
void coupling_gradient(const C& cost, const Table& pi, std::span<const double> mu, Table& G) {
  std::vector<double> p(pi.cols), g(pi.cols);
  double gmax = 0.0;
  for (std::size_t x = 0; x < pi.rows; ++x) {
    if (mu[x] <= 0.0) {
      for (std::size_t y = 0; y < pi.cols; ++y) G(x, y) = 0.0;
      continue;
    }
    for (std::size_t y = 0; y < pi.cols; ++y) p[y] = std::max(pi(x, y), 0.0) / mu[x];
    cost.gradient(x, p, g);
    for (std::size_t y = 0; y < pi.cols; ++y) {
      G(x, y) = g[y];
      if (std::isfinite(g[y])) gmax = std::max(gmax, std::abs(g[y]));
    }
  }
  // Infinite slopes appear on the boundary of the effective domain; clamping keeps their sign, so
  // the linear oracle still points inward.
  const double big = 1e6 * (1.0 + gmax);
  for (std::size_t x = 0; x < pi.rows; ++x)
    for (std::size_t y = 0; y < pi.cols; ++y) {
      if (cost.forbidden(x, y)) G(x, y) = big;
      else if (std::isnan(G(x, y))) G(x, y) = 0.0;
      else G(x, y) = std::clamp(G(x, y), -big, big);
    }
}

// Domain faces of every row with positive mass, scaled by the row mass.
template <WeakCost C>
std::vector<std::pair<std::size_t, LinearBound>> coupling_bounds(const C& cost, std::span<const double> mu) {
  std::vector<std::pair<std::size_t, LinearBound>> out;
  if constexpr (requires { cost.domain_bounds(std::size_t{}); }) {
    for (std::size_t x = 0; x < mu.size(); ++x) {
      if (mu[x] <= 0.0) continue;
      for (auto& b : cost.domain_bounds(x)) {
        if (std::isfinite(b.lo)) b.lo *= mu[x];
        if (std::isfinite(b.hi)) b.hi *= mu[x];
        out.emplace_back(x, std::move(b));
      }
    }
  }
  return out;
}

// Linear oracle over the couplings whose rows stay inside the effective domain. Vertices of the
// plain transportation polytope can all lie outside it, which leaves Frank-Wolfe stuck at the start.
inline TransportResult constrained_lmo(const Table& G, std::span<const double> a, std::span<const double> b,
                                       const std::vector<std::pair<std::size_t, LinearBound>>& bounds) {
  const std::size_t n = a.size(), m = b.size();
  LpProblem P;
  P.n = n * m;
  P.c = G.data;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<double> row(P.n, 0.0);
    for (std::size_t y = 0; y < m; ++y) row[x * m + y] = 1.0;
    P.A_eq.push_back(std::move(row));
    P.b_eq.push_back(a[x]);
  }
  for (std::size_t y = 0; y < m; ++y) {
    std::vector<double> row(P.n, 0.0);
    for (std::size_t x = 0; x < n; ++x) row[x * m + y] = 1.0;
    P.A_eq.push_back(std::move(row));
    P.b_eq.push_back(b[y]);
  }
  for (const auto& [x, bd] : bounds) {
    if (std::isfinite(bd.hi)) {
      std::vector<double> row(P.n, 0.0);
      for (std::size_t y = 0; y < m; ++y) row[x * m + y] = bd.coef[y];
      P.A_le.push_back(std::move(row));
      P.b_le.push_back(bd.hi);
    }
    if (std::isfinite(bd.lo)) {
      std::vector<double> row(P.n, 0.0);
      for (std::size_t y = 0; y < m; ++y) row[x * m + y] = -bd.coef[y];
      P.A_le.push_back(std::move(row));
      P.b_le.push_back(-bd.lo);
    }
  }
  auto r = solve_lp(P);
  if (r.status != LpResult::Status::optimal) throw std::runtime_error("solve_weak_ot: constrained oracle failed");
  TransportResult t;
  t.plan = Table(n, m);
  for (std::size_t k = 0; k < P.n; ++k) t.plan.data[k] = std::max(r.x[k], 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < m; ++y) s += t.plan(x, y);
    if (s > 0.0)
      for (std::size_t y = 0; y < m; ++y) t.plan(x, y) *= a[x] / s;
  }
  for (std::size_t k = 0; k < P.n; ++k) t.value += G.data[k] * t.plan.data[k];
  return t;
}

} // namespace detail

// Pairwise Frank-Wolfe over the transportation polytope with the transportation simplex as
// linear oracle and an exact line search. Starts from mu (x) nu.
template <WeakCost C>
SolveReport solve_weak_ot_fw(const C& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const SolveOptions& opt = {}) {
  const std::size_t n = mu.size(), m = nu.size();
  if (cost.size() != n || n != m) throw std::domain_error("solve_weak_ot: cost and measures disagree on the space size");
  const auto& a = mu.weights();
  const auto& b = nu.weights();
  SolveReport rep;

  std::vector<detail::Atom> atoms;
  {
    Table prod(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) prod(i, j) = a[i] * b[j];
    detail::Atom start = detail::atom_from_table(prod);
    start.weight = 1.0;
    atoms.push_back(std::move(start));
  }
  Table pi(n, m);
  auto rebuild = [&] {
    std::fill(pi.data.begin(), pi.data.end(), 0.0);
    for (const auto& at : atoms)
      for (std::size_t k = 0; k < at.idx.size(); ++k) pi.data[at.idx[k]] += at.weight * at.val[k];
  };
  rebuild();
  double f = coupling_cost(cost, pi, a);
  if (opt.initial) {
    if (opt.initial->rows != n || opt.initial->cols != m)
      throw std::domain_error("solve_weak_ot: initial coupling has the wrong shape");
    const double fi = coupling_cost(cost, *opt.initial, a);
    if (fi < f) {
      atoms.clear();
      detail::Atom at = detail::atom_from_table(*opt.initial);
      at.weight = 1.0;
      atoms.push_back(std::move(at));
      rebuild();
      f = fi;
    }
  }
  if (f == kInf) {
    // Independent coupling is infinite: try the vertex avoiding forbidden cells.
    Table pen(n, m);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (cost.forbidden(i, j)) {
          pen(i, j) = 1.0;
          any = true;
        }
    auto r = transport_simplex(pen, a, b);
    const double fr = coupling_cost(cost, r.plan, a);
    if (fr == kInf) {
      rep.primal_value = kInf;
      rep.status = (any && r.value > 0.0) ? SolveStatus::converged : SolveStatus::infeasible;
      rep.coupling.emplace(pi, mu, nu);
      return rep;
    }
    atoms.clear();
    detail::Atom at = detail::atom_from_table(r.plan);
    at.weight = 1.0;
    atoms.push_back(std::move(at));
    rebuild();
    f = fr;
  }

  Table G(n, m), D(n, m);
  std::vector<std::size_t> rows_touched;
  std::vector<char> touched(n);
  std::vector<double> p(m), base_row(n);
  auto row_value = [&](std::size_t x, const Table& t, double s, const Table& d) {
    for (std::size_t y = 0; y < m; ++y) p[y] = std::max(t(x, y) + s * d(x, y), 0.0) / a[x];
    return cost.value(x, p);
  };

  const auto bounds = detail::coupling_bounds(cost, a);
  rep.status = SolveStatus::budget_exhausted;
  int stalls = 0;
  for (int it = 0; it < opt.max_iter; ++it) {
    rep.iterations = static_cast<std::size_t>(it + 1);
    detail::coupling_gradient(cost, pi, a, G);
    auto lmo = bounds.empty() ? transport_simplex(G, a, b) : detail::constrained_lmo(G, a, b, bounds);
    rep.lmo_v = lmo.v;
    double gpi = 0.0;
    for (std::size_t k = 0; k < pi.data.size(); ++k) gpi += G.data[k] * pi.data[k];
    const double fw_gap = std::max(gpi - lmo.value, 0.0);
    rep.fw_gap = fw_gap;
    rep.fw_gap_history.push_back(fw_gap);
    if (fw_gap <= opt.tol * std::max(1.0, std::abs(f))) {
      rep.status = SolveStatus::converged;
      break;
    }
    if (opt.dual_bound && !lmo.v.empty() && it % opt.dual_every == opt.dual_every - 1) {
      std::vector<double> phi(m);
      for (std::size_t y = 0; y < m; ++y) phi[y] = -lmo.v[y];
      const double lb = opt.dual_bound(phi);
      if (f - lb <= opt.tol * std::max(1.0, std::abs(f))) {
        rep.certified_gap = f - lb;
        rep.dual_value = lb;
        rep.status = SolveStatus::converged;
        break;
      }
    }
    detail::Atom s = detail::atom_from_table(lmo.plan);

    // Away atom: largest linearized value among active atoms.
    std::size_t away = 0;
    double away_val = -kInf;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double v = detail::atom_dot(atoms[k], G);
      if (v > away_val) {
        away_val = v;
        away = k;
      }
    }
    auto try_step = [&](bool pairwise) -> double {
      std::fill(D.data.begin(), D.data.end(), 0.0);
      for (std::size_t k = 0; k < s.idx.size(); ++k) D.data[s.idx[k]] += s.val[k];
      if (pairwise) {
        const auto& A = atoms[away];
        for (std::size_t k = 0; k < A.idx.size(); ++k) D.data[A.idx[k]] -= A.val[k];
      } else {
        for (std::size_t k = 0; k < pi.data.size(); ++k) D.data[k] -= pi.data[k];
      }
      const double gmax = pairwise ? atoms[away].weight : 1.0;
      rows_touched.clear();
      std::fill(touched.begin(), touched.end(), 0);
      for (std::size_t x = 0; x < n; ++x) {
        if (a[x] <= 0.0) continue;
        for (std::size_t y = 0; y < m; ++y)
          if (D(x, y) != 0.0) {
            touched[x] = 1;
            break;
          }
        if (touched[x]) {
          rows_touched.push_back(x);
          base_row[x] = row_value(x, pi, 0.0, D);
        }
      }
      if (rows_touched.empty() || gmax <= 0.0) return 0.0;
      auto phi = [&](double g) {
        double v = 0.0;
        for (std::size_t x : rows_touched) {
          const double r = row_value(x, pi, g, D);
          if (r == kInf) return kInf;
          v += a[x] * (r - base_row[x]);
        }
        return v;
      };
      // Directional derivative, +inf past the effective domain.
      std::vector<double> grad(m);
      auto dphi = [&](double g) {
        double v = 0.0;
        for (std::size_t x : rows_touched) {
          for (std::size_t y = 0; y < m; ++y) p[y] = std::max(pi(x, y) + g * D(x, y), 0.0) / a[x];
          if (cost.value(x, p) == kInf) return kInf;
          cost.gradient(x, p, grad);
          for (std::size_t y = 0; y < m; ++y) v += grad[y] * D(x, y);
        }
        return v;
      };
      // Bisection on the derivative locates the step to full precision; the value-based search
      // stalls near sqrt(eps) and is kept as a fallback.
      const double d0 = dphi(0.0);
      if (std::isfinite(d0) && d0 >= 0.0) return 0.0;
      if (std::isfinite(d0)) {
        double lo = 0.0, hi = gmax, dl = d0, dh = dphi(hi);
        if (dh <= 0.0) {
          lo = hi;
        } else {
          // Illinois regula falsi, bisecting while the upper end is outside the domain.
          int side = 0;
          for (int k = 0; k < 200 && hi - lo > 1e-16 * gmax; ++k) {
            double mid = std::isfinite(dh) ? (lo * dh - hi * dl) / (dh - dl) : 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
            const double dm = dphi(mid);
            if (dm == 0.0) {
              lo = hi = mid;
              break;
            }
            if (dm > 0.0) {
              hi = mid;
              dh = dm;
              if (side == 1) dl *= 0.5;
              side = 1;
            } else {
              lo = mid;
              dl = dm;
              if (side == -1 && std::isfinite(dh)) dh *= 0.5;
              side = -1;
            }
          }
        }
        if (lo > 0.0 && phi(lo) < 0.0) return lo;
      }
      auto [gbest, vbest] = minimize_convex_1d(phi, 0.0, gmax, opt.line_search_width);
      return vbest < 0.0 ? gbest : 0.0;
    };

    const bool same = detail::same_atom(s, atoms[away]);
    bool pairwise = !same;
    double gamma = pairwise ? try_step(true) : 0.0;
    if (gamma == 0.0) {
      pairwise = false;
      gamma = try_step(false);
    }
    if (gamma == 0.0) {
      if (++stalls >= 3) {
        rep.status = fw_gap <= 10.0 * opt.tol * std::max(1.0, std::abs(f)) ? SolveStatus::converged
                                                                           : SolveStatus::budget_exhausted;
        break;
      }
      continue;
    }
    stalls = 0;

    // Weight update; the FW vertex joins the active set if new. Rounding in the rebuilt table can
    // leave the effective domain on rows of tiny mass, so the step shrinks until the value is finite.
    const auto saved = atoms;
    const Table saved_pi = pi;
    bool accepted = false;
    for (int shrink = 0; shrink < 40 && !accepted; ++shrink, gamma *= 0.5) {
      atoms = saved;
      std::size_t sk = atoms.size();
      for (std::size_t k = 0; k < atoms.size(); ++k)
        if (detail::same_atom(atoms[k], s)) {
          sk = k;
          break;
        }
      if (sk == atoms.size()) {
        atoms.push_back(s);
        atoms.back().weight = 0.0;
      }
      if (pairwise) {
        const double wa = atoms[away].weight;
        atoms[sk].weight += gamma;
        atoms[away].weight = (gamma >= wa) ? 0.0 : wa - gamma;
      } else {
        for (auto& at : atoms) at.weight *= (1.0 - gamma);
        atoms[sk].weight += gamma;
      }
      std::erase_if(atoms, [](const detail::Atom& at) { return at.weight <= 1e-17; });
      double wsum = 0.0;
      for (const auto& at : atoms) wsum += at.weight;
      for (auto& at : atoms) at.weight /= wsum;
      rebuild();
      const double fn = coupling_cost(cost, pi, a);
      if (fn < kInf) {
        f = fn;
        accepted = true;
      }
    }
    if (!accepted) {
      atoms = saved;
      pi = saved_pi;
      if (++stalls >= 3) break;
    }
  }
  rep.primal_value = f;
  rep.coupling.emplace(pi, mu, nu);
  return rep;
}

// Exact LP for the barycentric cost theta(h) = s*|h| on the line.
inline SolveReport solve_bary_abs_lp(const CostModel& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const std::size_t n = mu.size();
  const double scale = cost.spec().scale * cost.spec().fn.scale;
  std::vector<std::size_t> R = mu.support(), Cs = nu.support();
  const std::size_t nr = R.size(), nc = Cs.size(), nv = nr * nc + nr;
  LpProblem P;
  P.n = nv;
  P.c.assign(nv, 0.0);
  for (std::size_t i = 0; i < nr; ++i) P.c[nr * nc + i] = scale;
  for (std::size_t i = 0; i < nr; ++i) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t j = 0; j < nc; ++j) row[i * nc + j] = 1.0;
    P.A_eq.push_back(row);
    P.b_eq.push_back(mu[R[i]]);
  }
  for (std::size_t j = 0; j < nc; ++j) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t i = 0; i < nr; ++i) row[i * nc + j] = 1.0;
    P.A_eq.push_back(row);
    P.b_eq.push_back(nu[Cs[j]]);
  }
  const auto& X = *mu.space();
  for (std::size_t i = 0; i < nr; ++i) {
    const double mx = mu[R[i]] * X.coord(R[i])[0];
    std::vector<double> up(nv, 0.0), dn(nv, 0.0);
    for (std::size_t j = 0; j < nc; ++j) {
      up[i * nc + j] = -X.coord(Cs[j])[0];
      dn[i * nc + j] = X.coord(Cs[j])[0];
    }
    up[nr * nc + i] = -1.0;
    dn[nr * nc + i] = -1.0;
    P.A_le.push_back(up);
    P.b_le.push_back(-mx);
    P.A_le.push_back(dn);
    P.b_le.push_back(mx);
  }
  auto r = solve_lp(P);
  if (r.status != LpResult::Status::optimal) throw std::runtime_error("solve_weak_ot: barycentric LP failed");
  Table pi(n, n);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) pi(R[i], Cs[j]) = r.x[i * nc + j];
  // Restore exact row sums lost to pivoting round-off.
  for (std::size_t i = 0; i < nr; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < nc; ++j) s += pi(R[i], Cs[j]);
    if (s > 0.0)
      for (std::size_t j = 0; j < nc; ++j) pi(R[i], Cs[j]) *= mu[R[i]] / s;
  }
  SolveReport rep;
  rep.primal_value = coupling_cost(cost, pi, mu.weights());
  rep.iterations = 1;
  rep.status = SolveStatus::converged;
  rep.coupling.emplace(std::move(pi), mu, nu);
  return rep;
}

inline bool is_bary_abs_line(const CostModel& m) {
  const auto& s = m.spec();
  return s.family == CostSpec::Family::barycentric && m.dim() == 1 && s.fn.tag == ScalarFn::Tag::power &&
         s.fn.r == 1.0;
}

// Polytope atoms of mass zero follow the delta_x convention through Coupling::disintegrate.
inline SolveReport solve_weak_ot(const CostSpec& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const SolveOptions& opt = {}) {
  require_same_space(mu, nu, "solve_weak_ot");
  CostModel model(c, mu.space());
  if (c.family == CostSpec::Family::classical) {
    Table w = c.omega;
    for (double& v : w.data) v *= c.scale;
    auto r = linear_ot(w, mu, nu);
    SolveReport rep;
    rep.primal_value = r.value;
    rep.iterations = 1;
    rep.lmo_v = r.v;
    rep.coupling.emplace(std::move(r.coupling));
    return rep;
  }
  if (is_bary_abs_line(model)) return solve_bary_abs_lp(model, mu, nu);
  if (c.family == CostSpec::Family::samson) {
    // nu must be absolutely continuous w.r.t. mu0 off the diagonal, else the cost is +inf.
    const auto& m0 = *c.mu0;
    for (std::size_t y = 0; y < nu.size(); ++y)
      if (nu[y] > 0.0 && m0[y] == 0.0 && mu[y] < nu[y]) {
        SolveReport rep;
        rep.primal_value = kInf;
        rep.status = SolveStatus::converged;
        return rep;
      }
  }
  return solve_weak_ot_fw(model, mu, nu, opt);
}

struct SubproblemResult {
  std::vector<double> p;
  double value = kInf;
  double fw_gap = 0.0;  // value - fw_gap is a lower bound on the minimum
  std::size_t iterations = 0;
};

// min_p sum_y phi(y) p(y) + c(x,p) over the simplex, pairwise Frank-Wolfe from delta_x.
template <WeakCost C>
SubproblemResult solve_simplex_subproblem(const C& cost, std::size_t x, std::span<const double> phi,
                                          const SolveOptions& opt = {}) {
  const std::size_t n = cost.size();
  if (phi.size() != n) throw std::domain_error("solve_simplex_subproblem: phi has the wrong length");
  SubproblemResult res;
  res.p.assign(n, 0.0);
  res.p[x] = 1.0;
  std::vector<double> g(n), q(n);
  auto objective = [&](std::span<const double> pp) {
    const double c = cost.value(x, pp);
    if (c == kInf) return kInf;
    double s = c;
    for (std::size_t y = 0; y < n; ++y) s += phi[y] * pp[y];
    return s;
  };
  double f = objective(res.p);
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = static_cast<std::size_t>(it + 1);
    cost.gradient(x, res.p, g);
    double gmax = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      g[y] += phi[y];
      gmax = std::max(gmax, std::abs(g[y]));
    }
    for (std::size_t y = 0; y < n; ++y)
      if (cost.forbidden(x, y)) g[y] = 1e6 * (1.0 + gmax);
    std::size_t fw = 0, aw = n;
    double gp = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      gp += g[y] * res.p[y];
      if (g[y] < g[fw]) fw = y;
      if (res.p[y] > 0.0 && (aw == n || g[y] > g[aw])) aw = y;
    }
    res.fw_gap = std::max(gp - g[fw], 0.0);
    if (res.fw_gap <= opt.tol * std::max(1.0, std::abs(f))) break;
    auto line = [&](bool pairwise) -> double {
      const double gm = pairwise ? res.p[aw] : 1.0;
      auto phi1 = [&](double s) {
        for (std::size_t y = 0; y < n; ++y) q[y] = pairwise ? res.p[y] : (1.0 - s) * res.p[y];
        if (pairwise) {
          q[fw] += s;
          q[aw] = std::max(q[aw] - s, 0.0);
        } else {
          q[fw] += s;
        }
        return objective(q);
      };
      auto [sb, vb] = minimize_convex_1d(phi1, 0.0, gm, opt.line_search_width);
      return vb < f ? sb : 0.0;
    };
    bool pairwise = aw != fw && aw != n;
    double s = pairwise ? line(true) : 0.0;
    if (s == 0.0) {
      pairwise = false;
      s = line(false);
    }
    if (s == 0.0) break;
    if (pairwise) {
      const double take = std::min(s, res.p[aw]);
      res.p[fw] += take;
      res.p[aw] = (s >= res.p[aw]) ? 0.0 : res.p[aw] - take;
    } else {
      for (double& v : res.p) v *= (1.0 - s);
      res.p[fw] += s;
    }
    double tot = 0.0;
    for (double v : res.p) tot += v;
    for (double& v : res.p) v /= tot;
    f = objective(res.p);
  }
  res.value = f;
  return res;
}

} // namespace weakot
