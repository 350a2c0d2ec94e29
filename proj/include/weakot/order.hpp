#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "lp.hpp"
#include "primal.hpp"

namespace weakot {

namespace detail {

inline void require_line(const DiscreteMeasure& mu, const char* what) {
  const auto& X = *mu.space();
  if (!X.has_coords() || X.dim() != 1) throw std::domain_error(std::string(what) + ": needs 1-D coordinates");
}

// Sorted distinct coordinates carrying mass under mu or nu.
inline std::vector<double> union_support(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<double> z;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > 0.0 || nu[i] > 0.0) z.push_back(mu.space()->coord(i)[0]);
  std::sort(z.begin(), z.end());
  z.erase(std::unique(z.begin(), z.end()), z.end());
  return z;
}

inline double call_value(const DiscreteMeasure& m, double a) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * std::max(m.space()->coord(i)[0] - a, 0.0);
  return s;
}

inline double mean_1d(const DiscreteMeasure& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * m.space()->coord(i)[0];
  return s;
}

} // namespace detail

// Convex 1-Lipschitz function on the line given by its values at sorted knots, extended linearly.
struct ConvexWitness {
  std::vector<double> knots, values;

  double operator()(double x) const {
    if (knots.size() == 1) return values[0];
    auto slope = [&](std::size_t i) { return (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]); };
    if (x <= knots.front()) return values.front() + slope(0) * (x - knots.front());
    if (x >= knots.back()) return values.back() + slope(knots.size() - 2) * (x - knots.back());
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), x) - knots.begin()) - 1;
    return values[i] + slope(i) * (x - knots[i]);
  }
};

struct TBar1Dual {
  double value = 0.0;
  ConvexWitness witness;
};

// sup { int f dmu - int f dnu : f convex, 1-Lipschitz } as an LP in the slopes s_j = -1 + u_j,
// with variables u_1 and the slope increments, all >= 0 and summing to at most 2.
inline TBar1Dual t_bar_1_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_same_space(mu, nu, "t_bar_1_dual");
  detail::require_line(mu, "t_bar_1_dual");
  const auto z = detail::union_support(mu, nu);
  const std::size_t k = z.size();
  TBar1Dual out;
  out.witness.knots = z;
  out.witness.values.assign(k, 0.0);
  if (k < 2) return out;
  std::vector<double> w(k, 0.0);  // (mu - nu) aggregated at each knot
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double c = mu.space()->coord(i)[0];
    const auto it = std::lower_bound(z.begin(), z.end(), c);
    if (it != z.end() && *it == c) w[static_cast<std::size_t>(it - z.begin())] += mu[i] - nu[i];
  }
  // f_i = sum_{j<i} (-1 + u_j) d_j with u_j = x_0 + x_1 + ... + x_{j}.
  const std::size_t nv = k - 1;
  std::vector<double> tail(k + 1, 0.0);  // tail[j] = sum_{i>j} w_i
  for (std::size_t i = k; i-- > 0;) tail[i] = tail[i + 1] + w[i];
  // objective = sum_i w_i f_i = sum_j d_j (-1 + u_j) tail[j+1]
  LpProblem P;
  P.n = nv;
  P.c.assign(nv, 0.0);
  for (std::size_t j = 0; j + 1 < k; ++j) {
    const double dj = z[j + 1] - z[j];
    for (std::size_t l = 0; l <= j; ++l) P.c[l] -= dj * tail[j + 1];  // maximize -> minimize the negative
  }
  P.A_le.push_back(std::vector<double>(nv, 1.0));
  P.b_le.push_back(2.0);
  const auto r = solve_lp(P);
  if (r.status != LpResult::Status::optimal) throw std::runtime_error("t_bar_1_dual: LP failed");
  double u = 0.0;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    u += r.x[j];
    out.witness.values[j + 1] = out.witness.values[j] + (-1.0 + std::min(u, 2.0)) * (z[j + 1] - z[j]);
  }
  for (std::size_t i = 0; i < k; ++i) out.value += w[i] * out.witness.values[i];
  out.value = std::max(out.value, 0.0);
  return out;
}

inline CostSpec t_bar_1_cost() { return CostSpec::barycentric(ScalarFn::power(1.0)); }

// sum_x mu(x) |x - bary(p_x)|
inline double martingale_residual(const Kernel& k, const DiscreteMeasure& mu) {
  const auto& X = *mu.space();
  double res = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x) {
    if (mu[x] == 0.0) continue;
    std::vector<double> h = X.coord(x);
    for (std::size_t y = 0; y < k.rows.cols; ++y)
      for (std::size_t d = 0; d < h.size(); ++d) h[d] -= k.rows(x, y) * X.coord(y)[d];
    res += mu[x] * norm_of(default_norm(h.size()), h);
  }
  return res;
}

struct OrderReport {
  bool ordered = false;
  double mean_gap = 0.0;
  double worst_call_gap = 0.0;
  std::optional<double> witness_a;
  double t_bar_1 = 0.0;
  std::optional<Kernel> kernel;
};

inline OrderReport convex_order_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_same_space(mu, nu, "convex_order_1d");
  detail::require_line(mu, "convex_order_1d");
  OrderReport rep;
  rep.mean_gap = detail::mean_1d(mu) - detail::mean_1d(nu);
  double worst = -kInf;
  for (double a : detail::union_support(mu, nu)) {
    const double g = detail::call_value(mu, a) - detail::call_value(nu, a);
    if (g > worst) {
      worst = g;
      rep.witness_a = a;
    }
  }
  rep.worst_call_gap = worst;
  const double tol = default_tolerances().order_mean;
  rep.ordered = std::abs(rep.mean_gap) <= tol && worst <= tol;
  rep.t_bar_1 = t_bar_1_dual(mu, nu).value;
  if (rep.ordered) {
    rep.witness_a.reset();
    auto s = solve_weak_ot(t_bar_1_cost(), mu, nu);
    rep.kernel = s.coupling->disintegrate();
  } else if (std::abs(rep.mean_gap) > tol && worst <= tol) {
    rep.witness_a.reset();  // only the mean separates them; the witness is affine
  }
  return rep;
}

struct StrassenResult {
  bool success = false;
  double t_bar_1 = 0.0;
  std::optional<Kernel> kernel;
  double residual = 0.0;
  std::optional<ConvexWitness> witness;  // 1-D only
  double witness_gap = 0.0;              // int f dmu - int f dnu
  bool certified = true;                 // false for m > 1, where verdicts are numeric
};

inline StrassenResult strassen_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double eps) {
  require_same_space(mu, nu, "strassen_coupling");
  if (!(eps >= 0.0)) throw std::domain_error("strassen_coupling: eps must be nonnegative");
  if (!mu.space()->has_coords()) throw std::domain_error("strassen_coupling: needs coordinates");
  const bool line = mu.space()->dim() == 1;
  StrassenResult out;
  out.certified = line;
  auto s = solve_weak_ot(t_bar_1_cost(), mu, nu);
  out.t_bar_1 = s.primal_value;
  if (out.t_bar_1 <= eps + default_tolerances().strassen_accept) {
    out.success = true;
    out.kernel = s.coupling->disintegrate();
    out.residual = martingale_residual(*out.kernel, mu);
    return out;
  }
  if (line) {
    auto d = t_bar_1_dual(mu, nu);
    out.witness = d.witness;
    out.witness_gap = d.value;
  }
  return out;
}

} // namespace weakot
