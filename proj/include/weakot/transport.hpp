#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "core.hpp"

namespace weakot {

struct TransportResult {
  Table plan;
  double value = 0.0;
  std::vector<double> u, v;  // dual potentials, u_i + v_j <= cost(i,j) everywhere, equality on the basis
  std::size_t pivots = 0;
  // Basic cells, usable as a sparse description of the returned vertex.
  std::vector<std::pair<std::size_t, std::size_t>> basis;
};

// Transportation simplex (MODI). Rows/columns with zero mass are removed before pivoting and
// receive potentials that keep the dual feasible. Supplies and demands must have equal totals.
inline TransportResult transport_simplex(const Table& cost, std::span<const double> a, std::span<const double> b) {
  if (cost.rows != a.size() || cost.cols != b.size()) throw std::domain_error("transport_simplex: shape mismatch");
  std::vector<std::size_t> R, C;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > 0.0) R.push_back(i);
  for (std::size_t j = 0; j < b.size(); ++j)
    if (b[j] > 0.0) C.push_back(j);
  if (R.empty() || C.empty()) throw std::domain_error("transport_simplex: empty marginal");
  const std::size_t m = R.size(), n = C.size();
  double cmax = 0.0;
  for (std::size_t i : R)
    for (std::size_t j : C) {
      const double c = cost(i, j);
      if (!std::isfinite(c)) throw std::domain_error("transport_simplex: non-finite cost");
      cmax = std::max(cmax, std::abs(c));
    }
  auto c = [&](std::size_t i, std::size_t j) { return cost(R[i], C[j]); };

  // Northwest-corner start; ties advance the row so the basis stays a spanning tree.
  Table x(m, n);
  std::vector<char> inb(m * n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> basis;
  {
    std::vector<double> s(m), d(n);
    for (std::size_t i = 0; i < m; ++i) s[i] = a[R[i]];
    for (std::size_t j = 0; j < n; ++j) d[j] = b[C[j]];
    std::size_t i = 0, j = 0;
    while (true) {
      const double q = std::min(s[i], d[j]);
      x(i, j) = q;
      inb[i * n + j] = 1;
      basis.emplace_back(i, j);
      s[i] -= q;
      d[j] -= q;
      if (i == m - 1 && j == n - 1) break;
      if (j == n - 1 || (i < m - 1 && s[i] <= d[j])) ++i; else ++j;
    }
  }

  const std::size_t N = m + n;
  std::vector<double> u(m), v(n);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(N);  // (neighbor node, basis index)
  std::vector<long> parent_edge(N);
  std::vector<std::size_t> parent(N), order;
  std::vector<char> seen(N);
  const double eps = 1e-13 * (1.0 + cmax);
  std::size_t degenerate_run = 0, pivots = 0;
  const std::size_t max_pivots = 200 * N * N + 1000;

  auto build_tree = [&](std::size_t root) {
    for (auto& l : adj) l.clear();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      auto [i, j] = basis[k];
      adj[i].emplace_back(m + j, k);
      adj[m + j].emplace_back(i, k);
    }
    std::fill(seen.begin(), seen.end(), 0);
    order.clear();
    order.push_back(root);
    seen[root] = 1;
    parent_edge[root] = -1;
    for (std::size_t h = 0; h < order.size(); ++h) {
      const std::size_t node = order[h];
      for (auto [nb, k] : adj[node]) {
        if (seen[nb]) continue;
        seen[nb] = 1;
        parent[nb] = node;
        parent_edge[nb] = static_cast<long>(k);
        order.push_back(nb);
      }
    }
    if (order.size() != N) throw std::logic_error("transport_simplex: basis is not a spanning tree");
  };

  while (true) {
    build_tree(0);
    u[0] = 0.0;
    for (std::size_t h = 1; h < order.size(); ++h) {
      const std::size_t node = order[h], p = parent[node];
      if (node >= m) v[node - m] = c(p, node - m) - u[p];
      else u[node] = c(node, p - m) - v[p - m];
    }
    // Entering cell: Dantzig, switching to Bland after a long degenerate run.
    const bool bland = degenerate_run > N;
    long ei = -1, ej = -1;
    double best = -eps;
    for (std::size_t i = 0; i < m && !(bland && ei >= 0); ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (inb[i * n + j]) continue;
        const double rc = c(i, j) - u[i] - v[j];
        if (rc < best) {
          best = rc;
          ei = static_cast<long>(i);
          ej = static_cast<long>(j);
          if (bland) break;
        }
      }
    if (ei < 0) break;
    if (++pivots > max_pivots) throw std::runtime_error("transport_simplex: pivot limit reached");

    // Cycle: entering edge plus the tree path from column node back to row node.
    build_tree(static_cast<std::size_t>(ei));
    std::vector<std::size_t> path;  // basis indices along the path from column ej to row ei
    for (std::size_t node = m + static_cast<std::size_t>(ej); node != static_cast<std::size_t>(ei); node = parent[node])
      path.push_back(static_cast<std::size_t>(parent_edge[node]));
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = path.size();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      auto [i, j] = basis[path[k]];
      const double val = x(i, j);
      if (val < theta || (val == theta && leave < path.size() && path[k] < path[leave])) {
        theta = val;
        leave = k;
      }
    }
    theta = std::max(theta, 0.0);
    degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
    for (std::size_t k = 0; k < path.size(); ++k) {
      auto [i, j] = basis[path[k]];
      x(i, j) += (k % 2 == 0) ? -theta : theta;
      if (x(i, j) < 0.0) x(i, j) = 0.0;
    }
    const std::size_t lk = path[leave];
    auto [li, lj] = basis[lk];
    x(li, lj) = 0.0;
    inb[li * n + lj] = 0;
    x(static_cast<std::size_t>(ei), static_cast<std::size_t>(ej)) = theta;
    inb[static_cast<std::size_t>(ei) * n + static_cast<std::size_t>(ej)] = 1;
    basis[lk] = {static_cast<std::size_t>(ei), static_cast<std::size_t>(ej)};
  }

  TransportResult res;
  res.pivots = pivots;
  res.plan = Table(a.size(), b.size());
  res.u.assign(a.size(), 0.0);
  res.v.assign(b.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) res.u[R[i]] = u[i];
  for (std::size_t j = 0; j < n; ++j) res.v[C[j]] = v[j];
  std::vector<char> rowin(a.size(), 0), colin(b.size(), 0);
  for (std::size_t i : R) rowin[i] = 1;
  for (std::size_t j : C) colin[j] = 1;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (colin[j]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : R) best = std::min(best, cost(i, j) - res.u[i]);
    res.v[j] = best;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (rowin[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) best = std::min(best, cost(i, j) - res.v[j]);
    res.u[i] = best;
  }
  for (auto [i, j] : basis) {
    res.plan(R[i], C[j]) = x(i, j);
    res.basis.emplace_back(R[i], C[j]);
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) res.value += cost(i, j) * res.plan(i, j);
  return res;
}

struct LinearOtResult {
  Coupling coupling;
  double value;
  std::vector<double> u, v;
};

inline LinearOtResult linear_ot(const Table& omega, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (omega.rows != mu.size() || omega.cols != nu.size())
    throw std::domain_error("linear_ot: cost table does not match the marginals");
  auto r = transport_simplex(omega, mu.weights(), nu.weights());
  return {Coupling(std::move(r.plan), mu, nu), r.value, std::move(r.u), std::move(r.v)};
}

} // namespace weakot
