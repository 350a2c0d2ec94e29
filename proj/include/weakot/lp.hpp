#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace weakot {

// minimize c.x  subject to  A_eq x = b_eq,  A_le x <= b_le,  x >= 0
struct LpProblem {
  std::size_t n = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> A_eq, A_le;
  std::vector<double> b_eq, b_le;
};

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  std::vector<double> x;
  double value = 0.0;
};

// Dense two-phase tableau simplex with Bland's rule.
inline LpResult solve_lp(const LpProblem& P) {
  const std::size_t n = P.n, me = P.A_eq.size(), ml = P.A_le.size(), m = me + ml;
  if (P.c.size() != n || P.b_eq.size() != me || P.b_le.size() != ml) throw std::domain_error("solve_lp: bad shapes");
  // Columns: structural n, slacks ml, artificials m, then rhs.
  const std::size_t ns = n + ml, na = ns + m, W = na + 1;
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(W, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    const bool eq = r < me;
    const auto& row = eq ? P.A_eq[r] : P.A_le[r - me];
    if (row.size() != n) throw std::domain_error("solve_lp: bad row length");
    double rhs = eq ? P.b_eq[r] : P.b_le[r - me];
    const double sgn = rhs < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) T[r][j] = sgn * row[j];
    if (!eq) T[r][n + (r - me)] = sgn;
    T[r][ns + r] = 1.0;
    T[r][na] = sgn * rhs;
    basis[r] = ns + r;
  }
  const double eps = 1e-11;

  auto pivot = [&](std::size_t pr, std::size_t pc) {
    const double pv = T[pr][pc];
    for (double& v : T[pr]) v /= pv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == pr) continue;
      const double f = T[r][pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < W; ++j) T[r][j] -= f * T[pr][j];
    }
    basis[pr] = pc;
  };
  // Runs the simplex on objective row m over columns [0, ncols); false when unbounded.
  auto run = [&](std::size_t ncols, const std::vector<char>& alive) -> bool {
    for (std::size_t iter = 0; iter < 100000; ++iter) {
      std::size_t enter = ncols;
      for (std::size_t j = 0; j < ncols; ++j)
        if (T[m][j] < -eps) {
          enter = j;
          break;
        }
      if (enter == ncols) return true;
      std::size_t leave = m;
      double best = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        if (!alive[r] || T[r][enter] <= eps) continue;
        const double ratio = T[r][na] / T[r][enter];
        if (leave == m || ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("solve_lp: iteration limit");
  };

  std::vector<char> alive(m, 1);
  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j < W; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += T[r][j];
    T[m][j] = (j >= ns && j < na) ? 0.0 : -s;
  }
  run(na, alive);
  LpResult res;
  if (-T[m][na] > 1e-9) return res;
  // Drive remaining artificials out; rows with no structural entry are redundant.
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < ns) continue;
    std::size_t pc = ns;
    for (std::size_t j = 0; j < ns; ++j)
      if (std::abs(T[r][j]) > 1e-9) {
        pc = j;
        break;
      }
    if (pc == ns) alive[r] = 0;
    else pivot(r, pc);
  }
  // Phase 2 on the structural and slack columns.
  for (std::size_t j = 0; j < W; ++j) T[m][j] = 0.0;
  for (std::size_t j = 0; j < n; ++j) T[m][j] = P.c[j];
  for (std::size_t r = 0; r < m; ++r) {
    if (!alive[r]) continue;
    const double f = T[m][basis[r]];
    if (f == 0.0) continue;
    for (std::size_t j = 0; j < W; ++j) T[m][j] -= f * T[r][j];
  }
  if (!run(ns, alive)) {
    res.status = LpResult::Status::unbounded;
    return res;
  }
  res.status = LpResult::Status::optimal;
  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (alive[r] && basis[r] < n) res.x[basis[r]] = std::max(T[r][na], 0.0);
  for (std::size_t j = 0; j < n; ++j) res.value += P.c[j] * res.x[j];
  return res;
}

} // namespace weakot
