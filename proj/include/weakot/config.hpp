#pragma once

namespace weakot {

// Every numeric tolerance used by the library. Reports embed the record they ran with.
struct Tolerances {
  double weight_sum = 1e-12;         // measures sum to one
  double kernel_row = 1e-12;         // kernel rows sum to one
  double coupling_marginal = 1e-10;  // coupling marginals
  double metric = 1e-12;             // coords vs dist, triangle inequality
  double convexity = 1e-10;
  double fw_gap = 1e-9;              // Frank-Wolfe surrogate gap, relative to max(1,|value|)
  int fw_max_iter = 20000;
  double line_search_width = 1e-12;  // golden-section bracket
  double legendre_abs = 1e-10;
  double vbar = 1e-12;               // balance-equation root in q_hat_exact
  double weak_duality = 1e-10;
  double order_mean = 1e-10;         // convex order: means and call functions
  double strassen_accept = 1e-9;
  double poisson_tail = 1e-12;
  double threshold = 1e-9;           // c_A(x) > t membership slack
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

} // namespace weakot
