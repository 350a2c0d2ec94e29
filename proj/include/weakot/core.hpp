#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "extended.hpp"

namespace weakot {

enum class Norm { abs, euclidean, l1, linf };

inline double norm_of(Norm n, std::span<const double> v) {
  double s = 0.0;
  switch (n) {
    case Norm::abs:
      if (v.size() != 1) throw std::domain_error("abs norm needs 1-D coordinates");
      return std::abs(v[0]);
    case Norm::euclidean:
      for (double a : v) s += a * a;
      return std::sqrt(s);
    case Norm::l1:
      for (double a : v) s += std::abs(a);
      return s;
    case Norm::linf:
      for (double a : v) s = std::max(s, std::abs(a));
      return s;
  }
  return s;
}

inline Norm default_norm(std::size_t dim) { return dim == 1 ? Norm::abs : Norm::euclidean; }

// Dense row-major table.
struct Table {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  Table() = default;
  Table(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

class FiniteSpace {
public:
  FiniteSpace(std::vector<std::string> labels, std::optional<std::vector<std::vector<double>>> coords,
              Table dist, bool metric_checked = false)
      : labels_(std::move(labels)), coords_(std::move(coords)), dist_(std::move(dist)) {
    const auto& tol = default_tolerances();
    const std::size_t n = labels_.size();
    if (n == 0) throw std::domain_error("FiniteSpace: no points");
    if (dist_.rows != n || dist_.cols != n) throw std::domain_error("FiniteSpace: dist must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
      if (dist_(i, i) != 0.0) throw std::domain_error("FiniteSpace: dist diagonal must be zero");
      for (std::size_t j = 0; j < n; ++j) {
        if (!(dist_(i, j) >= 0.0) || !std::isfinite(dist_(i, j)))
          throw std::domain_error("FiniteSpace: distances must be finite and nonnegative");
        if (dist_(i, j) != dist_(j, i)) throw std::domain_error("FiniteSpace: dist not symmetric");
      }
    }
    if (coords_) {
      if (coords_->size() != n) throw std::domain_error("FiniteSpace: one coordinate vector per label");
      dim_ = (*coords_)[0].size();
      if (dim_ == 0) throw std::domain_error("FiniteSpace: empty coordinates");
      for (const auto& c : *coords_)
        if (c.size() != dim_) throw std::domain_error("FiniteSpace: ragged coordinates");
      // dist must be one of the supported norms of coordinate differences
      std::vector<double> diff(dim_);
      auto matches = [&](Norm nm) {
        if (nm == Norm::abs && dim_ != 1) return false;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < i; ++j) {
            for (std::size_t k = 0; k < dim_; ++k) diff[k] = (*coords_)[i][k] - (*coords_)[j][k];
            if (std::abs(norm_of(nm, diff) - dist_(i, j)) > tol.metric) return false;
          }
        return true;
      };
      if (!matches(Norm::abs) && !matches(Norm::euclidean) && !matches(Norm::l1) && !matches(Norm::linf))
        throw std::domain_error("FiniteSpace: dist is not a norm of the coordinate differences");
    }
    if (metric_checked) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            if (dist_(i, j) > dist_(i, k) + dist_(k, j) + tol.metric)
              throw std::domain_error("FiniteSpace: triangle inequality fails");
    }
  }

  static FiniteSpace from_coords(std::vector<std::string> labels, std::vector<std::vector<double>> coords,
                                 std::optional<Norm> norm = std::nullopt) {
    if (coords.empty()) throw std::domain_error("FiniteSpace: no points");
    const Norm nm = norm.value_or(default_norm(coords[0].size()));
    const std::size_t n = coords.size();
    Table d(n, n);
    std::vector<double> diff(coords[0].size());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (coords[j].size() != diff.size()) throw std::domain_error("FiniteSpace: ragged coordinates");
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = coords[i][k] - coords[j][k];
        d(i, j) = norm_of(nm, diff);
      }
    return FiniteSpace(std::move(labels), std::move(coords), std::move(d));
  }

  // 1-D space on the given points, labels are the printed coordinates.
  static FiniteSpace line(const std::vector<double>& xs) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> coords;
    for (double x : xs) {
      std::string s = std::to_string(x);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      labels.push_back(s);
      coords.push_back({x});
    }
    return from_coords(std::move(labels), std::move(coords), Norm::abs);
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_coords() const { return coords_.has_value(); }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& coord(std::size_t i) const {
    if (!coords_) throw std::domain_error("FiniteSpace: no coordinates");
    return (*coords_)[i];
  }
  const std::optional<std::vector<std::vector<double>>>& coords() const { return coords_; }
  double dist(std::size_t i, std::size_t j) const { return dist_(i, j); }
  const Table& dist_table() const { return dist_; }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw std::domain_error("FiniteSpace: unknown label " + label);
    return static_cast<std::size_t>(it - labels_.begin());
  }

  friend bool operator==(const FiniteSpace& a, const FiniteSpace& b) {
    return a.labels_ == b.labels_ && a.dist_.data == b.dist_.data && a.coords_ == b.coords_;
  }

private:
  std::vector<std::string> labels_;
  std::optional<std::vector<std::vector<double>>> coords_;
  Table dist_;
  std::size_t dim_ = 0;
};

using SpacePtr = std::shared_ptr<const FiniteSpace>;

inline SpacePtr make_space(FiniteSpace s) { return std::make_shared<const FiniteSpace>(std::move(s)); }

inline bool same_space(const SpacePtr& a, const SpacePtr& b) { return a == b || (a && b && *a == *b); }

class DiscreteMeasure {
public:
  DiscreteMeasure(SpacePtr space, std::vector<double> weights) : space_(std::move(space)), w_(std::move(weights)) {
    if (!space_) throw std::domain_error("DiscreteMeasure: null space");
    if (w_.size() != space_->size())
      throw std::domain_error("DiscreteMeasure: " + std::to_string(w_.size()) + " weights for a space of " +
                              std::to_string(space_->size()) + " points");
    double s = 0.0;
    for (double v : w_) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::domain_error("DiscreteMeasure: negative or non-finite weight");
      s += v;
    }
    if (std::abs(s - 1.0) > default_tolerances().weight_sum)
      throw std::domain_error("DiscreteMeasure: weights sum to " + std::to_string(s));
  }

  // Scales nonnegative weights to unit mass.
  static DiscreteMeasure normalized(SpacePtr space, std::vector<double> w) {
    double s = 0.0;
    for (double v : w) s += v;
    if (!(s > 0.0)) throw std::domain_error("DiscreteMeasure: zero total mass");
    for (double& v : w) v /= s;
    return DiscreteMeasure(std::move(space), std::move(w));
  }
  static DiscreteMeasure dirac(SpacePtr space, std::size_t i) {
    std::vector<double> w(space->size(), 0.0);
    w.at(i) = 1.0;
    return DiscreteMeasure(std::move(space), std::move(w));
  }
  static DiscreteMeasure uniform(SpacePtr space) {
    std::vector<double> w(space->size(), 1.0 / static_cast<double>(space->size()));
    return normalized(std::move(space), std::move(w));
  }

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] > 0.0) s.push_back(i);
    return s;
  }
  double integrate(std::span<const double> f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] > 0.0) s += w_[i] * f[i];
    return s;
  }

private:
  SpacePtr space_;
  std::vector<double> w_;
};

inline void require_same_space(const DiscreteMeasure& a, const DiscreteMeasure& b, const char* what,
                               const char* a_name = "mu", const char* b_name = "nu") {
  if (!same_space(a.space(), b.space()))
    throw std::domain_error(std::string(what) + ": " + a_name + " (" + std::to_string(a.size()) + " points) and " + b_name +
                            " (" + std::to_string(b.size()) + " points) live on different spaces");
}

struct Kernel {
  SpacePtr source, target;
  Table rows;

  Kernel(SpacePtr s, SpacePtr t, Table r) : source(std::move(s)), target(std::move(t)), rows(std::move(r)) {
    if (rows.rows != source->size() || rows.cols != target->size())
      throw std::domain_error("Kernel: table is " + std::to_string(rows.rows) + "x" + std::to_string(rows.cols) + " but the spaces have " +
                              std::to_string(source->size()) + " and " + std::to_string(target->size()) + " points");
    for (std::size_t i = 0; i < rows.rows; ++i) {
      double s = 0.0;
      for (double v : rows.row(i)) {
        if (!(v >= 0.0)) throw std::domain_error("Kernel: negative entry");
        s += v;
      }
      if (std::abs(s - 1.0) > default_tolerances().kernel_row) throw std::domain_error("Kernel: row does not sum to 1");
    }
  }
};

struct Coupling {
  Table joint;
  DiscreteMeasure first, second;

  Coupling(Table j, DiscreteMeasure f, DiscreteMeasure s) : joint(std::move(j)), first(std::move(f)), second(std::move(s)) {
    if (joint.rows != first.size() || joint.cols != second.size())
      throw std::domain_error("Coupling: table is " + std::to_string(joint.rows) + "x" + std::to_string(joint.cols) +
                              " but the marginals have " + std::to_string(first.size()) + " and " + std::to_string(second.size()) + " points");
    const double tol = default_tolerances().coupling_marginal;
    std::vector<double> col(joint.cols, 0.0);
    for (std::size_t i = 0; i < joint.rows; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < joint.cols; ++k) {
        const double v = joint(i, k);
        if (!(v >= -tol)) throw std::domain_error("Coupling: negative entry");
        s += v;
        col[k] += v;
      }
      if (std::abs(s - first[i]) > tol) throw std::domain_error("Coupling: first marginal mismatch");
    }
    for (std::size_t k = 0; k < joint.cols; ++k)
      if (std::abs(col[k] - second[k]) > tol) throw std::domain_error("Coupling: second marginal mismatch");
  }

  // Rows with zero mass get delta_x when source and target coincide, the second marginal otherwise.
  Kernel disintegrate() const {
    Table k(joint.rows, joint.cols);
    const bool same = same_space(first.space(), second.space());
    for (std::size_t i = 0; i < joint.rows; ++i) {
      double s = 0.0;
      for (double v : joint.row(i)) s += std::max(v, 0.0);
      if (first[i] > 0.0 && s > 0.0) {
        for (std::size_t j = 0; j < joint.cols; ++j) k(i, j) = std::max(joint(i, j), 0.0) / s;
      } else if (same) {
        k(i, i) = 1.0;
      } else {
        for (std::size_t j = 0; j < joint.cols; ++j) k(i, j) = second[j];
      }
    }
    return Kernel(first.space(), second.space(), std::move(k));
  }

  static Coupling recompose(const DiscreteMeasure& mu, const Kernel& k) {
    Table j(k.rows.rows, k.rows.cols);
    std::vector<double> col(k.rows.cols, 0.0);
    for (std::size_t i = 0; i < j.rows; ++i)
      for (std::size_t c = 0; c < j.cols; ++c) {
        j(i, c) = mu[i] * k.rows(i, c);
        col[c] += j(i, c);
      }
    double s = 0.0;
    for (double v : col) s += v;
    for (double& v : col) v /= s;
    return Coupling(std::move(j), mu, DiscreteMeasure(k.target, std::move(col)));
  }
};

struct TestFunction {
  SpacePtr space;
  std::vector<double> values;

  TestFunction(SpacePtr s, std::vector<double> v) : space(std::move(s)), values(std::move(v)) {
    if (values.size() != space->size())
      throw std::domain_error("TestFunction: " + std::to_string(values.size()) + " values for a space of " +
                              std::to_string(space->size()) + " points");
    for (double x : values)
      if (!std::isfinite(x)) throw std::domain_error("TestFunction: non-finite value");
  }
  double operator[](std::size_t i) const { return values[i]; }
};

inline Extended relative_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
  require_same_space(nu, mu, "relative_entropy", "nu", "mu");
  double h = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] == 0.0) continue;
    if (mu[i] == 0.0) return Extended::infinity();
    h += nu[i] * std::log(nu[i] / mu[i]);
  }
  return Extended(std::max(h, 0.0));
}

inline double entropy_functional(std::span<const double> g, const DiscreteMeasure& mu) {
  if (g.size() != mu.size())
    throw std::domain_error("entropy_functional: g has " + std::to_string(g.size()) + " values, mu has " +
                            std::to_string(mu.size()) + " points");
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mu[i] == 0.0) continue;
    if (g[i] < 0.0) throw std::domain_error("entropy_functional: negative g on the support");
    m += mu[i] * g[i];
  }
  if (!(m > 0.0)) throw std::domain_error("entropy_functional: integral of g is zero");
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mu[i] > 0.0 && g[i] > 0.0) e += mu[i] * g[i] * std::log(g[i] / m);
  return e;
}

inline DiscreteMeasure push_forward(const DiscreteMeasure& mu, const std::function<std::size_t(std::size_t)>& map,
                                    SpacePtr target) {
  std::vector<double> w(target->size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) continue;
    const std::size_t j = map(i);
    if (j >= w.size()) throw std::domain_error("push_forward: image point outside the target space");
    w[j] += mu[i];
  }
  return DiscreteMeasure(std::move(target), std::move(w));
}

struct PoissonTruncation {
  DiscreteMeasure measure;
  std::size_t N;
  double tail_mass;  // discarded mass before renormalization
};

inline PoissonTruncation truncate_poisson(double lambda, double tail_tol) {
  if (!(lambda > 0.0)) throw std::domain_error("truncate_poisson: lambda must be positive");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw std::domain_error("truncate_poisson: tail_tol must be in (0,1)");
  // Terms up to a point far in the tail, then suffix sums from the top for accurate tails.
  std::vector<double> p;
  for (std::size_t k = 0;; ++k) {
    const double lp = -lambda + static_cast<double>(k) * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1.0);
    p.push_back(std::exp(lp));
    if (static_cast<double>(k) > lambda && p.back() < 1e-300 * tail_tol) break;
    if (static_cast<double>(k) > lambda + 40.0 * std::sqrt(lambda) + 400.0) break;
  }
  std::vector<double> suffix(p.size() + 1, 0.0);
  for (std::size_t k = p.size(); k-- > 0;) suffix[k] = suffix[k + 1] + p[k];
  std::size_t N = 0;
  while (N + 1 < p.size() && !(suffix[N + 1] < tail_tol)) ++N;
  std::vector<double> xs, w(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(N + 1));
  for (std::size_t k = 0; k <= N; ++k) xs.push_back(static_cast<double>(k));
  auto space = make_space(FiniteSpace::line(xs));
  return {DiscreteMeasure::normalized(space, std::move(w)), N, suffix[N + 1]};
}

// Bernoulli(rho) on the two-point line {0,1}.
inline DiscreteMeasure bernoulli(double rho, SpacePtr space = nullptr) {
  if (!space) space = make_space(FiniteSpace::line({0.0, 1.0}));
  return DiscreteMeasure(std::move(space), {1.0 - rho, rho});
}

} // namespace weakot
