#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "scalar.hpp"

namespace weakot {

struct GammaSpec {
  enum class Tag { hamming, power };
  Tag tag = Tag::hamming;
  double r = 1.0;

  static GammaSpec hamming() { return {}; }
  static GammaSpec power(double r) {
    if (!(r >= 1.0)) throw std::domain_error("GammaSpec: power exponent must be >= 1");
    return {Tag::power, r};
  }
  double operator()(double d) const { return tag == Tag::hamming ? (d > 0.0 ? 1.0 : 0.0) : std::pow(d, r); }
};

struct CostSpec {
  enum class Family { classical, marton, barycentric, samson };

  Family family = Family::classical;
  Table omega;                          // classical
  ScalarFn fn;                          // alpha (marton), theta (barycentric), beta (samson)
  GammaSpec gamma;                      // marton, samson
  std::optional<Norm> norm;             // barycentric; default depends on the coordinate dimension
  std::optional<DiscreteMeasure> mu0;   // samson reference measure
  double scale = 1.0;                   // the cost actually used is scale * c

  static CostSpec classical(Table omega) {
    CostSpec c;
    c.family = Family::classical;
    c.omega = std::move(omega);
    return c;
  }
  // omega(x,y) = d(x,y)^r
  static CostSpec classical_distance(const FiniteSpace& X, double r) {
    Table w(X.size(), X.size());
    for (std::size_t i = 0; i < X.size(); ++i)
      for (std::size_t j = 0; j < X.size(); ++j) w(i, j) = std::pow(X.dist(i, j), r);
    return classical(std::move(w));
  }
  static CostSpec marton(ScalarFn alpha, GammaSpec gamma) {
    CostSpec c;
    c.family = Family::marton;
    c.fn = std::move(alpha);
    c.gamma = gamma;
    return c;
  }
  static CostSpec barycentric(ScalarFn theta, std::optional<Norm> norm = std::nullopt) {
    CostSpec c;
    c.family = Family::barycentric;
    c.fn = std::move(theta);
    c.norm = norm;
    return c;
  }
  static CostSpec samson(ScalarFn beta, GammaSpec gamma, DiscreteMeasure mu0) {
    CostSpec c;
    c.family = Family::samson;
    c.fn = std::move(beta);
    c.gamma = gamma;
    c.mu0 = std::move(mu0);
    return c;
  }

  CostSpec scaled(double lambda) const {
    if (!(lambda > 0.0)) throw std::domain_error("CostSpec: scale must be positive");
    CostSpec c = *this;
    c.scale *= lambda;
    return c;
  }
};

inline const char* family_name(CostSpec::Family f) {
  switch (f) {
    case CostSpec::Family::classical: return "classical";
    case CostSpec::Family::marton: return "marton";
    case CostSpec::Family::barycentric: return "barycentric";
    case CostSpec::Family::samson: return "samson";
  }
  return "?";
}

namespace detail {

// Pulls u back onto the domain when it overshoots by rounding in a sum of weights.
inline double snap_to_domain(const ScalarFn& f, double u) {
  const Interval d = f.domain();
  const double slack = 1e-12 * (1.0 + std::abs(u));
  if (u < d.lo && u >= d.lo - slack) return d.lo;
  if (u > d.hi && u <= d.hi + slack) return d.hi;
  return u;
}

// Derivative of f at u, moved just inside the finiteness domain when it blows up on the boundary.
inline double safe_derivative(const ScalarFn& f, double u) {
  double d = f.derivative(u);
  if (std::isfinite(d)) return d;
  const Interval dom = f.domain();
  double v = u;
  if (std::isfinite(dom.hi)) v = std::min(v, dom.hi - 1e-12 * std::max(1.0, std::abs(dom.hi)));
  if (std::isfinite(dom.lo)) v = std::max(v, dom.lo + 1e-12 * std::max(1.0, std::abs(dom.lo)));
  d = f.derivative(v);
  if (std::isfinite(d)) return d;
  return std::signbit(d) ? -1e12 : 1e12;
}

} // namespace detail

// lo <= coef . p <= hi, one face pair of the effective domain of p -> c(x,p).
struct LinearBound {
  std::vector<double> coef;
  double lo = -kInf, hi = kInf;
};

// A cost bound to its space: precomputed gamma table, coordinates and reference weights.
class CostModel {
public:
  CostModel(CostSpec spec, SpacePtr space) : spec_(std::move(spec)), space_(std::move(space)) {
    const std::size_t n = space_->size();
    switch (spec_.family) {
      case CostSpec::Family::classical:
        if (spec_.omega.rows != n || spec_.omega.cols != n)
          throw std::domain_error("classical cost: omega is " + std::to_string(spec_.omega.rows) + "x" +
                                  std::to_string(spec_.omega.cols) + " but the space has " + std::to_string(n) + " points");
        for (std::size_t i = 0; i < n; ++i)
          if (spec_.omega(i, i) != 0.0) throw std::domain_error("classical cost: omega(x,x) must be 0");
        break;
      case CostSpec::Family::marton:
      case CostSpec::Family::samson:
        gtab_ = Table(n, n);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) gtab_(i, j) = spec_.gamma(space_->dist(i, j));
        if (spec_.fn.raw(0.0) != 0.0) throw std::domain_error("cost: the convex function must vanish at 0");
        if (spec_.family == CostSpec::Family::samson) {
          if (!spec_.mu0) throw std::domain_error("samson cost: reference measure required");
          if (spec_.mu0->size() != n) throw std::domain_error("samson cost: reference measure lives on another space");
        }
        break;
      case CostSpec::Family::barycentric:
        if (!space_->has_coords()) throw std::domain_error("barycentric cost: the space has no coordinates");
        dim_ = space_->dim();
        norm_ = spec_.norm.value_or(default_norm(dim_));
        if (dim_ > 1 && norm_ == Norm::abs) throw std::domain_error("barycentric cost: abs norm needs 1-D coordinates");
        if (spec_.fn.raw(0.0) != 0.0) throw std::domain_error("cost: the convex function must vanish at 0");
        break;
    }
  }

  const CostSpec& spec() const { return spec_; }
  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return space_->size(); }
  std::size_t dim() const { return dim_; }
  double gamma(std::size_t x, std::size_t y) const { return gtab_(x, y); }

  // Cells where any positive mass makes the cost infinite.
  bool forbidden(std::size_t x, std::size_t y) const {
    return spec_.family == CostSpec::Family::samson && x != y && (*spec_.mu0)[y] == 0.0;
  }

  // Linear description of where c(x,.) is finite; empty when it is finite on the whole simplex.
  std::vector<LinearBound> domain_bounds(std::size_t x) const {
    if (spec_.family == CostSpec::Family::samson) {
      // gamma(x,y) p(y) / mu0(y) <= hi, one cell at a time
      const double hi = spec_.fn.domain().hi;
      if (!std::isfinite(hi)) return {};
      std::vector<LinearBound> out;
      for (std::size_t y = 0; y < space_->size(); ++y) {
        if (y == x || gtab_(x, y) <= 0.0) continue;
        const double cap = hi * (*spec_.mu0)[y] / gtab_(x, y);
        if (cap >= 1.0) continue;
        LinearBound b;
        b.coef.assign(space_->size(), 0.0);
        b.coef[y] = 1.0;
        b.hi = cap;
        out.push_back(std::move(b));
      }
      return out;
    }
    if (spec_.family != CostSpec::Family::barycentric || dim_ != 1) return {};
    const Interval d = spec_.fn.domain();
    if (!std::isfinite(d.lo) && !std::isfinite(d.hi)) return {};
    // h = x - sum_y y p(y)
    LinearBound b;
    const double cx = space_->coord(x)[0];
    b.coef.resize(space_->size());
    for (std::size_t y = 0; y < b.coef.size(); ++y) b.coef[y] = space_->coord(y)[0];
    b.lo = cx - d.hi;
    b.hi = cx - d.lo;
    const auto [cmin, cmax] = std::minmax_element(b.coef.begin(), b.coef.end());
    if (b.lo <= *cmin && b.hi >= *cmax) return {};
    return {std::move(b)};
  }

  // c(x,p) with +inf as IEEE infinity.
  double value(std::size_t x, std::span<const double> p) const {
    const double s = spec_.scale;
    switch (spec_.family) {
      case CostSpec::Family::classical: {
        double v = 0.0;
        for (std::size_t y = 0; y < p.size(); ++y) v += spec_.omega(x, y) * p[y];
        return s * v;
      }
      case CostSpec::Family::marton: {
        double u = 0.0;
        for (std::size_t y = 0; y < p.size(); ++y) u += gtab_(x, y) * p[y];
        return s * spec_.fn.raw(detail::snap_to_domain(spec_.fn, u));
      }
      case CostSpec::Family::barycentric: return s * bary_value(x, p);
      case CostSpec::Family::samson: {
        const auto& m0 = *spec_.mu0;
        double v = 0.0;
        for (std::size_t y = 0; y < p.size(); ++y) {
          if (y == x || p[y] == 0.0) continue;
          if (m0[y] == 0.0) return kInf;
          v += m0[y] * spec_.fn.raw(detail::snap_to_domain(spec_.fn, gtab_(x, y) * p[y] / m0[y]));
        }
        return s * v;
      }
    }
    return kInf;
  }

  // Gradient of p -> c(x,p); blow-ups on the domain boundary are evaluated just inside.
  void gradient(std::size_t x, std::span<const double> p, std::span<double> g) const {
    const double s = spec_.scale;
    const std::size_t n = p.size();
    switch (spec_.family) {
      case CostSpec::Family::classical:
        for (std::size_t y = 0; y < n; ++y) g[y] = s * spec_.omega(x, y);
        return;
      case CostSpec::Family::marton: {
        double u = 0.0;
        for (std::size_t y = 0; y < n; ++y) u += gtab_(x, y) * p[y];
        const double d = detail::safe_derivative(spec_.fn, u);
        for (std::size_t y = 0; y < n; ++y) g[y] = s * d * gtab_(x, y);
        return;
      }
      case CostSpec::Family::barycentric: {
        std::vector<double> h(dim_);
        barycenter_offset(x, p, h);
        std::vector<double> dh(dim_, 0.0);  // gradient of theta(h) or theta(|h|) in h
        if (dim_ == 1) {
          dh[0] = detail::safe_derivative(spec_.fn, h[0]);
        } else {
          const double r = norm_of(norm_, h);
          const double d = detail::safe_derivative(spec_.fn, r);
          norm_gradient(h, r, dh);
          for (double& v : dh) v *= d;
        }
        for (std::size_t y = 0; y < n; ++y) {
          const auto& cy = space_->coord(y);
          double v = 0.0;
          for (std::size_t k = 0; k < dim_; ++k) v -= dh[k] * cy[k];
          g[y] = s * v;
        }
        return;
      }
      case CostSpec::Family::samson: {
        const auto& m0 = *spec_.mu0;
        for (std::size_t y = 0; y < n; ++y) {
          if (y == x || m0[y] == 0.0) {
            g[y] = 0.0;
            continue;
          }
          g[y] = s * gtab_(x, y) * detail::safe_derivative(spec_.fn, gtab_(x, y) * p[y] / m0[y]);
        }
        return;
      }
    }
  }

  // h = x - sum_y y p(y)
  void barycenter_offset(std::size_t x, std::span<const double> p, std::span<double> h) const {
    const auto& cx = space_->coord(x);
    for (std::size_t k = 0; k < dim_; ++k) h[k] = cx[k];
    for (std::size_t y = 0; y < p.size(); ++y) {
      if (p[y] == 0.0) continue;
      const auto& cy = space_->coord(y);
      for (std::size_t k = 0; k < dim_; ++k) h[k] -= cy[k] * p[y];
    }
  }

private:
  double bary_value(std::size_t x, std::span<const double> p) const {
    double hb[4];
    std::vector<double> hv;
    std::span<double> h;
    if (dim_ <= 4) {
      h = std::span<double>(hb, dim_);
    } else {
      hv.resize(dim_);
      h = hv;
    }
    barycenter_offset(x, p, h);
    if (dim_ == 1) return spec_.fn.raw(detail::snap_to_domain(spec_.fn, h[0]));
    return spec_.fn.raw(norm_of(norm_, h));
  }

  void norm_gradient(std::span<const double> h, double r, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (r == 0.0) return;
    switch (norm_) {
      case Norm::euclidean:
        for (std::size_t k = 0; k < h.size(); ++k) out[k] = h[k] / r;
        break;
      case Norm::l1:
        for (std::size_t k = 0; k < h.size(); ++k) out[k] = h[k] > 0 ? 1.0 : (h[k] < 0 ? -1.0 : 0.0);
        break;
      case Norm::linf: {
        std::size_t best = 0;
        for (std::size_t k = 1; k < h.size(); ++k)
          if (std::abs(h[k]) > std::abs(h[best])) best = k;
        out[best] = h[best] > 0 ? 1.0 : -1.0;
        break;
      }
      case Norm::abs:
        out[0] = h[0] > 0 ? 1.0 : -1.0;
        break;
    }
  }

  CostSpec spec_;
  SpacePtr space_;
  Table gtab_;
  std::size_t dim_ = 0;
  Norm norm_ = Norm::euclidean;
};

inline Extended eval_cost(const CostSpec& c, const SpacePtr& space, std::size_t x, std::span<const double> p) {
  if (p.size() != space->size()) throw std::domain_error("eval_cost: p has the wrong length");
  return Extended(CostModel(c, space).value(x, p));
}

} // namespace weakot
