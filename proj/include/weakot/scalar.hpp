#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "extended.hpp"

namespace weakot {

struct Interval {
  double lo = -kInf, hi = kInf;
  bool contains(double u) const { return u >= lo && u <= hi; }
};

namespace detail {

// a*log(b) with 0*log(0) = 0.
inline double xlog(double a, double b) { return a == 0.0 ? 0.0 : a * std::log(b); }

inline double beta_star(double t, double s) {
  if (t == 0.0) return std::expm1(s) - s;
  if (t == 1.0) return std::expm1(-s) + s;
  return (t * std::expm1((1.0 - t) * s) + (1.0 - t) * std::expm1(-t * s)) / (t * (1.0 - t));
}

inline double beta_star_prime(double t, double s) { return std::exp((1.0 - t) * s) - std::exp(-t * s); }

// Root s of (beta_t^*)'(s) = u by bracketed Newton; (beta_t^*)' is increasing with range R for t in (0,1).
// Bracket: for u > 0 the root lies in [0, log1p(u)/(1-t)] since (beta_t^*)'(s) >= e^{(1-t)s} - 1, and
// symmetrically in [-log1p(-u)/t, 0] for u < 0.
inline double beta_star_prime_inverse(double t, double u) {
  if (u == 0.0) return 0.0;
  auto g = [&](double s) { return beta_star_prime(t, s) - u; };
  double lo = u > 0.0 ? 0.0 : -std::log1p(-u) / t;
  double hi = u > 0.0 ? std::log1p(u) / (1.0 - t) : 0.0;
  double s = u > 0.0 ? std::min(u, hi) : std::max(u, lo);
  for (int it = 0; it < 200; ++it) {
    const double gs = g(s);
    if (gs == 0.0) return s;
    if (gs < 0.0) lo = s; else hi = s;
    const double d = (1.0 - t) * std::exp((1.0 - t) * s) + t * std::exp(-t * s);
    double next = s - gs / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-15 * (1.0 + std::abs(s)) || hi - lo <= 1e-15 * (1.0 + std::abs(s))) return next;
    s = next;
  }
  return s;
}

// Cache of (beta_t(u), beta_t'(u)) keyed by exact (t,u); shared reads, exclusive insertion.
class BetaCache {
public:
  std::pair<double, double> get(double t, double u) {
    const Key k{std::bit_cast<std::uint64_t>(t), std::bit_cast<std::uint64_t>(u)};
    {
      std::shared_lock lock(m_);
      auto it = map_.find(k);
      if (it != map_.end()) return it->second;
    }
    const double s = beta_star_prime_inverse(t, u);
    const std::pair<double, double> v{s * u - beta_star(t, s), s};
    std::unique_lock lock(m_);
    if (map_.size() >= kCapacity) map_.clear();
    map_.emplace(k, v);
    return v;
  }

private:
  struct Key {
    std::uint64_t t, u;
    bool operator==(const Key&) const = default;
  };
  struct Hash {
    std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>{}(k.t * 0x9E3779B97F4A7C15ULL ^ k.u); }
  };
  static constexpr std::size_t kCapacity = 1 << 18;
  std::shared_mutex m_;
  std::unordered_map<Key, std::pair<double, double>, Hash> map_;
};

inline BetaCache& beta_cache() {
  static BetaCache c;
  return c;
}

inline double u_rho(double rho, int t, double h) {
  if (t == 0) {
    if (h < -(1.0 - rho) / rho || h > 1.0) return kInf;
    const double a = 1.0 - rho * (1.0 - h);
    return xlog(a / rho, a / (1.0 - rho)) + xlog(1.0 - h, 1.0 - h);
  }
  if (h > 1.0 - rho) return kInf;
  const double a = 1.0 - rho - h;
  return (xlog(a, a / (1.0 - rho)) - xlog(1.0 - h, 1.0 - h)) / rho;
}

inline double u_rho_prime(double rho, int t, double h) {
  if (t == 0) return std::log((1.0 - rho * (1.0 - h)) / (1.0 - rho)) - std::log(1.0 - h);
  return std::log((1.0 - h) * (1.0 - rho) / (1.0 - rho - h)) / rho;
}

inline double w_fn(double h) { return h > 1.0 ? kInf : xlog(1.0 - h, 1.0 - h) + h; }

} // namespace detail

// Scalar convex function from the closed-form toolkit. All values carry an overall positive `scale`.
struct ScalarFn {
  enum class Tag { power, alpha_t, beta_t, beta_t_star, theta_rho_t, theta_rho_t_n, c_lambda_t, w, tabulated };

  Tag tag = Tag::power;
  double r = 2.0;       // power exponent
  double t = 0.0;       // alpha_t, beta_t, beta_t_star; endpoint index for theta and c_lambda
  double rho = 0.5;
  double lambda = 1.0;
  double n = 1.0;
  double scale = 1.0;
  std::vector<double> knots, values;  // tabulated, linear interpolation, +inf outside the knots
  bool convex_flag = true;

  static ScalarFn power(double r, double scale = 1.0) { return make(Tag::power, [&](ScalarFn& f) { f.r = r; f.scale = scale; }); }
  static ScalarFn alpha(double t) { return make(Tag::alpha_t, [&](ScalarFn& f) { f.t = t; }); }
  static ScalarFn beta(double t) { return make(Tag::beta_t, [&](ScalarFn& f) { f.t = t; }); }
  static ScalarFn beta_star(double t) { return make(Tag::beta_t_star, [&](ScalarFn& f) { f.t = t; }); }
  static ScalarFn theta(double rho, int t) {
    return make(Tag::theta_rho_t, [&](ScalarFn& f) { f.rho = rho; f.t = t; });
  }
  static ScalarFn theta_n(double rho, int t, double n) {
    return make(Tag::theta_rho_t_n, [&](ScalarFn& f) { f.rho = rho; f.t = t; f.n = n; });
  }
  static ScalarFn c_lambda(double lambda, int t) {
    return make(Tag::c_lambda_t, [&](ScalarFn& f) { f.lambda = lambda; f.t = t; });
  }
  static ScalarFn w() { return make(Tag::w, [](ScalarFn&) {}); }
  static ScalarFn tabulated(std::vector<double> knots, std::vector<double> values, bool convex = true) {
    return make(Tag::tabulated, [&](ScalarFn& f) {
      f.knots = std::move(knots);
      f.values = std::move(values);
      f.convex_flag = convex;
    });
  }

  ScalarFn scaled(double s) const {
    if (!(s > 0.0)) throw std::domain_error("ScalarFn: scale must be positive");
    ScalarFn f = *this;
    f.scale *= s;
    return f;
  }

  void validate() const {
    auto unit = [](double v, const char* what) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error(std::string("ScalarFn: ") + what + " must be in [0,1]");
    };
    if (!(scale > 0.0)) throw std::domain_error("ScalarFn: scale must be positive");
    switch (tag) {
      case Tag::power:
        if (!(r >= 1.0)) throw std::domain_error("ScalarFn: power exponent must be >= 1");
        break;
      case Tag::alpha_t: case Tag::beta_t: case Tag::beta_t_star: unit(t, "t"); break;
      case Tag::theta_rho_t: case Tag::theta_rho_t_n:
        if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("ScalarFn: rho must be in (0,1)");
        if (t != 0.0 && t != 1.0) throw std::domain_error("ScalarFn: theta endpoint t must be 0 or 1");
        if (!(n >= 1.0)) throw std::domain_error("ScalarFn: n must be >= 1");
        break;
      case Tag::c_lambda_t:
        if (!(lambda > 0.0)) throw std::domain_error("ScalarFn: lambda must be positive");
        if (t != 0.0 && t != 1.0) throw std::domain_error("ScalarFn: c_lambda endpoint t must be 0 or 1");
        break;
      case Tag::w: break;
      case Tag::tabulated:
        if (knots.size() < 2 || knots.size() != values.size()) throw std::domain_error("ScalarFn: bad table");
        for (std::size_t i = 1; i < knots.size(); ++i)
          if (!(knots[i] > knots[i - 1])) throw std::domain_error("ScalarFn: knots must increase");
        break;
    }
  }

  Interval domain() const {
    switch (tag) {
      case Tag::power: case Tag::beta_t_star: return {};
      case Tag::alpha_t: return {0.0, 1.0};
      case Tag::beta_t:
        if (t == 0.0) return {-1.0, kInf};
        if (t == 1.0) return {-kInf, 1.0};
        return {};
      case Tag::theta_rho_t: return t == 0.0 ? Interval{-1.0, 1.0} : Interval{-rho, 1.0 - rho};
      case Tag::theta_rho_t_n: return t == 0.0 ? Interval{-n, n} : Interval{-rho * n, (1.0 - rho) * n};
      case Tag::c_lambda_t: return t == 0.0 ? Interval{} : Interval{-lambda, kInf};
      case Tag::w: return {-kInf, 1.0};
      case Tag::tabulated: return {knots.front(), knots.back()};
    }
    return {};
  }

  // Value with +inf as IEEE infinity.
  double raw(double u) const { return scale * base(u); }
  Extended operator()(double u) const { return Extended(raw(u)); }

  // Derivative inside the domain (right derivative at kinks of tabulated functions, 0 for |u| at 0).
  double derivative(double u) const { return scale * base_derivative(u); }

private:
  template <class F>
  static ScalarFn make(Tag tag, F&& init) {
    ScalarFn f;
    f.tag = tag;
    init(f);
    f.validate();
    return f;
  }

  double base(double u) const {
    using namespace detail;
    switch (tag) {
      case Tag::power: return std::pow(std::abs(u), r);
      case Tag::alpha_t: {
        if (u < 0.0 || u > 1.0) return kInf;
        if (t == 0.0) return xlog(1.0 - u, 1.0 - u) + u;
        if (t == 1.0) return u >= 1.0 ? kInf : -u - std::log1p(-u);
        const double a = (u == 1.0) ? 0.0 : t * (1.0 - u) * std::log1p(-u);
        return (a - (1.0 - t * u) * std::log1p(-t * u)) / (t * (1.0 - t));
      }
      case Tag::beta_t: {
        if (t == 0.0) return u < -1.0 ? kInf : xlog(1.0 + u, 1.0 + u) - u;
        if (t == 1.0) return u > 1.0 ? kInf : xlog(1.0 - u, 1.0 - u) + u;
        if (u == 0.0) return 0.0;
        return beta_cache().get(t, u).first;
      }
      case Tag::beta_t_star: return detail::beta_star(t, u);
      case Tag::theta_rho_t: return theta_base(u);
      case Tag::theta_rho_t_n: return n * theta_base(u / n);
      case Tag::c_lambda_t:
        if (u > 0.0) return 0.0;
        return t == 0.0 ? lambda * w_fn(u / lambda) : lambda * w_fn(-u / lambda);
      case Tag::w: return w_fn(u);
      case Tag::tabulated: {
        if (u < knots.front() || u > knots.back()) return kInf;
        auto it = std::upper_bound(knots.begin(), knots.end(), u);
        std::size_t i = static_cast<std::size_t>(it - knots.begin());
        if (i >= knots.size()) return values.back();
        const double a = knots[i - 1], b = knots[i];
        return values[i - 1] + (values[i] - values[i - 1]) * (u - a) / (b - a);
      }
    }
    return kInf;
  }

  double theta_base(double h) const {
    const int e = static_cast<int>(t);
    return h >= 0.0 ? detail::u_rho(rho, e, h) : detail::u_rho(1.0 - rho, e, -h);
  }
  double theta_base_prime(double h) const {
    const int e = static_cast<int>(t);
    return h >= 0.0 ? detail::u_rho_prime(rho, e, h) : -detail::u_rho_prime(1.0 - rho, e, -h);
  }

  double base_derivative(double u) const {
    using namespace detail;
    switch (tag) {
      case Tag::power:
        if (u == 0.0) return 0.0;
        return r * std::pow(std::abs(u), r - 1.0) * (u > 0.0 ? 1.0 : -1.0);
      case Tag::alpha_t:
        if (t == 0.0) return -std::log1p(-u);
        if (t == 1.0) return u / (1.0 - u);
        return (std::log1p(-t * u) - std::log1p(-u)) / (1.0 - t);
      case Tag::beta_t:
        if (t == 0.0) return std::log1p(u);
        if (t == 1.0) return -std::log1p(-u);
        if (u == 0.0) return 0.0;
        return beta_cache().get(t, u).second;
      case Tag::beta_t_star: return detail::beta_star_prime(t, u);
      case Tag::theta_rho_t: return theta_base_prime(u);
      case Tag::theta_rho_t_n: return theta_base_prime(u / n);
      case Tag::c_lambda_t:
        if (u > 0.0) return 0.0;
        return t == 0.0 ? -std::log1p(-u / lambda) : std::log1p(u / lambda);
      case Tag::w: return -std::log1p(-u);
      case Tag::tabulated: {
        auto it = std::upper_bound(knots.begin(), knots.end(), u);
        std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - knots.begin()), 1, knots.size() - 1);
        return (values[i] - values[i - 1]) / (knots[i] - knots[i - 1]);
      }
    }
    return 0.0;
  }
};

inline Extended eval_scalar(const ScalarFn& f, double u) { return f(u); }

// Minimizes a convex (possibly +inf-valued) function on [a,b] by golden section, endpoints included.
inline std::pair<double, double> minimize_convex_1d(const std::function<double(double)>& f, double a, double b,
                                                    double width = 1e-12) {
  if (b < a) std::swap(a, b);
  const double fa = f(a), fb = f(b);
  if (b - a <= width) return fa <= fb ? std::pair{a, fa} : std::pair{b, fb};
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = a, hi = b;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > width * (1.0 + std::abs(lo) + std::abs(hi)) * 0.5) {
    if (fc <= fd) {
      hi = d; d = c; fd = fc;
      c = hi - g * (hi - lo); fc = f(c);
    } else {
      lo = c; c = d; fc = fd;
      d = lo + g * (hi - lo); fd = f(d);
    }
  }
  std::pair<double, double> best = fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
  if (fa < best.second) best = {a, fa};
  if (fb < best.second) best = {b, fb};
  return best;
}

// sup_u { s*u - f(u) } by bisection on f'(u) = s, widening `bracket` until it straddles the root.
// With `monotone`, u is restricted to [0, inf).
inline double legendre_numeric(const ScalarFn& f, double s, Interval bracket = {-1.0, 1.0}, bool monotone = false) {
  const Interval dom = f.domain();
  double lo = bracket.lo, hi = bracket.hi;
  if (monotone) {
    if (f.raw(0.0) == kInf) throw std::domain_error("legendre_numeric: f(0) must be finite");
    if (f.derivative(0.0) >= s) return -f.raw(0.0);
    lo = std::max(lo, 0.0);
    if (hi <= lo) hi = lo + 1.0;
  }
  auto inside = [&](double u) { return u > dom.lo && u < dom.hi; };
  auto dprime = [&](double u) { return f.derivative(u) - s; };
  // Expand toward the domain boundary; a supremum on the boundary is taken there.
  for (int k = 0; dprime(lo) > 0.0; ++k) {
    if (monotone && lo <= 0.0) return -f.raw(0.0);
    const double next = lo - 2.0 * (hi - lo + 1.0);
    if (!inside(next)) {
      const double edge = dom.lo;
      if (std::isfinite(edge)) return s * edge - f.raw(edge);
    }
    if (k > 200) throw std::runtime_error("legendre_numeric: bracket expansion failed");
    lo = monotone ? std::max(next, 0.0) : next;
  }
  for (int k = 0; dprime(hi) < 0.0; ++k) {
    const double next = hi + 2.0 * (hi - lo + 1.0);
    if (!inside(next)) {
      const double edge = dom.hi;
      if (std::isfinite(edge)) return s * edge - f.raw(edge);
    }
    if (k > 200) throw std::runtime_error("legendre_numeric: bracket expansion failed");
    hi = next;
  }
  for (int it = 0; it < 300 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    const double m = 0.5 * (lo + hi);
    if (dprime(m) < 0.0) lo = m; else hi = m;
  }
  const double u = 0.5 * (lo + hi);
  return s * u - f.raw(u);
}

} // namespace weakot
