#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace weakot {

// Real number or +infinity. -infinity and NaN are rejected at construction.
class Extended {
public:
  constexpr Extended() = default;
  Extended(double v) : v_(v) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
      throw std::domain_error("Extended: value must be finite or +inf");
  }

  static Extended infinity() {
    Extended e;
    e.v_ = std::numeric_limits<double>::infinity();
    return e;
  }

  bool is_infinite() const { return std::isinf(v_); }
  bool is_finite() const { return !is_infinite(); }

  // Throws when infinite; use raw() when +inf is acceptable downstream.
  double value() const {
    if (is_infinite()) throw std::domain_error("Extended: value is +inf");
    return v_;
  }
  double raw() const { return v_; }

  friend Extended operator+(Extended a, Extended b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return Extended(a.v_ + b.v_);
  }
  friend Extended operator-(Extended a, double b) {
    if (a.is_infinite()) return infinity();
    return Extended(a.v_ - b);
  }
  friend Extended operator*(double s, Extended a) {
    if (a.is_infinite()) {
      if (s == 0.0) throw std::domain_error("Extended: 0 * inf");
      if (s < 0.0) throw std::domain_error("Extended: negative * inf");
      return infinity();
    }
    return Extended(s * a.v_);
  }
  friend Extended operator*(Extended a, double s) { return s * a; }
  Extended& operator+=(Extended b) { return *this = *this + b; }

  friend bool operator<(Extended a, Extended b) { return a.v_ < b.v_; }
  friend bool operator<=(Extended a, Extended b) { return a.v_ <= b.v_; }
  friend bool operator>(Extended a, Extended b) { return a.v_ > b.v_; }
  friend bool operator>=(Extended a, Extended b) { return a.v_ >= b.v_; }
  friend bool operator==(Extended a, Extended b) { return a.v_ == b.v_; }

  friend std::ostream& operator<<(std::ostream& os, Extended e) {
    if (e.is_infinite()) return os << "+inf";
    return os << e.v_;
  }

private:
  double v_ = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace weakot
