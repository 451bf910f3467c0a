#pragma once

#include <cmath>
#include <compare>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gwi {

/// A non-negative quantity that may be +infinity, with the infinity tagged
/// explicitly instead of carried as a floating-point inf.
class ExtendedReal {
public:
  constexpr ExtendedReal() = default;

  static constexpr ExtendedReal finite(double v) { return ExtendedReal(v, false); }
  static constexpr ExtendedReal infinity() { return ExtendedReal(0.0, true); }

  [[nodiscard]] constexpr bool is_finite() const { return !infinite_; }
  [[nodiscard]] constexpr bool is_infinite() const { return infinite_; }

  /// Throws if the value is +infinity.
  [[nodiscard]] double value() const {
    if (infinite_) {
      throw std::domain_error("ExtendedReal: value() called on +infinity");
    }
    return value_;
  }

  /// Finite value, or HUGE_VAL for +infinity; for comparisons only.
  [[nodiscard]] double as_double() const {
    return infinite_ ? HUGE_VAL : value_;
  }

  [[nodiscard]] std::string to_string() const {
    if (infinite_) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value_);
    return buf;
  }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

  friend std::partial_ordering operator<=>(const ExtendedReal& a,
                                           const ExtendedReal& b) {
    return a.as_double() <=> b.as_double();
  }

  friend ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return finite(a.value_ + b.value_);
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
    return os << x.to_string();
  }

private:
  constexpr ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}

  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace gwi
