#pragma once

#include <cmath>
#include <limits>

namespace hopred::detail {

inline double log1pexp(double x) {
  // log(1 + e^x) without overflow
  if (x > 36.0) return x + std::exp(-x);
  if (x < -36.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

/// log(1 - e^x) for x < 0
inline double log1mexp(double x) {
  if (x >= 0.0) return -std::numeric_limits<double>::infinity();
  if (x > -0.6931471805599453)  // -ln 2
    return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

/// Nonnegative real stored as its natural log; -inf encodes zero.
/// Supports the sums/products of positive terms used by the log-domain
/// fallbacks of the closed-form evaluations.
struct LogDouble {
  double lg = -std::numeric_limits<double>::infinity();

  LogDouble() = default;
  static LogDouble from_log(double l) { return LogDouble{l}; }
  static LogDouble from_value(double v) {
    return LogDouble{v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity()};
  }

  double log() const { return lg; }
  double value() const { return std::exp(lg); }
  bool is_zero() const { return lg == -std::numeric_limits<double>::infinity(); }

 private:
  explicit LogDouble(double l) : lg(l) {}
};

inline LogDouble operator*(LogDouble a, LogDouble b) {
  if (a.is_zero() || b.is_zero()) return LogDouble();
  return LogDouble::from_log(a.lg + b.lg);
}

inline LogDouble operator/(LogDouble a, LogDouble b) {
  if (a.is_zero()) return LogDouble();
  return LogDouble::from_log(a.lg - b.lg);
}

inline LogDouble operator+(LogDouble a, LogDouble b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double hi = a.lg > b.lg ? a.lg : b.lg;
  const double lo = a.lg > b.lg ? b.lg : a.lg;
  return LogDouble::from_log(hi + std::log1p(std::exp(lo - hi)));
}

inline LogDouble& operator*=(LogDouble& a, LogDouble b) { return a = a * b; }
inline LogDouble& operator+=(LogDouble& a, LogDouble b) { return a = a + b; }
inline bool operator<(LogDouble a, LogDouble b) { return a.lg < b.lg; }

}  // namespace hopred::detail
