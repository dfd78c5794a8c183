#pragma once

// Radial positions and signed magnitudes that stay finite at radii like
// exp(-exp(1e4)).  Positions are stored as t = log r together with
// log|t|; quantities are stored as (log|x|, sign).

#include <cmath>
#include <limits>
#include <numbers>

#include "maghardy/error.hpp"

namespace maghardy {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kE = std::numbers::e;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Signed value held as log-magnitude; sign 0 means exactly zero.
struct LogValue {
  double log_abs = -kInf;
  int sign = 0;

  static LogValue zero() { return {}; }
  static LogValue of(double x) {
    if (x == 0.0 || std::isnan(x)) return {};
    return {std::log(std::fabs(x)), x > 0 ? 1 : -1};
  }
  static LogValue from_log(double log_abs, int sign = 1) {
    if (sign == 0 || log_abs == -kInf) return {};
    return {log_abs, sign};
  }

  bool is_zero() const { return sign == 0; }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  /// Multiplies by |t|^p given log|t|.
  LogValue times_power(double log_abs_t, double p) const {
    if (sign == 0) return {};
    return {log_abs + p * log_abs_t, sign};
  }
  LogValue scaled(double factor) const {
    if (sign == 0 || factor == 0.0) return {};
    return {log_abs + std::log(std::fabs(factor)), factor > 0 ? sign : -sign};
  }
};

inline LogValue operator*(LogValue a, LogValue b) {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.log_abs + b.log_abs, a.sign * b.sign};
}

inline LogValue operator+(LogValue a, LogValue b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.log_abs < b.log_abs) std::swap(a, b);
  const double ratio = std::exp(b.log_abs - a.log_abs);
  if (a.sign == b.sign) return {a.log_abs + std::log1p(ratio), a.sign};
  if (ratio == 1.0) return {};
  return {a.log_abs + std::log1p(-ratio), a.sign};
}

inline LogValue operator-(LogValue a, LogValue b) {
  b.sign = -b.sign;
  return a + b;
}

/// Position on the radial half-line, r = exp(t).
class LogRadius {
 public:
  LogRadius() = default;

  static LogRadius from_t(double t) {
    if (std::isnan(t)) throw Error(ErrorCode::DomainError, "log radius is NaN");
    LogRadius p;
    p.t_ = t;
    p.log_abs_t_ = std::log(std::fabs(t));
    return p;
  }
  static LogRadius from_r(double r) {
    if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "radius must be positive");
    return from_t(std::log(r));
  }
  /// t = -exp(depth); representable far beyond the double range of t.
  static LogRadius from_depth(double depth) {
    LogRadius p;
    p.log_abs_t_ = depth;
    p.t_ = -std::exp(depth);
    return p;
  }

  double t() const { return t_; }
  double log_abs_t() const { return log_abs_t_; }
  double r() const { return std::exp(t_); }
  /// True when t itself is no longer a finite double.
  bool beyond_double() const { return !std::isfinite(t_); }

  friend bool operator<(const LogRadius& a, const LogRadius& b) {
    if (a.t_ < 0 && b.t_ < 0) return a.log_abs_t_ > b.log_abs_t_;
    return a.t_ < b.t_;
  }

 private:
  double t_ = 0.0;
  double log_abs_t_ = -kInf;
};

/// log(1 + t^2) for any position, exact to rounding for huge |t|.
inline double log1p_t2(const LogRadius& p) {
  if (p.log_abs_t() > 20.0) return 2.0 * p.log_abs_t() + std::log1p(std::exp(-2.0 * p.log_abs_t()));
  return std::log1p(p.t() * p.t());
}

// ---------------------------------------------------------------------------
// Depth coordinate z.  z = t for t >= -e; below, z = -e(1 + log log|t|), so
// z -> -inf reaches t = -exp(exp(w)) with w = -(z + e)/e.  The join at
// t = -e is C^1.
// ---------------------------------------------------------------------------
namespace depth_map {

inline constexpr double kJoin = -kE;

inline LogRadius radius(double z) {
  if (z >= kJoin) return LogRadius::from_t(z);
  const double w = -(z + kE) / kE;
  return LogRadius::from_depth(std::exp(w));
}

inline double z_of(const LogRadius& p) {
  if (p.t() >= kJoin) return p.t();
  return -kE * (1.0 + std::log(p.log_abs_t()));
}

/// z for a double-log depth w = log log|t| (w >= 0).
inline double z_of_w(double w) { return -kE * (1.0 + w); }

/// log |dt/dz|.
inline double log_jacobian(double z) {
  if (z >= kJoin) return 0.0;
  const double w = -(z + kE) / kE;
  const double s = std::exp(w);
  return s + w - 1.0;
}

}  // namespace depth_map

}  // namespace maghardy
