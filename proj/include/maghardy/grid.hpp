#pragma once

// One-dimensional grids for the per-mode radial problems.
//
// Nodes live in a computational coordinate xi. Linear grids use xi = t. Depth
// grids use xi = t for t >= -1 and t = -exp(-1 - xi) below, so that log|t|
// = -1 - xi is linear in xi and radii like exp(-exp(1e6)) cost a handful of
// nodes. The two charts meet with matching slope at xi = -1, which is always a
// node of a depth grid.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "maghardy/error.hpp"
#include "maghardy/log_radius.hpp"

namespace maghardy {

enum class Coordinate { Linear, LogDepth };

inline const char* to_string(Coordinate c) { return c == Coordinate::Linear ? "linear" : "log_depth"; }

class Grid {
 public:
  static constexpr double kJunction = -1.0;

  Grid() = default;

  static Grid from_nodes(std::vector<double> xi, Coordinate coord = Coordinate::Linear) {
    if (xi.size() < 3) throw Error(ErrorCode::ParameterError, "grid needs at least 3 nodes");
    for (std::size_t i = 1; i < xi.size(); ++i)
      if (!(xi[i] > xi[i - 1])) throw Error(ErrorCode::ParameterError, "grid nodes must increase strictly");
    Grid g;
    g.xi_ = std::move(xi);
    g.coord_ = coord;
    if (coord == Coordinate::LogDepth && g.xi_.front() < kJunction && g.xi_.back() > kJunction &&
        !std::binary_search(g.xi_.begin(), g.xi_.end(), kJunction))
      throw Error(ErrorCode::ParameterError, "depth grid must contain the junction node xi = -1");
    return g;
  }

  /// n equally spaced nodes on [t_min, t_max].
  static Grid uniform(double t_min, double t_max, std::size_t n) {
    if (!(t_max > t_min) || n < 3) throw Error(ErrorCode::ParameterError, "bad uniform grid");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = t_min + (t_max - t_min) * double(i) / double(n - 1);
    x.back() = t_max;
    return from_nodes(std::move(x));
  }

  /// Linear-coordinate grid on [t_lo, t_hi] (both negative) with |t| in
  /// geometric progression.
  static Grid geometric(double t_lo, double t_hi, std::size_t n) {
    if (!(t_lo < t_hi && t_hi < 0.0) || n < 3)
      throw Error(ErrorCode::ParameterError, "geometric grid needs t_lo < t_hi < 0");
    std::vector<double> x(n);
    const double a = std::log(-t_lo);
    const double b = std::log(-t_hi);
    for (std::size_t i = 0; i < n; ++i) x[i] = -std::exp(a + (b - a) * double(i) / double(n - 1));
    x.front() = t_lo;
    x.back() = t_hi;
    return from_nodes(std::move(x));
  }

  /// Depth grid reaching log|t| = s_max below and t = t_max above, with
  /// n_deep cells uniform in log|t| and n_lin cells uniform in t.
  static Grid log_depth(double s_max, double t_max, std::size_t n_deep, std::size_t n_lin) {
    if (!(s_max > 0.0) || !(t_max > kJunction) || n_deep < 1 || n_lin < 1)
      throw Error(ErrorCode::ParameterError, "bad depth grid");
    std::vector<double> x;
    const double xi_min = kJunction - s_max;
    for (std::size_t i = 0; i < n_deep; ++i) x.push_back(xi_min + (kJunction - xi_min) * double(i) / double(n_deep));
    for (std::size_t i = 0; i <= n_lin; ++i) x.push_back(kJunction + (t_max - kJunction) * double(i) / double(n_lin));
    x.back() = t_max;
    return from_nodes(std::move(x), Coordinate::LogDepth);
  }

  /// Midpoint insertion; the old nodes are kept so trial spaces nest.
  Grid refined() const {
    std::vector<double> x;
    x.reserve(2 * xi_.size());
    for (std::size_t i = 0; i < xi_.size(); ++i) {
      if (i > 0) x.push_back(0.5 * (xi_[i - 1] + xi_[i]));
      x.push_back(xi_[i]);
    }
    return from_nodes(std::move(x), coord_);
  }

  std::size_t size() const { return xi_.size(); }
  const std::vector<double>& nodes() const { return xi_; }
  double xi(std::size_t i) const { return xi_[i]; }
  Coordinate coordinate() const { return coord_; }
  double step(std::size_t i) const { return xi_[i + 1] - xi_[i]; }
  double max_step() const {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < xi_.size(); ++i) h = std::max(h, step(i));
    return h;
  }

  /// Position for a coordinate value.
  LogRadius radius_at(double xi) const {
    if (coord_ == Coordinate::Linear || xi >= kJunction) return LogRadius::from_t(xi);
    return LogRadius::from_depth(kJunction - xi);
  }
  LogRadius radius(std::size_t i) const { return radius_at(xi_[i]); }
  std::vector<LogRadius> radii() const {
    std::vector<LogRadius> out;
    out.reserve(xi_.size());
    for (double x : xi_) out.push_back(radius_at(x));
    return out;
  }

  /// log |dt/dxi|.
  double log_jacobian(double xi) const {
    if (coord_ == Coordinate::Linear || xi >= kJunction) return 0.0;
    return kJunction - xi;
  }
  /// Extra potential from the Liouville transform of the depth chart.
  double liouville_shift(double xi) const {
    return (coord_ == Coordinate::LogDepth && xi < kJunction) ? 0.25 : 0.0;
  }
  /// Index of the junction node, or -1.
  long junction_index() const {
    if (coord_ != Coordinate::LogDepth) return -1;
    auto it = std::lower_bound(xi_.begin(), xi_.end(), kJunction);
    if (it == xi_.end() || *it != kJunction) return -1;
    const long idx = long(it - xi_.begin());
    if (idx == 0 || idx + 1 == long(xi_.size())) return -1;
    return idx;
  }

  /// Coordinate value of a position.
  double xi_of(const LogRadius& p) const {
    if (coord_ == Coordinate::Linear || p.t() >= kJunction) return p.t();
    return kJunction - p.log_abs_t();
  }

  double t_min() const { return radius(0).t(); }
  double t_max() const { return radius(xi_.size() - 1).t(); }
  std::string describe() const {
    return std::string(to_string(coord_)) + " N=" + std::to_string(xi_.size()) +
           " xi=[" + std::to_string(xi_.front()) + ", " + std::to_string(xi_.back()) + "]";
  }

 private:
  std::vector<double> xi_;
  Coordinate coord_ = Coordinate::Linear;
};

}  // namespace maghardy
