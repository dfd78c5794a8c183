#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "maghardy/error.hpp"
#include "maghardy/log_radius.hpp"

namespace maghardy::quad {

struct Tolerance {
  double rel = 1e-10;
  double abs = 0.0;
  unsigned max_depth = 24;
};

/// Adaptive Gauss-Kronrod (31 point) on [a, b]; either end may be infinite.
template <class F>
double integrate(F&& f, double a, double b, Tolerance tol = {}) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, tol);
  if (std::isfinite(a) && std::isfinite(b) && b - a <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)}))
    return f(0.5 * (a + b)) * (b - a);
  using rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double l1 = 0.0;
  double rel = tol.rel;
  if (tol.abs > 0.0) {
    const double coarse = rule::integrate(f, a, b, 0, 0.0, &err, &l1);
    if (std::isfinite(coarse) && err <= tol.abs) return coarse;
    if (l1 > 0.0) rel = std::max(rel, tol.abs / l1);
  }
  const double value = rule::integrate(f, a, b, tol.max_depth, rel, &err, &l1);
  auto where = [&] {
    char buf[160];
    std::snprintf(buf, sizeof buf, "on [%.17g, %.17g] (estimate %.3g, L1 %.3g)", a, b, err, l1);
    return std::string(buf);
  };
  if (!std::isfinite(value)) throw Error(ErrorCode::QuadratureFailure, "non-finite integral " + where());
  if (err > std::max(tol.rel * l1, tol.abs) && err > 1e-300)
    throw Error(ErrorCode::QuadratureFailure, "tolerance not met " + where());
  return value;
}

/// Double-exponential rule for integrands with algebraic endpoint behaviour
/// (square-root turning points); finite [a, b] only.
template <class F>
double integrate_endpoints(F&& f, double a, double b, double rel_tol = 1e-10) {
  if (a == b) return 0.0;
  if (b - a <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)})) return f(0.5 * (a + b)) * (b - a);
  static thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double err = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value = rule.integrate(f, a, b, rel_tol, &err, &l1, &levels);
  if (!std::isfinite(value) || err > std::max(100.0 * rel_tol * l1, 1e-300)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "tanh-sinh failed on [%.17g, %.17g] (estimate %.3g, L1 %.3g)", a, b, err, l1);
    throw Error(ErrorCode::QuadratureFailure, buf);
  }
  return value;
}

/// Sums integrals over the segments cut by sorted breakpoints inside (a, b).
template <class F>
double integrate_breaks(F&& f, double a, double b, std::vector<double> breaks, Tolerance tol = {}) {
  std::vector<double> pts{a};
  std::sort(breaks.begin(), breaks.end());
  for (double x : breaks)
    if (x > a && x < b && x > pts.back()) pts.push_back(x);
  pts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += integrate(f, pts[i], pts[i + 1], tol);
  return total;
}

/// Composite trapezoid on arbitrary nodes.
template <class F>
double trapezoid(F&& f, const std::vector<double>& x) {
  double s = 0.0;
  double prev = x.empty() ? 0.0 : f(x[0]);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double cur = f(x[i]);
    s += 0.5 * (x[i] - x[i - 1]) * (prev + cur);
    prev = cur;
  }
  return s;
}

inline std::vector<double> bisect_nodes(const std::vector<double>& x) {
  std::vector<double> out;
  out.reserve(2 * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) out.push_back(0.5 * (x[i - 1] + x[i]));
    out.push_back(x[i]);
  }
  return out;
}

struct RichardsonResult {
  double value = 0.0;
  double rel_change = 0.0;
  int halvings = 0;
  bool converged = false;
};

/// Trapezoid with repeated halving until successive estimates agree to rel_tol;
/// returns the extrapolated value.
template <class F>
RichardsonResult trapezoid_richardson(F&& f, std::vector<double> x, double rel_tol = 1e-6,
                                      int max_halvings = 8) {
  RichardsonResult res;
  double coarse = trapezoid(f, x);
  for (int k = 1; k <= max_halvings; ++k) {
    x = bisect_nodes(x);
    const double fine = trapezoid(f, x);
    const double extrap = fine + (fine - coarse) / 3.0;
    const double scale = std::max(std::fabs(extrap), 1e-300);
    res.value = extrap;
    res.rel_change = std::fabs(fine - coarse) / scale;
    res.halvings = k;
    if (res.rel_change < rel_tol) {
      res.converged = true;
      return res;
    }
    coarse = fine;
  }
  return res;
}

/// Gauss-Legendre rule on [-1, 1] (nodes and weights), for fixed-order panel sums.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    rule.x[i] = z;
    rule.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

}  // namespace maghardy::quad
