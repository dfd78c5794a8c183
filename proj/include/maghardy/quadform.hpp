#pragma once

// Single-mode quadratic forms, the explicit test-function families and the
// algebraic probes used in the proofs.
//
// For u(r, theta) = e^{i m theta} f(log r) the magnetic form in the
// azimuthal gauge reduces to
//     Q[u] = 2 pi int |f_t|^2 + (m - alpha)^2 |f|^2 dt.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "maghardy/error.hpp"
#include "maghardy/grid.hpp"
#include "maghardy/log_radius.hpp"
#include "maghardy/profiles.hpp"
#include "maghardy/quadrature.hpp"
#include "maghardy/weights.hpp"

namespace maghardy {

using cplx = std::complex<double>;

struct TestFunction {
  std::string kind = "custom";
  long m = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::vector<double> breaks;
  std::function<cplx(double)> value;
  std::function<cplx(double)> deriv;

  /// |t|^alpha for t <= -1, a C^1 quadratic cap on [-1, 0], zero for t > 0,
  /// and a linear ramp to zero over [2 t_cut, t_cut].
  static TestFunction u_alpha(double alpha, double t_cut) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw Error(ErrorCode::ParameterError, "u_alpha needs 0 < alpha < 1/2");
    const double k = -t_cut;
    if (!(k > 1.0)) throw Error(ErrorCode::ParameterError, "u_alpha needs t_cut < -1");
    TestFunction u;
    u.kind = "u_alpha";
    u.m = 0;
    u.t_lo = -2.0 * k;
    u.t_hi = 0.0;
    u.breaks = {-2.0 * k, -k, -1.0, 0.0};
    const double ka = std::pow(k, alpha);
    u.value = [=](double t) -> cplx {
      if (t >= 0.0 || t <= -2.0 * k) return 0.0;
      if (t >= -1.0) return (alpha - 1.0) * t * t + (alpha - 2.0) * t;
      if (t >= -k) return std::pow(-t, alpha);
      return ka * (t + 2.0 * k) / k;
    };
    u.deriv = [=](double t) -> cplx {
      if (t >= 0.0 || t <= -2.0 * k) return 0.0;
      if (t >= -1.0) return 2.0 * (alpha - 1.0) * t + (alpha - 2.0);
      if (t >= -k) return -alpha * std::pow(-t, alpha - 1.0);
      return ka / k;
    };
    return u;
  }

  /// g(t) (log n - t) / log n on [0, log n], g = t^{a} for t >= 1 with
  /// a = alpha_exp / 2 and a C^1 quadratic on [0, 1].
  static TestFunction u_n(long n, double alpha_exp, long m) {
    if (n < 2) throw Error(ErrorCode::ParameterError, "u_n needs n >= 2");
    if (!(alpha_exp < 1.0)) throw Error(ErrorCode::ParameterError, "u_n needs alpha_exp < 1");
    const double L = std::log(double(n));
    const double a = 0.5 * alpha_exp;
    auto g = [a](double t) { return t >= 1.0 ? std::pow(t, a) : (a - 1.0) * t * t + (2.0 - a) * t; };
    auto dg = [a](double t) { return t >= 1.0 ? a * std::pow(t, a - 1.0) : 2.0 * (a - 1.0) * t + (2.0 - a); };
    TestFunction u;
    u.kind = "u_n";
    u.m = m;
    u.t_lo = 0.0;
    u.t_hi = L;
    u.breaks = {0.0, L};
    if (L > 1.0) u.breaks.insert(u.breaks.begin() + 1, 1.0);
    u.value = [=](double t) -> cplx {
      if (t <= 0.0 || t >= L) return 0.0;
      return g(t) * (L - t) / L;
    };
    u.deriv = [=](double t) -> cplx {
      if (t <= 0.0 || t >= L) return 0.0;
      return dg(t) * (L - t) / L - g(t) / L;
    };
    return u;
  }

  /// 1 on [t_lo, t_hi] with C^2 quintic edges of the given width.
  static TestFunction mode_bump(long m, double t_lo, double t_hi, double edge = 0.25) {
    if (!(t_hi >= t_lo) || !(edge > 0.0)) throw Error(ErrorCode::ParameterError, "bad mode bump");
    auto step = [](double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); };
    auto dstep = [](double x) { return 30.0 * x * x * (1.0 - x) * (1.0 - x); };
    TestFunction u;
    u.kind = "mode_bump";
    u.m = m;
    u.t_lo = t_lo - edge;
    u.t_hi = t_hi + edge;
    u.breaks = {t_lo - edge, t_lo, t_hi, t_hi + edge};
    u.value = [=](double t) -> cplx {
      if (t <= t_lo - edge || t >= t_hi + edge) return 0.0;
      if (t < t_lo) return step((t - (t_lo - edge)) / edge);
      if (t > t_hi) return step(((t_hi + edge) - t) / edge);
      return 1.0;
    };
    u.deriv = [=](double t) -> cplx {
      if (t <= t_lo - edge || t >= t_hi + edge) return 0.0;
      if (t < t_lo) return dstep((t - (t_lo - edge)) / edge) / edge;
      if (t > t_hi) return -dstep(((t_hi + edge) - t) / edge) / edge;
      return 0.0;
    };
    return u;
  }

  static TestFunction custom(long m, std::function<cplx(double)> value, std::function<cplx(double)> deriv,
                             double t_lo, double t_hi, std::vector<double> breaks = {}) {
    if (!(t_hi > t_lo)) throw Error(ErrorCode::ParameterError, "custom test function needs t_lo < t_hi");
    TestFunction u;
    u.kind = "custom";
    u.m = m;
    u.t_lo = t_lo;
    u.t_hi = t_hi;
    u.breaks = std::move(breaks);
    u.breaks.push_back(t_lo);
    u.breaks.push_back(t_hi);
    u.value = std::move(value);
    u.deriv = std::move(deriv);
    return u;
  }
};

struct QuadFormValue {
  double radial_part = 0.0;
  double angular_part = 0.0;
  double total = 0.0;
  bool converged = true;
  double rel_change = 0.0;
};

namespace detail {

/// Grid nodes inside the support of u plus all kinks of u and the field.
inline std::vector<double> support_nodes(const TestFunction& u, const Grid& grid,
                                         const std::vector<double>& extra, double t_upper = kInf) {
  if (grid.t_min() > u.t_lo + 1e-12 || grid.t_max() < u.t_hi - 1e-12)
    throw Error(ErrorCode::SupportError, "test function support leaks past the grid");
  const double hi = std::min(u.t_hi, t_upper);
  std::vector<double> x;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.radius(i).t();
    if (t > u.t_lo && t < hi) x.push_back(t);
  }
  for (double b : u.breaks)
    if (b > u.t_lo && b < hi) x.push_back(b);
  for (double b : extra)
    if (b > u.t_lo && b < hi) x.push_back(b);
  x.push_back(u.t_lo);
  if (hi > u.t_lo) x.push_back(hi);
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  return x;
}

}  // namespace detail

/// Q[u] = 2 pi int |u_t|^2 + (m - alpha)^2 |u|^2 dt, trapezoid on the grid
/// nodes with halving until successive estimates agree to 1e-6.
inline QuadFormValue qform(const RadialField& field, const TestFunction& u, const Grid& grid) {
  const auto x = detail::support_nodes(u, grid, kinks(field));
  auto radial = [&](double t) { return std::norm(u.deriv(t)); };
  auto angular = [&](double t) {
    const double d = double(u.m) - flux_t(field, t);
    return d * d * std::norm(u.value(t));
  };
  QuadFormValue q;
  const auto r = quad::trapezoid_richardson(radial, x);
  const auto a = quad::trapezoid_richardson(angular, x);
  q.radial_part = kTwoPi * r.value;
  q.angular_part = kTwoPi * a.value;
  q.total = q.radial_part + q.angular_part;
  q.converged = r.converged && a.converged;
  q.rel_change = std::max(r.rel_change, a.rel_change);
  return q;
}

/// 2 pi int_{t <= t_upper} omega |u|^2 dt, omega = r^2 w.
inline double weighted_norm(const TestFunction& u, const Weight& w, const Grid& grid, double t_upper = kInf) {
  if (t_upper <= u.t_lo) return 0.0;
  const auto x = detail::support_nodes(u, grid, {}, t_upper);
  auto f = [&](double t) {
    const cplx v = u.value(t);
    if (v == cplx(0.0)) return 0.0;
    return scaled_weight_t(w, t) * std::norm(v);
  };
  return kTwoPi * quad::trapezoid_richardson(f, x).value;
}

// ---------------------------------------------------------------------------
// Algebraic probes
// ---------------------------------------------------------------------------

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// f' + f/r - f^2 and 1 / (4 r^2 log^2(r / r0)) for f = -1 / (2 r log(r / r0)).
inline IdentitySides f_identity_sides(double r0, double r) {
  const double L = std::log(r / r0);
  if (L == 0.0) throw Error(ErrorCode::DomainError, "identity undefined at r = r0");
  const double f = -1.0 / (2.0 * r * L);
  const double fp = (L + 1.0) / (2.0 * r * r * L * L);
  IdentitySides s;
  s.lhs = fp + f / r - f * f;
  s.rhs = 1.0 / (4.0 * r * r * L * L);
  return s;
}

/// Max relative residual of the identity over the given radii.
inline double check_f_identity(double r0, const std::vector<double>& radii) {
  double worst = 0.0;
  for (double r : radii) {
    const auto s = f_identity_sides(r0, r);
    worst = std::max(worst, std::fabs(s.lhs - s.rhs) / std::fabs(s.rhs));
  }
  return worst;
}

/// n radii log-spaced on [r_lo, r_hi].
inline std::vector<double> log_spaced_radii(double r_lo, double r_hi, std::size_t n) {
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = std::exp(std::log(r_lo) + (std::log(r_hi) - std::log(r_lo)) * double(i) / double(n - 1));
  return r;
}

/// 1/2 (m^2 + alpha^2) <= (m - alpha)^2 <= 2 (m^2 + alpha^2).
inline bool lambda_bounds_check(long m, double alpha) {
  if (std::fabs(alpha) > 0.25) throw Error(ErrorCode::PreconditionError, "sandwich needs |alpha| <= 1/4");
  const double mm = double(m);
  const double lam2 = (mm - alpha) * (mm - alpha);
  const double s = mm * mm + alpha * alpha;
  return 0.5 * s <= lam2 && lam2 <= 2.0 * s;
}

// ---------------------------------------------------------------------------
// Optimality probes
// ---------------------------------------------------------------------------

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return kNaN;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

struct ProbeZeroRow {
  double k = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
};

struct ProbeZeroResult {
  double b = 0.0;
  double alpha = 0.0;
  std::vector<ProbeZeroRow> rows;
  double growth_exponent = kNaN;  // slope of log(ratio increments) vs log k
  double direct_slope = kNaN;     // slope of log ratio vs log k
  bool diverging_regime = false;  // 2 alpha - b + 1 > 0
};

struct ProbeZeroOptions {
  double h = 0.02;
};

/// Ratios  int_{t <= -1} |t|^{-b} u^2 / Q[u]  for u = u_alpha cut at -k.
inline ProbeZeroResult hardy_probe_at_zero(const RadialField& field, double b, double alpha,
                                           const std::vector<double>& ks, ProbeZeroOptions opt = {}) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error(ErrorCode::ParameterError, "alpha must lie in (0, 1/2)");
  ProbeZeroResult res;
  res.b = b;
  res.alpha = alpha;
  res.diverging_regime = 2.0 * alpha - b + 1.0 > 0.0;
  const Weight w = Weight::log_power(b);
  for (double k : ks) {
    const TestFunction u = TestFunction::u_alpha(alpha, -k);
    const double lo = -2.0 * k - 1.0;
    const std::size_t n = std::size_t(std::ceil((1.0 - lo) / opt.h)) + 1;
    const Grid g = Grid::uniform(lo, 1.0, n);
    ProbeZeroRow row;
    row.k = k;
    row.numerator = weighted_norm(u, w, g, -1.0);
    row.denominator = qform(field, u, g).total;
    row.ratio = row.numerator / row.denominator;
    res.rows.push_back(row);
  }
  std::vector<double> lk;
  std::vector<double> lr;
  for (const auto& r : res.rows) {
    lk.push_back(std::log(r.k));
    lr.push_back(std::log(r.ratio));
  }
  res.direct_slope = ls_slope(lk, lr);
  std::vector<double> xk;
  std::vector<double> ld;
  for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) {
    const double d = std::fabs(res.rows[i + 1].ratio - res.rows[i].ratio);
    if (d <= 0.0) continue;
    xk.push_back(std::log(res.rows[i].k));
    ld.push_back(std::log(d));
  }
  res.growth_exponent = ls_slope(xk, ld);
  return res;
}

struct InfinityRow {
  long n = 0;
  double q = 0.0;
  double weighted = 0.0;
  double ratio = 0.0;
};

struct InfinityProbeResult {
  long m = 0;
  double alpha_exp = 0.0;
  double q_limit = 0.0;
  std::vector<InfinityRow> rows;
};

/// Weight 1 / (r^2 log r log log r) for r >= e^e, continued by a rho0-shaped
/// profile below.
inline Weight bad_weight_w1() {
  return Weight::custom(
      [](const LogRadius& p) {
        const double t = p.t();
        if (t >= kE) return 1.0 / (t * std::log(t));
        if (p.beyond_double()) return 0.0;
        return (1.0 + kE * kE) / (kE * (1.0 + t * t));
      },
      "w1");
}

/// Limit of Q[u_n] as n -> infinity: the form of g itself, with the tail
/// beyond the field support in closed form.
inline double u_n_limit(const RadialField& field, long m, double alpha_exp) {
  const double a = 0.5 * alpha_exp;
  if (!(a < 0.5)) throw Error(ErrorCode::ParameterError, "limit needs alpha_exp < 1");
  const double T = std::max(1.0, support_t_max(field));
  auto g = [a](double t) { return t >= 1.0 ? std::pow(t, a) : (a - 1.0) * t * t + (2.0 - a) * t; };
  auto dg = [a](double t) { return t >= 1.0 ? a * std::pow(t, a - 1.0) : 2.0 * (a - 1.0) * t + (2.0 - a); };
  auto f = [&](double t) {
    const double d = double(m) - flux_t(field, t);
    return dg(t) * dg(t) + d * d * g(t) * g(t);
  };
  std::vector<double> br = kinks(field);
  br.push_back(1.0);
  const double head = quad::integrate_breaks(f, 0.0, T, br);
  const double tail = a * a * std::pow(T, 2.0 * a - 1.0) / (1.0 - 2.0 * a);
  return kTwoPi * (head + tail);
}

struct InfinityProbeOptions {
  double h = 0.01;
};

/// Q[u_n], the bad-weight norm and their ratio along the n ladder; u_n lives
/// in the mode equal to the (integer) total flux.
inline InfinityProbeResult infinity_probe(const RadialField& field, const Weight& bad_weight, double alpha_exp,
                                          const std::vector<long>& ns, InfinityProbeOptions opt = {}) {
  if (!std::isfinite(support_t_max(field)))
    throw Error(ErrorCode::PreconditionError, "field must be compactly supported");
  const double F = total_flux(field);
  const double m_real = std::round(F);
  if (std::fabs(F - m_real) > 1e-9) throw Error(ErrorCode::FluxNotInteger, "total flux " + std::to_string(F));
  InfinityProbeResult res;
  res.m = long(m_real);
  res.alpha_exp = alpha_exp;
  res.q_limit = u_n_limit(field, res.m, alpha_exp);
  for (long n : ns) {
    const TestFunction u = TestFunction::u_n(n, alpha_exp, res.m);
    const double L = u.t_hi;
    const std::size_t npts = std::max<std::size_t>(3, std::size_t(std::ceil((L + 1.0) / opt.h)) + 1);
    const Grid g = Grid::uniform(-0.5, L + 0.5, npts);
    InfinityRow row;
    row.n = n;
    row.q = qform(field, u, g).total;
    row.weighted = weighted_norm(u, bad_weight, g);
    row.ratio = row.weighted / row.q;
    res.rows.push_back(row);
  }
  return res;
}

// ---------------------------------------------------------------------------
// One-dimensional inequality behind the regular-field theorem
// ---------------------------------------------------------------------------

/// Numerator and denominator of
///   [int |f_t|^2 dt + c int_{t<1} |f|^2 e^{2t} dt] / int_{t>1} |f|^2 / t^2 dt.
struct Radial1DParts {
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio() const { return denominator > 0.0 ? numerator / denominator : kInf; }
};

inline Radial1DParts radial_1d_parts(const TestFunction& f, double c = 0.5) {
  std::vector<double> br = f.breaks;
  br.push_back(1.0);
  quad::Tolerance tol;
  tol.rel = 1e-10;
  tol.abs = 1e-16;
  Radial1DParts p;
  const double grad = quad::integrate_breaks([&](double t) { return std::norm(f.deriv(t)); }, f.t_lo, f.t_hi, br, tol);
  double inner = 0.0;
  if (f.t_lo < 1.0)
    inner = quad::integrate_breaks([&](double t) { return std::norm(f.value(t)) * std::exp(2.0 * t); }, f.t_lo,
                                   std::min(1.0, f.t_hi), br, tol);
  p.numerator = grad + c * inner;
  if (f.t_hi > 1.0)
    p.denominator = quad::integrate_breaks([&](double t) { return std::norm(f.value(t)) / (t * t); },
                                           std::max(1.0, f.t_lo), f.t_hi, br, tol);
  return p;
}

struct Radial1DResult {
  double min_ratio = kInf;
  std::size_t argmin = 0;
  std::vector<double> ratios;
};

/// Minimum ratio over samples; samples with zero denominator are skipped.
inline Radial1DResult radial_1d_inequality_check(const std::vector<TestFunction>& samples, double c = 0.5) {
  Radial1DResult res;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = radial_1d_parts(samples[i], c).ratio();
    res.ratios.push_back(r);
    if (r < res.min_ratio) {
      res.min_ratio = r;
      res.argmin = i;
    }
  }
  return res;
}

/// Random sums of one to three C^3 bumps cos^4 on random centres and widths
/// in t (m = 0).
inline std::vector<TestFunction> random_bump_family(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> centre(-2.0, 12.0);
  std::uniform_real_distribution<double> width(0.3, 4.0);
  std::uniform_int_distribution<int> parts(1, 3);
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < count; ++i) {
    struct Part {
      double a, c, w;
    };
    std::vector<Part> ps;
    const int np = parts(rng);
    double lo = kInf;
    double hi = -kInf;
    std::vector<double> br;
    for (int j = 0; j < np; ++j) {
      Part p{amp(rng), centre(rng), width(rng)};
      if (std::fabs(p.a) < 0.05) p.a = 0.05;
      ps.push_back(p);
      lo = std::min(lo, p.c - p.w);
      hi = std::max(hi, p.c + p.w);
      br.push_back(p.c - p.w);
      br.push_back(p.c + p.w);
    }
    auto val = [ps](double t) -> cplx {
      double s = 0.0;
      for (const auto& p : ps) {
        const double x = (t - p.c) / p.w;
        if (std::fabs(x) < 1.0) s += p.a * std::pow(std::cos(0.5 * kPi * x), 4);
      }
      return s;
    };
    auto der = [ps](double t) -> cplx {
      double s = 0.0;
      for (const auto& p : ps) {
        const double x = (t - p.c) / p.w;
        if (std::fabs(x) < 1.0) {
          const double c = std::cos(0.5 * kPi * x);
          s += p.a * (-4.0 * c * c * c * std::sin(0.5 * kPi * x) * 0.5 * kPi / p.w);
        }
      }
      return s;
    };
    out.push_back(TestFunction::custom(0, val, der, lo, hi, br));
  }
  return out;
}

}  // namespace maghardy
