#pragma once

// Hardy weights, level sets of V / rho0 and the [V]_a functional.
//
// A weight w(r) is carried in scaled form omega(t) = r^2 w(r), which is what
// multiplies |u|^2 dt in the log coordinate.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "maghardy/error.hpp"
#include "maghardy/log_radius.hpp"
#include "maghardy/profiles.hpp"
#include "maghardy/quadrature.hpp"

namespace maghardy {

struct Rho0Weight {};
/// 1 / (r^2 |log r|^b).
struct LogPowerWeight {
  double b = 2.0;
};
/// rho0 + Phi^2 below eta, rho0 above.
struct SingularRhoWeight {
  RadialField field;
  LogRadius eta;  // position of eta (t = log eta)
};
/// 1 / (r^2 (1 + log_+^2(r0 / r))), constant fixed to 1.
struct CFKPWeight {
  double r0 = kE;
};
/// dist(mu, Z)^2 / r^2.
struct AharonovBohmWeight {
  double mu = 0.5;
};
struct CustomWeight {
  std::function<double(const LogRadius&)> scaled;  // r^2 w(r)
  std::string label = "custom";
};

class Weight {
 public:
  using Kind =
      std::variant<Rho0Weight, LogPowerWeight, SingularRhoWeight, CFKPWeight, AharonovBohmWeight, CustomWeight>;

  Weight() = default;
  explicit Weight(Kind k) : kind_(std::move(k)) {}

  static Weight rho0() { return Weight(Rho0Weight{}); }
  static Weight log_power(double b) { return Weight(LogPowerWeight{b}); }
  static Weight singular_rho(RadialField field, double eta) {
    if (!(eta > 0.0)) throw Error(ErrorCode::ParameterError, "eta must be positive");
    return Weight(SingularRhoWeight{std::move(field), LogRadius::from_r(eta)});
  }
  static Weight singular_rho_at(RadialField field, LogRadius eta) {
    return Weight(SingularRhoWeight{std::move(field), eta});
  }
  static Weight cfkp(double r0) {
    if (!(r0 > 1.0)) throw Error(ErrorCode::ParameterError, "cfkp needs r0 > 1");
    return Weight(CFKPWeight{r0});
  }
  static Weight aharonov_bohm(double mu) {
    const double d = std::fabs(mu - std::round(mu));
    if (d == 0.0) throw Error(ErrorCode::ParameterError, "integer Aharonov-Bohm flux gives a zero weight");
    return Weight(AharonovBohmWeight{mu});
  }
  static Weight custom(std::function<double(const LogRadius&)> scaled, std::string label = "custom") {
    return Weight(CustomWeight{std::move(scaled), std::move(label)});
  }

  const Kind& kind() const { return kind_; }
  std::string name() const {
    struct V {
      std::string operator()(const Rho0Weight&) const { return "rho0"; }
      std::string operator()(const LogPowerWeight&) const { return "logpower"; }
      std::string operator()(const SingularRhoWeight&) const { return "singular_rho"; }
      std::string operator()(const CFKPWeight&) const { return "cfkp"; }
      std::string operator()(const AharonovBohmWeight&) const { return "aharonov_bohm"; }
      std::string operator()(const CustomWeight& c) const { return c.label; }
    };
    return std::visit(V{}, kind_);
  }

 private:
  Kind kind_ = Rho0Weight{};
};

/// r^2 w(r) in signed-log form.
inline LogValue scaled_weight(const Weight& w, const LogRadius& p) {
  struct V {
    const LogRadius& p;
    LogValue operator()(const Rho0Weight&) const { return LogValue::from_log(-log1p_t2(p)); }
    LogValue operator()(const LogPowerWeight& lp) const {
      if (p.t() == 0.0) throw Error(ErrorCode::DomainError, "log-power weight undefined at r = 1");
      return LogValue::from_log(-lp.b * p.log_abs_t());
    }
    LogValue operator()(const SingularRhoWeight& s) const {
      LogValue out = LogValue::from_log(-log1p_t2(p));
      if (!(s.eta < p)) {
        const double a = flux(s.field, p);
        out = out + LogValue::of(a * a);
      }
      return out;
    }
    LogValue operator()(const CFKPWeight& c) const {
      const double lr0 = std::log(c.r0);
      if (p.t() >= lr0) return LogValue::from_log(0.0);
      if (p.beyond_double() || p.log_abs_t() > 30.0) {
        // log(|t| + log r0) ~ log|t|
        const double ld = p.log_abs_t() + std::log1p(lr0 * std::exp(-p.log_abs_t()));
        return LogValue::from_log(-2.0 * ld);
      }
      const double d = lr0 - p.t();
      return LogValue::from_log(-std::log1p(d * d));
    }
    LogValue operator()(const AharonovBohmWeight& ab) const {
      const double d = std::fabs(ab.mu - std::round(ab.mu));
      return LogValue::of(d * d);
    }
    LogValue operator()(const CustomWeight& c) const {
      const double v = c.scaled(p);
      if (!(v >= 0.0)) throw Error(ErrorCode::DomainError, "custom weight negative or NaN");
      return LogValue::of(v);
    }
  };
  return std::visit(V{p}, w.kind());
}

inline double scaled_weight_t(const Weight& w, double t) {
  return scaled_weight(w, LogRadius::from_t(t)).value();
}

/// w(r) itself.
inline double eval_weight(const Weight& w, const LogRadius& p) {
  const LogValue v = scaled_weight(w, p);
  if (v.is_zero()) return 0.0;
  return std::exp(v.log_abs - 2.0 * p.t());
}

inline double eval_weight_r(const Weight& w, double r) { return eval_weight(w, LogRadius::from_r(r)); }

/// Position of eta for the singular weight: the largest t such that
/// |alpha| <= 1/4 on (-inf, t + log 2].
inline LogRadius select_eta(const RadialField& field) {
  const double z_lo = depth_map::z_of_w(40.0);
  double t_top = support_t_max(field);
  if (!std::isfinite(t_top)) t_top = 50.0;
  const double z_hi = std::max(t_top, 0.0) + 1.0;
  auto bad = [&](double z) { return std::fabs(flux(field, depth_map::radius(z))) > 0.25; };
  if (bad(z_lo)) throw Error(ErrorCode::DomainError, "|alpha| exceeds 1/4 at every resolvable depth");
  const int n = 4000;
  double prev = z_lo;
  for (int i = 1; i <= n; ++i) {
    const double z = z_lo + (z_hi - z_lo) * i / n;
    if (bad(z)) {
      double a = prev;
      double b = z;
      for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::fabs(a)); ++it) {
        const double m = 0.5 * (a + b);
        (bad(m) ? b : a) = m;
      }
      const LogRadius tc = depth_map::radius(a);
      if (!tc.beyond_double() && tc.log_abs_t() < 30.0) return LogRadius::from_t(tc.t() - std::log(2.0));
      return LogRadius::from_depth(tc.log_abs_t() + std::log1p(std::log(2.0) * std::exp(-tc.log_abs_t())));
    }
    prev = z;
  }
  return LogRadius::from_t(kInf);
}

// ---------------------------------------------------------------------------
// Level sets of V / rho0
// ---------------------------------------------------------------------------

/// Antiderivative of (1 + |t|) / (1 + t^2); the [V]_a measure of [t1, t2] is
/// G(t2) - G(t1).
inline double vnorm_antiderivative(const LogRadius& p) {
  const double at = std::atan(p.t());
  const double half_log = 0.5 * log1p_t2(p);
  return p.t() < 0.0 ? at - half_log : at + half_log;
}

struct LevelInterval {
  double z_lo = 0.0;
  double z_hi = 0.0;
  LogRadius lo;
  LogRadius hi;
  double measure() const { return vnorm_antiderivative(hi) - vnorm_antiderivative(lo); }
};

struct LevelSet {
  double threshold = 0.0;
  std::vector<LevelInterval> intervals;
  bool scan_warning = false;
};

struct ScanOptions {
  double cap_depth = 16.0;  // domain is log log|t| <= cap_depth
  double t_hi = kNaN;       // upper end; default from the potential support
  int points = 4096;
  double z_tol = 1e-9;
};

/// Cached scan of log(V / rho0) in the depth coordinate over the capped
/// domain; answers level-set queries for any threshold.
class RatioScan {
 public:
  RatioScan(Potential V, ScanOptions opt) : V_(std::move(V)), opt_(opt) {
    z_lo_ = depth_map::z_of_w(opt_.cap_depth);
    const double tmin = support_t_min(V_);
    if (std::isfinite(tmin)) z_lo_ = std::max(z_lo_, depth_map::z_of(LogRadius::from_t(tmin)));
    double thi = opt_.t_hi;
    if (std::isnan(thi)) {
      thi = support_t_max(V_);
      if (!std::isfinite(thi)) thi = thi > 0 ? 50.0 : z_lo_ + 1.0;
    }
    z_hi_ = depth_map::z_of(LogRadius::from_t(thi));
    if (!(z_hi_ > z_lo_)) z_hi_ = z_lo_ + 1.0;
    const int n = 2 * opt_.points;  // odd entries are cell midpoints
    z_.resize(n + 1);
    f_.resize(n + 1);
    max_log_ = -kInf;
    for (int i = 0; i <= n; ++i) {
      z_[i] = z_lo_ + (z_hi_ - z_lo_) * i / n;
      f_[i] = log_ratio(z_[i]);
      max_log_ = std::max(max_log_, f_[i]);
    }
  }

  /// log(V / rho0) = log(r^2 V (1 + t^2)); -inf where V <= 0.
  double log_ratio(double z) const {
    const LogRadius p = depth_map::radius(z);
    if (p.log_abs_t() > 0.0) {
      // v (1 + t^2) = v t^2 (1 + t^-2)
      const LogValue vt2 = potential_times_t2(V_, p);
      if (vt2.sign <= 0) return -kInf;
      return vt2.log_abs + std::log1p(std::exp(-2.0 * p.log_abs_t()));
    }
    const LogValue v = scaled_potential(V_, p);
    if (v.sign <= 0) return -kInf;
    return v.log_abs + log1p_t2(p);
  }

  double max_log_ratio() const { return max_log_; }
  double z_lo() const { return z_lo_; }
  double z_hi() const { return z_hi_; }

  LevelSet level_set(double tau) const {
    if (!(tau > 0.0)) throw Error(ErrorCode::ParameterError, "level-set threshold must be positive");
    const double lt = std::log(tau);
    LevelSet out;
    out.threshold = tau;
    const std::size_t n = z_.size() - 1;
    bool inside = f_[0] > lt;
    double start = z_lo_;
    auto crossing = [&](double a, double b) {
      // a on the side of f_(a), bisect on sign of log_ratio - lt
      const bool sa = log_ratio(a) > lt;
      for (int it = 0; it < 200 && b - a > opt_.z_tol; ++it) {
        const double m = 0.5 * (a + b);
        ((log_ratio(m) > lt) == sa ? a : b) = m;
      }
      return 0.5 * (a + b);
    };
    auto close = [&](double end) {
      LevelInterval iv;
      iv.z_lo = start;
      iv.z_hi = end;
      iv.lo = depth_map::radius(start);
      iv.hi = depth_map::radius(end);
      if (end > start) out.intervals.push_back(iv);
    };
    for (std::size_t i = 0; i + 2 <= n; i += 2) {
      const bool s0 = f_[i] > lt;
      const bool sm = f_[i + 1] > lt;
      const bool s1 = f_[i + 2] > lt;
      if (s0 == s1 && sm != s0) out.scan_warning = true;
      // walk the two half cells so that a midpoint excursion is kept
      const double zs[3] = {z_[i], z_[i + 1], z_[i + 2]};
      const bool ss[3] = {s0, sm, s1};
      for (int h = 0; h < 2; ++h) {
        if (ss[h] == ss[h + 1]) continue;
        const double zc = crossing(zs[h], zs[h + 1]);
        if (inside) {
          close(zc);
          inside = false;
        } else {
          start = zc;
          inside = true;
        }
      }
    }
    if (inside) close(z_hi_);
    return out;
  }

  /// Measure of the level set for threshold tau.
  double measure(double tau) const {
    double m = 0.0;
    for (const auto& iv : level_set(tau).intervals) m += iv.measure();
    return m;
  }

 private:
  Potential V_;
  ScanOptions opt_;
  double z_lo_ = 0.0;
  double z_hi_ = 0.0;
  double max_log_ = -kInf;
  std::vector<double> z_;
  std::vector<double> f_;
};

inline LevelSet level_set(const Potential& V, double tau, ScanOptions opt = {}) {
  return RatioScan(V, opt).level_set(tau);
}

// ---------------------------------------------------------------------------
// [V]_a
// ---------------------------------------------------------------------------

struct VNormOptions {
  std::vector<double> caps{16.0, 32.0};
  int tau_points = 512;
  double tau_lo_factor = 1e-8;
  double tau_hi_factor = 1e8;
  int scan_points = 4096;
  double t_hi = kNaN;
  double saturation_tol = 0.01;
};

struct VNormResult {
  double a = 0.0;
  double value = 0.0;        // [V]_a
  double value_pow_a = 0.0;  // sup_tau tau^a I(tau)
  double arg_tau = 0.0;
  bool saturated = true;
  bool scan_warning = false;
  std::vector<double> cap_sequence;
  std::vector<double> cap_values;  // value_pow_a per cap
  std::vector<std::pair<double, double>> table;  // (tau, tau^a I) on the grid, last cap
  std::vector<std::string> warnings;
};

namespace detail {

struct SupResult {
  double sup = 0.0;
  double arg = 0.0;
  bool warn = false;
  std::vector<std::pair<double, double>> table;
};

inline SupResult vnorm_sup(const RatioScan& scan, double a, const VNormOptions& opt) {
  SupResult res;
  if (!std::isfinite(scan.max_log_ratio())) return res;
  const double lmax = scan.max_log_ratio();
  const double llo = lmax + std::log(opt.tau_lo_factor);
  const double lhi = lmax + std::log(opt.tau_hi_factor);
  const int n = opt.tau_points;
  auto objective = [&](double ltau) {
    const LevelSet ls = scan.level_set(std::exp(ltau));
    res.warn = res.warn || ls.scan_warning;
    double m = 0.0;
    for (const auto& iv : ls.intervals) m += iv.measure();
    return m > 0.0 ? std::exp(a * ltau) * m : 0.0;
  };
  std::vector<double> lt(n);
  std::vector<double> val(n);
  int best = 0;
  for (int i = 0; i < n; ++i) {
    lt[i] = llo + (lhi - llo) * i / (n - 1);
    val[i] = objective(lt[i]);
    res.table.emplace_back(std::exp(lt[i]), val[i]);
    if (val[i] > val[best]) best = i;
  }
  res.sup = val[best];
  res.arg = std::exp(lt[best]);
  if (res.sup <= 0.0) return res;
  // golden-section on the bracketing cells
  double lo = lt[std::max(best - 1, 0)];
  double hi = lt[std::min(best + 1, n - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = objective(x1);
    }
  }
  const double xm = f1 > f2 ? x1 : x2;
  const double fm = std::max(f1, f2);
  if (fm > res.sup) {
    res.sup = fm;
    res.arg = std::exp(xm);
  }
  return res;
}

}  // namespace detail

/// [V]_a on the capped domain log log|t| <= cap, for each cap in the
/// sequence; saturated when the last cap doubling changes the sup by < 1%.
inline VNormResult v_norm_a(const Potential& V, double a, VNormOptions opt = {}) {
  if (!(a > 1.0)) throw Error(ErrorCode::ParameterError, "[V]_a needs a > 1");
  if (opt.caps.empty()) throw Error(ErrorCode::ParameterError, "empty cap sequence");
  VNormResult out;
  out.a = a;
  out.cap_sequence = opt.caps;
  if (V.is_zero()) {
    out.cap_values.assign(opt.caps.size(), 0.0);
    return out;
  }
  detail::SupResult last;
  for (double cap : opt.caps) {
    ScanOptions so;
    so.cap_depth = cap;
    so.points = opt.scan_points;
    so.t_hi = opt.t_hi;
    const RatioScan scan(V, so);
    last = detail::vnorm_sup(scan, a, opt);
    out.cap_values.push_back(last.sup);
    out.scan_warning = out.scan_warning || last.warn;
  }
  out.value_pow_a = last.sup;
  out.value = std::pow(last.sup, 1.0 / a);
  out.arg_tau = last.arg;
  out.table = std::move(last.table);
  if (out.cap_values.size() >= 2) {
    const double prev = out.cap_values[out.cap_values.size() - 2];
    const double cur = out.cap_values.back();
    const double scale = std::max(std::fabs(prev), 1e-300);
    out.saturated = std::fabs(cur - prev) / scale < opt.saturation_tol;
  }
  if (out.scan_warning) out.warnings.emplace_back("ScanResolutionWarning");
  if (!out.saturated) out.warnings.emplace_back("Unbounded");
  return out;
}

// ---------------------------------------------------------------------------
// Log moments
// ---------------------------------------------------------------------------

/// 2 pi * integral over 1 < r < R of w(r) (log r)^alpha r dr, given log R.
inline double log_moment_logR(const Weight& w, double alpha, double logR) {
  if (!(logR > 0.0)) throw Error(ErrorCode::ParameterError, "log_moment needs R > 1");
  auto near = [&](double t) { return scaled_weight_t(w, t) * std::pow(t, alpha); };
  auto far = [&](double y) {
    const double t = std::exp(y);
    return scaled_weight_t(w, t) * std::exp((alpha + 1.0) * y);
  };
  quad::Tolerance tol;
  tol.rel = 1e-10;
  double total = quad::integrate(near, 0.0, std::min(1.0, logR), tol);
  if (logR > 1.0) total += quad::integrate(far, 0.0, std::log(logR), tol);
  return kTwoPi * total;
}

inline double log_moment(const Weight& w, double alpha, double R) {
  if (!(R > 1.0)) throw Error(ErrorCode::ParameterError, "log_moment needs R > 1");
  return log_moment_logR(w, alpha, std::log(R));
}

}  // namespace maghardy
