#pragma once

// Per-mode radial problems.
//
// Mode m of the magnetic form, in t = log r, is
//     q_m[u] = int |u_t|^2 + ((m - alpha)^2 - v) |u|^2 dt,   v = r^2 V.
// On a depth grid the chart t = -exp(-1 - xi) is used below xi = -1 together
// with the Liouville substitution u = sqrt(J) phi, J = |dt/dxi| = |t|, which
// turns the form into
//     int |phi'|^2 + c |phi|^2 dxi - |phi(-1)|^2 / 2,
//     c = J^2 ((m - alpha)^2 - v) + 1/4 (deep part only).
// The transformation is exact, so negative-eigenvalue counts do not depend on
// the chart. Weighted masses w |u|^2 r dr become J^2 omega |phi|^2 dxi.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "maghardy/error.hpp"
#include "maghardy/grid.hpp"
#include "maghardy/log_radius.hpp"
#include "maghardy/parallel.hpp"
#include "maghardy/profiles.hpp"
#include "maghardy/quadrature.hpp"
#include "maghardy/weights.hpp"

namespace maghardy {

inline constexpr double kCoefficientCap = 1e250;

inline double capped_exp(double x) { return x > 575.0 ? kCoefficientCap : std::exp(x); }

/// Mode-independent pieces of the coefficient at one point.
struct CoefficientParts {
  double alpha = 0.0;
  double log_j = 0.0;  // log J
  double well = 0.0;   // J^2 v
  double shift = 0.0;  // Liouville 1/4
};

/// c = J^2 (m - alpha)^2 + shift - J^2 v.
inline double mode_coefficient(const CoefficientParts& p, long m) {
  const double d = double(m) - p.alpha;
  const double barrier = d == 0.0 ? 0.0 : capped_exp(2.0 * p.log_j + 2.0 * std::log(std::fabs(d)));
  return barrier + p.shift - p.well;
}

/// J^2 v at a position, given the chart.
inline double well_term(const Potential& V, const LogRadius& p, bool deep) {
  if (deep) {
    const LogValue v = potential_times_t2(V, p);
    return v.is_zero() ? 0.0 : v.sign * capped_exp(v.log_abs);
  }
  return scaled_potential(V, p).value();
}

inline CoefficientParts coefficient_parts(const Potential& V, const Grid& g, double xi, double alpha) {
  CoefficientParts c;
  const LogRadius p = g.radius_at(xi);
  c.alpha = alpha;
  c.log_j = g.log_jacobian(xi);
  c.shift = g.liouville_shift(xi);
  c.well = well_term(V, p, c.log_j != 0.0 || c.shift != 0.0);
  return c;
}

inline CoefficientParts coefficient_parts_at(const RadialField& field, const Potential& V, const Grid& g,
                                             double xi) {
  return coefficient_parts(V, g, xi, flux(field, g.radius_at(xi)));
}

inline std::vector<CoefficientParts> node_parts(const RadialField& field, const Potential& V, const Grid& g) {
  const auto alpha = flux_on_nodes(field, g.radii());
  std::vector<CoefficientParts> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = coefficient_parts(V, g, g.xi(i), alpha[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference mode operator and inertia
// ---------------------------------------------------------------------------

/// Symmetric tridiagonal matrix on the interior nodes (Dirichlet ends).
struct ModeOperator {
  long m = 0;
  std::vector<double> diag;
  std::vector<double> offdiag;
  std::string grid_meta;
};

inline ModeOperator assemble_from_parts(const std::vector<CoefficientParts>& parts, const Grid& g, long m) {
  const std::size_t n = g.size();
  ModeOperator op;
  op.m = m;
  op.grid_meta = g.describe();
  op.diag.resize(n - 2);
  op.offdiag.resize(n > 3 ? n - 3 : 0);
  const long junction = g.junction_index();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = g.step(i - 1);
    const double hr = g.step(i);
    const double lump = 0.5 * (hl + hr);
    double d = 1.0 / hl + 1.0 / hr + lump * mode_coefficient(parts[i], m);
    if (long(i) == junction) d -= 0.5;
    op.diag[i - 1] = d;
    if (i + 2 < n) op.offdiag[i - 1] = -1.0 / hr;
  }
  return op;
}

inline ModeOperator assemble_mode(const RadialField& field, const Potential& V, long m, const Grid& g) {
  return assemble_from_parts(node_parts(field, V, g), g, m);
}

struct InertiaCount {
  long negatives = 0;
  long zero_pivots = 0;
  bool zero_pivot() const { return zero_pivots > 0; }
};

/// Inertia of (A - mu M) for symmetric tridiagonal A and optional tridiagonal
/// M, by the LDL^T pivot recurrence. Exact zero pivots are replaced by
/// eps * max|diag| and counted.
inline InertiaCount tridiagonal_inertia(const std::vector<double>& a, const std::vector<double>& b,
                                        double mu = 0.0, const std::vector<double>* ma = nullptr,
                                        const std::vector<double>* mb = nullptr) {
  InertiaCount res;
  const std::size_t n = a.size();
  if (n == 0) return res;
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm = std::max(norm, std::fabs(a[i] - (ma ? mu * (*ma)[i] : 0.0)));
  const double eps = std::numeric_limits<double>::epsilon() * std::max(norm, 1e-300);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double di = a[i] - (ma ? mu * (*ma)[i] : 0.0);
    if (i > 0) {
      const double off = b[i - 1] - (mb ? mu * (*mb)[i - 1] : 0.0);
      di -= off * (off / d);
    }
    if (di == 0.0 || std::isnan(di)) {
      di = eps;
      ++res.zero_pivots;
    }
    if (di < 0.0) ++res.negatives;
    d = di;
  }
  return res;
}

inline InertiaCount count_negative(const ModeOperator& op) { return tridiagonal_inertia(op.diag, op.offdiag); }

/// Number of eigenvalues below mu.
inline long count_below(const ModeOperator& op, double mu) {
  std::vector<double> shifted = op.diag;
  for (double& d : shifted) d -= mu;
  return tridiagonal_inertia(shifted, op.offdiag).negatives;
}

/// Smallest eigenvalue by inertia bisection inside the Gershgorin interval.
inline double smallest_eigenvalue(const ModeOperator& op, double rel_tol = 1e-12) {
  double lo = kInf;
  double hi = -kInf;
  const std::size_t n = op.diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(op.offdiag[i - 1]);
    if (i + 1 < n) r += std::fabs(op.offdiag[i]);
    lo = std::min(lo, op.diag[i] - r);
    hi = std::max(hi, op.diag[i] + r);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::fabs(mid), 1e-300)) break;
    (count_below(op, mid) >= 1 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Mode truncation
// ---------------------------------------------------------------------------

/// Smallest M such that every |m| > M satisfies (m - alpha)^2 >= r^2 V at all
/// grid nodes. Throws NoTruncation when no finite M exists on the grid.
inline long mode_truncation(const RadialField& field, const Potential& V, const Grid& g) {
  if (V.is_zero()) return 0;
  const auto radii = g.radii();
  const auto alpha = flux_on_nodes(field, radii);
  long M = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const LogValue v = scaled_potential(V, radii[i]);
    if (v.sign <= 0) continue;
    const double r = std::exp(0.5 * v.log_abs);
    if (!std::isfinite(r) || !std::isfinite(alpha[i]) || r > 1e5)
      throw Error(ErrorCode::NoTruncation, "potential too strong on the grid for a finite mode cut");
    const double lo = std::floor(alpha[i] - r) + 1.0;
    const double hi = std::ceil(alpha[i] + r) - 1.0;
    if (lo > hi) continue;
    M = std::max({M, long(std::fabs(lo)), long(std::fabs(hi))});
  }
  return M;
}

// ---------------------------------------------------------------------------
// Hardy constants (P1 finite elements, consistent mass)
// ---------------------------------------------------------------------------

struct HardyOptions {
  double rel_tol = 1e-4;
  int refinements = 1;  // extra midpoint refinements recorded in the history
};

struct HardyEstimate {
  std::map<long, double> per_mode_minima;
  double mu_star = kInf;
  long argmin_mode = 0;
  std::string grid_meta;
  std::vector<std::pair<std::size_t, double>> refinement_history;
};

namespace detail {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
};

struct GaussPoint {
  double alpha;
  double log_j;
  double shift;
  double mass_density;  // J^2 omega
  double weight;        // quadrature weight times h/2
  double nl;            // left hat value
  double nr;            // right hat value
};

inline std::vector<GaussPoint> hardy_gauss_points(const RadialField& field, const Weight& w, const Grid& g) {
  static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<GaussPoint> pts;
  pts.reserve(3 * (g.size() - 1));
  for (std::size_t e = 0; e + 1 < g.size(); ++e) {
    const double a = g.xi(e);
    const double h = g.step(e);
    for (int q = 0; q < 3; ++q) {
      const double u = 0.5 * (gx[q] + 1.0);
      const double xi = a + u * h;
      const LogRadius p = g.radius_at(xi);
      GaussPoint gp;
      gp.alpha = flux(field, p);
      gp.log_j = g.log_jacobian(xi);
      gp.shift = g.liouville_shift(xi);
      const LogValue om = scaled_weight(w, p);
      if (om.sign <= 0) throw Error(ErrorCode::DomainError, "weight not positive on the grid");
      gp.mass_density = capped_exp(om.log_abs + 2.0 * gp.log_j);
      gp.weight = gw[q] * 0.5 * h;
      gp.nl = 1.0 - u;
      gp.nr = u;
      pts.push_back(gp);
    }
  }
  return pts;
}

/// Stiffness and mass on interior nodes for mode m.
inline std::pair<Tridiagonal, Tridiagonal> hardy_system(const std::vector<GaussPoint>& gps, const Grid& g, long m) {
  const std::size_t n = g.size();
  std::vector<double> kd(n, 0.0);
  std::vector<double> ko(n - 1, 0.0);
  std::vector<double> md(n, 0.0);
  std::vector<double> mo(n - 1, 0.0);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double h = g.step(e);
    kd[e] += 1.0 / h;
    kd[e + 1] += 1.0 / h;
    ko[e] -= 1.0 / h;
    for (int q = 0; q < 3; ++q) {
      const GaussPoint& gp = gps[3 * e + q];
      CoefficientParts cp;
      cp.alpha = gp.alpha;
      cp.log_j = gp.log_j;
      cp.shift = gp.shift;
      const double c = mode_coefficient(cp, m) * gp.weight;
      const double md_w = gp.mass_density * gp.weight;
      kd[e] += c * gp.nl * gp.nl;
      kd[e + 1] += c * gp.nr * gp.nr;
      ko[e] += c * gp.nl * gp.nr;
      md[e] += md_w * gp.nl * gp.nl;
      md[e + 1] += md_w * gp.nr * gp.nr;
      mo[e] += md_w * gp.nl * gp.nr;
    }
  }
  const long junction = g.junction_index();
  if (junction > 0) kd[junction] -= 0.5;
  Tridiagonal K;
  Tridiagonal M;
  K.diag.assign(kd.begin() + 1, kd.end() - 1);
  M.diag.assign(md.begin() + 1, md.end() - 1);
  K.off.assign(ko.begin() + 1, ko.end() - 1);
  M.off.assign(mo.begin() + 1, mo.end() - 1);
  return {K, M};
}

/// Smallest mu with K u = mu M u, by bisection on the inertia of K - mu M.
inline double smallest_generalized(const Tridiagonal& K, const Tridiagonal& M, double rel_tol) {
  auto count = [&](double mu) { return tridiagonal_inertia(K.diag, K.off, mu, &M.diag, &M.off).negatives; };
  double lo = 0.0;
  if (count(0.0) > 0) {
    lo = -1.0;
    while (count(lo) > 0) {
      lo *= 2.0;
      if (lo < -1e300) throw Error(ErrorCode::DomainError, "form unbounded below");
    }
  }
  double hi = std::max(1.0, 2.0 * std::fabs(lo));
  while (count(hi) == 0) {
    hi *= 2.0;
    if (hi > 1e300) throw Error(ErrorCode::DomainError, "no eigenvalue found below 1e300");
  }
  for (int it = 0; it < 400; ++it) {
    if (hi - lo <= rel_tol * std::max(std::fabs(hi), 1e-300) * 0.5) break;
    const double mid = 0.5 * (lo + hi);
    (count(mid) >= 1 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Per-mode minima of q_m[u] / int w |u|^2 over the P1 trial space, for modes
/// m_lo..m_hi, on the grid and on `refinements` successive midpoint
/// refinements.
inline HardyEstimate hardy_constant(const RadialField& field, const Weight& w, const Grid& grid, long m_lo,
                                    long m_hi, HardyOptions opt = {}) {
  if (m_hi < m_lo) throw Error(ErrorCode::ParameterError, "empty mode range");
  HardyEstimate est;
  Grid g = grid;
  for (int level = 0; level <= opt.refinements; ++level) {
    if (level > 0) g = g.refined();
    const auto gps = detail::hardy_gauss_points(field, w, g);
    const std::size_t nm = std::size_t(m_hi - m_lo + 1);
    std::vector<double> mins(nm);
    parallel_for(nm, [&](std::size_t k) {
      const auto [K, M] = detail::hardy_system(gps, g, m_lo + long(k));
      mins[k] = detail::smallest_generalized(K, M, opt.rel_tol);
    });
    double best = kInf;
    long arg = m_lo;
    est.per_mode_minima.clear();
    for (std::size_t k = 0; k < nm; ++k) {
      est.per_mode_minima[m_lo + long(k)] = mins[k];
      if (mins[k] < best) {
        best = mins[k];
        arg = m_lo + long(k);
      }
    }
    est.mu_star = best;
    est.argmin_mode = arg;
    est.grid_meta = g.describe();
    est.refinement_history.emplace_back(g.size(), best);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Prufer zero counting
// ---------------------------------------------------------------------------

struct PruferOptions {
  double phase_tol = 1e-6;
  double h_min = 1e-12;
  double h_start = 1e-3;
  std::size_t max_steps = 20'000'000;
};

struct PruferResult {
  long count = 0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

namespace detail {

struct PruferState {
  double phi = 0.0;
  double dphi = 1.0;
};

/// Exact propagation of phi'' = c phi over length h with constant c; returns
/// the number of zeros in (0, h].
inline long propagate_constant(double c, double h, PruferState& s) {
  long zeros = 0;
  const double tiny = 1e-14;
  double p1 = 0.0;
  double d1 = 0.0;
  if (c < -tiny) {
    const double k = std::sqrt(-c);
    const double beta = std::atan2(s.phi, s.dphi / k);
    zeros = long(std::floor((k * h + beta) / kPi) - std::floor(beta / kPi));
    const double cs = std::cos(k * h);
    const double sn = std::sin(k * h);
    p1 = s.phi * cs + s.dphi / k * sn;
    d1 = -s.phi * k * sn + s.dphi * cs;
  } else if (c > tiny) {
    const double k = std::sqrt(c);
    const double th = std::tanh(k * h);
    if (s.dphi != 0.0) {
      const double q = -k * s.phi / s.dphi;
      if (q > 0.0 && q <= th) zeros = 1;
    }
    // state divided by cosh(kh)
    p1 = s.phi + s.dphi / k * th;
    d1 = s.phi * k * th + s.dphi;
  } else {
    if (s.dphi != 0.0) {
      const double x0 = -s.phi / s.dphi;
      if (x0 > 0.0 && x0 <= h) zeros = 1;
    }
    p1 = s.phi + s.dphi * h;
    d1 = s.dphi;
  }
  const double nrm = std::max(std::fabs(p1), std::fabs(d1));
  if (nrm > 0.0 && std::isfinite(nrm)) {
    p1 /= nrm;
    d1 /= nrm;
  }
  s.phi = p1;
  s.dphi = d1;
  return zeros;
}

inline double prufer_angle(const PruferState& s, double kappa) { return std::atan2(kappa * s.phi, s.dphi); }

}  // namespace detail

/// Zeros in the open range of the zero-energy solution with phi = 0 at the
/// left end, using the grid's chart. Steps never cross a grid node, so the
/// grid sets the largest step. Equals the number of negative Dirichlet
/// eigenvalues on the range.
inline PruferResult prufer_count(const RadialField& field, const Potential& V, long m, const Grid& range,
                                 PruferOptions opt = {}) {
  const double a = range.xi(0);
  const double b = range.xi(range.size() - 1);
  std::vector<double> stops(range.nodes().begin() + 1, range.nodes().end());
  if (range.coordinate() == Coordinate::LogDepth && a < Grid::kJunction && b > Grid::kJunction)
    stops.push_back(Grid::kJunction);
  auto add_kink = [&](double t) {
    if (!std::isfinite(t)) return;
    const double x = range.xi_of(LogRadius::from_t(t));
    if (x > a && x < b) stops.push_back(x);
  };
  for (double t : kinks(V)) add_kink(t);
  for (double t : kinks(field)) add_kink(t);
  stops.push_back(b);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  auto coef = [&](double xi) { return mode_coefficient(coefficient_parts_at(field, V, range, xi), m); };

  PruferResult res;
  detail::PruferState st;
  double x = a;
  double h = opt.h_start;
  std::size_t next_stop = 0;
  while (x < b) {
    const double stop = stops[next_stop];
    const double step = std::min(h, stop - x);
    const double cfull = coef(x + 0.5 * step);
    const double c1 = coef(x + 0.25 * step);
    const double c3 = coef(x + 0.75 * step);
    detail::PruferState full = st;
    const long zf = detail::propagate_constant(cfull, step, full);
    detail::PruferState half = st;
    long zh = detail::propagate_constant(c1, 0.5 * step, half);
    zh += detail::propagate_constant(c3, 0.5 * step, half);
    const double kappa = std::max(1.0, std::sqrt(std::fabs(cfull)));
    double dang = std::fabs(detail::prufer_angle(full, kappa) - detail::prufer_angle(half, kappa));
    dang = std::fmod(dang, kPi);
    dang = std::min(dang, kPi - dang);
    // Growing branch under a barrier: no zero can occur however fast c varies.
    const bool growing = cfull > 0.0 && c1 > 0.0 && c3 > 0.0 && st.phi * st.dphi >= 0.0 &&
                         half.phi * half.dphi > 0.0 && zh == 0;
    const bool ok = zf == zh && (dang <= opt.phase_tol || growing);
    if (!ok) {
      ++res.rejected;
      h = 0.5 * step;
      if (h < opt.h_min * std::max(1.0, std::fabs(x)))
        throw Error(ErrorCode::StiffnessFailure,
                    "Prufer step below minimum at xi = " + std::to_string(x));
      continue;
    }
    st = half;
    res.count += zh;
    x += step;
    ++res.steps;
    if (res.steps > opt.max_steps) throw Error(ErrorCode::StiffnessFailure, "Prufer step budget exhausted");
    if (x >= stop) {
      x = stop;
      if (stop == Grid::kJunction && range.coordinate() == Coordinate::LogDepth) st.dphi -= 0.5 * st.phi;
      ++next_stop;
      if (next_stop >= stops.size()) break;
    }
    if (step == h) h *= 2.0;
  }
  if (st.phi == 0.0 && res.count > 0) --res.count;  // zero exactly at the right end
  return res;
}

// ---------------------------------------------------------------------------
// Phase integral
// ---------------------------------------------------------------------------

struct PhaseOptions {
  double rel_tol = 1e-9;
  int scan_points = 4000;
  double linear_t_lo = -40.0;
};

struct PhaseResult {
  double value = 0.0;
  Coordinate coordinate = Coordinate::Linear;
  int allowed_intervals = 0;
  double s_far = 0.0;
};

/// Smallest s = log|t| (on a doubling ladder) beyond which J^2 v stays below
/// `fraction` of the Liouville barrier 1/4.
inline double depth_extent(const Potential& V, double fraction = 0.1) {
  auto ok = [&](double s) {
    const LogValue v = potential_times_t2(V, LogRadius::from_depth(s));
    return v.sign <= 0 || v.value() <= fraction * 0.25;
  };
  double s = 1.0;
  while (s < 1e300) {
    if (ok(s) && ok(2.0 * s) && ok(4.0 * s)) return s;
    s *= 2.0;
  }
  throw Error(ErrorCode::NoTruncation, "potential does not decay at any representable depth");
}

namespace detail {

/// sqrt(max(-c, 0)) integrated over a parametrized segment xi(u), u in
/// [u0, u1], with turning points located by scan and bisection.
template <class Map, class Jac, class G>
double phase_segment(Map xi_of_u, Jac dxi_du, G g, double u0, double u1, const std::vector<double>& breaks_u,
                     int scan, double rel_tol, int& intervals) {
  if (!(u1 > u0)) return 0.0;
  std::vector<double> cuts{u0};
  std::vector<double> us(scan + 1);
  std::vector<double> gs(scan + 1);
  for (int i = 0; i <= scan; ++i) {
    us[i] = u0 + (u1 - u0) * i / scan;
    gs[i] = g(xi_of_u(us[i]));
  }
  for (int i = 0; i < scan; ++i) {
    if ((gs[i] > 0.0) != (gs[i + 1] > 0.0)) {
      double lo = us[i];
      double hi = us[i + 1];
      const bool slo = gs[i] > 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        ((g(xi_of_u(mid)) > 0.0) == slo ? lo : hi) = mid;
      }
      cuts.push_back(0.5 * (lo + hi));
    }
  }
  for (double b : breaks_u)
    if (b > u0 && b < u1) cuts.push_back(b);
  cuts.push_back(u1);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  auto integrand = [&](double u) {
    const double v = g(xi_of_u(u));
    return v > 0.0 ? std::sqrt(v) * dxi_du(u) : 0.0;
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b);
    if (!(g(xi_of_u(mid)) > 0.0)) continue;
    ++intervals;
    total += quad::integrate_endpoints(integrand, a, b, rel_tol);
  }
  return total;
}

}  // namespace detail

/// (1/pi) * int sqrt(max(-c, 0)) for mode m at coupling lambda. VSigma-type
/// potentials use the depth chart (with its 1/4 Langer term) and integrate the
/// deep part in log log|t|; regular potentials use t directly.
inline PhaseResult phase_integral(const RadialField& field, const Potential& V0, long m, double lambda,
                                  PhaseOptions opt = {}) {
  PhaseResult res;
  if (!(lambda > 0.0) || V0.is_zero()) return res;
  const Potential V = V0.scaled(lambda);
  const double t_top = std::isfinite(support_t_max(V)) ? support_t_max(V) : 50.0;
  std::vector<double> kink_t = kinks(V);
  for (double k : kinks(field)) kink_t.push_back(k);

  if (!needs_depth_coordinate(V)) {
    res.coordinate = Coordinate::Linear;
    const double t_lo = std::isfinite(support_t_min(V)) ? support_t_min(V) : opt.linear_t_lo;
    auto g = [&](double t) {
      const LogRadius p = LogRadius::from_t(t);
      const double d = double(m) - flux(field, p);
      return scaled_potential(V, p).value() - d * d;
    };
    const double total = detail::phase_segment([](double u) { return u; }, [](double) { return 1.0; }, g, t_lo,
                                               t_top, kink_t, opt.scan_points, opt.rel_tol, res.allowed_intervals);
    res.value = total / kPi;
    return res;
  }

  res.coordinate = Coordinate::LogDepth;
  const Grid chart = Grid::log_depth(1.0, 0.0, 1, 1);
  auto g = [&](double xi) { return -mode_coefficient(coefficient_parts_at(field, V, chart, xi), m); };
  const double s_far = depth_extent(V);
  res.s_far = s_far;
  double total = 0.0;
  // deep part, s = log|t| >= 1, parametrized by y = log s
  {
    std::vector<double> br;
    for (double t : kink_t)
      if (t < -kE) br.push_back(std::log(std::log(-t)));
    total += detail::phase_segment([](double y) { return Grid::kJunction - std::exp(y); },
                                   [](double y) { return std::exp(y); }, g, 0.0, std::log(s_far), br,
                                   opt.scan_points, opt.rel_tol, res.allowed_intervals);
  }
  // s in [0, 1]
  {
    std::vector<double> br;
    for (double t : kink_t)
      if (t >= -kE && t < -1.0) br.push_back(std::log(-t));
    total += detail::phase_segment([](double s) { return Grid::kJunction - s; }, [](double) { return 1.0; }, g,
                                   0.0, 1.0, br, opt.scan_points / 4, opt.rel_tol, res.allowed_intervals);
  }
  // linear part t >= -1
  if (t_top > -1.0) {
    total += detail::phase_segment([](double t) { return t; }, [](double) { return 1.0; }, g, -1.0, t_top, kink_t,
                                   opt.scan_points, opt.rel_tol, res.allowed_intervals);
  }
  res.value = total / kPi;
  return res;
}

inline double phase_integral_count(const RadialField& field, const Potential& V, long m, double lambda) {
  return phase_integral(field, V, m, lambda).value;
}

}  // namespace maghardy
