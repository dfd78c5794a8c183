#pragma once

// Negative-eigenvalue counts for (i grad + A)^2 - lambda V summed over angular
// modes, coupling sweeps and the bound checks built on [V]_a.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maghardy/error.hpp"
#include "maghardy/grid.hpp"
#include "maghardy/log_radius.hpp"
#include "maghardy/parallel.hpp"
#include "maghardy/profiles.hpp"
#include "maghardy/quadform.hpp"
#include "maghardy/quadrature.hpp"
#include "maghardy/spectral.hpp"
#include "maghardy/weights.hpp"

namespace maghardy {

enum class CountMethod { Inertia, Prufer, PhaseIntegral };

inline const char* to_string(CountMethod m) {
  switch (m) {
    case CountMethod::Inertia: return "inertia";
    case CountMethod::Prufer: return "prufer";
    case CountMethod::PhaseIntegral: return "phase";
  }
  return "?";
}

inline CountMethod parse_count_method(const std::string& s) {
  if (s == "inertia") return CountMethod::Inertia;
  if (s == "prufer") return CountMethod::Prufer;
  if (s == "phase" || s == "phase_integral") return CountMethod::PhaseIntegral;
  throw Error(ErrorCode::ConfigError, "unknown count method '" + s + "'");
}

struct CountReport {
  double lambda = 0.0;
  std::map<long, long> per_mode;
  std::map<long, double> per_mode_real;  // phase integrals, PhaseIntegral only
  long m_max = 0;
  long total = 0;
  double real_total = 0.0;
  CountMethod method = CountMethod::Inertia;
  std::string grid_meta;
  double forbidden_margin = 0.0;  // min coefficient at the grid ends over modes
  long zero_pivots = 0;
  std::vector<std::string> warnings;
};

struct GridOptions {
  double points_per_wave = 0.15;  // h * local wavenumber
  double h_linear = 0.05;
  double h_deep = 0.5;
  double t_lo = -30.0;       // lower end of the resolved core
  double tail = 6.0;         // extra t beyond the field and potential supports
  double t_far = 1e4;        // geometric tails reach |t| = t_far on linear grids
  double tail_growth = 1.25;
  double t_hi = kNaN;        // fixed upper end (Dirichlet on r = e^{t_hi})
  double depth_fraction = 0.5;
  double depth_margin = 2.0;
  std::size_t max_nodes = 10'000'000;
};

namespace detail {

/// sqrt of the largest lambda v^+ in the chart at xi (J^2 v in the deep part).
inline double local_wavenumber(const Potential& V, const Grid& chart, double xi) {
  const double w = well_term(V, chart.radius_at(xi), chart.log_jacobian(xi) != 0.0);
  return w > 0.0 ? std::sqrt(w) : 0.0;
}

/// Nodes from xi_hi down to xi_lo with step min(h_max, pp / k(xi)), plus the
/// listed features.
inline std::vector<double> graded_nodes(double xi_lo, double xi_hi, double h_max, double pp,
                                        const std::function<double(double)>& k, std::vector<double> features,
                                        std::size_t max_nodes) {
  std::vector<double> x{xi_hi};
  double cur = xi_hi;
  while (cur > xi_lo) {
    if (x.size() >= max_nodes)
      throw Error(ErrorCode::ParameterError, "resolving this coupling needs more than " + std::to_string(max_nodes) +
                                                 " grid nodes; use the phase integral method");
    const double kk = std::max(k(cur), k(std::max(xi_lo, cur - h_max)));
    const double h = kk > 0.0 ? std::min(h_max, pp / kk) : h_max;
    cur -= h;
    x.push_back(std::max(cur, xi_lo));
  }
  for (double f : features)
    if (f > xi_lo && f < xi_hi) x.push_back(f);
  std::sort(x.begin(), x.end());
  std::vector<double> out;
  for (double v : x)
    if (out.empty() || v - out.back() > 1e-9 * std::max(1.0, std::fabs(v))) out.push_back(v);
  return out;
}

/// Steps growing by `growth` from h0, from x0 outwards to |x| = far.
inline std::vector<double> geometric_tail(double x0, double h0, double growth, double far, int dir) {
  std::vector<double> out;
  double h = h0;
  double x = x0;
  while (std::fabs(x) < far) {
    h *= growth;
    x += dir * h;
    out.push_back(x);
  }
  return out;
}

}  // namespace detail

/// Grid resolving the local wavelength of lambda V, Dirichlet ends in the
/// forbidden region: linear in t for regular potentials, depth chart for
/// potentials that need it.
inline Grid suggest_grid(const RadialField& field, const Potential& V0, double lambda, GridOptions opt = {}) {
  const Potential V = V0.scaled(std::max(lambda, 0.0));
  double t_top = std::max(support_t_max(field), support_t_max(V));
  if (!std::isfinite(t_top)) t_top = 0.0;
  t_top += opt.tail;
  const bool fixed_top = std::isfinite(opt.t_hi);
  if (fixed_top) t_top = opt.t_hi;
  std::vector<double> feats;
  for (double t : kinks(V)) feats.push_back(t);
  for (double t : kinks(field)) feats.push_back(t);

  if (!needs_depth_coordinate(V)) {
    const double t_lo = std::isfinite(support_t_min(V)) ? std::min(support_t_min(V) - 1.0, opt.t_lo) : opt.t_lo;
    const Grid chart = Grid::uniform(t_lo, t_top, 3);
    auto k = [&](double t) { return detail::local_wavenumber(V, chart, t); };
    auto x = detail::graded_nodes(t_lo, t_top, opt.h_linear, opt.points_per_wave, k, feats, opt.max_nodes);
    // Modes with no barrier at an end see linear solutions there, so a
    // Dirichlet cut at moderate |t| can lose a weakly bound state.
    auto below = detail::geometric_tail(t_lo, opt.h_linear, opt.tail_growth, opt.t_far, -1);
    x.insert(x.begin(), below.rbegin(), below.rend());
    if (!fixed_top) {
      auto above = detail::geometric_tail(t_top, opt.h_linear, opt.tail_growth, opt.t_far, +1);
      x.insert(x.end(), above.begin(), above.end());
    }
    return Grid::from_nodes(std::move(x), Coordinate::Linear);
  }

  const double s_max = opt.depth_margin * depth_extent(V, opt.depth_fraction);
  const Grid chart = Grid::log_depth(1.0, 0.0, 1, 1);
  auto k = [&](double xi) { return detail::local_wavenumber(V, chart, xi); };
  std::vector<double> deep_feats;
  std::vector<double> lin_feats;
  for (double t : feats) {
    if (!std::isfinite(t)) continue;
    const double xi = chart.xi_of(LogRadius::from_t(t));
    (xi < Grid::kJunction ? deep_feats : lin_feats).push_back(xi);
  }
  auto deep = detail::graded_nodes(Grid::kJunction - s_max, Grid::kJunction, opt.h_deep, opt.points_per_wave, k,
                                   deep_feats, opt.max_nodes);
  auto lin = detail::graded_nodes(Grid::kJunction, t_top, opt.h_linear, opt.points_per_wave, k, lin_feats, opt.max_nodes);
  if (!fixed_top) {
    auto above = detail::geometric_tail(t_top, opt.h_linear, opt.tail_growth, opt.t_far, +1);
    lin.insert(lin.end(), above.begin(), above.end());
  }
  deep.pop_back();
  deep.insert(deep.end(), lin.begin(), lin.end());
  return Grid::from_nodes(std::move(deep), Coordinate::LogDepth);
}

/// Cheap grid used only to find the mode cut: dense in log log|t| so that
/// very deep potentials are sampled at every scale.
inline Grid truncation_scan_grid(const RadialField& field, const Potential& V, std::size_t n = 2000) {
  double t_top = std::max(support_t_max(field), support_t_max(V));
  if (!std::isfinite(t_top)) t_top = 0.0;
  t_top = std::max(t_top + 1.0, 0.0);
  if (!needs_depth_coordinate(V)) {
    const double t_lo = std::isfinite(support_t_min(V)) ? support_t_min(V) - 1.0 : -40.0;
    return Grid::uniform(t_lo, t_top, n);
  }
  const double y_hi = std::log(depth_extent(V));
  const double y_lo = std::log(1e-3);
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(Grid::kJunction - std::exp(y_hi + (y_lo - y_hi) * double(i) / double(n - 1)));
  for (std::size_t i = 0; i <= n; ++i) x.push_back(Grid::kJunction + (t_top - Grid::kJunction) * double(i) / double(n));
  return Grid::from_nodes(std::move(x), Coordinate::LogDepth);
}

/// Number of negative eigenvalues of (i grad + A)^2 - lambda V. Without a
/// grid one is suggested from the coupling.
inline CountReport count_total(const RadialField& field, const Potential& V, double lambda,
                               const std::optional<Grid>& grid = std::nullopt,
                               CountMethod method = CountMethod::Inertia) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::ParameterError, "lambda must be non-negative");
  CountReport rep;
  rep.lambda = lambda;
  rep.method = method;
  if (lambda == 0.0 || V.is_zero()) return rep;
  const Potential W = V.scaled(lambda);

  if (method == CountMethod::PhaseIntegral) {
    rep.m_max = mode_truncation(field, W, truncation_scan_grid(field, W));
    rep.grid_meta = "phase";
    std::vector<long> modes;
    for (long m = -rep.m_max; m <= rep.m_max; ++m) modes.push_back(m);
    std::vector<PhaseResult> res(modes.size());
    parallel_for(modes.size(), [&](std::size_t i) { res[i] = phase_integral(field, V, modes[i], lambda); });
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const long n = long(std::floor(res[i].value + 0.5));
      rep.per_mode[modes[i]] = n;
      rep.per_mode_real[modes[i]] = res[i].value;
      rep.total += n;
      rep.real_total += res[i].value;
      if (res[i].coordinate == Coordinate::LogDepth) rep.grid_meta = "phase log_depth";
    }
    return rep;
  }

  const Grid g = grid ? *grid : suggest_grid(field, V, lambda);
  rep.grid_meta = g.describe();
  rep.m_max = mode_truncation(field, W, g);
  const auto parts = node_parts(field, W, g);
  std::vector<long> modes;
  for (long m = -rep.m_max; m <= rep.m_max; ++m) modes.push_back(m);
  std::vector<long> counts(modes.size());
  std::vector<long> pivots(modes.size(), 0);
  parallel_for(modes.size(), [&](std::size_t i) {
    if (method == CountMethod::Inertia) {
      const auto inert = count_negative(assemble_from_parts(parts, g, modes[i]));
      counts[i] = inert.negatives;
      pivots[i] = inert.zero_pivots;
    } else {
      counts[i] = prufer_count(field, W, modes[i], g).count;
    }
  });
  rep.forbidden_margin = kInf;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    rep.per_mode[modes[i]] = counts[i];
    rep.total += counts[i];
    rep.zero_pivots += pivots[i];
    rep.forbidden_margin = std::min({rep.forbidden_margin, mode_coefficient(parts.front(), modes[i]),
                                     mode_coefficient(parts.back(), modes[i])});
  }
  rep.real_total = double(rep.total);
  if (rep.zero_pivots > 0) rep.warnings.push_back("zero pivot: a threshold eigenvalue sits at 0");
  if (rep.forbidden_margin < 0.0) rep.warnings.push_back("grid end inside the allowed region");
  return rep;
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

struct BoundOptions {
  std::vector<double> caps{16.0, 32.0};  // log log|t| limits of the deep part
  double rel_tol = 1e-10;
  double saturation_tol = 0.01;
};

struct BoundResult {
  double value = 0.0;
  bool saturated = true;
  std::vector<double> cap_values;
};

/// int V^+(r) (1 + |log r|) r dr = int v^+ (1 + |t|) dt, with the deep part
/// taken up to each cap.
inline BoundResult bound_jst_scan(const Potential& V, BoundOptions opt = {}) {
  BoundResult res;
  if (V.is_zero()) {
    res.cap_values.assign(opt.caps.size(), 0.0);
    return res;
  }
  quad::Tolerance tol;
  tol.rel = opt.rel_tol;
  tol.abs = 1e-300;
  const double t_top = support_t_max(V);
  if (!std::isfinite(t_top)) throw Error(ErrorCode::Unbounded, "potential without a finite outer support");
  double near = 0.0;
  if (t_top > -kE) {
    auto f = [&](double t) { return std::max(scaled_potential_t(V, t), 0.0) * (1.0 + std::fabs(t)); };
    std::vector<double> br = kinks(V);
    br.push_back(0.0);  // |t|
    near = quad::integrate_breaks(f, -kE, t_top, br, tol);
  }
  // deep part in y = log log|t|: dt = |t| s dy
  auto g = [&](double y) {
    const double s = std::exp(y);
    const LogValue v = potential_times_t2(V, LogRadius::from_depth(s));
    if (v.sign <= 0) return 0.0;
    return v.value() * (std::exp(-s) + 1.0) * s;
  };
  std::vector<double> br;
  for (double t : kinks(V))
    if (t < -kE) br.push_back(std::log(std::log(-t)));
  double prev = 0.0;
  double lo = 0.0;
  for (double cap : opt.caps) {
    prev += quad::integrate_breaks(g, lo, cap, br, tol);
    lo = cap;
    res.cap_values.push_back(near + prev);
  }
  res.value = res.cap_values.back();
  if (res.cap_values.size() >= 2) {
    const double a = res.cap_values[res.cap_values.size() - 2];
    const double b = res.cap_values.back();
    res.saturated = !std::isfinite(b) ? false : std::fabs(b - a) <= opt.saturation_tol * std::fabs(b);
  }
  if (!std::isfinite(res.value)) res.saturated = false;
  return res;
}

/// Throws Unbounded when the deep part keeps growing across the caps.
inline double bound_jst(const Potential& V, BoundOptions opt = {}) {
  const auto r = bound_jst_scan(V, opt);
  if (!r.saturated) throw Error(ErrorCode::Unbounded, "bound integral grows without saturation");
  return r.value;
}

struct CountingBoundRow {
  double lambda = 0.0;
  long count = 0;
  double vnorm_pow = 0.0;  // [lambda V]_a^a
  double ratio = 0.0;
};

struct CountingBoundResult {
  double a = 0.0;
  double v_norm = 0.0;  // [V]_a
  std::vector<CountingBoundRow> rows;
  double max_ratio = 0.0;
  bool final_decade_monotone = false;
};

/// True when the ratios over the last decade of lambda increase strictly.
inline bool monotone_growth_final_decade(const std::vector<CountingBoundRow>& rows) {
  if (rows.size() < 2) return false;
  const double top = rows.back().lambda;
  std::vector<double> r;
  for (const auto& row : rows)
    if (row.lambda >= top / 10.0 * (1.0 - 1e-12)) r.push_back(row.ratio);
  if (r.size() < 2) return false;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) return false;
  return true;
}

/// N(lambda V) / [lambda V]_a^a along a coupling ladder.
inline CountingBoundResult verify_counting_bound(const RadialField& field, const Potential& V, double a,
                                                 const std::vector<double>& lambdas,
                                                 CountMethod method = CountMethod::PhaseIntegral,
                                                 VNormOptions vopt = {}) {
  CountingBoundResult res;
  res.a = a;
  if (!V.is_zero()) {
    const auto vn = v_norm_a(V, a, vopt);
    if (!vn.saturated) throw Error(ErrorCode::PreconditionError, "[V]_a is not finite for this potential");
    res.v_norm = vn.value;
  }
  for (double lam : lambdas) {
    CountingBoundRow row;
    row.lambda = lam;
    if (!V.is_zero()) {
      row.count = count_total(field, V, lam, std::nullopt, method).total;
      row.vnorm_pow = std::pow(lam * res.v_norm, a);
    }
    row.ratio = row.vnorm_pow > 0.0 ? double(row.count) / row.vnorm_pow : 0.0;
    res.max_ratio = std::max(res.max_ratio, row.ratio);
    res.rows.push_back(row);
  }
  res.final_decade_monotone = monotone_growth_final_decade(res.rows);
  return res;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepResult {
  std::vector<CountReport> reports;
  double fitted_exponent = kNaN;
  double fit_lo = kNaN;
  double fit_hi = kNaN;
  double residual = kNaN;
};

/// n values from lo to hi in geometric progression.
inline std::vector<double> geometric_ladder(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw Error(ErrorCode::ParameterError, "bad geometric ladder");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
  out.back() = hi;
  return out;
}

/// Counts along a geometric coupling ladder and the log-log slope over the
/// top decade where N >= 10. Inertia and Prufer reuse one grid sized for the
/// largest coupling so the counts are monotone.
inline SweepResult sweep_exponent(const RadialField& field, const Potential& V, const std::vector<double>& lambdas,
                                  CountMethod method = CountMethod::PhaseIntegral) {
  if (lambdas.size() < 5) throw Error(ErrorCode::ParameterError, "sweep needs at least 5 couplings");
  const double q = lambdas[1] / lambdas[0];
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > 0.0) || std::fabs(lambdas[i] / lambdas[i - 1] / q - 1.0) > 1e-6 || !(q > 1.0))
      throw Error(ErrorCode::ParameterError, "sweep couplings must be an increasing geometric ladder");
  SweepResult res;
  std::optional<Grid> g;
  if (method != CountMethod::PhaseIntegral) g = suggest_grid(field, V, lambdas.back());
  for (double lam : lambdas) res.reports.push_back(count_total(field, V, lam, g, method));

  const double top = lambdas.back();
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::pair<double, double>> big;
  for (const auto& r : res.reports)
    if (r.real_total >= 10.0) big.push_back({r.lambda, r.real_total});
  if (big.empty()) throw Error(ErrorCode::InsufficientGrowth, "N < 10 at every coupling");
  for (const auto& [lam, n] : big)
    if (lam >= top / 10.0 * (1.0 - 1e-12)) {
      x.push_back(std::log(lam));
      y.push_back(std::log(n));
    }
  if (x.size() < 2) {
    if (big.size() < 2) throw Error(ErrorCode::InsufficientGrowth, "fewer than two couplings with N >= 10");
    x.clear();
    y.clear();
    for (std::size_t i = big.size() - 2; i < big.size(); ++i) {
      x.push_back(std::log(big[i].first));
      y.push_back(std::log(big[i].second));
    }
  }
  res.fitted_exponent = ls_slope(x, y);
  res.fit_lo = std::exp(x.front());
  res.fit_hi = std::exp(x.back());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(x.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + res.fitted_exponent * (x[i] - mx));
    ss += e * e;
  }
  res.residual = std::sqrt(ss / double(x.size()));
  return res;
}

}  // namespace maghardy
