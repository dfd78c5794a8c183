// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "maghardy/counting.hpp"
#include "maghardy/quadform.hpp"
#include "maghardy/spectral.hpp"
#include "maghardy/weights.hpp"
#include "oracles.hpp"

using namespace maghardy;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

Outcome identity_suite() {
  double worst = 0.0;
  for (double r0 : {kE, 10.0, 100.0}) {
    const auto below = log_spaced_radii(r0 * std::exp(-20.0), r0 * std::exp(-0.01), 500);
    const auto above = log_spaced_radii(r0 * std::exp(0.01), r0 * std::exp(20.0), 500);
    std::vector<double> radii;
    radii.reserve(below.size() + above.size());
    for (double r : below) radii.push_back(r);
    for (double r : above) radii.push_back(r);
    worst = std::max(worst, check_f_identity(r0, radii));
  }
  const auto spot = f_identity_sides(kE, 1.0);
  const bool spot_ok = spot.lhs == 0.25 && spot.rhs == 0.25;
  return {worst < 1e-10 && spot_ok,
          fmt("max residual %.3g", worst) + (spot_ok ? ", r0=e r=1 both 0.25" : ", spot value off")};
}

Outcome sandwich() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<long> md(-50, 50);
  std::uniform_real_distribution<double> ad(-0.25, 0.25);
  long fails = 0;
  for (int i = 0; i < 10000; ++i) {
    const long m = md(rng);
    const double a = ad(rng);
    // independent of lambda_bounds_check: compare with exact rational bounds
    const double lam2 = (m - a) * (m - a);
    const double s = double(m) * m + a * a;
    const bool ok = lambda_bounds_check(m, a);
    if (!ok || !(0.5 * s <= lam2 && lam2 <= 2.0 * s)) ++fails;
  }
  return {fails == 0, std::to_string(fails) + " failures in 10^4 draws"};
}

Outcome flux_oracles() {
  const auto f = RadialField::example1(1.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = -std::exp(12.0 * i / 99.0) - 1e-3;  // r from e^{-1} down to e^{-e^12}
    const LogRadius p = LogRadius::from_t(t);
    const double closed = 1.0 / (2.0 - 1.0) * std::pow(std::fabs(t), 1.0 - 2.0);
    worst = std::max(worst, rel(flux_quadrature(f, p, 1e-12), closed));
  }
  const double a = flux(f, LogRadius::from_r(std::exp(-2.0)));
  const bool spot = std::fabs(a - 0.5) < 1e-14;
  return {worst < 1e-8 && spot, fmt("max rel error %.3g", worst) + fmt(", alpha(e^-2) = %.17g", a)};
}

Outcome parseval() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    RadialField field = RadialField::zero();
    switch (i % 4) {
      case 0: field = RadialField::bump(-2.0 + 4.0 * u01(rng), 0.5 + 1.5 * u01(rng)); break;
      case 1: field = RadialField::example1(0.5 + 1.5 * u01(rng), 1.5 + 1.5 * u01(rng)); break;
      case 2: field = RadialField::example2(0.5 + 1.5 * u01(rng), 1.5 + 1.5 * u01(rng)); break;
      default: break;
    }
    const long m = long(std::floor(7.0 * u01(rng))) - 3;
    const double lo = -3.0 + 2.0 * u01(rng);
    const double hi = lo + 0.5 + 2.0 * u01(rng);
    const double edge = 0.2 + 0.4 * u01(rng);
    const double kappa = 3.0 * u01(rng);
    const auto base = TestFunction::mode_bump(m, lo, hi, edge);
    // complex amplitude e^{i kappa t}
    auto u = TestFunction::custom(
        m, [base, kappa](double t) { return base.value(t) * std::polar(1.0, kappa * t); },
        [base, kappa](double t) {
          return (base.deriv(t) + cplx(0.0, kappa) * base.value(t)) * std::polar(1.0, kappa * t);
        },
        base.t_lo, base.t_hi, base.breaks);
    const Grid g = Grid::uniform(-4.0, 3.5, 1501);
    worst = std::max(worst, rel(qform(field, u, g).total, oracle::qform_2d(field, u)));
  }
  return {worst < 1e-5, fmt("max rel error %.3g over 20 instances", worst)};
}

Outcome hardy_witness() {
  const auto F = RadialField::bump(0.5, 1.0);
  const auto w = Weight::rho0();
  HardyOptions opt;
  opt.refinements = 0;
  const double a = hardy_constant(F, w, Grid::uniform(-8, 8, 400), -3, 3, opt).mu_star;
  const double b = hardy_constant(F, w, Grid::uniform(-8, 8, 800), -3, 3, opt).mu_star;
  const double c = hardy_constant(F, w, Grid::uniform(-16, 16, 800), -3, 3, opt).mu_star;
  const double d = hardy_constant(F, w, Grid::uniform(-16, 16, 1600), -3, 3, opt).mu_star;
  const double lo = std::min({a, b, c, d});
  const double hi = std::max({a, b, c, d});
  const double var = (hi - lo) / hi;
  const auto Z = RadialField::zero();
  const double z8 = hardy_constant(Z, w, Grid::uniform(-8, 8, 400), -3, 3, opt).mu_star;
  const double z16 = hardy_constant(Z, w, Grid::uniform(-16, 16, 800), -3, 3, opt).mu_star;
  const double decay = z8 / z16;
  const bool pass = lo > 0.0 && var < 0.05 && decay >= 10.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "mu* L=8: %.6g (N) %.6g (2N); L=16: %.6g (N) %.6g (2N); spread %.1f%%; zero-field %.4g -> %.4g (%.2fx)",
                a, b, c, d, 100.0 * var, z8, z16, decay);
  return {pass, buf};
}

Outcome singular_witness() {
  const auto E = RadialField::example1(1.0, 1.2);
  const LogRadius eta = select_eta(E);
  const auto w = Weight::singular_rho_at(E, eta);
  HardyOptions opt;
  opt.refinements = 0;
  const auto h1 = hardy_constant(E, w, Grid::uniform(-8, 8, 400), -2, 9, opt);
  const auto h2 = hardy_constant(E, w, Grid::uniform(-8, 8, 800), -2, 9, opt);
  const double var = rel(h1.mu_star, h2.mu_star);
  char buf[200];
  std::snprintf(buf, sizeof buf, "log eta = %.4g, mu* %.6g (N) %.6g (2N), change %.2g%%, argmin m = %ld", eta.t(),
                h1.mu_star, h2.mu_star, 100.0 * var, h2.argmin_mode);
  return {h1.mu_star > 0.0 && h2.mu_star > 0.0 && var < 0.05, buf};
}

/// 2 pi int_{-2k}^{-1} |t|^{-b} u_alpha^2 dt in closed form.
double numerator_closed(double b, double alpha, double k) {
  const double p = 2.0 * alpha - b + 1.0;
  const double core = p == 0.0 ? std::log(k) : (std::pow(k, p) - 1.0) / p;
  // ramp: k^{2 alpha - 2} int_k^{2k} s^{-b} (2k - s)^2 ds
  auto prim = [&](double s) {
    auto pw = [&](double e) { return e == 0.0 ? std::log(s) : std::pow(s, e) / e; };
    return 4.0 * k * k * pw(1.0 - b) - 4.0 * k * pw(2.0 - b) + pw(3.0 - b);
  };
  const double ramp = std::pow(k, 2.0 * alpha - 2.0) * (prim(2.0 * k) - prim(k));
  return kTwoPi * (core + ramp);
}

Outcome optimality_zero() {
  const auto F = RadialField::bump(0.5, 1.0);
  const std::vector<double> ks{8, 16, 32, 64};
  const auto r = hardy_probe_at_zero(F, 1.5, 0.4, ks);
  double num_err = 0.0;
  for (const auto& row : r.rows) num_err = std::max(num_err, rel(row.numerator, numerator_closed(1.5, 0.4, row.k)));
  const auto c = hardy_probe_at_zero(F, 2.5, 0.4, ks);
  const bool pass = std::fabs(r.growth_exponent - 0.30) <= 0.05 && c.growth_exponent < 0.05 && num_err < 1e-6;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "exponent %.4f (target 0.30 +- 0.05), control b=2.5 exponent %.4f (direct log-log %.4f), "
                "numerator vs closed form %.2g",
                r.growth_exponent, c.growth_exponent, c.direct_slope, num_err);
  return {pass, buf};
}

Outcome optimality_infinity() {
  const auto F = RadialField::bump(1.0, 1.0);
  const auto r = infinity_probe(F, bad_weight_w1(), 0.5, {100, 1000, 10000});
  double worst = 0.0;
  bool increasing = true;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    worst = std::max(worst, rel(r.rows[i].q, r.q_limit));
    if (i > 0 && !(r.rows[i].ratio > r.rows[i - 1].ratio)) increasing = false;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "Q limit %.6g; Q(n) = %.6g, %.6g, %.6g; max rel gap %.1f%%; w1 ratio %s",
                r.q_limit, r.rows[0].q, r.rows[1].q, r.rows[2].q, 100.0 * worst,
                increasing ? "strictly increasing" : "not increasing");
  return {worst < 0.05 && increasing, buf};
}

Outcome vnorm_boundary() {
  const auto V = Potential::vsigma(2.0);
  const auto a2 = v_norm_a(V, 2.0);
  const auto a15 = v_norm_a(V, 1.5);
  const double inc2 = rel(a2.cap_values.back(), a2.cap_values[a2.cap_values.size() - 2]);
  const double growth = a15.cap_values.back() / a15.cap_values[a15.cap_values.size() - 2];
  double hom = 0.0;
  for (double lam : {2.0, 10.0}) hom = std::max(hom, rel(v_norm_a(V.scaled(lam), 2.0).value, lam * a2.value));
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "a=2: [V]_a %.8g, increment %.2g%% (%s); a=1.5: growth %.3gx per doubling; homogeneity %.2g",
                a2.value, 100.0 * inc2, a2.saturated ? "saturated" : "unsaturated", growth, hom);
  return {a2.saturated && inc2 < 0.01 && !a15.saturated && growth >= 10.0 && hom < 1e-6, buf};
}

Outcome counting_oracles() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int dense_mismatch = 0;
  int prufer_off = 0;
  long checked_negatives = 0;
  for (int i = 0; i < 50; ++i) {
    const auto field = (i % 2) ? RadialField::bump(1.5 * u01(rng), 0.5 + u01(rng)) : RadialField::zero();
    const auto V = (i % 3 == 0) ? Potential::step_well(5.0 + 20.0 * u01(rng), 0.5 + u01(rng))
                                : Potential::gaussian_well(5.0 + 40.0 * u01(rng), 0.5 + u01(rng));
    const long m = long(std::floor(5.0 * u01(rng))) - 2;
    const std::size_t n = 20 + std::size_t(180.0 * u01(rng));
    const double lo = -6.0 - 4.0 * u01(rng);
    const double hi = 1.0 + 2.0 * u01(rng);
    const Grid g = Grid::uniform(lo, hi, n);
    const auto op = assemble_mode(field, V, m, g);
    const long inertia = count_negative(op).negatives;
    const long dense = oracle::dense_negative_count(op.diag, op.offdiag);
    if (dense != inertia) ++dense_mismatch;
    const long pr = prufer_count(field, V, m, g).count;
    if (std::labs(pr - inertia) > 1) ++prufer_off;
    checked_negatives += inertia;
  }
  const auto F = RadialField::bump(0.5, 1.0);
  const auto W = Potential::gaussian_well(1.0, 1.0);
  const double R = 4.0;
  const double lam = 25.0;
  const long polar = oracle::dense_polar_count(F, W, lam, R, 60, 15);
  GridOptions go;
  go.t_hi = std::log(R);
  const long modes = count_total(F, W, lam, suggest_grid(F, W, lam, go)).total;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "dense vs inertia mismatches %d/50 (%ld eigenvalues), Prufer off by >1 in %d/50; "
                "2D polar %ld vs mode sum %ld",
                dense_mismatch, checked_negatives, prufer_off, polar, modes);
  return {dense_mismatch == 0 && prufer_off == 0 && polar == modes, buf};
}

Outcome strong_coupling() {
  const auto F = RadialField::bump(0.5, 1.0);
  const auto V = Potential::vsigma(2.0);
  const auto s = sweep_exponent(F, V, geometric_ladder(10.0, 1e4, 10), CountMethod::PhaseIntegral);
  std::string overlap;
  bool agree = true;
  for (double lam : {10.0, 20.0, 50.0}) {
    const long ni = count_total(F, V, lam, std::nullopt, CountMethod::Inertia).total;
    const long np = count_total(F, V, lam, std::nullopt, CountMethod::PhaseIntegral).total;
    if (std::fabs(double(ni - np)) > 0.1 * double(np) + 1.0) agree = false;
    overlap += " " + std::to_string(ni) + "/" + std::to_string(np);
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "slope %.4f over [%g, %g]; inertia/phase at lambda 10,20,50:%s", s.fitted_exponent,
                s.fit_lo, s.fit_hi, overlap.c_str());
  return {s.fitted_exponent >= 1.6 && s.fitted_exponent <= 2.2 && agree, buf};
}

Outcome bound_checks() {
  const auto V = Potential::vsigma(2.0);
  bool flagged = false;
  try {
    bound_jst(V);
  } catch (const Error& e) {
    flagged = e.code() == ErrorCode::Unbounded;
  }
  const auto r = verify_counting_bound(RadialField::bump(0.5, 1.0), V, 2.0, geometric_ladder(10.0, 1e4, 10));
  char buf[200];
  std::snprintf(buf, sizeof buf, "jst %s; counting ratio max %.6g, final decade %s", flagged ? "Unbounded" : "finite",
                r.max_ratio, r.final_decade_monotone ? "monotone growth" : "no monotone growth");
  return {flagged && !r.final_decade_monotone, buf};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "identity suite", identity_suite},
      {2, "lambda sandwich", sandwich},
      {3, "flux oracles", flux_oracles},
      {4, "Parseval validation", parseval},
      {5, "Hardy-constant witness", hardy_witness},
      {6, "singular-field witness", singular_witness},
      {7, "optimality at zero", optimality_zero},
      {8, "optimality at infinity", optimality_infinity},
      {9, "[V]_a boundary", vnorm_boundary},
      {10, "counting oracles", counting_oracles},
      {11, "strong coupling", strong_coupling},
      {12, "bound checks", bound_checks},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("CRITERION %2d %s  %s: %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), dt);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(all.size()) - failed, all.size());
  return failed;
}
