#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "maghardy/counting.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace maghardy;
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

TEST(CountTotal, ZeroCoupling) {
  const auto V = Potential::gaussian_well(1.0, 1.0);
  EXPECT_EQ(count_total(RadialField::zero(), V, 0.0).total, 0);
  EXPECT_EQ(count_total(RadialField::bump(0.5), Potential::zero(), 5.0).total, 0);
  // with a Hardy inequality available, weak coupling gives no bound states
  for (double lam : {1e-3, 1e-2})
    EXPECT_EQ(count_total(RadialField::bump(0.5, 1.0), V, lam).total, 0) << lam;
  EXPECT_CODE(count_total(RadialField::zero(), V, -1.0), ErrorCode::ParameterError);
}

TEST(CountTotal, ReportInvariants) {
  const auto r = count_total(RadialField::bump(0.5, 1.0), Potential::gaussian_well(1.0, 1.0), 60.0);
  long sum = 0;
  for (const auto& [m, n] : r.per_mode) {
    EXPECT_LE(std::labs(m), r.m_max);
    sum += n;
  }
  EXPECT_EQ(sum, r.total);
  // m = 0 sees neither barrier nor well as r -> 0, so the margin is exactly 0 there
  EXPECT_GE(r.forbidden_margin, 0.0);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.method, CountMethod::Inertia);
  EXPECT_EQ(r.zero_pivots, 0);
}

TEST(CountTotal, MatchesDensePolarSolver) {
  // disc of radius R with Dirichlet rim on both sides
  const double R = 3.0;
  const auto V = Potential::gaussian_well(1.0, 1.0);
  for (const auto& f : {RadialField::zero(), RadialField::bump(0.5, 1.0)}) {
    for (double lam : {10.0, 20.0}) {
      GridOptions opt;
      opt.t_hi = std::log(R);
      const auto g = suggest_grid(f, V, lam, opt);
      const long modes = count_total(f, V, lam, g).total;
      const long dense = oracle::dense_polar_count(f, V, lam, R, 48, 13);
      EXPECT_EQ(modes, dense) << f.name() << " lambda " << lam;
    }
  }
}

TEST(CountTotal, ModewiseOrderingAgainstZeroField) {
  // 0 <= alpha <= 1/2: (m - alpha)^2 >= m^2 for m <= 0 and <= m^2 for m >= 1
  const auto f = RadialField::bump(0.5, 1.0);
  for (const auto& V : {Potential::gaussian_well(1.0, 1.0), Potential::step_well(2.0, 1.5)})
    for (double lam : {5.0, 20.0, 60.0, 150.0}) {
      const Grid g = suggest_grid(f, V, lam);
      const auto mag = count_total(f, V, lam, g);
      const auto bare = count_total(RadialField::zero(), V, lam, g);
      for (const auto& [m, n] : mag.per_mode) {
        const long b = bare.per_mode.count(m) ? bare.per_mode.at(m) : 0;
        if (m <= 0) EXPECT_LE(n, b) << V.name() << " " << lam << " m=" << m;
        else EXPECT_GE(n, b) << V.name() << " " << lam << " m=" << m;
      }
      // diamagnetic inequality for the bottom of the spectrum
      double e_mag = kInf, e_bare = kInf;
      const auto W = V.scaled(lam);
      for (long m = -3; m <= 3; ++m) {
        e_mag = std::min(e_mag, smallest_eigenvalue(assemble_mode(f, W, m, g)));
        e_bare = std::min(e_bare, smallest_eigenvalue(assemble_mode(RadialField::zero(), W, m, g)));
      }
      EXPECT_GE(e_mag, e_bare - 1e-9 * std::fabs(e_bare)) << V.name() << " " << lam;
    }
}

TEST(CountTotal, TotalsNeedNotBeOrdered) {
  // A half-integer flux lowers the m = 1 barrier to 1/4, so the magnetic
  // total can exceed the field-free one.
  const auto V = Potential::step_well(2.0, 1.5);
  const Grid g = suggest_grid(RadialField::bump(0.5, 1.0), V, 20.0);
  EXPECT_GT(count_total(RadialField::bump(0.5, 1.0), V, 20.0, g).total,
            count_total(RadialField::zero(), V, 20.0, g).total);
}

TEST(CountTotal, MonotoneInCouplingAndMethodsAgree) {
  const auto f = RadialField::bump(0.5, 1.0);
  const auto V = Potential::gaussian_well(1.0, 1.0);
  const auto lams = geometric_ladder(5.0, 200.0, 8);
  const Grid g = suggest_grid(f, V, lams.back());
  long prev_i = 0;
  long prev_p = 0;
  for (double lam : lams) {
    const auto ri = count_total(f, V, lam, g, CountMethod::Inertia);
    const auto rp = count_total(f, V, lam, g, CountMethod::Prufer);
    EXPECT_GE(ri.total, prev_i);
    EXPECT_GE(rp.total, prev_p - 1);
    EXPECT_LE(std::labs(ri.total - rp.total), 1 + ri.m_max) << lam;
    prev_i = ri.total;
    prev_p = rp.total;
  }
}

TEST(CountTotal, PhaseIntegralNearInertia) {
  const auto f = RadialField::bump(0.5, 1.0);
  const auto V = Potential::gaussian_well(1.0, 1.0);
  const auto ph = count_total(f, V, 200.0, std::nullopt, CountMethod::PhaseIntegral);
  const auto in = count_total(f, V, 200.0);
  EXPECT_EQ(ph.method, CountMethod::PhaseIntegral);
  EXPECT_LT(std::fabs(ph.real_total - double(in.total)), 0.15 * double(in.total));
  for (const auto& [m, x] : ph.per_mode_real) EXPECT_EQ(ph.per_mode.at(m), long(std::floor(x + 0.5)));
}

TEST(BoundJst, Values) {
  EXPECT_EQ(bound_jst(Potential::zero()), 0.0);
  const auto G = Potential::gaussian_well(1.0, 1.0);
  const double want = GK::integrate([](double r) { return std::exp(-r * r) * (1.0 + std::fabs(std::log(r))) * r; },
                                    0.0, 1.0, 20, 1e-14) +
                      GK::integrate([](double r) { return std::exp(-r * r) * (1.0 + std::log(r)) * r; }, 1.0,
                                    kInf, 20, 1e-14);
  const double v = bound_jst(G);
  EXPECT_LT(rel_err(v, want), 1e-8);
  BoundOptions tight;
  tight.rel_tol = 1e-11;
  EXPECT_LT(rel_err(bound_jst(G, tight), v), 1e-8);
  EXPECT_LT(rel_err(bound_jst(G.scaled(2.0)), 2.0 * v), 1e-10);
  const auto S = Potential::step_well(3.0, 2.0);
  EXPECT_LT(rel_err(bound_jst(S.scaled(2.0)), 2.0 * bound_jst(S)), 1e-10);
}

TEST(BoundJst, VSigmaUnbounded) {
  EXPECT_CODE(bound_jst(Potential::vsigma(2.0)), ErrorCode::Unbounded);
  const auto scan = bound_jst_scan(Potential::vsigma(2.0));
  EXPECT_FALSE(scan.saturated);
  ASSERT_GE(scan.cap_values.size(), 2u);
  EXPECT_GT(scan.cap_values.back(), 10.0 * scan.cap_values.front());
}

TEST(CountingBound, ZeroPotential) {
  const auto r = verify_counting_bound(RadialField::bump(0.5), Potential::zero(), 2.0, {1.0, 10.0});
  for (const auto& row : r.rows) EXPECT_EQ(row.ratio, 0.0);
  EXPECT_EQ(r.max_ratio, 0.0);
}

TEST(CountingBound, VSigmaBoundedRatio) {
  const auto V = Potential::vsigma(2.0);
  const auto r = verify_counting_bound(RadialField::bump(0.5, 1.0), V, 2.0, geometric_ladder(10.0, 1e4, 10));
  EXPECT_FALSE(r.final_decade_monotone);
  EXPECT_TRUE(std::isfinite(r.max_ratio));
  EXPECT_GT(r.max_ratio, 0.0);
  // [lambda V]_a^a from the functional directly
  for (double lam : {10.0, 1000.0}) {
    const double direct = v_norm_a(V.scaled(lam), 2.0).value_pow_a;
    EXPECT_LT(rel_err(direct, std::pow(lam * r.v_norm, 2.0)), 1e-5) << lam;
  }
  EXPECT_CODE(verify_counting_bound(RadialField::bump(0.5), V, 1.5, {10.0}), ErrorCode::PreconditionError);
}

TEST(Sweep, VSigmaExponent) {
  const auto s = sweep_exponent(RadialField::bump(0.5, 1.0), Potential::vsigma(2.0), geometric_ladder(10.0, 1e4, 13));
  EXPECT_GE(s.fitted_exponent, 1.6);
  EXPECT_LE(s.fitted_exponent, 2.2);
  EXPECT_NEAR(s.fit_hi / s.fit_lo, 10.0, 1e-6);
  for (std::size_t i = 1; i < s.reports.size(); ++i) EXPECT_GE(s.reports[i].total, s.reports[i - 1].total);
}

TEST(Sweep, GaussianWeyl) {
  const auto V = Potential::gaussian_well(1.0, 1.0);
  const auto s = sweep_exponent(RadialField::bump(0.5, 1.0), V, geometric_ladder(40.0, 4000.0, 9));
  EXPECT_NEAR(s.fitted_exponent, 1.0, 0.15);
  // semiclassical count lambda / (4 pi) * int V dx = lambda / 4 for this well
  const auto& top = s.reports.back();
  EXPECT_LT(rel_err(top.real_total, top.lambda / 4.0), 0.05);
  for (std::size_t i = 1; i < s.reports.size(); ++i) EXPECT_GE(s.reports[i].total, s.reports[i - 1].total);
}

TEST(Sweep, Errors) {
  const auto V = Potential::gaussian_well(1.0, 1.0);
  EXPECT_CODE(sweep_exponent(RadialField::bump(0.5), V, {1.0, 2.0, 4.0}), ErrorCode::ParameterError);
  EXPECT_CODE(sweep_exponent(RadialField::bump(0.5), V, {1.0, 2.0, 3.0, 4.0, 5.0}), ErrorCode::ParameterError);
  EXPECT_CODE(sweep_exponent(RadialField::bump(0.5), V, geometric_ladder(1e-3, 1e-1, 5)),
              ErrorCode::InsufficientGrowth);
  EXPECT_CODE(geometric_ladder(0.0, 1.0, 5), ErrorCode::ParameterError);
}

TEST(Method, Parse) {
  EXPECT_EQ(parse_count_method("inertia"), CountMethod::Inertia);
  EXPECT_EQ(parse_count_method("prufer"), CountMethod::Prufer);
  EXPECT_EQ(parse_count_method("phase"), CountMethod::PhaseIntegral);
  EXPECT_EQ(std::string(to_string(CountMethod::Prufer)), "prufer");
  EXPECT_CODE(parse_count_method("dense"), ErrorCode::ConfigError);
}

TEST(SuggestGrid, NodeCapRefusesHugeGrids) {
  const auto f = RadialField::bump(0.5, 1.0);
  const auto V = Potential::vsigma(2.0);
  GridOptions opt;
  opt.max_nodes = 100'000;
  EXPECT_CODE(suggest_grid(f, V, 50.0, opt), ErrorCode::ParameterError);
  // the same coupling stays in reach of the phase integral
  EXPECT_GT(count_total(f, V, 50.0, std::nullopt, CountMethod::PhaseIntegral).total, 0);
  opt.max_nodes = 100'000'000;
  EXPECT_GT(suggest_grid(f, V, 50.0, opt).size(), 100'000u);
}
