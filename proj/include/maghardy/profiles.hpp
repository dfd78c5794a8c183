#pragma once

// Radial magnetic fields and potentials in the log coordinate t = log r.
//
// Densities are handled in scaled form: a field is carried as r^2 B(r) and a
// potential as r^2 V(r), because the form measure r dr becomes e^{2t} dt and
// both quantities stay O(1) at radii that underflow in linear coordinates.
// The flux alpha(t) is the integral of r^2 B over (-inf, t] in t.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "maghardy/error.hpp"
#include "maghardy/log_radius.hpp"
#include "maghardy/quadrature.hpp"

namespace maghardy {

enum class SingularityClass { Regular, Singular, NotLocallyIntegrable };

inline const char* to_string(SingularityClass c) {
  switch (c) {
    case SingularityClass::Regular: return "Regular";
    case SingularityClass::Singular: return "Singular";
    case SingularityClass::NotLocallyIntegrable: return "NotLocallyIntegrable";
  }
  return "?";
}

class RadialField;

struct ZeroField {};
struct Example1Field {
  double b0 = 1.0;
  double gamma = 2.0;
};
struct Example2Field {
  double b0 = 1.0;
  double gamma = 2.0;
};
struct BumpField {
  double total_flux = 0.5;
  double r1 = 1.0;
};
struct SumField {
  std::vector<RadialField> parts;
};
/// User field given through its scaled density r^2 B as a function of position.
/// B vanishes for t < t_lo and t > t_hi.
struct CustomField {
  std::function<double(const LogRadius&)> scaled;
  double t_lo = -kInf;
  double t_hi = kInf;
  std::vector<double> breaks;
  std::optional<SingularityClass> declared;
};

class RadialField {
 public:
  using Kind = std::variant<ZeroField, Example1Field, Example2Field, BumpField, SumField, CustomField>;

  RadialField() = default;
  explicit RadialField(Kind k) : kind_(std::move(k)) {}

  static RadialField zero() { return RadialField(ZeroField{}); }
  static RadialField example1(double b0, double gamma) {
    if (b0 == 0.0 || !std::isfinite(b0)) throw Error(ErrorCode::ParameterError, "example1 needs b0 != 0");
    return RadialField(Example1Field{b0, gamma});
  }
  static RadialField example2(double b0, double gamma) {
    if (b0 == 0.0 || !std::isfinite(b0)) throw Error(ErrorCode::ParameterError, "example2 needs b0 != 0");
    return RadialField(Example2Field{b0, gamma});
  }
  static RadialField bump(double total_flux, double r1 = 1.0) {
    if (!(r1 > 0.0)) throw Error(ErrorCode::ParameterError, "bump radius must be positive");
    return RadialField(BumpField{total_flux, r1});
  }
  static RadialField sum(std::vector<RadialField> parts) { return RadialField(SumField{std::move(parts)}); }
  static RadialField custom(CustomField f) {
    if (!f.scaled) throw Error(ErrorCode::ParameterError, "custom field without profile");
    return RadialField(std::move(f));
  }
  /// Piecewise-linear B(t) from (t, B) rows; zero outside the table.
  static RadialField from_table(std::vector<std::pair<double, double>> rows,
                                std::optional<SingularityClass> declared);

  const Kind& kind() const { return kind_; }
  std::string name() const;

 private:
  Kind kind_ = ZeroField{};
};

// ---------------------------------------------------------------------------
// Table input
// ---------------------------------------------------------------------------

/// Reads two whitespace- or comma-separated columns (t, value). Lines starting
/// with '#' are skipped; t must be strictly increasing.
inline std::vector<std::pair<double, double>> load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::replace(line.begin(), line.end(), ',', ' ');
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double t = 0.0;
    double v = 0.0;
    if (!(ss >> t >> v))
      throw Error(ErrorCode::ConfigError, path + ":" + std::to_string(lineno) + ": expected two numbers");
    if (!rows.empty() && !(t > rows.back().first))
      throw Error(ErrorCode::ConfigError,
                  path + ":" + std::to_string(lineno) + ": t must be strictly increasing");
    rows.emplace_back(t, v);
  }
  if (rows.size() < 2) throw Error(ErrorCode::ConfigError, path + ": need at least two rows");
  return rows;
}

namespace detail {

inline double interp_table(const std::vector<std::pair<double, double>>& rows, double t) {
  if (rows.empty() || t < rows.front().first || t > rows.back().first) return 0.0;
  auto it = std::lower_bound(rows.begin(), rows.end(), t,
                             [](const auto& row, double x) { return row.first < x; });
  if (it == rows.begin()) return it->second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double u = (t - lo.first) / (hi.first - lo.first);
  return lo.second + u * (hi.second - lo.second);
}

inline double bump_coefficient_x(const LogRadius& p, double r1) {
  // x = r^2 / r1^2
  if (p.beyond_double()) return 0.0;
  return std::exp(2.0 * (p.t() - std::log(r1)));
}

}  // namespace detail

inline RadialField RadialField::from_table(std::vector<std::pair<double, double>> rows,
                                           std::optional<SingularityClass> declared) {
  if (rows.size() < 2) throw Error(ErrorCode::ConfigError, "field table needs two rows");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].first > rows[i - 1].first))
      throw Error(ErrorCode::ConfigError, "field table t must be strictly increasing");
  CustomField f;
  f.t_lo = rows.front().first;
  f.t_hi = rows.back().first;
  for (const auto& r : rows) f.breaks.push_back(r.first);
  auto shared = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(rows));
  f.scaled = [shared](const LogRadius& p) {
    return std::exp(2.0 * p.t()) * detail::interp_table(*shared, p.t());
  };
  f.declared = declared;
  return RadialField(std::move(f));
}

inline std::string RadialField::name() const {
  struct V {
    std::string operator()(const ZeroField&) const { return "zero"; }
    std::string operator()(const Example1Field&) const { return "example1"; }
    std::string operator()(const Example2Field&) const { return "example2"; }
    std::string operator()(const BumpField&) const { return "bump"; }
    std::string operator()(const SumField&) const { return "sum"; }
    std::string operator()(const CustomField&) const { return "custom"; }
  };
  return std::visit(V{}, kind_);
}

// ---------------------------------------------------------------------------
// Field evaluation
// ---------------------------------------------------------------------------

/// r^2 B(r) in signed-log form.
inline LogValue scaled_field(const RadialField& field, const LogRadius& p) {
  struct V {
    const LogRadius& p;
    LogValue operator()(const ZeroField&) const { return {}; }
    LogValue operator()(const Example1Field& f) const {
      if (p.t() > -1.0) return {};
      return LogValue::of(f.b0).times_power(p.log_abs_t(), -f.gamma);
    }
    LogValue operator()(const Example2Field& f) const {
      if (p.t() > -2.0) return {};
      const double s = p.log_abs_t();
      return LogValue::from_log(std::log(std::fabs(f.b0)) - s - f.gamma * std::log(s), f.b0 > 0 ? 1 : -1);
    }
    LogValue operator()(const BumpField& f) const {
      const double x = detail::bump_coefficient_x(p, f.r1);
      if (x >= 1.0 || f.total_flux == 0.0) return {};
      return LogValue::of(6.0 * f.total_flux * x * (1.0 - x) * (1.0 - x));
    }
    LogValue operator()(const SumField& f) const {
      LogValue acc;
      for (const auto& part : f.parts) acc = acc + scaled_field(part, p);
      return acc;
    }
    LogValue operator()(const CustomField& f) const {
      if (p.t() < f.t_lo || p.t() > f.t_hi) return {};
      return LogValue::of(f.scaled(p));
    }
  };
  return std::visit(V{p}, field.kind());
}

/// |t| r^2 B(r): the density per unit of log|t|. Computed natively for the
/// closed-form kinds so that deep tails keep full relative precision.
inline LogValue depth_density(const RadialField& field, const LogRadius& p) {
  if (const auto* f = std::get_if<Example1Field>(&field.kind())) {
    if (p.t() > -1.0) return {};
    return LogValue::of(f->b0).times_power(p.log_abs_t(), 1.0 - f->gamma);
  }
  if (const auto* f = std::get_if<Example2Field>(&field.kind())) {
    if (p.t() > -2.0) return {};
    return LogValue::of(f->b0).times_power(std::log(p.log_abs_t()), -f->gamma);
  }
  if (const auto* f = std::get_if<SumField>(&field.kind())) {
    LogValue acc;
    for (const auto& part : f->parts) acc = acc + depth_density(part, p);
    return acc;
  }
  return scaled_field(field, p).times_power(p.log_abs_t(), 1.0);
}

/// B(r) itself; overflows to +-inf at extreme depth by design.
inline double field_value(const RadialField& field, const LogRadius& p) {
  const LogValue b = scaled_field(field, p);
  if (b.is_zero()) return 0.0;
  return b.sign * std::exp(b.log_abs - 2.0 * p.t());
}

inline bool has_closed_form(const RadialField& field) {
  return std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, CustomField>) {
          return false;
        } else if constexpr (std::is_same_v<T, SumField>) {
          return std::all_of(f.parts.begin(), f.parts.end(),
                             [](const RadialField& p) { return has_closed_form(p); });
        } else {
          return true;
        }
      },
      field.kind());
}

inline SingularityClass singularity_class(const RadialField& field) {
  struct V {
    SingularityClass operator()(const ZeroField&) const { return SingularityClass::Regular; }
    SingularityClass operator()(const BumpField&) const { return SingularityClass::Regular; }
    SingularityClass operator()(const Example1Field& f) const {
      return f.gamma > 1.0 ? SingularityClass::Singular : SingularityClass::NotLocallyIntegrable;
    }
    SingularityClass operator()(const Example2Field& f) const {
      return f.gamma > 1.0 ? SingularityClass::Singular : SingularityClass::NotLocallyIntegrable;
    }
    SingularityClass operator()(const SumField& f) const {
      SingularityClass worst = SingularityClass::Regular;
      for (const auto& part : f.parts) worst = std::max(worst, singularity_class(part));
      return worst;
    }
    SingularityClass operator()(const CustomField& f) const {
      if (!f.declared) throw Error(ErrorCode::UnknownClass, "custom field carries no integrability declaration");
      return *f.declared;
    }
  };
  return std::visit(V{}, field.kind());
}

/// Largest t where the field can be nonzero; alpha is constant beyond it.
inline double support_t_max(const RadialField& field) {
  struct V {
    double operator()(const ZeroField&) const { return -kInf; }
    double operator()(const Example1Field&) const { return -1.0; }
    double operator()(const Example2Field&) const { return -2.0; }
    double operator()(const BumpField& f) const { return std::log(f.r1); }
    double operator()(const SumField& f) const {
      double m = -kInf;
      for (const auto& part : f.parts) m = std::max(m, support_t_max(part));
      return m;
    }
    double operator()(const CustomField& f) const { return f.t_hi; }
  };
  return std::visit(V{}, field.kind());
}

inline double support_t_min(const RadialField& field) {
  return std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroField>) {
          return kInf;
        } else if constexpr (std::is_same_v<T, SumField>) {
          double m = kInf;
          for (const auto& part : f.parts) m = std::min(m, support_t_min(part));
          return m;
        } else if constexpr (std::is_same_v<T, CustomField>) {
          return f.t_lo;
        } else {
          return -kInf;
        }
      },
      field.kind());
}

/// Points in t where the profile has a kink or jump.
inline std::vector<double> kinks(const RadialField& field) {
  struct V {
    std::vector<double> operator()(const ZeroField&) const { return {}; }
    std::vector<double> operator()(const Example1Field&) const { return {-1.0}; }
    std::vector<double> operator()(const Example2Field&) const { return {-2.0}; }
    std::vector<double> operator()(const BumpField& f) const { return {std::log(f.r1)}; }
    std::vector<double> operator()(const SumField& f) const {
      std::vector<double> out;
      for (const auto& part : f.parts) {
        auto k = kinks(part);
        out.insert(out.end(), k.begin(), k.end());
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    std::vector<double> operator()(const CustomField& f) const {
      std::vector<double> out = f.breaks;
      if (std::isfinite(f.t_lo)) out.push_back(f.t_lo);
      if (std::isfinite(f.t_hi)) out.push_back(f.t_hi);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
  };
  return std::visit(V{}, field.kind());
}

namespace detail {

inline void require_integrable(const RadialField& field) {
  if (singularity_class(field) == SingularityClass::NotLocallyIntegrable)
    throw Error(ErrorCode::NonIntegrableField, "flux diverges at the origin (gamma <= 1)");
}

/// Integral of r^2 B over [a, b] in t (a may be -inf), evaluated in the depth
/// coordinate z so that slowly decaying tails become exponentially decaying.
inline double flux_segment(const RadialField& field, const LogRadius& a, const LogRadius& b,
                           bool from_minus_inf, double rel_tol) {
  const double za = from_minus_inf ? -kInf : depth_map::z_of(a);
  const double zb = depth_map::z_of(b);
  if (!(zb > za)) return 0.0;
  auto integrand = [&field](double z) {
    if (!std::isfinite(z)) return 0.0;
    const LogRadius p = depth_map::radius(z);
    if (z >= depth_map::kJoin) return scaled_field(field, p).value();
    // dt/dz = |t| s / e with s = log|t| = e^w
    const LogValue v = depth_density(field, p);
    if (v.is_zero()) return 0.0;
    const double w = -(z + kE) / kE;
    return v.sign * std::exp(v.log_abs + w - 1.0);
  };
  std::vector<double> breaks{depth_map::kJoin};
  for (double k : kinks(field))
    if (std::isfinite(k)) breaks.push_back(depth_map::z_of(LogRadius::from_t(k)));
  quad::Tolerance tol;
  tol.rel = rel_tol;
  tol.abs = 1e-300;
  return quad::integrate_breaks(integrand, za, zb, breaks, tol);
}

}  // namespace detail

/// alpha by quadrature only (no closed form), relative tolerance rel_tol.
inline double flux_quadrature(const RadialField& field, const LogRadius& p, double rel_tol = 1e-10) {
  detail::require_integrable(field);
  LogRadius upper = p;
  const double tmax = support_t_max(field);
  if (tmax == -kInf) return 0.0;
  if (p.t() > tmax) upper = LogRadius::from_t(tmax);
  const double tmin = support_t_min(field);
  if (std::isfinite(tmin)) {
    if (upper.t() <= tmin) return 0.0;
    return detail::flux_segment(field, LogRadius::from_t(tmin), upper, false, rel_tol);
  }
  return detail::flux_segment(field, upper, upper, true, rel_tol);
}

/// alpha(t): closed form where available, quadrature otherwise.
inline double flux(const RadialField& field, const LogRadius& p) {
  struct V {
    const LogRadius& p;
    const RadialField& self;
    double operator()(const ZeroField&) const { return 0.0; }
    double operator()(const Example1Field& f) const {
      if (!(f.gamma > 1.0)) throw Error(ErrorCode::NonIntegrableField, "example1 requires gamma > 1");
      const double c = f.b0 / (f.gamma - 1.0);
      if (p.t() > -1.0) return c;
      return c * std::exp((1.0 - f.gamma) * p.log_abs_t());
    }
    double operator()(const Example2Field& f) const {
      if (!(f.gamma > 1.0)) throw Error(ErrorCode::NonIntegrableField, "example2 requires gamma > 1");
      const double c = f.b0 / (f.gamma - 1.0);
      const double s = p.t() > -2.0 ? std::log(2.0) : p.log_abs_t();
      return c * std::pow(s, 1.0 - f.gamma);
    }
    double operator()(const BumpField& f) const {
      const double x = detail::bump_coefficient_x(p, f.r1);
      if (x >= 1.0) return f.total_flux;
      return -f.total_flux * std::expm1(3.0 * std::log1p(-x));
    }
    double operator()(const SumField& f) const {
      double acc = 0.0;
      for (const auto& part : f.parts) acc += flux(part, p);
      return acc;
    }
    double operator()(const CustomField&) const { return flux_quadrature(self, p); }
  };
  return std::visit(V{p, field}, field.kind());
}

inline double flux_t(const RadialField& field, double t) { return flux(field, LogRadius::from_t(t)); }

/// alpha at +infinity.
inline double total_flux(const RadialField& field) {
  const double tmax = support_t_max(field);
  if (tmax == -kInf) return 0.0;
  if (std::isfinite(tmax)) return flux(field, LogRadius::from_t(tmax));
  return flux(field, LogRadius::from_t(1e6));
}

/// Phi = alpha / r.
inline double phi(const RadialField& field, const LogRadius& p) {
  const double a = flux(field, p);
  if (a == 0.0) return 0.0;
  return a * std::exp(-p.t());
}

/// Azimuthal component of the Poincare-gauge vector potential; for radial
/// fields it coincides with Phi.
inline double azimuthal_gauge(const RadialField& field, const LogRadius& p) { return phi(field, p); }

/// alpha at sorted positions. Fields without closed form are integrated
/// cumulatively between consecutive positions.
inline std::vector<double> flux_on_nodes(const RadialField& field, const std::vector<LogRadius>& pts) {
  std::vector<double> out(pts.size());
  if (has_closed_form(field)) {
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = flux(field, pts[i]);
    return out;
  }
  detail::require_integrable(field);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == 0) {
      out[i] = flux_quadrature(field, pts[i]);
      continue;
    }
    const double tmin = support_t_min(field);
    const double tmax = support_t_max(field);
    const LogRadius a = pts[i - 1];
    LogRadius b = pts[i];
    if (b.t() <= tmin || a.t() >= tmax) {
      out[i] = out[i - 1];
      continue;
    }
    if (b.t() > tmax) b = LogRadius::from_t(tmax);
    const LogRadius a2 = a.t() < tmin ? LogRadius::from_t(tmin) : a;
    out[i] = out[i - 1] + detail::flux_segment(field, a2, b, false, 1e-10);
  }
  return out;
}

/// Bundles a field with its flux function.
struct FluxProfile {
  RadialField field;
  bool closed_form = true;

  explicit FluxProfile(RadialField f) : field(std::move(f)), closed_form(has_closed_form(field)) {}
  double alpha(const LogRadius& p) const { return flux(field, p); }
  double alpha_t(double t) const { return flux_t(field, t); }
  double phi_at(const LogRadius& p) const { return phi(field, p); }
};

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

struct ZeroPotential {};
struct VSigmaPotential {
  double sigma = 2.0;
};
/// V = depth * exp(-r^2 / width^2).
struct GaussianWellPotential {
  double depth = 1.0;
  double width = 1.0;
};
/// V = depth on r < radius.
struct StepWellPotential {
  double depth = 1.0;
  double radius = 1.0;
};
/// Scaled density r^2 V as a function of position, zero outside [t_lo, t_hi].
struct CustomPotential {
  std::function<double(const LogRadius&)> scaled;
  double t_lo = -kInf;
  double t_hi = kInf;
  std::vector<double> breaks;
  bool depth_coordinate = false;
};

class Potential {
 public:
  using Kind = std::variant<ZeroPotential, VSigmaPotential, GaussianWellPotential, StepWellPotential,
                            CustomPotential>;

  Potential() = default;
  explicit Potential(Kind k, double coupling = 1.0) : kind_(std::move(k)), coupling_(coupling) {}

  static Potential zero() { return Potential(ZeroPotential{}); }
  static Potential vsigma(double sigma) {
    if (!(sigma > 1.0)) throw Error(ErrorCode::ParameterError, "vsigma requires sigma > 1");
    return Potential(VSigmaPotential{sigma});
  }
  static Potential gaussian_well(double depth, double width) {
    if (!(width > 0.0)) throw Error(ErrorCode::ParameterError, "gaussian width must be positive");
    return Potential(GaussianWellPotential{depth, width});
  }
  static Potential step_well(double depth, double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::ParameterError, "step radius must be positive");
    return Potential(StepWellPotential{depth, radius});
  }
  static Potential custom(CustomPotential c) {
    if (!c.scaled) throw Error(ErrorCode::ParameterError, "custom potential without profile");
    return Potential(std::move(c));
  }
  /// Piecewise-linear V(t) from (t, V) rows.
  static Potential from_table(std::vector<std::pair<double, double>> rows) {
    if (rows.size() < 2) throw Error(ErrorCode::ConfigError, "potential table needs two rows");
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(rows[i].first > rows[i - 1].first))
        throw Error(ErrorCode::ConfigError, "potential table t must be strictly increasing");
    CustomPotential c;
    c.t_lo = rows.front().first;
    c.t_hi = rows.back().first;
    auto shared = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(rows));
    c.scaled = [shared](const LogRadius& p) {
      return std::exp(2.0 * p.t()) * detail::interp_table(*shared, p.t());
    };
    return Potential(std::move(c));
  }

  /// Same profile with coupling multiplied by lambda.
  Potential scaled(double lambda) const { return Potential(kind_, coupling_ * lambda); }

  const Kind& kind() const { return kind_; }
  double coupling() const { return coupling_; }
  bool is_zero() const { return std::holds_alternative<ZeroPotential>(kind_) || coupling_ == 0.0; }
  std::string name() const {
    struct V {
      std::string operator()(const ZeroPotential&) const { return "zero"; }
      std::string operator()(const VSigmaPotential&) const { return "vsigma"; }
      std::string operator()(const GaussianWellPotential&) const { return "gaussian"; }
      std::string operator()(const StepWellPotential&) const { return "step"; }
      std::string operator()(const CustomPotential&) const { return "custom"; }
    };
    return std::visit(V{}, kind_);
  }

 private:
  Kind kind_ = ZeroPotential{};
  double coupling_ = 1.0;
};

/// coupling * r^2 V(r) in signed-log form.
inline LogValue scaled_potential(const Potential& V, const LogRadius& p) {
  if (V.coupling() == 0.0) return {};
  struct Vis {
    const LogRadius& p;
    LogValue operator()(const ZeroPotential&) const { return {}; }
    LogValue operator()(const VSigmaPotential& v) const {
      if (p.t() > -2.0) return {};
      const double s = p.log_abs_t();
      return LogValue::from_log(-2.0 * s - std::log(s) / v.sigma);
    }
    LogValue operator()(const GaussianWellPotential& g) const {
      if (g.depth == 0.0 || p.beyond_double()) return {};
      const double x = std::exp(2.0 * (p.t() - std::log(g.width)));
      return LogValue::from_log(std::log(std::fabs(g.depth)) + 2.0 * p.t() - x, g.depth > 0 ? 1 : -1);
    }
    LogValue operator()(const StepWellPotential& s) const {
      if (s.depth == 0.0 || p.t() >= std::log(s.radius) || p.beyond_double()) return {};
      return LogValue::from_log(std::log(std::fabs(s.depth)) + 2.0 * p.t(), s.depth > 0 ? 1 : -1);
    }
    LogValue operator()(const CustomPotential& c) const {
      if (p.t() < c.t_lo || p.t() > c.t_hi) return {};
      return LogValue::of(c.scaled(p));
    }
  };
  return std::visit(Vis{p}, V.kind()).scaled(V.coupling());
}

/// t^2 r^2 V(r) (times coupling), computed natively for VSigma so that the
/// t^2 growth and r^2 decay cancel exactly at extreme depth.
inline LogValue potential_times_t2(const Potential& V, const LogRadius& p) {
  if (const auto* vs = std::get_if<VSigmaPotential>(&V.kind())) {
    if (p.t() > -2.0 || V.coupling() == 0.0) return {};
    return LogValue::from_log(-std::log(p.log_abs_t()) / vs->sigma).scaled(V.coupling());
  }
  return scaled_potential(V, p).times_power(p.log_abs_t(), 2.0);
}

inline double scaled_potential_t(const Potential& V, double t) {
  return scaled_potential(V, LogRadius::from_t(t)).value();
}

/// coupling * V(r).
inline double potential_value(const Potential& V, const LogRadius& p) {
  const LogValue v = scaled_potential(V, p);
  if (v.is_zero()) return 0.0;
  return v.sign * std::exp(v.log_abs - 2.0 * p.t());
}

/// Largest t where the potential matters (the Gaussian tail is cut where it is
/// below 1e-30 of its peak).
inline double support_t_max(const Potential& V) {
  struct Vis {
    double operator()(const ZeroPotential&) const { return -kInf; }
    double operator()(const VSigmaPotential&) const { return -2.0; }
    double operator()(const GaussianWellPotential& g) const { return std::log(g.width) + 2.2; }
    double operator()(const StepWellPotential& s) const { return std::log(s.radius); }
    double operator()(const CustomPotential& c) const { return c.t_hi; }
  };
  if (V.coupling() == 0.0) return -kInf;
  return std::visit(Vis{}, V.kind());
}

inline double support_t_min(const Potential& V) {
  if (const auto* c = std::get_if<CustomPotential>(&V.kind())) return c->t_lo;
  return -kInf;
}

inline std::vector<double> kinks(const Potential& V) {
  if (const auto* c = std::get_if<CustomPotential>(&V.kind())) {
    std::vector<double> out = c->breaks;
    if (std::isfinite(c->t_lo)) out.push_back(c->t_lo);
    if (std::isfinite(c->t_hi)) out.push_back(c->t_hi);
    std::sort(out.begin(), out.end());
    return out;
  }
  if (std::holds_alternative<VSigmaPotential>(V.kind())) return {-2.0};
  if (const auto* s = std::get_if<StepWellPotential>(&V.kind())) return {std::log(s->radius)};
  return {};
}

/// Potentials whose interesting region extends to doubly-exponential depth.
inline bool needs_depth_coordinate(const Potential& V) {
  if (std::holds_alternative<VSigmaPotential>(V.kind())) return true;
  if (const auto* c = std::get_if<CustomPotential>(&V.kind())) return c->depth_coordinate;
  return false;
}

}  // namespace maghardy
