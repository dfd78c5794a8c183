#pragma once

// Config handling, subcommand dispatch and report files for the
// magnetic_hardy tool. Kept in the library so tests can drive runs directly.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "maghardy/counting.hpp"
#include "maghardy/error.hpp"
#include "maghardy/grid.hpp"
#include "maghardy/profiles.hpp"
#include "maghardy/quadform.hpp"
#include "maghardy/spectral.hpp"
#include "maghardy/weights.hpp"

namespace maghardy::cli {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"flux",  "weight", "vnorm", "identity-check", "probe-zero", "probe-infinity",
                                          "hardy", "count",  "sweep", "bound"};
  return s;
}

/// Every accepted key with its default. An empty default means "unset".
inline const std::map<std::string, std::string>& config_defaults() {
  static const std::map<std::string, std::string> d{
      {"field.kind", "bump"},
      {"field.b0", "1"},
      {"field.gamma", "2"},
      {"field.total_flux", "0.5"},
      {"field.r1", "1"},
      {"field.table", ""},
      {"field.class", ""},
      {"potential.kind", "zero"},
      {"potential.sigma", "2"},
      {"potential.depth", "1"},
      {"potential.width", "1"},
      {"potential.radius", "1"},
      {"potential.table", ""},
      {"weight.kind", "rho0"},
      {"weight.b", "2"},
      {"weight.r0", "2"},
      {"weight.mu", "0.5"},
      {"grid.t_min", "-8"},
      {"grid.t_max", "8"},
      {"grid.n", "0"},
      {"grid.coordinate", "linear"},
      {"method", ""},
      {"lambda", "1"},
      {"lambdas", ""},
      {"lambda_min", "10"},
      {"lambda_max", "10000"},
      {"lambda_points", "10"},
      {"a", "2"},
      {"caps", "16,32"},
      {"r", "1"},
      {"r0", "e"},
      {"points", "1000"},
      {"b", "1.5"},
      {"alpha", "0.4"},
      {"ks", "8,16,32,64"},
      {"alpha_exp", "0.5"},
      {"ns", "100,1000,10000"},
      {"m_lo", "-3"},
      {"m_hi", "3"},
      {"refinements", "1"},
      {"seed", "1"},
      {"out_dir", "."},
  };
  return d;
}

/// Short flag spellings: --field, --potential and --weight set the .kind key,
/// and --sigma style names resolve to a dotted key when the suffix is unique.
inline const std::map<std::string, std::string>& flag_aliases() {
  static const std::map<std::string, std::string> a = [] {
    std::map<std::string, std::string> out;
    std::map<std::string, int> seen;
    const auto& d = config_defaults();
    for (const auto& [k, v] : d) {
      const auto dot = k.find('.');
      if (dot != std::string::npos) ++seen[k.substr(dot + 1)];
    }
    for (const auto& [k, v] : d) {
      const auto dot = k.find('.');
      if (dot == std::string::npos) continue;
      const std::string head = k.substr(0, dot), tail = k.substr(dot + 1);
      if (tail == "kind") out[head] = k;
      else if (seen[tail] == 1 && !d.count(tail)) out[tail] = k;
    }
    return out;
  }();
  return a;
}

struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> values = config_defaults();

  void set(const std::string& key, const std::string& value, const std::string& where = "") {
    if (config_defaults().count(key)) {
      values[key] = value;
      return;
    }
    const auto alias = flag_aliases().find(key);
    if (alias == flag_aliases().end())
      throw Error(ErrorCode::ConfigError, (where.empty() ? "" : where + ": ") + "unknown key '" + key + "'");
    values[alias->second] = value;
  }
  const std::string& str(const std::string& key) const { return values.at(key); }

  double num(const std::string& key) const {
    const std::string& s = values.at(key);
    if (s == "e") return kE;
    if (s == "-e") return -kE;
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "key '" + key + "': expected a number, got '" + s + "'");
    }
  }
  long integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v)) throw Error(ErrorCode::ConfigError, "key '" + key + "': expected an integer");
    return long(v);
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(values.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      RunConfig tmp;
      tmp.values["a"] = item;
      try {
        out.push_back(tmp.num("a"));
      } catch (const Error&) {
        throw Error(ErrorCode::ConfigError, "key '" + key + "': bad list entry '" + item + "'");
      }
    }
    return out;
  }

  json echo() const {
    json j;
    j["subcommand"] = subcommand;
    for (const auto& [k, v] : values) j["config"][k] = v;
    return j;
  }
  static RunConfig from_echo(const json& j) {
    RunConfig c;
    c.subcommand = j.at("subcommand").get<std::string>();
    for (const auto& [k, v] : j.at("config").items()) c.set(k, v.get<std::string>());
    return c;
  }
};

/// key = value lines; '#' starts a comment. Unknown keys are reported with
/// their line number.
inline void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source = "config") {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "subcommand") {
      cfg.subcommand = value;
      continue;
    }
    cfg.set(key, value, where);
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str(), path);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  RunConfig config;
  json payload;
  std::vector<std::string> warnings;
  std::vector<Table> tables;
  double wall_clock = 0.0;
  int exit_code = 0;
  std::string error;

  void warn(const std::string& w) {
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }
  json to_json() const {
    json j = config.echo();
    j["tool_version"] = kToolVersion;
    j["results"] = payload;
    j["warnings"] = warnings;
    if (!error.empty()) j["error"] = error;
    j["exit_code"] = exit_code;
    j["wall_clock"] = wall_clock;
    return j;
  }
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* l = std::get_if<long>(&c)) return std::to_string(*l);
  return std::get<std::string>(c);
}

inline std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += "\n";
  }
  return out;
}

/// FNV-1a of the config echo, as 16 hex digits.
inline std::string config_hash(const RunConfig& cfg) {
  const std::string s = cfg.echo().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Writes <sub>-<hash>.json and one <sub>-<hash>-<table>.csv per table;
/// returns the written paths.
inline std::vector<std::string> emit_plotdata(const Report& rep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir + ": " + ec.message());
  const std::string stem = rep.config.subcommand + "-" + config_hash(rep.config);
  std::vector<std::string> paths;
  auto write = [&](const std::string& name, const std::string& body) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << body;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
    paths.push_back(path);
  };
  write(stem + ".json", rep.to_json().dump(2) + "\n");
  for (const auto& t : rep.tables) write(stem + "-" + t.name + ".csv", table_csv(t));
  return paths;
}

// ---------------------------------------------------------------------------
// Building objects from the config
// ---------------------------------------------------------------------------

// count defaults to inertia; sweep and bound fit large couplings, so phase.
inline CountMethod method_for(const RunConfig& c) {
  const std::string& m = c.str("method");
  if (!m.empty()) return parse_count_method(m);
  return c.subcommand == "count" ? CountMethod::Inertia : CountMethod::PhaseIntegral;
}

inline RadialField make_field(const RunConfig& c) {
  const std::string k = c.str("field.kind");
  if (k == "zero") return RadialField::zero();
  if (k == "example1") return RadialField::example1(c.num("field.b0"), c.num("field.gamma"));
  if (k == "example2") return RadialField::example2(c.num("field.b0"), c.num("field.gamma"));
  if (k == "bump") return RadialField::bump(c.num("field.total_flux"), c.num("field.r1"));
  if (k == "table") {
    if (c.str("field.table").empty()) throw Error(ErrorCode::ConfigError, "field.kind = table needs field.table");
    std::optional<SingularityClass> declared;
    const std::string cls = c.str("field.class");
    if (cls == "regular") declared = SingularityClass::Regular;
    else if (cls == "singular") declared = SingularityClass::Singular;
    else if (!cls.empty()) throw Error(ErrorCode::ConfigError, "field.class must be regular or singular");
    return RadialField::from_table(load_table(c.str("field.table")), declared);
  }
  throw Error(ErrorCode::ConfigError, "unknown field.kind '" + k + "'");
}

inline Potential make_potential(const RunConfig& c) {
  const std::string k = c.str("potential.kind");
  if (k == "zero") return Potential::zero();
  if (k == "vsigma") return Potential::vsigma(c.num("potential.sigma"));
  if (k == "gaussian") return Potential::gaussian_well(c.num("potential.depth"), c.num("potential.width"));
  if (k == "step") return Potential::step_well(c.num("potential.depth"), c.num("potential.radius"));
  if (k == "table") {
    if (c.str("potential.table").empty())
      throw Error(ErrorCode::ConfigError, "potential.kind = table needs potential.table");
    return Potential::from_table(load_table(c.str("potential.table")));
  }
  throw Error(ErrorCode::ConfigError, "unknown potential.kind '" + k + "'");
}

inline Weight make_weight(const RunConfig& c, const RadialField& field) {
  const std::string k = c.str("weight.kind");
  if (k == "rho0") return Weight::rho0();
  if (k == "log_power") return Weight::log_power(c.num("weight.b"));
  if (k == "singular_rho") return Weight::singular_rho_at(field, select_eta(field));
  if (k == "cfkp") return Weight::cfkp(c.num("weight.r0"));
  if (k == "aharonov_bohm") return Weight::aharonov_bohm(c.num("weight.mu"));
  throw Error(ErrorCode::ConfigError, "unknown weight.kind '" + k + "'");
}

/// The configured grid, or nothing when grid.n = 0.
inline std::optional<Grid> make_grid(const RunConfig& c) {
  const long n = c.integer("grid.n");
  if (n == 0) return std::nullopt;
  if (n < 3) throw Error(ErrorCode::ConfigError, "grid.n must be 0 or at least 3");
  const std::string coord = c.str("grid.coordinate");
  if (coord == "linear") return Grid::uniform(c.num("grid.t_min"), c.num("grid.t_max"), std::size_t(n));
  if (coord == "log_depth") {
    const double s_max = c.num("grid.t_min");
    if (!(s_max < -1.0)) throw Error(ErrorCode::ConfigError, "log_depth grid needs grid.t_min < -1");
    const double depth = std::log(-s_max);
    return Grid::log_depth(depth, c.num("grid.t_max"), std::size_t(n / 2), std::size_t(n - n / 2));
  }
  throw Error(ErrorCode::ConfigError, "grid.coordinate must be linear or log_depth");
}

inline std::vector<double> lambda_ladder(const RunConfig& c) {
  auto l = c.list("lambdas");
  if (!l.empty()) return l;
  return geometric_ladder(c.num("lambda_min"), c.num("lambda_max"), std::size_t(c.integer("lambda_points")));
}

inline json to_json_double(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline void run_flux(const RunConfig& c, Report& rep) {
  const RadialField field = make_field(c);
  const LogRadius p = LogRadius::from_r(c.num("r"));
  rep.payload["field"] = field.name();
  rep.payload["r"] = c.num("r");
  rep.payload["t"] = p.t();
  rep.payload["alpha"] = to_json_double(flux(field, p));
  rep.payload["scaled_field"] = to_json_double(scaled_field(field, p).value());
  rep.payload["total_flux"] = to_json_double(total_flux(field));
  try {
    rep.payload["class"] = to_string(singularity_class(field));
  } catch (const Error& e) {
    rep.payload["class"] = "unknown";
  }
  if (auto g = make_grid(c)) {
    Table t{"flux", {"t", "alpha"}, {}};
    const auto radii = g->radii();
    const auto a = flux_on_nodes(field, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) t.rows.push_back({radii[i].t(), a[i]});
    rep.tables.push_back(std::move(t));
  }
}

inline void run_weight(const RunConfig& c, Report& rep) {
  const RadialField field = make_field(c);
  const Weight w = make_weight(c, field);
  const LogRadius p = LogRadius::from_r(c.num("r"));
  rep.payload["weight"] = c.str("weight.kind");
  rep.payload["r"] = c.num("r");
  rep.payload["value"] = to_json_double(eval_weight(w, p));
  rep.payload["scaled"] = to_json_double(scaled_weight(w, p).value());
  if (c.str("weight.kind") == "singular_rho") {
    const LogRadius eta = select_eta(field);
    rep.payload["log_eta"] = to_json_double(eta.t());
    rep.payload["log_abs_log_eta"] = eta.log_abs_t();
  }
  if (auto g = make_grid(c)) {
    Table t{"weight", {"t", "scaled_weight"}, {}};
    for (const auto& q : g->radii()) t.rows.push_back({q.t(), scaled_weight(w, q).value()});
    rep.tables.push_back(std::move(t));
  }
}

inline void run_vnorm(const RunConfig& c, Report& rep) {
  const Potential V = make_potential(c);
  VNormOptions opt;
  opt.caps = c.list("caps");
  const auto r = v_norm_a(V, c.num("a"), opt);
  rep.payload["a"] = r.a;
  rep.payload["value"] = to_json_double(r.value);
  rep.payload["value_pow_a"] = to_json_double(r.value_pow_a);
  rep.payload["arg_t"] = to_json_double(r.arg_tau);
  rep.payload["saturated"] = r.saturated;
  rep.payload["cap_sequence"] = r.cap_sequence;
  json cv = json::array();
  for (double v : r.cap_values) cv.push_back(to_json_double(v));
  rep.payload["cap_values"] = cv;
  for (const auto& w : r.warnings) rep.warn(w);
  Table t{"vnorm", {"tau", "tau^a*I"}, {}};
  for (const auto& [tau, v] : r.table) t.rows.push_back({tau, v});
  rep.tables.push_back(std::move(t));
}

inline void run_identity(const RunConfig& c, Report& rep) {
  const double r0 = c.num("r0");
  const std::size_t n = std::size_t(c.integer("points"));
  if (n < 4) throw Error(ErrorCode::ConfigError, "points must be at least 4");
  auto below = log_spaced_radii(r0 * std::exp(-20.0), r0 * std::exp(-0.01), n / 2);
  auto above = log_spaced_radii(r0 * std::exp(0.01), r0 * std::exp(20.0), n - n / 2);
  below.insert(below.end(), above.begin(), above.end());
  Table t{"identity", {"r", "lhs", "rhs"}, {}};
  for (double r : below) {
    const auto s = f_identity_sides(r0, r);
    t.rows.push_back({r, s.lhs, s.rhs});
  }
  rep.payload["r0"] = r0;
  rep.payload["points"] = long(below.size());
  rep.payload["max_residual"] = check_f_identity(r0, below);
  if (std::fabs(std::log(r0)) > 1e-12) {
    const auto s1 = f_identity_sides(r0, 1.0);
    rep.payload["at_r1"] = {{"lhs", s1.lhs}, {"rhs", s1.rhs}};
  }
  rep.tables.push_back(std::move(t));
}

inline void run_probe_zero(const RunConfig& c, Report& rep) {
  const RadialField field = make_field(c);
  const auto ks = c.list("ks");
  const auto r = hardy_probe_at_zero(field, c.num("b"), c.num("alpha"), ks);
  const double expected = 2.0 * r.alpha - r.b + 1.0;
  rep.payload["b"] = r.b;
  rep.payload["alpha"] = r.alpha;
  rep.payload["growth_exponent"] = to_json_double(r.growth_exponent);
  rep.payload["direct_slope"] = to_json_double(r.direct_slope);
  rep.payload["expected_exponent"] = std::max(expected, 0.0);
  rep.payload["tolerance"] = 0.05;
  rep.payload["diverging_regime"] = r.diverging_regime;
  Table t{"probe_zero", {"k", "numerator", "denominator", "ratio"}, {}};
  for (const auto& row : r.rows) t.rows.push_back({row.k, row.numerator, row.denominator, row.ratio});
  rep.tables.push_back(std::move(t));
}

inline void run_probe_infinity(const RunConfig& c, Report& rep) {
  const RadialField field = make_field(c);
  std::vector<long> ns;
  for (double n : c.list("ns")) ns.push_back(long(n));
  const auto r = infinity_probe(field, bad_weight_w1(), c.num("alpha_exp"), ns);
  rep.payload["m"] = r.m;
  rep.payload["alpha_exp"] = r.alpha_exp;
  rep.payload["q_limit"] = r.q_limit;
  rep.payload["tolerance"] = 0.05;
  bool increasing = true;
  json rel = json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    rel.push_back(std::fabs(r.rows[i].q - r.q_limit) / r.q_limit);
    if (i > 0 && !(r.rows[i].ratio > r.rows[i - 1].ratio)) increasing = false;
  }
  rep.payload["q_rel_error"] = rel;
  rep.payload["bad_weight_ratio_increasing"] = increasing;
  Table t{"probe_infinity", {"n", "numerator", "denominator", "ratio"}, {}};
  for (const auto& row : r.rows) t.rows.push_back({row.n, row.weighted, row.q, row.ratio});
  rep.tables.push_back(std::move(t));
}

inline void run_hardy(const RunConfig& c, Report& rep) {
  const RadialField field = make_field(c);
  const Weight w = make_weight(c, field);
  auto g = make_grid(c);
  if (!g) g = Grid::uniform(c.num("grid.t_min"), c.num("grid.t_max"), 401);
  HardyOptions opt;
  opt.refinements = int(c.integer("refinements"));
  const auto h = hardy_constant(field, w, *g, c.integer("m_lo"), c.integer("m_hi"), opt);
  rep.payload["mu_star"] = to_json_double(h.mu_star);
  rep.payload["argmin_mode"] = h.argmin_mode;
  rep.payload["grid"] = h.grid_meta;
  json pm = json::object();
  for (const auto& [m, v] : h.per_mode_minima) pm[std::to_string(m)] = to_json_double(v);
  rep.payload["per_mode_minima"] = pm;
  json hist = json::array();
  for (const auto& [n, v] : h.refinement_history) hist.push_back({{"nodes", n}, {"mu_star", to_json_double(v)}});
  rep.payload["refinement_history"] = hist;
  Table t{"hardy", {"m", "mu"}, {}};
  for (const auto& [m, v] : h.per_mode_minima) t.rows.push_back({m, v});
  rep.tables.push_back(std::move(t));
}

inline void add_count_warnings(const CountReport& r, Report& rep) {
  if (r.zero_pivots > 0) rep.warn("ZeroPivot");
  for (const auto& w : r.warnings)
    if (w.rfind("grid end", 0) == 0) rep.warn("ForbiddenMargin");
}

inline void run_count(const RunConfig& c, Report& rep) {
  const RadialField field = make_field(c);
  const Potential V = make_potential(c);
  const auto method = method_for(c);
  const auto r = count_total(field, V, c.num("lambda"), make_grid(c), method);
  rep.payload["lambda"] = r.lambda;
  rep.payload["method"] = to_string(r.method);
  rep.payload["total"] = r.total;
  rep.payload["real_total"] = r.real_total;
  rep.payload["m_max"] = r.m_max;
  rep.payload["grid"] = r.grid_meta;
  rep.payload["forbidden_margin"] = to_json_double(r.forbidden_margin);
  add_count_warnings(r, rep);
  Table t{"count", {"m", "N"}, {}};
  if (method == CountMethod::PhaseIntegral) t.columns.push_back("phase");
  for (const auto& [m, n] : r.per_mode) {
    std::vector<Cell> row{m, n};
    if (method == CountMethod::PhaseIntegral) row.push_back(r.per_mode_real.at(m));
    t.rows.push_back(std::move(row));
  }
  rep.tables.push_back(std::move(t));
}

inline void run_sweep(const RunConfig& c, Report& rep) {
  const RadialField field = make_field(c);
  const Potential V = make_potential(c);
  const auto method = method_for(c);
  const auto s = sweep_exponent(field, V, lambda_ladder(c), method);
  rep.payload["method"] = to_string(method);
  rep.payload["fitted_exponent"] = to_json_double(s.fitted_exponent);
  rep.payload["fit_window"] = {s.fit_lo, s.fit_hi};
  rep.payload["residual"] = to_json_double(s.residual);
  Table t{"sweep", {"lambda", "N", "method", "m_max"}, {}};
  for (const auto& r : s.reports) {
    t.rows.push_back({r.lambda, r.total, std::string(to_string(r.method)), r.m_max});
    add_count_warnings(r, rep);
  }
  rep.tables.push_back(std::move(t));
}

inline void run_bound(const RunConfig& c, Report& rep) {
  const RadialField field = make_field(c);
  const Potential V = make_potential(c);
  BoundOptions bopt;
  bopt.caps = c.list("caps");
  const auto b = bound_jst_scan(V, bopt);
  rep.payload["jst"] = {{"value", to_json_double(b.value)}, {"saturated", b.saturated}};
  json cv = json::array();
  for (double v : b.cap_values) cv.push_back(to_json_double(v));
  rep.payload["jst"]["cap_values"] = cv;
  if (!b.saturated) rep.warn("Unbounded");
  const auto method = method_for(c);
  VNormOptions vopt;
  vopt.caps = c.list("caps");
  const auto r = verify_counting_bound(field, V, c.num("a"), lambda_ladder(c), method, vopt);
  rep.payload["a"] = r.a;
  rep.payload["v_norm"] = r.v_norm;
  rep.payload["max_ratio"] = r.max_ratio;
  rep.payload["final_decade_monotone"] = r.final_decade_monotone;
  Table t{"bound", {"lambda", "N", "vnorm_pow_a", "ratio"}, {}};
  for (const auto& row : r.rows) t.rows.push_back({row.lambda, row.count, row.vnorm_pow, row.ratio});
  rep.tables.push_back(std::move(t));
}

/// Runs one subcommand. Exit code 0 on success, 2 when warnings were raised,
/// 1 on errors; NoTruncation and Unbounded failures are reported as warnings.
inline Report run(const RunConfig& cfg) {
  Report rep;
  rep.config = cfg;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const std::string& s = cfg.subcommand;
    if (s == "flux") run_flux(cfg, rep);
    else if (s == "weight") run_weight(cfg, rep);
    else if (s == "vnorm") run_vnorm(cfg, rep);
    else if (s == "identity-check") run_identity(cfg, rep);
    else if (s == "probe-zero") run_probe_zero(cfg, rep);
    else if (s == "probe-infinity") run_probe_infinity(cfg, rep);
    else if (s == "hardy") run_hardy(cfg, rep);
    else if (s == "count") run_count(cfg, rep);
    else if (s == "sweep") run_sweep(cfg, rep);
    else if (s == "bound") run_bound(cfg, rep);
    else throw Error(ErrorCode::ConfigError, "unknown subcommand '" + s + "'");
    rep.exit_code = rep.warnings.empty() ? 0 : 2;
  } catch (const Error& e) {
    rep.error = e.what();
    if (e.code() == ErrorCode::NoTruncation || e.code() == ErrorCode::Unbounded) {
      rep.warn(to_string(e.code()));
      rep.exit_code = 2;
    } else {
      rep.exit_code = 1;
    }
  } catch (const std::exception& e) {
    rep.error = e.what();
    rep.exit_code = 1;
  }
  rep.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace maghardy::cli
