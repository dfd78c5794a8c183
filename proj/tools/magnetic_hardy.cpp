// magnetic_hardy: command-line front end.
//
//   magnetic_hardy <subcommand> [--config FILE] [--key value ...] [--pretty]
//
// Every config key (field.kind, potential.sigma, lambda, ...) is also a flag;
// flags win over the config file.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "maghardy/cli.hpp"

namespace mc = maghardy::cli;

namespace {

void print_pretty(const mc::Report& rep) {
  std::cout << rep.config.subcommand << "  (exit " << rep.exit_code << ", " << rep.wall_clock << " s)\n";
  for (const auto& [k, v] : rep.payload.items()) std::cout << "  " << k << " = " << v.dump() << "\n";
  for (const auto& w : rep.warnings) std::cout << "  warning: " << w << "\n";
  if (!rep.error.empty()) std::cout << "  error: " << rep.error << "\n";
  for (const auto& t : rep.tables) {
    std::cout << "  [" << t.name << "] " << t.rows.size() << " rows\n";
    const std::size_t show = std::min<std::size_t>(t.rows.size(), 12);
    std::cout << "   ";
    for (const auto& c : t.columns) std::printf(" %22s", c.c_str());
    std::cout << "\n";
    for (std::size_t i = 0; i < show; ++i) {
      std::cout << "   ";
      for (const auto& cell : t.rows[i]) {
        std::string s = mc::format_cell(cell);
        if (const auto* d = std::get_if<double>(&cell)) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.10g", *d);
          s = buf;
        }
        std::printf(" %22s", s.c_str());
      }
      std::cout << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic Hardy inequalities: flux profiles, Hardy constants, optimality probes and eigenvalue counts"};
  app.require_subcommand(1);
  std::string config_path;
  bool pretty = false;
  bool no_files = false;
  std::map<std::string, std::string> flags;

  const std::map<std::string, std::string> about{
      {"flux", "normalized flux alpha(r) and singularity class of a radial field"},
      {"weight", "evaluate a Hardy weight at r"},
      {"vnorm", "the [V]_a functional of a potential"},
      {"identity-check", "check the f-identity on a log grid around r0"},
      {"probe-zero", "ratio growth of the u_alpha family near the origin"},
      {"probe-infinity", "Q_A[u_n] against its limit and the w1 ratio"},
      {"hardy", "best constant of the weighted magnetic Hardy inequality"},
      {"count", "number of negative eigenvalues at one coupling"},
      {"sweep", "counts along a coupling ladder and the fitted exponent"},
      {"bound", "counting bound N / (lambda [V]_a)^a along a ladder"},
  };
  for (const auto& name : mc::subcommands()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_flag("--pretty", pretty, "human-readable summary on stdout");
    sub->add_flag("--no-files", no_files, "skip writing report files");
    for (const auto& [key, def] : mc::config_defaults()) {
      sub->add_option_function<std::string>(
          "--" + key, [&flags, key = key](const std::string& v) { flags[key] = v; },
          def.empty() ? std::string("(unset)") : "default " + def);
    }
    for (const auto& [alias, key] : mc::flag_aliases()) {
      sub->add_option_function<std::string>(
          "--" + alias, [&flags, key = key](const std::string& v) { flags[key] = v; }, "same as --" + key);
    }
  }
  CLI11_PARSE(app, argc, argv);

  mc::RunConfig cfg;
  try {
    if (!config_path.empty()) mc::apply_config_file(cfg, config_path);
    for (const auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
    for (const auto& [k, v] : flags) cfg.set(k, v);
  } catch (const maghardy::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  mc::Report rep = mc::run(cfg);
  if (!no_files) {
    try {
      for (const auto& p : mc::emit_plotdata(rep, cfg.str("out_dir"))) std::cerr << "wrote " << p << "\n";
    } catch (const maghardy::Error& e) {
      std::cerr << e.what() << "\n";
      return 1;
    }
  }
  if (pretty)
    print_pretty(rep);
  else
    std::cout << rep.to_json().dump(2) << "\n";
  if (!rep.error.empty()) std::cerr << rep.error << "\n";
  return rep.exit_code;
}
