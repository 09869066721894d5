// Benchmark runner: dgflow run [case.cfg] [--flag value ...]
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dgflow/bench.hpp"
#include "dgflow/error.hpp"

namespace {

std::string fmt(double v) { return dgflow::bench::format_number(v); }

void print_point(const dgflow::bench::SweepPoint& p) {
  std::cout << "k=" << p.k << " h_max=" << fmt(p.h_max);
  if (p.tau > 0.0) std::cout << " tau=" << fmt(p.tau);
  std::cout << " dof=" << p.dof << " L2_error=" << fmt(p.l2_error)
            << " order=" << (p.order ? fmt(*p.order) : std::string("-")) << " newton=" << p.newton_iterations
            << " status=" << p.status;
  if (!p.message.empty()) std::cout << " (" << p.message << ")";
  std::cout << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dG / H(div) incompressible flow benchmarks"};
  app.require_subcommand(0, 1);

  std::vector<std::pair<std::string, std::string>> flags;
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(
        "--" + name, [&flags, key](const std::string& v) { flags.emplace_back(key, v); }, help);
  };
  flag("case", "case", "gresho, taylor_green, kovasznay, kim_moin, cylinder, lid_driven, manufactured");
  flag("scheme", "scheme", "dG1, dG2, Hdiv or dGtilde");
  flag("theta", "theta", "pressure parameter");
  flag("k", "k", "degree list, e.g. 0,1");
  flag("gamma", "gamma", "grad-div penalty");
  flag("zeta", "zeta", "upwind weight");
  flag("nu", "nu", "viscosity");
  flag("tau", "tau", "time step list");
  flag("T", "T", "final time");
  flag("mesh", "mesh", "gmsh file, or a list of structured resolutions n");
  flag("out", "out", "output directory");
  flag("threads", "threads", "assembly threads");
  app.add_flag_callback("--tighten-newton", [&] { flags.emplace_back("tighten_newton", "true"); },
                        "Newton tolerances 1e-12");
  std::vector<std::string> sets;
  app.add_option("--set", sets, "any config entry as key=value (repeatable)");

  std::string config_file;
  CLI::App* run = app.add_subcommand("run", "run a case from a config file and/or flags");
  run->add_option("config", config_file, "flat key = value file");
  run->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }
  if (argc == 1) {
    std::cerr << app.help();
    return 2;
  }

  try {
    dgflow::bench::KeyValues entries;
    if (!config_file.empty()) entries = dgflow::bench::read_key_values(config_file);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw dgflow::Error(dgflow::ErrorCode::InvalidConfig, "--set needs key=value");
      entries.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    entries.insert(entries.end(), flags.begin(), flags.end());
    const auto config = dgflow::bench::make_config(entries);
    std::cout << "case=" << config.case_name << " scheme=" << dgflow::bench::to_string(config.scheme)
              << " theta=" << config.theta << " out=" << config.out << std::endl;
    const auto result = dgflow::bench::run_case(config, print_point);
    for (const auto& p : result.points) {
      if (p.status != "ok") return 1;
    }
    return 0;
  } catch (const dgflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == dgflow::ErrorCode::InvalidConfig) std::cerr << "\n" << app.help();
    return 2;
  }
}
