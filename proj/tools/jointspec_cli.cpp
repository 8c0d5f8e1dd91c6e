#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jointspec/app.hpp"

#ifndef JOINTSPEC_FIXTURE_DIR
#define JOINTSPEC_FIXTURE_DIR "fixtures"
#endif

namespace {

struct Flags {
  std::string input;
  std::string out = "out";
  std::optional<std::size_t> radii;
  std::optional<std::size_t> angles;
  std::uint64_t seed = 0;
  bool svg = true;
  std::map<std::string, double> tol;
};

void add_common(CLI::App* sub, Flags& f, jointspec::Command cmd) {
  auto* in = sub->add_option("--input", f.input, "input JSON file");
  if (cmd == jointspec::Command::VerifyAll) {
    in->description("fixture directory holding manifest.json");
  } else {
    in->required();
  }
  sub->add_option("--out", f.out, "output directory")->capture_default_str();
  sub->add_option("--grid-radii", f.radii, "polar grid radii per variable")->check(CLI::Range(2, 100000));
  sub->add_option("--grid-angles", f.angles, "polar grid angles per variable")->check(CLI::Range(1, 100000));
  sub->add_option("--seed", f.seed, "seed for every random draw")->capture_default_str();
  sub->add_flag("--svg,!--no-svg", f.svg, "write plot.svg next to cloud.csv");
  for (const auto& [name, value] : jointspec::default_tolerances()) {
    sub->add_option_function<double>(
           "--tol." + name, [&f, name = name](double v) { f.tol[name] = v; },
           "tolerance override (default " + std::to_string(value) + ")")
        ->type_name("FLOAT");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint spectra of commuting matrix tuples, BCL varieties and Toeplitz symbol unions"};
  app.require_subcommand(1);
  Flags flags;
  std::optional<jointspec::Command> chosen;
  for (const auto& [name, cmd] : jointspec::command_names()) {
    auto* sub = app.add_subcommand(name);
    add_common(sub, flags, cmd);
    sub->callback([&chosen, cmd = cmd] { chosen = cmd; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  jointspec::RunConfig cfg;
  cfg.command = *chosen;
  cfg.input_path = flags.input;
  if (cfg.command == jointspec::Command::VerifyAll && cfg.input_path.empty()) cfg.input_path = JOINTSPEC_FIXTURE_DIR;
  cfg.output_dir = flags.out;
  cfg.grid_radii = flags.radii;
  cfg.grid_angles = flags.angles;
  cfg.seed = flags.seed;
  cfg.svg = flags.svg;
  cfg.tolerances = flags.tol;

  const jointspec::RunResult r = jointspec::run(cfg);
  std::cout << jointspec::to_string(cfg.command) << ": " << jointspec::to_string(r.status);
  if (r.report.contains("error")) std::cout << " (" << r.report["error"].get<std::string>() << ")";
  std::cout << "\nreport: " << flags.out << "/report.json\n";
  return jointspec::exit_code(r.status);
}
