#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "helicity/commands.hpp"

int main(int argc, char** argv) {
  using namespace helicity;
  namespace fs = std::filesystem;

  CLI::App app{"Helicity-preserving simulations of dispersive fluids"};
  app.require_subcommand(1);

  std::optional<fs::path> output;
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--output", output, "Directory for output files");
  };

  fs::path scenario_path;
  CLI::App* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  add_output(run);

  std::uint64_t seed = 0;
  std::string backend = "spectral";
  std::string defect = "none";
  CLI::App* verify = app.add_subcommand("verify", "Run the built-in identity suite");
  verify->add_option("--seed", seed, "Seed for the random test fields");
  verify->add_option("--backend", backend, "Derivative backend")
      ->check(CLI::IsMember({"spectral", "fd2", "fd4"}));
  verify->add_option("--mutate", defect, "Inject a defect to test the suite itself")
      ->check(CLI::IsMember({"none", "flux-sign", "lie-sign", "cofactor-transpose"}))
      ->group("");
  add_output(verify);

  int levels = 0;
  CLI::App* converge = app.add_subcommand("converge", "Refinement study of invariant drifts");
  converge->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  converge->add_option("--levels", levels, "Number of refinement levels (>= 2)")->required();
  add_output(converge);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? commands::kOk : commands::kUsage;
  }

  const commands::Streams io{std::cout, std::cerr};
  if (*run) return commands::run_command(scenario_path, output, io);
  if (*verify) {
    const std::map<std::string, mutation::Defect> defects = {
        {"none", mutation::Defect::None},
        {"flux-sign", mutation::Defect::FluxSign},
        {"lie-sign", mutation::Defect::LieSign},
        {"cofactor-transpose", mutation::Defect::CofactorTranspose}};
    return commands::verify_command(seed, backend_from_string(backend), output, io, defects.at(defect));
  }
  return commands::converge_command(scenario_path, levels, output, io);
}
