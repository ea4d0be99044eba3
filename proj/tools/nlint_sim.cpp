// nlint-sim: runs scenario files through the simulation library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nlint/errors.hpp"
#include "nlint/runner.hpp"
#include "nlint/scenario.hpp"

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) nlint::fail(nlint::ErrorKind::Io, "cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_manifest(const nlint::RunManifest& m) {
  for (const auto& t : m.tasks) {
    std::printf("%-15s %6.2f s", nlint::to_string(t.task).c_str(), t.seconds);
    const auto& c = t.convergence;
    if (c.applicable)
      std::printf("  %s refinement change %.2e%s", c.quantity.c_str(), c.relative_change,
                  c.flagged ? "  [FLAGGED]" : "");
    else if (!c.note.empty())
      std::printf("  (%s)", c.note.c_str());
    std::printf("\n");
    for (const auto& f : t.files) std::printf("    %s\n", f.string().c_str());
  }
  std::printf("manifest %s\ndigest   %s\n", m.manifest_path.string().c_str(), m.digest.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Induced-coherence nonlinear interferometer simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario file");
  std::string scenario_path;
  std::string out_dir;
  std::size_t grid_points = 0;
  std::string format;
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
  run->add_option("--grid-points", grid_points, "Frequency grid points per axis")
      ->check(CLI::Range(std::size_t{256}, std::size_t{1} << 15));
  run->add_option("--format", format, "Series format")->check(CLI::IsMember({"csv", "json"}));

  app.add_subcommand("presets", "List built-in presets");

  app.footer(
      "Exit status: 0 success, 1 invalid input, 2 numerical failure or unconverged grid.\n"
      "NLINT_WORKERS sets the number of scan worker threads.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (app.got_subcommand("presets")) {
    for (const auto& p : nlint::list_presets())
      std::printf("%-16s [%s]  %s\n", p.name.c_str(), p.section.c_str(), p.description.c_str());
    return 0;
  }

  try {
    nlint::Scenario scenario = nlint::parse_scenario(read_text(scenario_path));
    if (!out_dir.empty()) scenario.output.dir = out_dir;
    if (grid_points) scenario.grid.points = grid_points;
    if (!format.empty()) scenario.output.format = nlint::parse_format(format);

    const nlint::RunManifest manifest = nlint::run_scenario(scenario);
    print_manifest(manifest);
    if (manifest.flagged()) {
      std::fprintf(stderr,
                   "error: grid refinement changed a result by more than %.0e; "
                   "outputs kept, see the manifest\n",
                   nlint::kConvergenceTolerance);
      return 2;
    }
    return 0;
  } catch (const nlint::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return nlint::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
