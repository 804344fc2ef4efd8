// landuse-synth: writes a synthetic campus dataset and a pipeline config.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "landuse/common.hpp"
#include "synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic campus dataset", "landuse-synth"};
  landuse::synth::CampusSpec spec;
  std::string out;
  std::uint64_t pipeline_seed = 42;
  app.add_option("--out", out, "Directory to write into")->required();
  app.add_option("--seed", spec.seed, "Dataset seed");
  app.add_option("--pipeline-seed", pipeline_seed, "Seed written into config.json");
  app.add_option("--grid", spec.grid, "Regions per side");
  app.add_option("--geolocated", spec.geolocated);
  app.add_option("--auxiliary", spec.auxiliary);
  app.add_option("--inout", spec.in_out);
  app.add_option("--dim", spec.dim);
  app.add_flag("--branch-dependent", spec.branch_dependent,
               "Indoor images carry another class's signature");
  CLI11_PARSE(app, argc, argv);
  try {
    std::filesystem::create_directories(out);
    landuse::synth::write_campus(landuse::synth::make_campus(spec), out, pipeline_seed);
  } catch (const std::exception& e) {
    std::cerr << "landuse-synth: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
