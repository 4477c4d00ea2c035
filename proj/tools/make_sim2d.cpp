// Writes the 2D simulation grid and an observed sample drawn from it.
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ddt/random.hpp"
#include "ddt/simulation.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the 2D simulation grid and an observed sample"};
  std::string grid_path = "sim2d_grid.csv", sample_path;
  std::size_t per_axis = 51, n = 50;
  std::uint64_t seed = 0;
  app.add_option("--grid", grid_path, "Grid CSV path");
  app.add_option("--per-axis", per_axis, "Grid points per axis");
  app.add_option("--sample", sample_path, "Observed sample CSV path (skipped when empty)");
  app.add_option("-n", n, "Sample size");
  app.add_option("--seed", seed, "Sample seed");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto schema = ddt::sim2d_schema();
    const auto grid = ddt::sim2d_grid(per_axis);
    ddt::write_dataset(grid_path, schema, grid);
    if (!sample_path.empty()) {
      ddt::Rng rng = ddt::stream_rng(seed, 0, ddt::Stream::experiment);
      ddt::write_dataset(sample_path, schema, ddt::subsample(grid, n, rng));
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
