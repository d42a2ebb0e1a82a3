// nozzleflow <config-path> [--output-dir PATH] [--override key=value ...]

#include <iostream>

#include "CLI11.hpp"
#include "nozzleflow/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Subsonic potential flow through infinitely long nozzles"};
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> overrides;
  app.add_option("config", config_path, "run configuration (key = value lines)")->required();
  app.add_option("--output-dir", output_dir, "directory for output files (overrides output.directory)");
  app.add_option("--override", overrides, "extra key=value setting, applied after the file")
      ->allow_extra_args(false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : nozzleflow::kExitFailure;
  }

  if (!output_dir.empty()) overrides.push_back("output.directory=" + output_dir);
  nozzleflow::RunConfig config;
  try {
    config = nozzleflow::load_config(config_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nozzleflow::kExitFailure;
  }
  return nozzleflow::run(config, std::cout);
}
