#include <CLI11.hpp>
#include <iostream>

#include "avsfe/parallel.hpp"
#include "avsfe/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"AVS-FE convection-diffusion solver with goal-oriented error estimation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "execute a run configuration file");
  run_cmd->add_option("config", config_path, "key = value configuration file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides the config)");
  run_cmd->add_option("--threads", threads, "element-loop worker threads");

  CLI::App* list_cmd = app.add_subcommand("list-benchmarks", "print the named benchmarks");

  CLI11_PARSE(app, argc, argv);

  if (list_cmd->parsed()) {
    for (const auto& name : avsfe::benchmark_names()) std::cout << name << "\n";
    return 0;
  }

  try {
    if (threads > 0) avsfe::set_num_threads(threads);
    avsfe::RunConfig config = avsfe::load_config_file(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    const avsfe::RunResult result = avsfe::run(config);
    for (const auto& path : result.artifacts) std::cout << "wrote " << path << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
