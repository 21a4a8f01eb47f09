#include <string>

#include <CLI11.hpp>

#include "fraclap/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fraclap: fractional Laplacian quotient minimization toolkit"};
  app.require_subcommand(1);

  fraclap::RunOptions opts;
  std::string config, resume;
  for (const char* name : {"constants", "lemma31", "eigen", "groundstate",
                           "scurve", "lambdastar", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--workers", opts.workers, "worker pool size (sweep)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--resume", resume, "checkpoint file to resume from");
    sub->callback([name, &opts] { opts.command = name; });
  }

  CLI11_PARSE(app, argc, argv);
  opts.config_path = config;
  if (!resume.empty()) opts.resume = resume;
  return fraclap::run_command(opts);
}
