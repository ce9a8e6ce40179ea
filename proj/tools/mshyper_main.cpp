// mshyper: build graphs, train, evaluate and gradient-check the forecaster.
//
//   mshyper <command> --config run.toml [--set section.key=value]... [--seed N]
//           [--out DIR] [--checkpoint FILE] [--adjacency] [--coords N]

#include <malloc.h>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mshyper/commands.hpp"
#include "mshyper/error.hpp"
#include "mshyper/run_config.hpp"

namespace {

const std::map<std::string, std::string> kDescriptions{
    {"build-graph", "build the hypergraph and hyperedge graph, write them to the run directory"},
    {"dump-graph", "print the hypergraph incidence (or the hyperedge graph with --adjacency)"},
    {"train", "train on the configured dataset and report test metrics"},
    {"predict", "forecast the horizon after the last input window"},
    {"eval", "evaluate a checkpoint on the test split"},
    {"gradcheck", "compare analytic gradients with central differences"},
    {"make-synthetic", "write the configured synthetic series as CSV"},
};

}  // namespace

int main(int argc, char** argv) {
  // Every training sample frees its tape; keep that memory in the heap
  // instead of returning it to the kernel and faulting it back in.
  mallopt(M_TRIM_THRESHOLD, 256 << 20);

  CLI::App app{"Multi-scale hypergraph forecaster"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string checkpoint;
  mshyper::CommandOptions opts;

  for (const std::string& name : mshyper::command_names()) {
    CLI::App* sub = app.add_subcommand(name, kDescriptions.at(name));
    sub->add_option("--config", config_path, "run configuration (TOML)")->required();
    sub->add_option("--set", overrides, "override a config key, e.g. model.hop=2");
    sub->add_option("--seed", seed, "training / initialization seed");
    sub->add_option("--out", out_dir, "run directory (default runs/<hash>-<time>)");
    if (name == "eval" || name == "predict") {
      sub->add_option("--checkpoint", checkpoint, "model checkpoint (default <out>/model.ckpt)");
    }
    if (name == "dump-graph") sub->add_flag("--adjacency", opts.adjacency, "print the hyperedge graph");
    if (name == "gradcheck") sub->add_option("--coords", opts.grad_coordinates, "coordinates to check");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (seed) overrides.push_back("train.seed=" + std::to_string(*seed));
  if (!checkpoint.empty()) opts.checkpoint = checkpoint;

  mshyper::RunConfig cfg;
  try {
    cfg = mshyper::parse_config(config_path, overrides);
  } catch (const mshyper::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return mshyper::run_command(command, cfg, opts, std::cout, std::cerr);
}
