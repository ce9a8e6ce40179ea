#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mshyper/dataset.hpp"
#include "mshyper/run_config.hpp"

namespace mshyper {

struct CommandOptions {
  std::optional<std::string> checkpoint;  // eval/predict; defaults to <out>/model.ckpt
  bool adjacency = false;                 // dump-graph: print the hyperedge graph instead
  std::size_t grad_coordinates = 256;     // gradcheck sample size
};

// build-graph, dump-graph, train, predict, eval, gradcheck, make-synthetic
const std::vector<std::string>& command_names();

// Runs one command. Module errors are reported on `err` and turn into exit
// status 1; gradcheck also returns 1 when the error bound is exceeded.
int run_command(const std::string& cmd, const RunConfig& cfg, const CommandOptions& opts, std::ostream& out,
                std::ostream& err);

// The configured output directory, or runs/<config hash>-<UTC timestamp>.
std::string resolve_run_directory(const RunConfig& cfg);

// Dataset named by the config (CSV file or the synthetic generator).
Dataset load_run_dataset(const RunConfig& cfg);

}  // namespace mshyper
