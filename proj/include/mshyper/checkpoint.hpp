#pragma once

// Checkpoint layout (version 1):
//
//   mshyper-checkpoint 1\n
//   <count>\n
//   <name> <rank> <extent>...\n      one line per ParamTensor, declaration order
//   data\n
//   <raw little-endian float64 values, same order>
//
// Only parameter values are stored; optimizer moments are not.

#include <iosfwd>
#include <string>

#include "mshyper/tmp.hpp"

namespace mshyper {

void write_checkpoint(std::ostream& out, const ModelParams& params);
void save_checkpoint(const std::string& path, const ModelParams& params);

// Loads into params built for the expected config. Throws FormatError if the
// header names or shapes differ, MissingArtifactError if the file is absent.
void read_checkpoint(std::istream& in, ModelParams& params);
void load_checkpoint(const std::string& path, ModelParams& params);

}  // namespace mshyper
