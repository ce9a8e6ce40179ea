#include "mshyper/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mshyper/error.hpp"

namespace mshyper {
namespace {

constexpr const char* kMagic = "mshyper-checkpoint";
constexpr int kVersion = 1;

void put_le(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

double get_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw FormatError("checkpoint: truncated data section");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_checkpoint(std::ostream& out, const ModelParams& params) {
  const auto all = params.all();
  out << kMagic << ' ' << kVersion << '\n' << all.size() << '\n';
  for (const ParamTensor* p : all) {
    out << p->name << ' ' << p->shape().size();
    for (auto e : p->shape()) out << ' ' << e;
    out << '\n';
  }
  out << "data\n";
  for (const ParamTensor* p : all) {
    for (double v : p->value.values()) put_le(out, v);
  }
}

void save_checkpoint(const std::string& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  write_checkpoint(out, params);
  if (!out) throw Error("failed while writing checkpoint '" + path + "'");
}

void read_checkpoint(std::istream& in, ModelParams& params) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("checkpoint: empty file");
  {
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    header >> magic >> version;
    if (magic != kMagic) throw FormatError("checkpoint: bad magic '" + magic + "'");
    if (version != kVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  auto all = params.all();
  std::size_t count = 0;
  if (!std::getline(in, line) || !(std::istringstream(line) >> count)) {
    throw FormatError("checkpoint: missing tensor count");
  }
  if (count != all.size()) {
    throw FormatError("checkpoint: holds " + std::to_string(count) + " tensors, config expects " +
                      std::to_string(all.size()));
  }
  for (ParamTensor* p : all) {
    if (!std::getline(in, line)) throw FormatError("checkpoint: truncated header");
    std::istringstream entry(line);
    std::string name;
    std::size_t rank = 0;
    entry >> name >> rank;
    Shape shape(rank);
    for (auto& e : shape) entry >> e;
    if (!entry || name != p->name || shape != p->shape()) {
      throw FormatError("checkpoint: entry '" + line + "' does not match expected '" + p->name + "' " +
                        shape_string(p->shape()));
    }
  }
  if (!std::getline(in, line) || line != "data") throw FormatError("checkpoint: missing data marker");
  for (ParamTensor* p : all) {
    for (auto& v : p->value.values()) v = get_le(in);
    require_finite(p->value.raw(), p->value.size(), "checkpoint tensor '" + p->name + "'");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("checkpoint: trailing bytes");
}

void load_checkpoint(const std::string& path, ModelParams& params) {
  if (!std::filesystem::exists(path)) throw MissingArtifactError("checkpoint not found: '" + path + "'");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open checkpoint '" + path + "'");
  read_checkpoint(in, params);
}

}  // namespace mshyper
