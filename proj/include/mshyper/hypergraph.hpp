#pragma once

// Multi-scale hypergraph construction: intra-scale, inter-scale and
// mixed-scale hyperedges, each in an original (hop 1) and a k-hop variant,
// plus the incidence matrix and degree diagonals.
//
// All node ids are 1-based global ids from NodeIndex. Within-scale positions
// are also 1-based; the starting position of the i-th hyperedge of a family
// with hop k and size H is
//
//   d(i) = floor((i - 1) / k) * H * k + (i - 1) mod k + 1
//
// and its run is d, d + k, ..., d + (H - 1) k. With k = 1 this is the
// contiguous block (i - 1) H + 1 .. i H. Hyperedges whose indices leave the
// scale are dropped rather than padded.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mshyper/autodiff.hpp"
#include "mshyper/mfe.hpp"
#include "mshyper/model_config.hpp"
#include "mshyper/tensor.hpp"

namespace mshyper {

enum class EdgeKind { kIntra, kInter, kMixed };

std::string to_string(EdgeKind kind);

struct Hyperedge {
  std::vector<NodeId> nodes;
  EdgeKind kind = EdgeKind::kIntra;
  std::size_t scale = 0;  // finest scale involved; 0 for mixed (spans all scales)
  std::size_t hop = 1;

  friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
};

// Starting within-scale position of the i-th (1-based) hyperedge.
std::size_t hop_start(std::size_t i, std::size_t size, std::size_t hop);

// ceil(a / b) for positive integers.
constexpr std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::vector<Hyperedge> intra_hyperedges(const NodeIndex& index, std::span<const std::size_t> sizes,
                                        std::size_t hop);

// Coarse node (scale s + 1, position ceil(d / l^s)) first, then the fine run
// at scale s. Empty when there is a single scale.
std::vector<Hyperedge> inter_hyperedges(const NodeIndex& index, std::span<const std::size_t> sizes,
                                        std::size_t hop);

// One node per scale s = S..2 at position ceil(d / (l^1 ... l^{s-1})), then a
// scale-1 run of run_len nodes. Empty when there is a single scale.
std::vector<Hyperedge> mixed_hyperedges(const NodeIndex& index, std::size_t run_len,
                                        std::size_t hop);

// Each family is concat(original, k-hop). The k-hop half is omitted when
// hop == 1 because it would repeat the original edges.
struct HyperedgeSets {
  std::vector<Hyperedge> intra;
  std::vector<Hyperedge> inter;
  std::vector<Hyperedge> mixed;
};

HyperedgeSets build_hyperedge_sets(const NodeIndex& index, std::span<const std::size_t> sizes,
                                   std::size_t hop);

class Hypergraph {
 public:
  Hypergraph() = default;

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Hyperedge>& edges() const { return edges_; }
  const Hyperedge& edge(std::size_t m) const { return edges_[m]; }

  // N x M, H(n, m) = 1 iff node n + 1 is in edges()[m].
  const BinaryMatrix& incidence() const { return incidence_; }
  // Diagonals of D_v and D_e.
  const std::vector<double>& node_degrees() const { return node_degrees_; }
  const std::vector<double>& edge_degrees() const { return edge_degrees_; }
  // Incidence entries as a 0-based COO pattern (row = node, col = edge),
  // ordered by (edge, node).
  const SparsePattern& pattern() const { return pattern_; }

  friend Hypergraph assemble(std::size_t node_count, const HyperedgeSets& sets,
                             const HyperedgeKinds& enabled);

 private:
  std::size_t node_count_ = 0;
  std::vector<Hyperedge> edges_;
  BinaryMatrix incidence_;
  std::vector<double> node_degrees_;
  std::vector<double> edge_degrees_;
  SparsePattern pattern_;
};

// Concatenates intra, inter and mixed (in that order) for the enabled
// families and derives H, D_v, D_e. Throws EmptyHypergraphError when no edge
// survives and DimensionError on an invalid or repeated node id.
Hypergraph assemble(std::size_t node_count, const HyperedgeSets& sets, const HyperedgeKinds& enabled);

Hypergraph build_hypergraph(const ModelConfig& cfg);

// One line per incidence entry, "edge<TAB>node<TAB>kind<TAB>scale<TAB>hop",
// 1-based ids, sorted by (edge, node).
std::string dump_sparse(const Hypergraph& g);

}  // namespace mshyper
