#pragma once

// Graph over hyperedges. Intra-scale hyperedges are linked by the sequential
// relation (an edge and its predecessor within the same scale and hop
// class); inter- and mixed-scale hyperedges are linked when they share a
// node. The two relations form the diagonal blocks of A; the off-diagonal
// blocks are zero. Both blocks carry self-loops.

#include <cstddef>
#include <span>
#include <string>

#include "mshyper/hypergraph.hpp"
#include "mshyper/tensor.hpp"

namespace mshyper {

class HyperedgeGraph {
 public:
  HyperedgeGraph() = default;
  HyperedgeGraph(BinaryMatrix adjacency, std::size_t sr_count, std::size_t ar_count)
      : adjacency_(std::move(adjacency)), sr_count_(sr_count), ar_count_(ar_count) {}

  const BinaryMatrix& adjacency() const { return adjacency_; }
  std::size_t sr_count() const { return sr_count_; }
  std::size_t ar_count() const { return ar_count_; }
  std::size_t size() const { return sr_count_ + ar_count_; }

  BinaryMatrix sr_block() const;
  BinaryMatrix ar_block() const;

 private:
  BinaryMatrix adjacency_;
  std::size_t sr_count_ = 0;
  std::size_t ar_count_ = 0;
};

// A(i, j) = 1 iff 0 <= i - j <= 1 and edges i, j share scale and hop.
BinaryMatrix sequential_adjacency(std::span<const Hyperedge> intra);
// A(i, j) = 1 iff edges i and j share at least one node.
BinaryMatrix association_adjacency(std::span<const Hyperedge> edges);
HyperedgeGraph assemble_block(const BinaryMatrix& sr, const BinaryMatrix& ar);

// Rows and columns follow g.edges() order, which keeps every intra-scale
// edge ahead of the inter/mixed ones.
HyperedgeGraph build_hyperedge_graph(const Hypergraph& g);

// Header "sr<TAB>D_sr<TAB>ar<TAB>D_ar", then "i<TAB>j" (1-based) for every set
// entry in row-major order.
std::string dump_adjacency(const HyperedgeGraph& heg);

}  // namespace mshyper
