#include "mshyper/hyperedge_graph.hpp"

#include <algorithm>
#include <sstream>

#include "mshyper/error.hpp"

namespace mshyper {
namespace {

BinaryMatrix block(const BinaryMatrix& a, std::size_t begin, std::size_t count) {
  BinaryMatrix out(count, count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) out.set(i, j, a.get(begin + i, begin + j));
  }
  return out;
}

bool share_node(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  auto ia = a.begin(), ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) ++ia; else ++ib;
  }
  return false;
}

}  // namespace

BinaryMatrix HyperedgeGraph::sr_block() const { return block(adjacency_, 0, sr_count_); }
BinaryMatrix HyperedgeGraph::ar_block() const { return block(adjacency_, sr_count_, ar_count_); }

BinaryMatrix sequential_adjacency(std::span<const Hyperedge> intra) {
  BinaryMatrix a(intra.size(), intra.size());
  for (std::size_t i = 0; i < intra.size(); ++i) {
    a.set(i, i);
    if (i > 0 && intra[i].scale == intra[i - 1].scale && intra[i].hop == intra[i - 1].hop) {
      a.set(i, i - 1);
    }
  }
  return a;
}

BinaryMatrix association_adjacency(std::span<const Hyperedge> edges) {
  std::vector<std::vector<NodeId>> sorted;
  sorted.reserve(edges.size());
  for (const auto& e : edges) {
    sorted.push_back(e.nodes);
    std::sort(sorted.back().begin(), sorted.back().end());
  }
  BinaryMatrix a(edges.size(), edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i; j < edges.size(); ++j) {
      if (share_node(sorted[i], sorted[j])) {
        a.set(i, j);
        a.set(j, i);
      }
    }
  }
  return a;
}

HyperedgeGraph assemble_block(const BinaryMatrix& sr, const BinaryMatrix& ar) {
  if (sr.rows() != sr.cols() || ar.rows() != ar.cols()) {
    throw DimensionError("assemble_block: adjacency blocks must be square");
  }
  const std::size_t n_sr = sr.rows(), n_ar = ar.rows();
  BinaryMatrix a(n_sr + n_ar, n_sr + n_ar);
  for (std::size_t i = 0; i < n_sr; ++i) {
    for (std::size_t j = 0; j < n_sr; ++j) a.set(i, j, sr.get(i, j));
  }
  for (std::size_t i = 0; i < n_ar; ++i) {
    for (std::size_t j = 0; j < n_ar; ++j) a.set(n_sr + i, n_sr + j, ar.get(i, j));
  }
  return HyperedgeGraph(std::move(a), n_sr, n_ar);
}

HyperedgeGraph build_hyperedge_graph(const Hypergraph& g) {
  const auto& edges = g.edges();
  const auto first_ar = std::find_if(edges.begin(), edges.end(),
                                     [](const Hyperedge& e) { return e.kind != EdgeKind::kIntra; });
  if (std::any_of(first_ar, edges.end(), [](const Hyperedge& e) { return e.kind == EdgeKind::kIntra; })) {
    throw Error("build_hyperedge_graph: intra-scale hyperedges must precede inter/mixed ones");
  }
  const auto n_sr = static_cast<std::size_t>(first_ar - edges.begin());
  std::span<const Hyperedge> all(edges);
  return assemble_block(sequential_adjacency(all.first(n_sr)), association_adjacency(all.subspan(n_sr)));
}

std::string dump_adjacency(const HyperedgeGraph& heg) {
  std::ostringstream out;
  out << "sr\t" << heg.sr_count() << "\tar\t" << heg.ar_count() << '\n';
  const BinaryMatrix& a = heg.adjacency();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a.get(i, j)) out << i + 1 << '\t' << j + 1 << '\n';
    }
  }
  return out.str();
}

}  // namespace mshyper
