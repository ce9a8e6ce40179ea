#include "mshyper/hypergraph.hpp"

#include <algorithm>
#include <sstream>

#include "mshyper/error.hpp"

namespace mshyper {

std::string to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kIntra:
      return "intra";
    case EdgeKind::kInter:
      return "inter";
    case EdgeKind::kMixed:
      return "mixed";
  }
  return "unknown";
}

std::size_t hop_start(std::size_t i, std::size_t size, std::size_t hop) {
  return (i - 1) / hop * size * hop + (i - 1) % hop + 1;
}

namespace {

std::size_t run_end(std::size_t start, std::size_t size, std::size_t hop) {
  return start + (size - 1) * hop;
}

void append_run(std::vector<NodeId>& nodes, const NodeIndex& index, std::size_t scale,
                std::size_t start, std::size_t size, std::size_t hop) {
  for (std::size_t j = 0; j < size; ++j) nodes.push_back(index.id(scale, start + j * hop));
}

}  // namespace

std::vector<Hyperedge> intra_hyperedges(const NodeIndex& index, std::span<const std::size_t> sizes,
                                        std::size_t hop) {
  if (sizes.size() != index.scales()) throw ConfigError("intra_hyperedges: one size per scale required");
  std::vector<Hyperedge> edges;
  for (std::size_t s = 1; s <= index.scales(); ++s) {
    const std::size_t size = sizes[s - 1];
    const std::size_t h = index.plan().horizon(s);
    // Starting positions grow with i, so the first overflow ends the scale.
    for (std::size_t i = 1;; ++i) {
      const std::size_t d = hop_start(i, size, hop);
      if (run_end(d, size, hop) > h) break;
      Hyperedge e{{}, EdgeKind::kIntra, s, hop};
      append_run(e.nodes, index, s, d, size, hop);
      edges.push_back(std::move(e));
    }
  }
  return edges;
}

std::vector<Hyperedge> inter_hyperedges(const NodeIndex& index, std::span<const std::size_t> sizes,
                                        std::size_t hop) {
  if (sizes.size() != index.scales()) throw ConfigError("inter_hyperedges: one size per scale required");
  std::vector<Hyperedge> edges;
  const ScalePlan& plan = index.plan();
  for (std::size_t s = 1; s < index.scales(); ++s) {
    const std::size_t size = sizes[s - 1];
    for (std::size_t i = 1;; ++i) {
      const std::size_t d = hop_start(i, size, hop);
      if (run_end(d, size, hop) > plan.horizon(s)) break;
      const std::size_t coarse = ceil_div(d, plan.window(s));
      if (coarse > plan.horizon(s + 1)) break;
      Hyperedge e{{index.id(s + 1, coarse)}, EdgeKind::kInter, s, hop};
      append_run(e.nodes, index, s, d, size, hop);
      edges.push_back(std::move(e));
    }
  }
  return edges;
}

std::vector<Hyperedge> mixed_hyperedges(const NodeIndex& index, std::size_t run_len, std::size_t hop) {
  std::vector<Hyperedge> edges;
  const std::size_t scales = index.scales();
  if (scales < 2) return edges;
  const ScalePlan& plan = index.plan();
  for (std::size_t i = 1;; ++i) {
    const std::size_t d = hop_start(i, run_len, hop);
    if (run_end(d, run_len, hop) > plan.horizon(1)) break;
    std::vector<std::size_t> positions(scales + 1, 0);
    std::size_t divisor = 1;
    bool fits = true;
    for (std::size_t s = 2; s <= scales; ++s) {
      divisor *= plan.window(s - 1);
      positions[s] = ceil_div(d, divisor);
      fits = fits && positions[s] <= plan.horizon(s);
    }
    // Coarse positions are monotone in d, so a miss here persists.
    if (!fits) break;
    Hyperedge e{{}, EdgeKind::kMixed, 0, hop};
    for (std::size_t s = scales; s >= 2; --s) e.nodes.push_back(index.id(s, positions[s]));
    append_run(e.nodes, index, 1, d, run_len, hop);
    edges.push_back(std::move(e));
  }
  return edges;
}

HyperedgeSets build_hyperedge_sets(const NodeIndex& index, std::span<const std::size_t> sizes,
                                   std::size_t hop) {
  HyperedgeSets sets;
  sets.intra = intra_hyperedges(index, sizes, 1);
  sets.inter = inter_hyperedges(index, sizes, 1);
  sets.mixed = mixed_hyperedges(index, sizes[0], 1);
  if (hop > 1) {
    auto append = [](std::vector<Hyperedge>& dst, std::vector<Hyperedge> src) {
      dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
    };
    append(sets.intra, intra_hyperedges(index, sizes, hop));
    append(sets.inter, inter_hyperedges(index, sizes, hop));
    append(sets.mixed, mixed_hyperedges(index, sizes[0], hop));
  }
  return sets;
}

Hypergraph assemble(std::size_t node_count, const HyperedgeSets& sets, const HyperedgeKinds& enabled) {
  Hypergraph g;
  g.node_count_ = node_count;
  auto take = [&](const std::vector<Hyperedge>& family, bool on) {
    if (on) g.edges_.insert(g.edges_.end(), family.begin(), family.end());
  };
  take(sets.intra, enabled.intra);
  take(sets.inter, enabled.inter);
  take(sets.mixed, enabled.mixed);
  if (g.edges_.empty()) {
    throw EmptyHypergraphError("hypergraph has no hyperedges for the enabled families and scale plan");
  }

  const std::size_t m_count = g.edges_.size();
  g.incidence_ = BinaryMatrix(node_count, m_count);
  g.node_degrees_.assign(node_count, 0.0);
  g.edge_degrees_.assign(m_count, 0.0);
  g.pattern_.rows = node_count;
  g.pattern_.cols = m_count;
  for (std::size_t m = 0; m < m_count; ++m) {
    std::vector<NodeId> sorted = g.edges_[m].nodes;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      const NodeId id = sorted[j];
      if (id < 1 || id > node_count) {
        throw DimensionError("assemble: node id " + std::to_string(id) + " outside [1, " +
                             std::to_string(node_count) + "]");
      }
      if (j > 0 && sorted[j - 1] == id) {
        throw DimensionError("assemble: hyperedge " + std::to_string(m + 1) + " repeats node " +
                             std::to_string(id));
      }
      g.incidence_.set(id - 1, m);
      g.node_degrees_[id - 1] += 1.0;
      g.edge_degrees_[m] += 1.0;
      g.pattern_.row_index.push_back(id - 1);
      g.pattern_.col_index.push_back(m);
    }
  }
  return g;
}

Hypergraph build_hypergraph(const ModelConfig& cfg) {
  NodeIndex index(plan_scales(cfg.input_len, cfg.windows));
  return assemble(index.node_count(), build_hyperedge_sets(index, cfg.hyperedge_sizes, cfg.hop),
                  cfg.kinds);
}

std::string dump_sparse(const Hypergraph& g) {
  std::ostringstream out;
  const SparsePattern& p = g.pattern();
  for (std::size_t k = 0; k < p.nnz(); ++k) {
    const Hyperedge& e = g.edge(p.col_index[k]);
    out << p.col_index[k] + 1 << '\t' << p.row_index[k] + 1 << '\t' << to_string(e.kind) << '\t'
        << e.scale << '\t' << e.hop << '\n';
  }
  return out.str();
}

}  // namespace mshyper
