#include <gtest/gtest.h>

#include <random>

#include "mshyper/error.hpp"
#include "mshyper/hypergraph.hpp"
#include "oracle.hpp"

namespace mshyper {
namespace {

using Sizes = std::vector<std::size_t>;
using Ids = std::vector<NodeId>;

// Within-scale positions of a single-scale edge list.
std::vector<Ids> positions(const std::vector<Hyperedge>& edges, const NodeIndex& index) {
  std::vector<Ids> out;
  for (const auto& e : edges) {
    Ids p;
    for (NodeId id : e.nodes) p.push_back(index.locate(id).second);
    out.push_back(p);
  }
  return out;
}

oracle::EdgeSet as_set(const std::vector<Hyperedge>& edges) {
  oracle::EdgeSet s;
  for (const auto& e : edges) s.insert(e.nodes);
  return s;
}

TEST(HopStart, ContiguousWhenHopIsOne) {
  for (std::size_t size = 2; size <= 6; ++size) {
    for (std::size_t i = 1; i <= 20; ++i) EXPECT_EQ(hop_start(i, size, 1), (i - 1) * size + 1);
  }
  EXPECT_EQ(hop_start(1, 3, 2), 1u);
  EXPECT_EQ(hop_start(2, 3, 2), 2u);
  EXPECT_EQ(hop_start(3, 3, 2), 7u);
  EXPECT_EQ(hop_start(4, 3, 2), 8u);
}

TEST(IntraHyperedges, ContiguousBlocks) {
  NodeIndex index(plan_scales(8, Sizes{}));
  auto edges = intra_hyperedges(index, Sizes{4}, 1);
  EXPECT_EQ(positions(edges, index), (std::vector<Ids>{{1, 2, 3, 4}, {5, 6, 7, 8}}));
  for (const auto& e : edges) {
    EXPECT_EQ(e.kind, EdgeKind::kIntra);
    EXPECT_EQ(e.scale, 1u);
    EXPECT_EQ(e.hop, 1u);
  }
}

TEST(IntraHyperedges, InterleavedHopRuns) {
  NodeIndex index(plan_scales(12, Sizes{}));
  auto edges = intra_hyperedges(index, Sizes{3}, 2);
  EXPECT_EQ(positions(edges, index), (std::vector<Ids>{{1, 3, 5}, {2, 4, 6}, {7, 9, 11}, {8, 10, 12}}));
}

TEST(IntraHyperedges, ScaleTooShortYieldsNothing) {
  NodeIndex index(plan_scales(3, Sizes{}));
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_TRUE(intra_hyperedges(index, Sizes{4}, k).empty());
}

TEST(IntraHyperedges, UsesGlobalIdsPerScale) {
  NodeIndex index(plan_scales(16, Sizes{2}));
  auto edges = intra_hyperedges(index, Sizes{4, 4}, 1);
  ASSERT_EQ(edges.size(), 6u);
  EXPECT_EQ(edges[4].nodes, (Ids{17, 18, 19, 20}));
  EXPECT_EQ(edges[4].scale, 2u);
}

TEST(InterHyperedges, CoarseNodeFirst) {
  NodeIndex index(plan_scales(16, Sizes{4}));
  auto edges = inter_hyperedges(index, Sizes{4, 4}, 1);
  ASSERT_EQ(edges.size(), 4u);
  EXPECT_EQ(edges[0].nodes, (Ids{17, 1, 2, 3, 4}));
  EXPECT_EQ(edges[1].nodes, (Ids{18, 5, 6, 7, 8}));
  EXPECT_EQ(edges[1].kind, EdgeKind::kInter);
  EXPECT_EQ(edges[1].scale, 1u);
  EXPECT_TRUE(inter_hyperedges(NodeIndex(plan_scales(16, Sizes{})), Sizes{4}, 1).empty());
}

TEST(MixedHyperedges, OneNodePerCoarseScaleThenRun) {
  NodeIndex index(plan_scales(32, Sizes{4, 4}));  // horizons 32, 8, 2
  auto edges = mixed_hyperedges(index, 4, 1);
  ASSERT_GE(edges.size(), 2u);
  // scale 3 position 1 (id 41), scale 2 position 1 (id 33), run 1..4
  EXPECT_EQ(edges[0].nodes, (Ids{41, 33, 1, 2, 3, 4}));
  // scale 3 position ceil(5/16) = 1, scale 2 position ceil(5/4) = 2
  EXPECT_EQ(edges[1].nodes, (Ids{41, 34, 5, 6, 7, 8}));
  for (const auto& e : edges) {
    EXPECT_EQ(e.nodes.size(), (3u - 1u) + 4u);
    EXPECT_EQ(e.scale, 0u);
  }
  EXPECT_TRUE(mixed_hyperedges(NodeIndex(plan_scales(16, Sizes{})), 4, 1).empty());
}

TEST(Builders, MatchBruteForceOracle) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> len(4, 64), nscales(1, 4), win(2, 4), size(2, 5), hop(1, 4);
  int checked = 0;
  while (checked < 100) {
    Sizes windows(nscales(rng) - 1), sizes;
    for (auto& w : windows) w = win(rng);
    const std::size_t t = len(rng), k = hop(rng);
    for (std::size_t s = 0; s <= windows.size(); ++s) sizes.push_back(size(rng));
    const oracle::Plan ref = oracle::make_plan(t, windows);
    if (!ref.valid) {
      EXPECT_THROW(plan_scales(t, windows), ConfigError);
      continue;
    }
    NodeIndex index(plan_scales(t, windows));
    ASSERT_EQ(index.plan().horizons, ref.horizons);
    EXPECT_EQ(as_set(intra_hyperedges(index, sizes, k)), oracle::intra(ref, sizes, k));
    EXPECT_EQ(as_set(inter_hyperedges(index, sizes, k)), oracle::inter(ref, sizes, k));
    EXPECT_EQ(as_set(mixed_hyperedges(index, sizes[0], k)), oracle::mixed(ref, sizes[0], k));
    ++checked;
  }
}

TEST(Builders, HopOneEqualsContiguousConstruction) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<std::size_t> len(8, 64), win(2, 4), size(2, 5);
  for (int trial = 0; trial < 50; ++trial) {
    Sizes windows{win(rng)}, sizes{size(rng), size(rng)};
    const std::size_t t = len(rng);
    NodeIndex index(plan_scales(t, windows));
    EXPECT_EQ(as_set(intra_hyperedges(index, sizes, 1)),
              oracle::intra_blocks(oracle::make_plan(t, windows), sizes));
  }
}

// Original (hop 1) intra edges partition the leading H * floor(h / H) nodes.
TEST(Builders, IntraHopOnePartitionsLeadingNodes) {
  NodeIndex index(plan_scales(50, Sizes{3, 2}));  // horizons 50, 16, 8
  const Sizes sizes{4, 3, 5};
  auto edges = intra_hyperedges(index, sizes, 1);
  for (std::size_t s = 1; s <= 3; ++s) {
    std::vector<int> hits(index.plan().horizon(s) + 1, 0);
    for (const auto& e : edges) {
      if (e.scale != s) continue;
      for (NodeId id : e.nodes) ++hits[index.locate(id).second];
    }
    const std::size_t covered = sizes[s - 1] * (index.plan().horizon(s) / sizes[s - 1]);
    for (std::size_t p = 1; p <= index.plan().horizon(s); ++p) EXPECT_EQ(hits[p], p <= covered ? 1 : 0);
  }
}

TEST(Assemble, SingleEdgeDegrees) {
  HyperedgeSets sets;
  sets.intra.push_back({{1, 2}, EdgeKind::kIntra, 1, 1});
  Hypergraph g = assemble(4, sets, {});
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g.incidence().get(0, 0));
  EXPECT_TRUE(g.incidence().get(1, 0));
  EXPECT_FALSE(g.incidence().get(2, 0));
  EXPECT_EQ(g.edge_degrees(), (std::vector<double>{2}));
  EXPECT_EQ(g.node_degrees(), (std::vector<double>{1, 1, 0, 0}));
  EXPECT_EQ(dump_sparse(g), "1\t1\tintra\t1\t1\n1\t2\tintra\t1\t1\n");
}

TEST(Assemble, RejectsBadIdsAndEmptyResults) {
  HyperedgeSets sets;
  sets.intra.push_back({{1, 5}, EdgeKind::kIntra, 1, 1});
  EXPECT_THROW(assemble(4, sets, {}), DimensionError);
  sets.intra[0].nodes = {2, 2};
  EXPECT_THROW(assemble(4, sets, {}), DimensionError);
  EXPECT_THROW(assemble(4, sets, {false, true, true}), EmptyHypergraphError);
}

TEST(Assemble, FamilyOrderAndFlags) {
  ModelConfig cfg;
  Hypergraph all = build_hypergraph(cfg);
  NodeIndex index(plan_scales(cfg.input_len, cfg.windows));
  HyperedgeSets sets = build_hyperedge_sets(index, cfg.hyperedge_sizes, cfg.hop);
  ASSERT_EQ(all.edge_count(), sets.intra.size() + sets.inter.size() + sets.mixed.size());
  for (std::size_t m = 0; m < all.edge_count(); ++m) {
    const EdgeKind want = m < sets.intra.size() ? EdgeKind::kIntra
                          : m < sets.intra.size() + sets.inter.size() ? EdgeKind::kInter
                                                                      : EdgeKind::kMixed;
    EXPECT_EQ(all.edge(m).kind, want);
  }
  // Within each family the hop-1 half precedes the k-hop half.
  for (std::size_t m = 1; m < sets.intra.size(); ++m) EXPECT_LE(sets.intra[m - 1].hop, sets.intra[m].hop);

  ModelConfig intra_only = cfg;
  intra_only.kinds = {true, false, false};
  Hypergraph g = build_hypergraph(intra_only);
  EXPECT_EQ(g.edge_count(), sets.intra.size());
  for (const auto& e : g.edges()) EXPECT_EQ(e.kind, EdgeKind::kIntra);
}

TEST(Assemble, HopOneSkipsDuplicateFamily) {
  ModelConfig cfg;
  cfg.hop = 1;
  NodeIndex index(plan_scales(cfg.input_len, cfg.windows));
  HyperedgeSets sets = build_hyperedge_sets(index, cfg.hyperedge_sizes, 1);
  EXPECT_EQ(sets.intra, intra_hyperedges(index, cfg.hyperedge_sizes, 1));
}

TEST(Incidence, DegreesMatchRecountForRandomConfigs) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> len(16, 64), win(2, 3), size(2, 5), hop(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    ModelConfig cfg;
    cfg.input_len = len(rng);
    cfg.windows = {win(rng), win(rng)};
    cfg.hyperedge_sizes = {size(rng), size(rng), size(rng)};
    cfg.hop = hop(rng);
    Hypergraph g;
    try {
      g = build_hypergraph(cfg);
    } catch (const Error&) {
      continue;
    }
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      double row = 0;
      for (std::size_t m = 0; m < g.edge_count(); ++m) row += g.incidence().get(n, m);
      EXPECT_EQ(row, g.node_degrees()[n]);
    }
    for (std::size_t m = 0; m < g.edge_count(); ++m) {
      double col = 0;
      for (std::size_t n = 0; n < g.node_count(); ++n) col += g.incidence().get(n, m);
      EXPECT_EQ(col, g.edge_degrees()[m]);
      EXPECT_EQ(col, static_cast<double>(g.edge(m).nodes.size()));
      for (NodeId id : g.edge(m).nodes) {
        EXPECT_GE(id, 1u);
        EXPECT_LE(id, g.node_count());
      }
    }
  }
}

TEST(Incidence, EdgeMembershipRespectsKinds) {
  ModelConfig cfg;
  NodeIndex index(plan_scales(cfg.input_len, cfg.windows));
  Hypergraph g = build_hypergraph(cfg);
  for (const auto& e : g.edges()) {
    std::vector<std::size_t> per_scale(index.scales() + 1, 0);
    for (NodeId id : e.nodes) ++per_scale[index.locate(id).first];
    if (e.kind == EdgeKind::kIntra) {
      EXPECT_EQ(per_scale[e.scale], e.nodes.size());
    } else if (e.kind == EdgeKind::kInter) {
      EXPECT_EQ(per_scale[e.scale + 1], 1u);
      EXPECT_EQ(per_scale[e.scale], e.nodes.size() - 1);
    } else {
      for (std::size_t s = 2; s <= index.scales(); ++s) EXPECT_EQ(per_scale[s], 1u);
      EXPECT_EQ(per_scale[1], cfg.hyperedge_sizes[0]);
    }
  }
}

TEST(DumpSparse, DeterministicAndSorted) {
  ModelConfig cfg;
  const std::string a = dump_sparse(build_hypergraph(cfg));
  const std::string b = dump_sparse(build_hypergraph(cfg));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), "1\t1\tintra\t1\t1");
}

}  // namespace
}  // namespace mshyper
