#include <gtest/gtest.h>

#include <algorithm>

#include "mshyper/error.hpp"
#include "mshyper/hyperedge_graph.hpp"

namespace mshyper {
namespace {

Hyperedge intra(std::vector<NodeId> nodes, std::size_t scale, std::size_t hop = 1) {
  return {std::move(nodes), EdgeKind::kIntra, scale, hop};
}

std::vector<std::vector<int>> dense(const BinaryMatrix& a) {
  std::vector<std::vector<int>> out(a.rows(), std::vector<int>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out[i][j] = a.get(i, j);
  }
  return out;
}

TEST(SequentialAdjacency, ConsecutiveSameScaleEdges) {
  std::vector<Hyperedge> e{intra({1, 2}, 1), intra({3, 4}, 1), intra({5, 6}, 1)};
  EXPECT_EQ(dense(sequential_adjacency(e)), (std::vector<std::vector<int>>{{1, 0, 0}, {1, 1, 0}, {0, 1, 1}}));
  EXPECT_EQ(dense(sequential_adjacency(std::vector<Hyperedge>{intra({1, 2}, 1)})),
            (std::vector<std::vector<int>>{{1}}));
}

TEST(SequentialAdjacency, ScaleAndHopBoundariesBreakTheChain) {
  std::vector<Hyperedge> e{intra({1, 2}, 1), intra({9, 10}, 2), intra({1, 3}, 2, 2), intra({11, 12}, 2)};
  BinaryMatrix a = sequential_adjacency(e);
  EXPECT_FALSE(a.get(1, 0));
  EXPECT_FALSE(a.get(2, 1));
  EXPECT_FALSE(a.get(3, 2));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(a.get(i, i));
  EXPECT_EQ(a.count(), 4u);
}

TEST(AssociationAdjacency, SharedNodeRule) {
  std::vector<Hyperedge> e{{{13, 1, 2}, EdgeKind::kInter, 1, 1},
                           {{14, 3, 4}, EdgeKind::kInter, 1, 1},
                           {{13, 20, 5}, EdgeKind::kMixed, 0, 1}};
  BinaryMatrix a = association_adjacency(e);
  EXPECT_TRUE(a.get(0, 2));
  EXPECT_TRUE(a.get(2, 0));
  EXPECT_FALSE(a.get(0, 1));
  EXPECT_FALSE(a.get(1, 2));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(a.get(i, i));
}

TEST(AssembleBlock, BlockDiagonalLayout) {
  BinaryMatrix one(1, 1);
  one.set(0, 0);
  HyperedgeGraph id = assemble_block(one, one);
  EXPECT_EQ(dense(id.adjacency()), (std::vector<std::vector<int>>{{1, 0}, {0, 1}}));

  BinaryMatrix full(2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) full.set(i, j);
  }
  HyperedgeGraph g = assemble_block(full, full);
  EXPECT_EQ(g.size(), 4u);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 2; j < 4; ++j) {
      EXPECT_FALSE(g.adjacency().get(i, j));
      EXPECT_FALSE(g.adjacency().get(j, i));
    }
  }
  EXPECT_THROW(assemble_block(BinaryMatrix(2, 3), one), DimensionError);
}

TEST(HyperedgeGraph, BlocksReassembleExactly) {
  ModelConfig cfg;
  HyperedgeGraph heg = build_hyperedge_graph(build_hypergraph(cfg));
  HyperedgeGraph again = assemble_block(heg.sr_block(), heg.ar_block());
  EXPECT_EQ(again.adjacency(), heg.adjacency());
  EXPECT_EQ(again.sr_count(), heg.sr_count());
}

TEST(HyperedgeGraph, DefaultConfigStructure) {
  ModelConfig cfg;
  Hypergraph g = build_hypergraph(cfg);
  HyperedgeGraph heg = build_hyperedge_graph(g);
  const std::size_t n_sr = static_cast<std::size_t>(std::count_if(
      g.edges().begin(), g.edges().end(), [](const Hyperedge& e) { return e.kind == EdgeKind::kIntra; }));
  EXPECT_EQ(heg.sr_count(), n_sr);
  EXPECT_EQ(heg.size(), g.edge_count());

  const BinaryMatrix ar = heg.ar_block();
  for (std::size_t i = 0; i < ar.rows(); ++i) {
    EXPECT_TRUE(ar.get(i, i));
    for (std::size_t j = 0; j < ar.cols(); ++j) {
      EXPECT_EQ(ar.get(i, j), ar.get(j, i));
      const auto& a = g.edge(n_sr + i).nodes;
      const auto& b = g.edge(n_sr + j).nodes;
      const bool shared = std::any_of(a.begin(), a.end(), [&](NodeId x) {
        return std::find(b.begin(), b.end(), x) != b.end();
      });
      EXPECT_EQ(ar.get(i, j), shared);
    }
  }
}

TEST(HyperedgeGraph, RequiresIntraEdgesFirst) {
  HyperedgeSets sets;
  sets.inter.push_back({{5, 1, 2}, EdgeKind::kInter, 1, 1});
  Hypergraph g = assemble(6, sets, {});
  EXPECT_NO_THROW(build_hyperedge_graph(g));
}

TEST(DumpAdjacency, HeaderThenEntries) {
  BinaryMatrix one(1, 1);
  one.set(0, 0);
  EXPECT_EQ(dump_adjacency(assemble_block(one, one)), "sr\t1\tar\t1\n1\t1\n2\t2\n");
}

}  // namespace
}  // namespace mshyper
