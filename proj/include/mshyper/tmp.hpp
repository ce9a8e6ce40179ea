#pragma once

// Tri-stage message passing and the forecasting head.
//
//   node -> hyperedge      v_e = sum of member node embeddings
//   hyperedge -> hyperedge masked self-attention over the hyperedge graph
//   hyperedge -> node      per-head attention-weighted incidence H_att and
//                          the normalized convolution
//                          sigma(Dv^-1/2 H_att De^-1 H_att^T Dv^-1/2 V P_j)
//
// Heads are concatenated along the embedding axis, each of width
// d_model / heads. sigma is LeakyReLU(0.01). Degrees come from the static
// incidence; a node with no hyperedge gets a zero normalization factor.

#include <cstdint>
#include <vector>

#include "mshyper/autodiff.hpp"
#include "mshyper/hyperedge_graph.hpp"
#include "mshyper/hypergraph.hpp"
#include "mshyper/mfe.hpp"
#include "mshyper/model_config.hpp"

namespace mshyper {

struct HeadParams {
  std::vector<Linear> scorer;  // f_t: 2 d_model -> d_model -> 1
  ParamTensor projection;      // P_j: d_model x (d_model / heads)
};

struct TmpBlockParams {
  ParamTensor w_q;
  ParamTensor w_k;
  ParamTensor w_v;
  std::vector<HeadParams> heads;
};

struct ModelParams {
  MfeParams mfe;
  std::vector<TmpBlockParams> blocks;
  Linear head;  // (scales * d_model) -> (horizon * variables)

  // Every learnable tensor in declaration order (the checkpoint order).
  std::vector<ParamTensor*> all();
  std::vector<const ParamTensor*> all() const;
  std::size_t scalar_count() const;
  void zero_grad();
};

// Glorot-uniform weights and zero biases from a seeded generator.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

// Graph structures and normalization factors shared by every forward pass of
// one configuration. Immutable once built.
struct GraphBundle {
  NodeIndex index;
  Hypergraph hypergraph;
  HyperedgeGraph edge_graph;
  std::vector<double> inv_sqrt_node_degree;  // 0 for isolated nodes
  std::vector<double> inv_edge_degree;
  std::vector<std::size_t> entry_node;        // pattern entry -> node row

  static GraphBundle build(const ModelConfig& cfg);
  static GraphBundle from(NodeIndex index, Hypergraph g);
};

// Row m = sum of the embeddings of the nodes in hyperedge m.
Var init_hyperedge_embeddings(const Var& nodes, const Hypergraph& g);

struct EdgeAttention {
  Var output;   // M x d_model
  Var weights;  // M x M row-stochastic attention
};

EdgeAttention hyperedge_attention(const Var& edges, const HyperedgeGraph& heg, TmpBlockParams& p,
                                  double mask_constant);

// H_att entries for one head, in g.pattern() order (nnz x 1). Each node's
// entries form a softmax over its incident hyperedges.
Var attention_incidence(const Var& nodes, const Var& edges, const GraphBundle& graphs, HeadParams& head);

// N x M dense view of per-entry incidence values.
Tensor densify_incidence(const Hypergraph& g, const Tensor& values);

// One head of the normalized hypergraph convolution with incidence values
// given per pattern entry; `activate` applies sigma.
Var hypergraph_convolution(const Var& nodes, const Var& incidence_values, const GraphBundle& graphs,
                           const Var& projection, bool activate = true);

// Static-incidence convolution (all incidence values 1).
Var hyperconv_static(const Var& nodes, const GraphBundle& graphs, ParamTensor& projection);

// Multi-head convolution with enriched incidence; heads concatenated.
Var hyperconv(const Var& nodes, std::span<const Var> incidence_per_head, const GraphBundle& graphs,
              std::span<HeadParams> heads);

// Concatenates the last node of every scale, applies the affine head and
// reshapes to horizon x variables.
Var predict(const NodeIndex& index, const Var& final_nodes, Linear& head, std::size_t horizon,
            std::size_t variables);

// Mean of squared errors over all horizon x variables entries.
Var mse_loss(const Var& pred, const Tensor& truth);

struct BlockState {
  Var nodes;             // V, N x d_model
  Var edges;             // initialized hyperedge embeddings
  Var edges_updated;     // after hyperedge attention
  Var edge_attention;    // M x M
  std::vector<Var> incidence;  // H_att per head (pattern order)
  Var output;            // N x d_model
};

struct ForwardState {
  MultiScaleSeries series;
  std::vector<BlockState> blocks;
  Var prediction;  // horizon x variables (normalized space)
};

// Window is T x D, already normalized.
ForwardState forward(Tape& tape, const Tensor& window, const ModelConfig& cfg, ModelParams& params,
                     const GraphBundle& graphs);

}  // namespace mshyper
