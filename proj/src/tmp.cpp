#include "mshyper/tmp.hpp"

#include <cmath>

#include "mshyper/error.hpp"

namespace mshyper {

std::vector<ParamTensor*> ModelParams::all() {
  std::vector<ParamTensor*> out;
  auto push_linear = [&out](Linear& l) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  };
  for (auto& l : mfe.embed) push_linear(l);
  for (auto& l : mfe.conv) push_linear(l);
  for (auto& b : blocks) {
    out.push_back(&b.w_q);
    out.push_back(&b.w_k);
    out.push_back(&b.w_v);
    for (auto& h : b.heads) {
      for (auto& l : h.scorer) push_linear(l);
      out.push_back(&h.projection);
    }
  }
  push_linear(head);
  return out;
}

std::vector<const ParamTensor*> ModelParams::all() const {
  auto mut = const_cast<ModelParams*>(this)->all();
  return {mut.begin(), mut.end()};
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const ParamTensor* p : all()) n += p->size();
  return n;
}

void ModelParams::zero_grad() {
  for (ParamTensor* p : all()) p->zero_grad();
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const std::size_t d = cfg.d_model;
  auto make_linear = [&rng](const std::string& name, std::size_t in, std::size_t out) {
    Linear l(name, in, out);
    glorot_uniform(l.weight, in, out, rng);
    return l;
  };
  auto make_matrix = [&rng](const std::string& name, std::size_t in, std::size_t out) {
    ParamTensor p(name, {in, out});
    glorot_uniform(p, in, out, rng);
    return p;
  };

  ModelParams params;
  for (std::size_t i = 0; i < cfg.embed_layers; ++i) {
    params.mfe.embed.push_back(
        make_linear("mfe.embed." + std::to_string(i), i == 0 ? cfg.variables : d, d));
  }
  if (cfg.aggregation == Aggregation::kConv) {
    for (std::size_t s = 0; s < cfg.windows.size(); ++s) {
      params.mfe.conv.push_back(make_linear("mfe.conv." + std::to_string(s), cfg.windows[s] * d, d));
    }
  }
  const std::size_t head_width = d / cfg.heads;
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    const std::string prefix = "tmp." + std::to_string(b) + ".";
    TmpBlockParams block;
    block.w_q = make_matrix(prefix + "w_q", d, d);
    block.w_k = make_matrix(prefix + "w_k", d, d);
    block.w_v = make_matrix(prefix + "w_v", d, d);
    for (std::size_t j = 0; j < cfg.heads; ++j) {
      const std::string hp = prefix + "head." + std::to_string(j) + ".";
      HeadParams head;
      head.scorer.push_back(make_linear(hp + "scorer.0", 2 * d, d));
      head.scorer.push_back(make_linear(hp + "scorer.1", d, 1));
      head.projection = make_matrix(hp + "projection", d, head_width);
      block.heads.push_back(std::move(head));
    }
    params.blocks.push_back(std::move(block));
  }
  params.head = make_linear("head", cfg.scales() * d, cfg.horizon * cfg.variables);
  return params;
}

GraphBundle GraphBundle::build(const ModelConfig& cfg) {
  NodeIndex index(plan_scales(cfg.input_len, cfg.windows));
  Hypergraph g =
      assemble(index.node_count(), build_hyperedge_sets(index, cfg.hyperedge_sizes, cfg.hop), cfg.kinds);
  return from(std::move(index), std::move(g));
}

GraphBundle GraphBundle::from(NodeIndex index, Hypergraph g) {
  GraphBundle b;
  b.index = std::move(index);
  b.hypergraph = std::move(g);
  b.edge_graph = build_hyperedge_graph(b.hypergraph);
  for (double deg : b.hypergraph.node_degrees()) {
    b.inv_sqrt_node_degree.push_back(deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0);
  }
  for (double deg : b.hypergraph.edge_degrees()) {
    b.inv_edge_degree.push_back(deg > 0.0 ? 1.0 / deg : 0.0);
  }
  b.entry_node = b.hypergraph.pattern().row_index;
  return b;
}

Var init_hyperedge_embeddings(const Var& nodes, const Hypergraph& g) {
  if (nodes.value().rows() != g.node_count()) {
    throw DimensionError("init_hyperedge_embeddings: " + std::to_string(nodes.value().rows()) +
                         " node rows for a hypergraph over " + std::to_string(g.node_count()) + " nodes");
  }
  Var ones = nodes.tape().constant(Tensor({g.pattern().nnz(), 1}, 1.0));
  return sparse_matmul(ones, g.pattern(), nodes, /*transpose=*/true);
}

EdgeAttention hyperedge_attention(const Var& edges, const HyperedgeGraph& heg, TmpBlockParams& p,
                                  double mask_constant) {
  const Tensor& ev = edges.value();
  if (heg.size() != ev.rows()) {
    throw DimensionError("hyperedge_attention: adjacency over " + std::to_string(heg.size()) +
                         " hyperedges, embeddings for " + std::to_string(ev.rows()));
  }
  Tape& t = edges.tape();
  Var q = matmul(edges, t.param(p.w_q));
  Var k = matmul(edges, t.param(p.w_k));
  Var v = matmul(edges, t.param(p.w_v));
  Var scores = scale(matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(ev.cols())));
  Var weights = masked_softmax(scores, heg.adjacency(), mask_constant);
  return {matmul(weights, v), weights};
}

Var attention_incidence(const Var& nodes, const Var& edges, const GraphBundle& graphs, HeadParams& head) {
  const Hypergraph& g = graphs.hypergraph;
  const std::size_t d = nodes.value().cols();
  if (head.scorer.empty() || head.scorer[0].in() != 2 * d || edges.value().cols() != d) {
    throw DimensionError("attention_incidence: scorer input must be 2 x embedding width");
  }
  Tape& t = nodes.tape();
  // First scorer layer on [v_i, v_e] split into node and edge halves so each
  // embedding is projected once instead of once per incidence entry.
  Var w1 = t.param(head.scorer[0].weight);
  Var node_part = matmul(nodes, slice_rows(w1, 0, d));
  Var edge_part = matmul(edges, slice_rows(w1, d, d));
  Var hidden = add(gather_rows(node_part, g.pattern().row_index),
                   gather_rows(edge_part, g.pattern().col_index));
  hidden = add_bias(hidden, t.param(head.scorer[0].bias));
  for (std::size_t i = 1; i < head.scorer.size(); ++i) {
    hidden = linear(leaky_relu(hidden), head.scorer[i]);
  }
  Var logits = leaky_relu(hidden);
  return segment_softmax(logits, graphs.entry_node, g.node_count());
}

Tensor densify_incidence(const Hypergraph& g, const Tensor& values) {
  Tensor dense({g.node_count(), g.edge_count()});
  const SparsePattern& p = g.pattern();
  for (std::size_t k = 0; k < p.nnz(); ++k) dense.at(p.row_index[k], p.col_index[k]) = values[k];
  return dense;
}

Var hypergraph_convolution(const Var& nodes, const Var& incidence_values, const GraphBundle& graphs,
                           const Var& projection, bool activate) {
  const SparsePattern& pattern = graphs.hypergraph.pattern();
  Var x = scale_rows(matmul(nodes, projection), graphs.inv_sqrt_node_degree);
  Var per_edge = scale_rows(sparse_matmul(incidence_values, pattern, x, /*transpose=*/true),
                            graphs.inv_edge_degree);
  Var back = scale_rows(sparse_matmul(incidence_values, pattern, per_edge, /*transpose=*/false),
                        graphs.inv_sqrt_node_degree);
  return activate ? leaky_relu(back) : back;
}

Var hyperconv_static(const Var& nodes, const GraphBundle& graphs, ParamTensor& projection) {
  Tape& t = nodes.tape();
  Var ones = t.constant(Tensor({graphs.hypergraph.pattern().nnz(), 1}, 1.0));
  return hypergraph_convolution(nodes, ones, graphs, t.param(projection));
}

Var hyperconv(const Var& nodes, std::span<const Var> incidence_per_head, const GraphBundle& graphs,
              std::span<HeadParams> heads) {
  if (incidence_per_head.size() != heads.size() || heads.empty()) {
    throw DimensionError("hyperconv: one enriched incidence per head required");
  }
  Tape& t = nodes.tape();
  std::vector<Var> outputs;
  for (std::size_t j = 0; j < heads.size(); ++j) {
    outputs.push_back(hypergraph_convolution(nodes, incidence_per_head[j], graphs,
                                             t.param(heads[j].projection)));
  }
  return outputs.size() == 1 ? outputs[0] : concat_cols(outputs);
}

Var predict(const NodeIndex& index, const Var& final_nodes, Linear& head, std::size_t horizon,
            std::size_t variables) {
  std::vector<std::size_t> last;
  for (std::size_t s = 1; s <= index.scales(); ++s) last.push_back(index.id(s, index.plan().horizon(s)) - 1);
  const std::size_t width = final_nodes.value().cols();
  Var summary = reshape(gather_rows(final_nodes, std::move(last)), {1, index.scales() * width});
  if (head.in() != summary.value().cols() || head.out() != horizon * variables) {
    throw DimensionError("predict: head maps " + std::to_string(head.in()) + " -> " +
                         std::to_string(head.out()) + ", needs " +
                         std::to_string(summary.value().cols()) + " -> " +
                         std::to_string(horizon * variables));
  }
  return reshape(linear(summary, head), {horizon, variables});
}

Var mse_loss(const Var& pred, const Tensor& truth) { return mse(pred, truth); }

ForwardState forward(Tape& tape, const Tensor& window, const ModelConfig& cfg, ModelParams& params,
                     const GraphBundle& graphs) {
  ForwardState state;
  state.series = build_multiscale(tape.constant(window), cfg, params.mfe);
  Var nodes = state.series.nodes;
  for (auto& block : params.blocks) {
    BlockState bs;
    bs.nodes = nodes;
    bs.edges = init_hyperedge_embeddings(nodes, graphs.hypergraph);
    EdgeAttention att = hyperedge_attention(bs.edges, graphs.edge_graph, block, cfg.mask_constant);
    bs.edges_updated = att.output;
    bs.edge_attention = att.weights;
    for (auto& head : block.heads) {
      bs.incidence.push_back(attention_incidence(nodes, bs.edges_updated, graphs, head));
    }
    bs.output = hyperconv(nodes, bs.incidence, graphs, block.heads);
    nodes = bs.output;
    state.blocks.push_back(std::move(bs));
  }
  state.prediction = predict(state.series.index, nodes, params.head, cfg.horizon, cfg.variables);
  return state;
}

}  // namespace mshyper
