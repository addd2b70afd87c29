#include "transg/sgt.hpp"

#include <cmath>

#include "transg/error.hpp"

namespace transg::sgt {

namespace ops = numerics::ops;
using numerics::BatchNorm;
using numerics::Linear;
using numerics::Mlp;

void SgtConfig::validate() const {
  if (d == 0 || heads == 0 || head_dim == 0 || layers == 0) {
    throw ConfigError("SGT sizes d, H, d_k and L must all be positive");
  }
  if (d != heads * head_dim) {
    throw ConfigError("SGT embedding d=" + std::to_string(d) + " must equal H*d_k = " +
                      std::to_string(heads) + "*" + std::to_string(head_dim));
  }
}

EncoderState EncoderState::create(const SgtConfig& config, std::size_t joints,
                                  std::size_t frames, std::size_t num_classes, EncoderKind kind,
                                  numerics::SeededRng& rng) {
  config.validate();
  if (joints == 0 || frames == 0) throw ConfigError("encoder needs J >= 1 and f >= 1");
  EncoderState s;
  s.config = config;
  s.kind = kind;
  s.joints = joints;
  s.frames = frames;
  s.num_classes = num_classes;
  const std::size_t d = config.d;
  const std::size_t hd = config.heads * config.head_dim;

  if (kind == EncoderKind::sgt) {
    s.coord_embed = Linear::create(3, d, true, rng);
    if (config.use_pe && config.pe_dim > 0) s.pe_embed = Linear::create(config.pe_dim, d, true, rng);
    for (std::size_t l = 0; l < config.layers; ++l) {
      SgtLayer layer;
      layer.query = numerics::init_weight(hd, d, rng);
      layer.key = numerics::init_weight(hd, d, rng);
      layer.value = numerics::init_weight(hd, d, rng);
      layer.output = numerics::init_weight(d, hd, rng);
      layer.ffn_in = numerics::init_weight(2 * d, d, rng);
      layer.ffn_out = numerics::init_weight(d, 2 * d, rng);
      layer.norm_attention = BatchNorm::create(d);
      layer.norm_ffn = BatchNorm::create(d);
      s.layers.push_back(std::move(layer));
    }
  } else {
    s.linear_encoder = Linear::create(frames * joints * 3, d, true, rng);
  }
  s.proj_skeleton = Linear::create(d, d, true, rng);
  s.proj_prototype = Linear::create(d, d, true, rng);
  s.recon_structure = Mlp::create(d, 2 * d, joints * 3, rng);
  s.recon_trajectory = Mlp::create(d, 2 * d, frames * 3, rng);
  if (num_classes > 0) s.classifier = Linear::create(d, num_classes, true, rng);
  return s;
}

std::vector<NamedTensor> EncoderState::parameters() const {
  std::vector<NamedTensor> out;
  if (kind == EncoderKind::sgt) {
    coord_embed.collect("embed.coord", out);
    if (pe_embed.weight.defined()) pe_embed.collect("embed.pe", out);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string p = "layers." + std::to_string(l);
      const auto& L = layers[l];
      out.push_back({p + ".query", L.query});
      out.push_back({p + ".key", L.key});
      out.push_back({p + ".value", L.value});
      out.push_back({p + ".output", L.output});
      out.push_back({p + ".ffn_in", L.ffn_in});
      out.push_back({p + ".ffn_out", L.ffn_out});
      L.norm_attention.collect(p + ".norm_attention", out);
      L.norm_ffn.collect(p + ".norm_ffn", out);
    }
  } else {
    linear_encoder.collect("linear_encoder", out);
  }
  proj_skeleton.collect("heads.proj_skeleton", out);
  proj_prototype.collect("heads.proj_prototype", out);
  recon_structure.collect("heads.recon_structure", out);
  recon_trajectory.collect("heads.recon_trajectory", out);
  if (classifier.weight.defined()) classifier.collect("heads.classifier", out);
  return out;
}

std::vector<NamedBuffer> EncoderState::buffers() {
  std::vector<NamedBuffer> out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "layers." + std::to_string(l);
    auto& L = layers[l];
    out.push_back({p + ".norm_attention.running_mean", &L.norm_attention.stats.running_mean});
    out.push_back({p + ".norm_attention.running_var", &L.norm_attention.stats.running_var});
    out.push_back({p + ".norm_ffn.running_mean", &L.norm_ffn.stats.running_mean});
    out.push_back({p + ".norm_ffn.running_var", &L.norm_ffn.stats.running_var});
  }
  return out;
}

std::size_t EncoderState::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor.numel();
  return n;
}

Tensor batch_tensor(const skeledata::Batch& batch) {
  return Tensor::from({batch.size, batch.frames, batch.joints, 3}, batch.coords);
}

Tensor embed_nodes(const Tensor& coords, const graphpe::SkeletonGraphSpec& graph,
                   const EncoderState& state) {
  if (coords.rank() != 4 || coords.dim(3) != 3) {
    throw DimensionError("embed_nodes: expected [B, f, J, 3], got " +
                         numerics::shape_str(coords.shape()));
  }
  if (coords.dim(2) != graph.joints || coords.dim(2) != state.joints) {
    throw DimensionError("embed_nodes: batch has J=" + std::to_string(coords.dim(2)) +
                         ", graph has J=" + std::to_string(graph.joints) + ", encoder has J=" +
                         std::to_string(state.joints));
  }
  Tensor h = state.coord_embed(coords);
  if (state.config.use_pe && state.pe_embed.weight.defined()) {
    if (graph.pe_dim != state.config.pe_dim) {
      throw DimensionError("embed_nodes: graph PE has K=" + std::to_string(graph.pe_dim) +
                           ", encoder expects K=" + std::to_string(state.config.pe_dim));
    }
    h = ops::add(h, state.pe_embed(graph.pe_tensor()));
  }
  return h;
}

Tensor fr_layer(const Tensor& h, std::size_t layer, EncoderState& state, Mode mode,
                Tensor* attention) {
  state.config.validate();
  if (layer >= state.layers.size()) throw ContractViolation("fr_layer: no such layer");
  if (h.rank() != 4 || h.dim(3) != state.config.d) {
    throw DimensionError("fr_layer: expected [B, f, J, d=" + std::to_string(state.config.d) +
                         "], got " + numerics::shape_str(h.shape()));
  }
  SgtLayer& L = state.layers[layer];
  const std::size_t graphs = h.dim(0) * h.dim(1);
  const std::size_t J = h.dim(2);
  const std::size_t H = state.config.heads;
  const std::size_t dk = state.config.head_dim;
  const bool training = mode == Mode::train;

  // [B, f, J, H*dk] -> [B*f*H, J, dk]
  auto split_heads = [&](const Tensor& t) {
    return ops::reshape(ops::permute(ops::reshape(t, {graphs, J, H, dk}), {0, 2, 1, 3}),
                        {graphs * H, J, dk});
  };
  Tensor q = split_heads(ops::linear(h, L.query));
  Tensor k = split_heads(ops::linear(h, L.key));
  Tensor v = split_heads(ops::linear(h, L.value));

  Tensor logits = ops::scale(ops::bmm(q, k, true), 1.0 / std::sqrt(static_cast<double>(dk)));
  Tensor weights = ops::softmax_last(logits);
  if (attention) *attention = weights;
  Tensor heads_out = ops::bmm(weights, v);
  Tensor concat = ops::reshape(
      ops::permute(ops::reshape(heads_out, {graphs, H, J, dk}), {0, 2, 1, 3}), h.shape());
  Tensor relational = ops::linear(concat, L.output);

  Tensor mid = L.norm_attention(ops::add(h, relational), training);
  Tensor ffn = ops::linear(ops::relu(ops::linear(mid, L.ffn_in)), L.ffn_out);
  return L.norm_ffn(ops::add(mid, ffn), training);
}

GraphRepresentations encode(const Tensor& coords, const graphpe::SkeletonGraphSpec& graph,
                            EncoderState& state, Mode mode) {
  GraphRepresentations reps;
  if (state.kind == EncoderKind::linear) {
    if (coords.rank() != 4 || coords.dim(1) != state.frames || coords.dim(2) != state.joints) {
      throw DimensionError("linear encoder expects [B, " + std::to_string(state.frames) + ", " +
                           std::to_string(state.joints) + ", 3], got " +
                           numerics::shape_str(coords.shape()));
    }
    Tensor flat = ops::reshape(coords, {coords.dim(0), state.frames * state.joints * 3});
    reps.sequence_reps = state.linear_encoder(flat);
    return reps;
  }
  Tensor h = embed_nodes(coords, graph, state);
  for (std::size_t l = 0; l < state.layers.size(); ++l) h = fr_layer(h, l, state, mode);
  reps.node_reps = h;
  reps.skeleton_reps = ops::mean_axis(h, 2);
  reps.sequence_reps = ops::mean_axis(reps.skeleton_reps, 1);
  return reps;
}

GraphRepresentations encode(const skeledata::Batch& batch,
                            const graphpe::SkeletonGraphSpec& graph, EncoderState& state,
                            Mode mode) {
  return encode(batch_tensor(batch), graph, state, mode);
}

}  // namespace transg::sgt
