#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "transg/graphpe.hpp"
#include "transg/numerics/layers.hpp"
#include "transg/numerics/rng.hpp"
#include "transg/sampler.hpp"

namespace transg::sgt {

using numerics::NamedTensor;
using numerics::Tensor;

struct SgtConfig {
  std::size_t d = 128;        // node embedding width
  std::size_t heads = 8;      // full-relation heads per layer
  std::size_t head_dim = 16;  // d_k
  std::size_t layers = 2;
  std::size_t pe_dim = 8;     // K
  bool use_pe = true;

  // Throws ConfigError unless every size is positive and d == heads * head_dim.
  void validate() const;
};

struct SgtLayer {
  // Head k owns rows [k*d_k, (k+1)*d_k) of query/key/value, i.e. each head's
  // d_k x d projection is stacked into one [H*d_k, d] matrix.
  Tensor query;
  Tensor key;
  Tensor value;
  Tensor output;   // O, d x d
  Tensor ffn_in;   // W_1, 2d x d
  Tensor ffn_out;  // W_2, d x 2d
  numerics::BatchNorm norm_attention;
  numerics::BatchNorm norm_ffn;
};

// Which network produces sequence representations. `linear` is the flat
// single-layer encoder used by the prototype-contrastive ablation.
enum class EncoderKind { sgt, linear };

struct NamedBuffer {
  std::string name;
  std::vector<double>* values;
};

// All learnable state: the encoder plus the objective heads, kept together
// so one checkpoint captures everything.
struct EncoderState {
  SgtConfig config;
  EncoderKind kind = EncoderKind::sgt;
  std::size_t joints = 0;
  std::size_t frames = 0;
  std::size_t num_classes = 0;

  numerics::Linear coord_embed;  // W_v, b_v
  numerics::Linear pe_embed;     // W_p, b_p
  std::vector<SgtLayer> layers;

  numerics::Linear proj_skeleton;   // F_1
  numerics::Linear proj_prototype;  // F_2
  numerics::Mlp recon_structure;    // f_s: d -> 2d -> J*3
  numerics::Mlp recon_trajectory;   // f_t: d -> 2d -> f*3
  numerics::Linear classifier;      // d -> C, only when num_classes > 0
  numerics::Linear linear_encoder;  // f*J*3 -> d, only for EncoderKind::linear

  // Weights uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero, norm
  // affine ones/zeros. Draw order is fixed, so the seed fixes the state.
  static EncoderState create(const SgtConfig& config, std::size_t joints, std::size_t frames,
                             std::size_t num_classes, EncoderKind kind,
                             numerics::SeededRng& rng);

  std::vector<NamedTensor> parameters() const;
  std::vector<NamedBuffer> buffers();
  std::size_t parameter_count() const;
};

struct GraphRepresentations {
  Tensor node_reps;      // B x f x J x d (undefined for the linear encoder)
  Tensor skeleton_reps;  // B x f x d (undefined for the linear encoder)
  Tensor sequence_reps;  // B x d
};

enum class Mode { train, infer };

// B x f x J x 3 constant tensor of a batch's coordinates.
Tensor batch_tensor(const skeledata::Batch& batch);

// h_i = (W_v v_i + b_v) + (W_p lambda_i + b_p); PE term omitted when disabled.
Tensor embed_nodes(const Tensor& coords, const graphpe::SkeletonGraphSpec& graph,
                   const EncoderState& state);

// One SGT layer over h [B, f, J, d]: multi-head full-relation attention among
// the J nodes of each frame, output map O, then the two residual
// batch-normalized stages. When `attention` is non-null it receives the
// softmax weights as [B*f*H, J, J].
Tensor fr_layer(const Tensor& h, std::size_t layer, EncoderState& state, Mode mode,
                Tensor* attention = nullptr);

GraphRepresentations encode(const Tensor& coords, const graphpe::SkeletonGraphSpec& graph,
                            EncoderState& state, Mode mode);
GraphRepresentations encode(const skeledata::Batch& batch,
                            const graphpe::SkeletonGraphSpec& graph, EncoderState& state,
                            Mode mode);

}  // namespace transg::sgt
