#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "mean/dropout.hpp"
#include "mean/parameter.hpp"
#include "mean/resources.hpp"
#include "mean/tensor.hpp"

namespace mean {

/// Word-level correlations between the context columns and each resource's columns.
struct CorrelationSet {
  Tensor sentiment;  // t × m
  Tensor intensity;  // t × k
  Tensor negation;   // t × p
};

/// M_r = W_cᵀ · W_r for each resource r. All inputs must share the row count d.
CorrelationSet correlations(const Tensor& context, const Tensor& sentiment, const Tensor& intensity,
                            const Tensor& negation);

struct CrossRepresentations {
  Tensor sentiment;  // X_s = W_c·M_s, d × m
  Tensor intensity;  // X_i = W_c·M_i, d × k
  Tensor negation;   // X_n = W_c·M_n, d × p
  Tensor context;    // X_c = W_s·M_sᵀ + W_i·M_iᵀ + W_n·M_nᵀ, d × t
};

CrossRepresentations cross_representations(const Tensor& context, const Tensor& sentiment,
                                           const Tensor& intensity, const Tensor& negation,
                                           const CorrelationSet& m);

/// One GRU encoder. Gate weights are h×d (input) and h×h (recurrent); biases h×1.
struct GruParams {
  Tensor w_z, w_r, w_h;
  Tensor u_z, u_r, u_h;
  Tensor b_z, b_r, b_h;

  std::size_t hidden_dim() const { return u_z.rows(); }
  std::size_t input_dim() const { return w_z.cols(); }
  void append_parameters(ParameterList& out, const std::string& prefix) const;
  static GruParams zeros(std::size_t input_dim, std::size_t hidden_dim);
};

/// Left-to-right GRU from a zero initial state; column j of the result is h_{j+1}.
///
///   z = σ(W_z x + U_z h + b_z)
///   r = σ(W_r x + U_r h + b_r)
///   h̃ = tanh(W_h x + U_h (r ⊙ h) + b_h)
///   h' = (1 − z) ⊙ h + z ⊙ h̃
Tensor gru_encode(const Tensor& inputs, const GruParams& params);

/// Scoring parameters of one attention path: score = uᵀ tanh(W [h_c; q]).
struct AttentionParams {
  Tensor w;  // a × 2h
  Tensor u;  // a × 1

  void append_parameters(ParameterList& out, const std::string& prefix) const;
  static AttentionParams zeros(std::size_t hidden_dim, std::size_t att_dim);
};

struct Attended {
  Tensor output;  // h × 1, Σ alpha_i h_c_i
  Tensor alpha;   // 1 × t
  Tensor scores;  // 1 × t, before softmax
  Tensor query;   // h × 1, mean of the resource hidden states
};

/// Pools the context hidden states with weights from the resource path's mean query.
Attended attend(const Tensor& context_hidden, const Tensor& resource_hidden,
                const AttentionParams& params);

/// Encoder and attention weights. GRU order: context, sentiment, intensity, negation.
struct EncoderParams {
  std::array<GruParams, 4> gru;
  std::array<AttentionParams, kNumPaths> attention;

  const GruParams& context_gru() const { return gru[0]; }
  const GruParams& resource_gru(Path p) const { return gru[1 + static_cast<std::size_t>(p)]; }
  const AttentionParams& path_attention(Path p) const {
    return attention[static_cast<std::size_t>(p)];
  }
  void append_parameters(ParameterList& out) const;
};

std::string_view gru_name(std::size_t index);

struct SentenceRep {
  std::array<Tensor, kNumPaths> outputs;  // o1, o2, o3 (h × 1 each)
  Tensor combined;                        // [o1; o2; o3], 3h × 1
  std::array<Tensor, kNumPaths> alpha;    // undefined for disabled paths
  CrossRepresentations cross;
  CorrelationSet correlation;

  const Tensor& output(Path p) const { return outputs[static_cast<std::size_t>(p)]; }
};

struct EncoderOptions {
  Mode mode = Mode::Eval;
  double dropout_rate = 0.0;  // applied to the GRU inputs in train mode
  Rng* rng = nullptr;
  /// A disabled path contributes a zero vector in place of its output.
  std::array<bool, kNumPaths> path_enabled{true, true, true};
};

/// correlations → cross representations → four GRUs → three attentions → concatenation.
SentenceRep sentence_representation(const Tensor& context, const Tensor& sentiment,
                                    const Tensor& intensity, const Tensor& negation,
                                    const EncoderParams& params, const EncoderOptions& options = {});

}  // namespace mean
