#include "mean/model.hpp"

#include <algorithm>
#include <stdexcept>

#include "mean/init.hpp"
#include "mean/ops.hpp"

namespace mean {

std::size_t input_dim(const TrainConfig& config) {
  return config.d_word + (config.use_char_cnn ? config.d_char : 0);
}

ParameterList ModelParams::parameters() const {
  ParameterList out;
  if (char_cnn.proj.defined()) char_cnn.append_parameters(out);
  encoder.append_parameters(out);
  classifier.append_parameters(out);
  return out;
}

ModelParams ModelParams::clone() const {
  ModelParams copy = *this;
  auto fresh = [](Tensor& t) {
    if (t.defined()) t = t.detach(true);
  };
  fresh(copy.char_cnn.proj);
  for (auto& b : copy.char_cnn.branches) {
    fresh(b.weight);
    fresh(b.bias);
  }
  for (auto& g : copy.encoder.gru) {
    for (Tensor* t : {&g.w_z, &g.w_r, &g.w_h, &g.u_z, &g.u_r, &g.u_h, &g.b_z, &g.b_r, &g.b_h}) fresh(*t);
  }
  for (auto& a : copy.encoder.attention) {
    fresh(a.w);
    fresh(a.u);
  }
  fresh(copy.classifier.w);
  fresh(copy.classifier.b);
  return copy;
}

ModelParams ModelParams::zeros(const TrainConfig& config, std::size_t char_vocab_size) {
  config.validate();
  ModelParams p;
  if (config.use_char_cnn) {
    p.char_cnn = CharCnnParams::zeros(char_vocab_size, config.char_channels, config.d_char, config.kernel_sizes);
  }
  const std::size_t d = input_dim(config);
  for (auto& g : p.encoder.gru) g = GruParams::zeros(d, config.h_dim);
  for (auto& a : p.encoder.attention) a = AttentionParams::zeros(config.h_dim, config.a_dim);
  p.classifier = ClassifierParams::zeros(config.num_classes, kNumPaths * config.h_dim);
  return p;
}

ModelParams ModelParams::initialize(const TrainConfig& config, std::size_t char_vocab_size, Rng& rng) {
  ModelParams p = zeros(config, char_vocab_size);
  for (auto& param : p.parameters()) {
    if (param.regularized) fill_orthogonal(param.value, rng);
  }
  return p;
}

Model::Model(TrainConfig config, ModelParams params, CharVocab vocab, ResourceBundle bundle,
             std::shared_ptr<const WordVectorStore> vectors)
    : config_(std::move(config)),
      params_(std::move(params)),
      vocab_(std::move(vocab)),
      bundle_(std::move(bundle)),
      vectors_(std::move(vectors)) {
  if (!vectors_) throw std::invalid_argument("Model: no word vectors");
  if (vectors_->dim() != config_.d_word) {
    throw DimensionError("Model: word vectors have width " + std::to_string(vectors_->dim()) +
                         " but d_word is " + std::to_string(config_.d_word));
  }
  if (params_.classifier.num_classes() != config_.num_classes) {
    throw DimensionError("Model: classifier has " + std::to_string(params_.classifier.num_classes()) +
                         " classes, config says " + std::to_string(config_.num_classes));
  }
}

CoupledEmbedding Model::embed(std::span<const std::string> tokens) const {
  EmbeddingContext ctx{vectors_.get(), &vocab_, config_.use_char_cnn ? &params_.char_cnn : nullptr};
  return embed_tokens(tokens, ctx);
}

Prediction Model::forward(std::span<const std::string> tokens, Mode mode, Rng* rng) const {
  const bool dropout = mode == Mode::Train && config_.dropout_rate > 0.0;
  if (dropout && !rng) throw std::invalid_argument("Model::forward: train mode needs an rng");
  Prediction out;
  out.annotation = annotate(tokens, bundle_);
  const Tensor context = embed(tokens).matrix;
  auto resource = [&](Path p) { return gather_cols(context, out.annotation.positions_of(p)); };

  EncoderOptions options;
  options.mode = mode;
  options.dropout_rate = config_.dropout_rate;
  options.rng = rng;
  options.path_enabled = config_.path_enabled;
  out.rep = sentence_representation(context, resource(Path::Sentiment), resource(Path::Intensity),
                                    resource(Path::Negation), params_.encoder, options);

  Tensor combined = out.rep.combined;
  if (dropout) combined = apply_dropout(combined, config_.dropout_rate, *rng, mode);
  out.probabilities = predict(combined, params_.classifier);
  const auto probs = out.probabilities.values();
  out.label = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  return out;
}

}  // namespace mean
