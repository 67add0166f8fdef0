#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mean/attention.hpp"
#include "mean/classifier.hpp"
#include "mean/config.hpp"
#include "mean/embeddings.hpp"
#include "mean/random.hpp"
#include "mean/resources.hpp"

namespace mean {

/// Every learnable tensor of the network.
struct ModelParams {
  CharCnnParams char_cnn;  // no branches when the character encoder is disabled
  EncoderParams encoder;
  ClassifierParams classifier;

  /// Stable order; names are unique and used as checkpoint keys.
  ParameterList parameters() const;
  /// Deep copy with fresh leaves.
  ModelParams clone() const;

  static ModelParams zeros(const TrainConfig& config, std::size_t char_vocab_size);
  /// Orthogonal weight matrices and zero biases.
  static ModelParams initialize(const TrainConfig& config, std::size_t char_vocab_size, Rng& rng);
};

/// Embedding width seen by the encoders.
std::size_t input_dim(const TrainConfig& config);

struct Prediction {
  ResourceAnnotation annotation;
  SentenceRep rep;
  Tensor probabilities;  // C × 1
  std::size_t label = 0;
};

/// A configured network together with the frozen resources it reads.
class Model {
 public:
  Model(TrainConfig config, ModelParams params, CharVocab vocab, ResourceBundle bundle,
        std::shared_ptr<const WordVectorStore> vectors);

  const TrainConfig& config() const { return config_; }
  const ModelParams& params() const { return params_; }
  ModelParams& params() { return params_; }
  const CharVocab& vocab() const { return vocab_; }
  const ResourceBundle& bundle() const { return bundle_; }
  const WordVectorStore& vectors() const { return *vectors_; }
  std::shared_ptr<const WordVectorStore> vectors_ptr() const { return vectors_; }

  CoupledEmbedding embed(std::span<const std::string> tokens) const;

  /// Full forward pass. Train mode applies dropout (GRU inputs and the sentence vector) and
  /// needs `rng`.
  Prediction forward(std::span<const std::string> tokens, Mode mode = Mode::Eval,
                     Rng* rng = nullptr) const;

 private:
  TrainConfig config_;
  ModelParams params_;
  CharVocab vocab_;
  ResourceBundle bundle_;
  std::shared_ptr<const WordVectorStore> vectors_;
};

}  // namespace mean
