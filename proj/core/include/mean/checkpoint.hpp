#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "mean/config.hpp"
#include "mean/embeddings.hpp"
#include "mean/model.hpp"
#include "mean/resources.hpp"

namespace mean {

inline constexpr std::string_view kCheckpointMagic = "MEANCKPT";
inline constexpr int kCheckpointVersion = 1;

/// Everything needed to resume or serve a model except the (frozen, external) word vectors,
/// which are referenced through `config.vectors_path`.
struct Checkpoint {
  TrainConfig config;
  ModelParams params;
  CharVocab vocab;
  ResourceBundle bundle;
  std::size_t epoch = 0;
  double validation_accuracy = 0.0;
  std::string rng_state;
};

/// Layout:
///   MEANCKPT\n version 1\n
///   config <n>\n <config text>
///   meta <n>\n <epoch / validation_accuracy / rng_state lines>
///   charvocab <n>\n <one symbol per line>
///   lexicon.<kind> <n>\n <sorted words, one per line>     (sentiment, negation, intensity)
///   manifest <count>\n <name rows cols offset>...
///   data <n>\n <little-endian float64 blocks>
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes);

/// Writes to a sibling temporary file and renames it into place.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

Checkpoint make_checkpoint(const Model& model, std::size_t epoch, double validation_accuracy,
                           std::string rng_state);
Model make_model(const Checkpoint& checkpoint, std::shared_ptr<const WordVectorStore> vectors);

/// Writes `contents` to `path` through a temporary file and an atomic rename.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

}  // namespace mean
