#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mean/config.hpp"
#include "mean/data.hpp"
#include "mean/embeddings.hpp"
#include "mean/model.hpp"
#include "mean/resources.hpp"

namespace mean {

/// Seeded random word vectors (entries uniform in [-1,1]) for the given words.
std::shared_ptr<WordVectorStore> random_word_vectors(const std::vector<std::string>& words, std::size_t dim,
                                                     std::uint64_t seed);

/// A tiny, fully specified model plus one four-token sentence that hits every path
/// ("not very good film"), used for gradient audits.
struct AuditSetup {
  TrainConfig config;
  std::shared_ptr<WordVectorStore> vectors;
  ResourceBundle bundle;
  CharVocab vocab;
  Example example;
};

AuditSetup make_audit_setup(std::uint64_t seed);

}  // namespace mean
