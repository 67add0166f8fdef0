#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mean/parameter.hpp"
#include "mean/tensor.hpp"

namespace mean {

/// Splits a UTF-8 string into code-point substrings. Invalid bytes become single-byte units.
std::vector<std::string> utf8_chars(std::string_view text);

/// Dense character index. Index 0 is reserved for unknown characters.
class CharVocab {
 public:
  static constexpr std::size_t kUnknown = 0;
  static constexpr std::string_view kUnknownSymbol = "<unk>";

  CharVocab();
  /// Characters in the given order; duplicates are ignored.
  explicit CharVocab(std::span<const std::string> chars);

  /// One character per line, UTF-8. Blank lines are ignored.
  static CharVocab load(const std::filesystem::path& path);
  /// Sorted set of every character occurring in `words`.
  static CharVocab from_words(std::span<const std::string> words);
  /// Printable ASCII.
  static CharVocab ascii();

  std::size_t size() const { return symbols_.size(); }
  std::size_t index(std::string_view ch) const;
  std::vector<std::size_t> encode(std::string_view word) const;
  /// Symbols in index order, starting with the unknown symbol.
  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Frozen pretrained word vectors of a single width.
class WordVectorStore {
 public:
  explicit WordVectorStore(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool contains(std::string_view word) const;
  /// Vector for `word`, or an empty span when out of vocabulary.
  std::span<const double> lookup(std::string_view word) const;
  /// Inserts unless the word is present already (first occurrence wins). Returns true if inserted.
  bool insert(std::string word, std::vector<double> vector);
  /// Words in insertion order.
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::size_t dim_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Reads `token v1 ... v_d` lines (no header). Throws IoError / ParseError.
WordVectorStore load_word_vectors(const std::filesystem::path& path);

struct ConvBranch {
  std::size_t window = 0;
  Tensor weight;  // c_out × (c_mid·window)
  Tensor bias;    // c_out × 1
};

/// Fully convolutional character encoder: 1×1 projection of one-hot characters followed by
/// one valid convolution per window size.
struct CharCnnParams {
  Tensor proj;  // c_mid × |vocab|
  std::vector<ConvBranch> branches;

  std::size_t output_dim() const;
  void append_parameters(ParameterList& out) const;

  /// Zero-initialised parameters; `d_char` is split evenly across `windows`.
  static CharCnnParams zeros(std::size_t vocab_size, std::size_t c_mid, std::size_t d_char,
                             std::span<const std::size_t> windows);
};

/// Character-level embedding (d_char × 1) of one word given as vocabulary indices.
///
/// one-hot → 1×1 conv → tanh → per window: right zero-pad to the window width,
/// valid conv + bias → tanh → mean over positions; branch outputs are stacked.
Tensor char_cnn_embed(std::span<const std::size_t> char_ids, const CharCnnParams& params);
Tensor char_cnn_embed(std::string_view word, const CharVocab& vocab, const CharCnnParams& params);

/// d × n matrix with one unit-norm column per token.
struct CoupledEmbedding {
  Tensor matrix;

  std::size_t dim() const { return matrix.rows(); }
  std::size_t size() const { return matrix.cols(); }
};

struct EmbeddingContext {
  const WordVectorStore* vectors = nullptr;
  const CharVocab* vocab = nullptr;
  const CharCnnParams* char_cnn = nullptr;  // null disables the character branch
};

/// Column i = normalize([char_cnn_embed(tokens[i]); word_vector(tokens[i])]).
/// Out-of-vocabulary words get a zero word-level part.
CoupledEmbedding embed_tokens(std::span<const std::string> tokens, const EmbeddingContext& ctx);

}  // namespace mean
