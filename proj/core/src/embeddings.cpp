#include "mean/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "mean/errors.hpp"
#include "mean/ops.hpp"

namespace mean {

namespace {

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

}  // namespace

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = utf8_length(static_cast<unsigned char>(text[i]));
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

CharVocab::CharVocab() {
  symbols_.emplace_back(kUnknownSymbol);
  index_.emplace(std::string(kUnknownSymbol), kUnknown);
}

CharVocab::CharVocab(std::span<const std::string> chars) : CharVocab() {
  for (const auto& ch : chars) {
    if (ch.empty() || index_.count(ch)) continue;
    index_.emplace(ch, symbols_.size());
    symbols_.push_back(ch);
  }
}

CharVocab CharVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open character vocabulary " + path.string());
  std::vector<std::string> chars;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto ch = trim(line);
    if (ch.empty()) continue;
    if (utf8_chars(ch).size() != 1 && ch != kUnknownSymbol) {
      throw ParseError("expected one character per line in " + path.string(), lineno);
    }
    if (ch == kUnknownSymbol) continue;
    chars.emplace_back(ch);
  }
  return CharVocab(chars);
}

CharVocab CharVocab::from_words(std::span<const std::string> words) {
  std::set<std::string> seen;
  for (const auto& w : words)
    for (auto& ch : utf8_chars(w)) seen.insert(std::move(ch));
  std::vector<std::string> chars(seen.begin(), seen.end());
  return CharVocab(chars);
}

CharVocab CharVocab::ascii() {
  std::vector<std::string> chars;
  for (char c = 33; c < 127; ++c) chars.emplace_back(1, c);
  return CharVocab(chars);
}

std::size_t CharVocab::index(std::string_view ch) const {
  auto it = index_.find(std::string(ch));
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<std::size_t> CharVocab::encode(std::string_view word) const {
  std::vector<std::size_t> ids;
  for (const auto& ch : utf8_chars(word)) ids.push_back(index(ch));
  return ids;
}

bool WordVectorStore::contains(std::string_view word) const {
  return vectors_.count(std::string(word)) != 0;
}

std::span<const double> WordVectorStore::lookup(std::string_view word) const {
  auto it = vectors_.find(std::string(word));
  if (it == vectors_.end()) return {};
  return it->second;
}

bool WordVectorStore::insert(std::string word, std::vector<double> vector) {
  if (dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_) {
    throw DimensionError("word vector for '" + word + "' has width " +
                         std::to_string(vector.size()) + ", store width is " + std::to_string(dim_));
  }
  if (vectors_.count(word)) return false;
  words_.push_back(word);
  vectors_.emplace(std::move(word), std::move(vector));
  return true;
}

WordVectorStore load_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word vectors " + path.string());
  WordVectorStore store;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;
    auto space = rest.find_first_of(" \t");
    if (space == std::string_view::npos) {
      throw ParseError("word vector line has no values", lineno);
    }
    std::string token(rest.substr(0, space));
    rest.remove_prefix(space);
    values.clear();
    while (true) {
      while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
      if (rest.empty()) break;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
      if (ec != std::errc()) throw ParseError("invalid number in word vector for '" + token + "'", lineno);
      rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
      values.push_back(v);
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw ParseError("inconsistent vector width " + std::to_string(values.size()) + ", expected " +
                           std::to_string(width),
                       lineno);
    }
    store.insert(std::move(token), values);
  }
  if (store.size() == 0) throw ParseError("no word vectors in " + path.string());
  return store;
}

std::size_t CharCnnParams::output_dim() const {
  std::size_t d = 0;
  for (const auto& b : branches) d += b.weight.rows();
  return d;
}

void CharCnnParams::append_parameters(ParameterList& out) const {
  out.push_back({"char_cnn.proj", proj, true});
  for (const auto& b : branches) {
    const auto prefix = "char_cnn.conv" + std::to_string(b.window);
    out.push_back({prefix + ".weight", b.weight, true});
    out.push_back({prefix + ".bias", b.bias, false});
  }
}

CharCnnParams CharCnnParams::zeros(std::size_t vocab_size, std::size_t c_mid, std::size_t d_char,
                                   std::span<const std::size_t> windows) {
  if (windows.empty()) throw DimensionError("char CNN needs at least one window size");
  if (d_char % windows.size() != 0) {
    throw DimensionError("d_char " + std::to_string(d_char) + " does not split evenly over " +
                         std::to_string(windows.size()) + " window sizes");
  }
  CharCnnParams p;
  p.proj = Tensor::zeros({c_mid, vocab_size}, true);
  const std::size_t c_out = d_char / windows.size();
  for (auto w : windows) {
    p.branches.push_back({w, Tensor::zeros({c_out, c_mid * w}, true), Tensor::zeros({c_out, 1}, true)});
  }
  return p;
}

Tensor char_cnn_embed(std::span<const std::size_t> char_ids, const CharCnnParams& params) {
  if (char_ids.empty()) throw std::invalid_argument("char_cnn_embed: empty word");
  Tensor hidden = tanh(gather_cols(params.proj, char_ids));
  std::vector<Tensor> pooled;
  pooled.reserve(params.branches.size());
  for (const auto& branch : params.branches) {
    Tensor padded = pad_cols(hidden, branch.window);
    Tensor conv = add_col_broadcast(matmul(branch.weight, unfold_cols(padded, branch.window)), branch.bias);
    pooled.push_back(mean_axis(tanh(conv), Axis::Cols));
  }
  return concat(pooled, Axis::Rows);
}

Tensor char_cnn_embed(std::string_view word, const CharVocab& vocab, const CharCnnParams& params) {
  if (word.empty()) throw std::invalid_argument("char_cnn_embed: empty word");
  const auto ids = vocab.encode(word);
  return char_cnn_embed(ids, params);
}

CoupledEmbedding embed_tokens(std::span<const std::string> tokens, const EmbeddingContext& ctx) {
  if (tokens.empty()) throw std::invalid_argument("embed_tokens: empty token list");
  if (!ctx.vectors) throw std::invalid_argument("embed_tokens: no word vector store");
  const bool use_chars = ctx.char_cnn != nullptr;
  if (use_chars && !ctx.vocab) throw std::invalid_argument("embed_tokens: char CNN without vocabulary");

  // Each distinct token is embedded once; repeats gather the same column.
  std::unordered_map<std::string_view, std::size_t> slot_of;
  std::vector<std::size_t> slots;
  std::vector<Tensor> columns;
  slots.reserve(tokens.size());
  const std::size_t d_word = ctx.vectors->dim();
  for (const auto& token : tokens) {
    auto [it, inserted] = slot_of.emplace(token, columns.size());
    slots.push_back(it->second);
    if (!inserted) continue;
    std::vector<double> wv(d_word, 0.0);
    if (auto v = ctx.vectors->lookup(token); !v.empty()) std::copy(v.begin(), v.end(), wv.begin());
    Tensor word_part = Tensor::column(std::move(wv));
    if (use_chars) {
      const Tensor parts[] = {char_cnn_embed(token, *ctx.vocab, *ctx.char_cnn), word_part};
      columns.push_back(concat(parts, Axis::Rows));
    } else {
      columns.push_back(word_part);
    }
  }
  Tensor unique = l2_normalize_cols(concat(columns, Axis::Cols));
  if (columns.size() == tokens.size()) return {unique};
  return {gather_cols(unique, slots)};
}

}  // namespace mean
