#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace mean {

enum class ResourceKind { Sentiment, Negation, Intensity };

std::string_view to_string(ResourceKind kind);

/// Attention paths in output order: o1 (sentiment), o2 (intensity), o3 (negation).
enum class Path : std::size_t { Sentiment = 0, Intensity = 1, Negation = 2 };
inline constexpr std::array<Path, 3> kPaths = {Path::Sentiment, Path::Intensity, Path::Negation};
inline constexpr std::size_t kNumPaths = 3;
std::string_view to_string(Path path);
ResourceKind kind_of(Path path);

/// ASCII lowercase; non-ASCII bytes are left untouched.
std::string lowercase(std::string_view s);

class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(ResourceKind kind, std::unordered_set<std::string> words);

  ResourceKind kind() const { return kind_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  /// Case-insensitive whole-token membership.
  bool contains(std::string_view word) const;
  void erase(const std::string& word) { words_.erase(word); }
  /// Sorted copy of the word set.
  std::vector<std::string> sorted_words() const;

 private:
  ResourceKind kind_ = ResourceKind::Sentiment;
  std::unordered_set<std::string> words_;
};

/// One word per line, `#` starts a comment line. Words are lowercased and deduplicated.
/// Throws IoError for a missing file and ParseError when no words remain.
Lexicon load_lexicon(const std::filesystem::path& path, ResourceKind kind);

/// The three lexicons with cross-kind conflicts removed
/// (priority negation > intensity > sentiment).
class ResourceBundle {
 public:
  ResourceBundle() = default;
  ResourceBundle(Lexicon sentiment, Lexicon negation, Lexicon intensity);

  const Lexicon& sentiment() const { return sentiment_; }
  const Lexicon& negation() const { return negation_; }
  const Lexicon& intensity() const { return intensity_; }
  const Lexicon& lexicon(ResourceKind kind) const;

 private:
  Lexicon sentiment_{ResourceKind::Sentiment, {}};
  Lexicon negation_{ResourceKind::Negation, {}};
  Lexicon intensity_{ResourceKind::Intensity, {}};
};

/// A sentence split into its context tokens and per-path resource tokens.
struct ResourceAnnotation {
  std::vector<std::string> context_tokens;
  /// Positions into context_tokens, in sentence order, indexed by Path.
  std::array<std::vector<std::size_t>, kNumPaths> positions;
  /// True for a path whose list was filled with every token because nothing matched.
  std::array<bool, kNumPaths> path_fallback{false, false, false};
  /// True iff no token matched any lexicon.
  bool fallback_used = false;

  std::vector<std::string> tokens(Path path) const;
  const std::vector<std::size_t>& positions_of(Path path) const {
    return positions[static_cast<std::size_t>(path)];
  }
};

ResourceAnnotation annotate(std::span<const std::string> tokens, const ResourceBundle& bundle);

}  // namespace mean
