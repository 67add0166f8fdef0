#include "mean/resources.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "mean/errors.hpp"

namespace mean {

std::string_view to_string(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::Sentiment: return "sentiment";
    case ResourceKind::Negation: return "negation";
    case ResourceKind::Intensity: return "intensity";
  }
  return "?";
}

std::string_view to_string(Path path) { return to_string(kind_of(path)); }

ResourceKind kind_of(Path path) {
  switch (path) {
    case Path::Sentiment: return ResourceKind::Sentiment;
    case Path::Intensity: return ResourceKind::Intensity;
    case Path::Negation: return ResourceKind::Negation;
  }
  return ResourceKind::Sentiment;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

Lexicon::Lexicon(ResourceKind kind, std::unordered_set<std::string> words)
    : kind_(kind), words_(std::move(words)) {}

bool Lexicon::contains(std::string_view word) const { return words_.count(lowercase(word)) != 0; }

std::vector<std::string> Lexicon::sorted_words() const {
  std::vector<std::string> out(words_.begin(), words_.end());
  std::sort(out.begin(), out.end());
  return out;
}

Lexicon load_lexicon(const std::filesystem::path& path, ResourceKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + std::string(to_string(kind)) + " lexicon " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t\r");
    words.insert(lowercase(std::string_view(line).substr(first, last - first + 1)));
  }
  if (words.empty()) {
    throw ParseError(std::string(to_string(kind)) + " lexicon " + path.string() + " has no words");
  }
  return Lexicon(kind, std::move(words));
}

ResourceBundle::ResourceBundle(Lexicon sentiment, Lexicon negation, Lexicon intensity)
    : sentiment_(std::move(sentiment)), negation_(std::move(negation)), intensity_(std::move(intensity)) {
  for (const auto& w : negation_.sorted_words()) {
    intensity_.erase(w);
    sentiment_.erase(w);
  }
  for (const auto& w : intensity_.sorted_words()) sentiment_.erase(w);
}

const Lexicon& ResourceBundle::lexicon(ResourceKind kind) const {
  switch (kind) {
    case ResourceKind::Sentiment: return sentiment_;
    case ResourceKind::Negation: return negation_;
    case ResourceKind::Intensity: return intensity_;
  }
  return sentiment_;
}

std::vector<std::string> ResourceAnnotation::tokens(Path path) const {
  std::vector<std::string> out;
  for (auto pos : positions_of(path)) out.push_back(context_tokens[pos]);
  return out;
}

ResourceAnnotation annotate(std::span<const std::string> tokens, const ResourceBundle& bundle) {
  if (tokens.empty()) throw std::invalid_argument("annotate: empty token list");
  ResourceAnnotation ann;
  ann.context_tokens.assign(tokens.begin(), tokens.end());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (auto path : kPaths) {
      if (bundle.lexicon(kind_of(path)).contains(tokens[i])) {
        ann.positions[static_cast<std::size_t>(path)].push_back(i);
      }
    }
  }
  const bool none = std::all_of(ann.positions.begin(), ann.positions.end(),
                                [](const auto& p) { return p.empty(); });
  ann.fallback_used = none;
  for (std::size_t p = 0; p < kNumPaths; ++p) {
    if (!ann.positions[p].empty()) continue;
    ann.positions[p].resize(tokens.size());
    std::iota(ann.positions[p].begin(), ann.positions[p].end(), std::size_t{0});
    ann.path_fallback[p] = true;
  }
  return ann;
}

}  // namespace mean
