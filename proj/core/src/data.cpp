#include "mean/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "mean/errors.hpp"
#include "mean/random.hpp"
#include "mean/resources.hpp"

namespace mean {

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "mr" || name == "mr_polarity") return DatasetFormat::MrPolarity;
  if (name == "sst" || name == "sst_trees") return DatasetFormat::SstTrees;
  if (name == "tsv" || name == "tsv_generic") return DatasetFormat::TsvGeneric;
  throw ConfigError("unknown dataset format '" + std::string(name) + "' (expected mr, sst or tsv)");
}

std::vector<std::string> tokenize(std::string_view text) {
  static constexpr std::string_view kSplitChars = ".,!?;:()\"'";
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      flush();
    } else if (kSplitChars.find(c) != std::string_view::npos) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
  }
  flush();
  return tokens;
}

namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    i += len;
  }
  return true;
}

std::vector<std::string> read_lines(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + " " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

void read_polarity_file(const std::filesystem::path& path, std::size_t label, ParsedCorpus& out) {
  const auto lines = read_lines(path, "sentence file");
  std::size_t kept = 0;
  for (const auto& raw : lines) {
    std::string text = to_utf8(raw);
    auto tokens = tokenize(text);
    if (tokens.empty()) {
      ++out.skipped_lines;
      continue;
    }
    out.examples.push_back({std::move(tokens), label, std::move(text)});
    ++kept;
  }
  if (kept == 0) throw ParseError("no sentences in " + path.string());
}

struct TreeNode {
  std::size_t label = 0;
  std::vector<std::string> tokens;  // leaves spanned by this node
  std::vector<TreeNode> children;
};

class TreeReader {
 public:
  TreeReader(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  TreeNode read_tree() {
    TreeNode root = read_node();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters after tree");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("malformed tree: " + msg + " at column " + std::to_string(pos_ + 1), line_);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  TreeNode read_node() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '('");
    ++pos_;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (pos_ == start) fail("expected a numeric label");
    TreeNode node;
    node.label = std::stoul(std::string(text_.substr(start, pos_ - start)));
    if (node.label > 4) fail("label outside 0-4");
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      while (true) {
        skip_space();
        if (pos_ >= text_.size()) fail("unbalanced parentheses");
        if (text_[pos_] == ')') break;
        node.children.push_back(read_node());
        const auto& child_tokens = node.children.back().tokens;
        node.tokens.insert(node.tokens.end(), child_tokens.begin(), child_tokens.end());
      }
    } else {
      const std::size_t word_start = pos_;
      while (pos_ < text_.size() && text_[pos_] != ')' && text_[pos_] != '(' && text_[pos_] != ' ') ++pos_;
      if (pos_ == word_start) fail("empty leaf");
      node.tokens.push_back(leaf_token(text_.substr(word_start, pos_ - word_start)));
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("unbalanced parentheses");
    }
    ++pos_;  // ')'
    return node;
  }

  static std::string leaf_token(std::string_view word) {
    std::string w = lowercase(word);
    if (w == "-lrb-") return "(";
    if (w == "-rrb-") return ")";
    return w;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

void collect_phrases(const TreeNode& node, std::set<std::pair<std::string, std::size_t>>& seen,
                     std::vector<Example>& out) {
  std::string text = join(node.tokens);
  if (seen.emplace(text, node.label).second) out.push_back({node.tokens, node.label, std::move(text)});
  for (const auto& child : node.children) collect_phrases(child, seen, out);
}

std::vector<std::vector<std::size_t>> indices_by_class(const std::vector<Example>& examples) {
  std::size_t num_classes = 0;
  for (const auto& e : examples) num_classes = std::max(num_classes, e.label + 1);
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < examples.size(); ++i) by_class[examples[i].label].push_back(i);
  return by_class;
}

std::size_t rounded_share(std::size_t n, double fraction) {
  return static_cast<std::size_t>(static_cast<double>(n) * fraction + 0.5);
}

}  // namespace

std::string to_utf8(std::string_view bytes) {
  if (valid_utf8(bytes)) return std::string(bytes);
  std::string out;
  out.reserve(bytes.size() * 2);
  for (char ch : bytes) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80) {
      out.push_back(ch);
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

ParsedCorpus parse_mr(const std::filesystem::path& pos_path, const std::filesystem::path& neg_path) {
  ParsedCorpus out;
  read_polarity_file(pos_path, 1, out);
  read_polarity_file(neg_path, 0, out);
  return out;
}

ParsedCorpus parse_sst_text(std::string_view text, SstMode mode) {
  ParsedCorpus out;
  std::set<std::pair<std::string, std::size_t>> seen;
  std::size_t lineno = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) {
      ++out.skipped_lines;
      continue;
    }
    TreeNode root = TreeReader(line, lineno).read_tree();
    if (mode == SstMode::SentencesOnly) {
      std::string raw = join(root.tokens);
      out.examples.push_back({std::move(root.tokens), root.label, std::move(raw)});
    } else {
      collect_phrases(root, seen, out.examples);
    }
  }
  return out;
}

ParsedCorpus parse_sst(const std::filesystem::path& path, SstMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open SST file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto out = parse_sst_text(buf.str(), mode);
  if (out.examples.empty()) throw ParseError("no trees in " + path.string());
  return out;
}

ParsedCorpus parse_tsv(const std::filesystem::path& path, std::size_t num_classes) {
  const auto lines = read_lines(path, "TSV file");
  ParsedCorpus out;
  std::size_t lineno = 0;
  for (const auto& raw : lines) {
    ++lineno;
    if (raw.empty()) {
      ++out.skipped_lines;
      continue;
    }
    auto tab = raw.find('\t');
    if (tab == std::string::npos) throw ParseError("expected label<TAB>text", lineno);
    std::size_t label = 0;
    try {
      std::size_t used = 0;
      label = std::stoul(raw.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument("label");
    } catch (const std::exception&) {
      throw ParseError("invalid label '" + raw.substr(0, tab) + "'", lineno);
    }
    if (label >= num_classes) {
      throw ParseError("label " + std::to_string(label) + " outside [0," + std::to_string(num_classes) + ")",
                       lineno);
    }
    std::string text = to_utf8(std::string_view(raw).substr(tab + 1));
    auto tokens = tokenize(text);
    if (tokens.empty()) {
      ++out.skipped_lines;
      continue;
    }
    out.examples.push_back({std::move(tokens), label, std::move(text)});
  }
  if (out.examples.empty()) throw ParseError("no examples in " + path.string());
  return out;
}

DataSplit split_mr(const std::vector<Example>& examples, std::uint64_t seed) {
  if (examples.empty()) throw std::invalid_argument("split_mr: no examples");
  auto by_class = indices_by_class(examples);
  Rng rng(seed);
  DataSplit split;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.size() < 10) {
      throw std::invalid_argument("split_mr: class " + std::to_string(c) + " has " + std::to_string(idx.size()) +
                                  " examples, need at least 10");
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n_val = rounded_share(idx.size(), 0.1);
    const std::size_t n_test = rounded_share(idx.size(), 0.1);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& dst = k < n_val ? split.validation : k < n_val + n_test ? split.test : split.train;
      dst.push_back(examples[idx[k]]);
    }
  }
  std::shuffle(split.train.begin(), split.train.end(), rng);
  std::shuffle(split.validation.begin(), split.validation.end(), rng);
  std::shuffle(split.test.begin(), split.test.end(), rng);
  return split;
}

std::pair<std::vector<Example>, std::vector<Example>> holdout_split(const std::vector<Example>& examples,
                                                                    double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("holdout fraction must lie in (0,1)");
  auto by_class = indices_by_class(examples);
  Rng rng(seed);
  std::vector<Example> kept, held;
  for (auto& idx : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n_held = rounded_share(idx.size(), fraction);
    for (std::size_t k = 0; k < idx.size(); ++k) (k < n_held ? held : kept).push_back(examples[idx[k]]);
  }
  if (kept.empty() || held.empty()) throw std::invalid_argument("holdout_split: too few examples");
  std::shuffle(kept.begin(), kept.end(), rng);
  std::shuffle(held.begin(), held.end(), rng);
  return {std::move(kept), std::move(held)};
}

}  // namespace mean
