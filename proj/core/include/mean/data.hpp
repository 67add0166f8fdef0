#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mean {

struct Example {
  std::vector<std::string> tokens;
  std::size_t label = 0;
  std::string raw_text;
};

enum class DatasetFormat { MrPolarity, SstTrees, TsvGeneric };

DatasetFormat parse_dataset_format(std::string_view name);

struct DatasetSpec {
  DatasetFormat format = DatasetFormat::MrPolarity;
  std::size_t num_classes = 2;
};

/// Standard SST split sizes.
inline constexpr std::size_t kSstTrainSize = 8545;
inline constexpr std::size_t kSstDevSize = 1101;
inline constexpr std::size_t kSstTestSize = 2210;
inline constexpr std::size_t kMrPerClass = 5331;

/// Lowercases, separates . , ! ? ; : ( ) " ' into their own tokens and splits on whitespace.
std::vector<std::string> tokenize(std::string_view text);

/// Valid UTF-8 is returned unchanged; anything else is decoded as Latin-1.
std::string to_utf8(std::string_view bytes);

struct ParsedCorpus {
  std::vector<Example> examples;
  /// Lines that produced no tokens.
  std::size_t skipped_lines = 0;
};

/// Two one-sentence-per-line files; positives get label 1, negatives 0.
/// Throws IoError for unreadable files and ParseError for a file with no sentences.
ParsedCorpus parse_mr(const std::filesystem::path& pos_path, const std::filesystem::path& neg_path);

enum class SstMode { SentencesOnly, PhrasesAndSentences };

/// One labelled parenthesised tree per line, e.g. "(3 (2 good) (4 movie))".
/// Phrase mode yields every labelled subtree in pre-order, deduplicated by (text, label).
/// Throws ParseError naming the line for malformed trees.
ParsedCorpus parse_sst(const std::filesystem::path& path, SstMode mode);
/// Same, over in-memory text.
ParsedCorpus parse_sst_text(std::string_view text, SstMode mode);

/// `label<TAB>text` lines.
ParsedCorpus parse_tsv(const std::filesystem::path& path, std::size_t num_classes);

struct DataSplit {
  std::vector<Example> train;
  std::vector<Example> validation;
  std::vector<Example> test;
};

/// Seeded, class-stratified 80/10/10 split. Each class needs ≥ 10 examples.
DataSplit split_mr(const std::vector<Example>& examples, std::uint64_t seed);

/// Seeded, class-stratified hold-out of `fraction` of `examples` (used for a validation set).
std::pair<std::vector<Example>, std::vector<Example>> holdout_split(const std::vector<Example>& examples,
                                                                    double fraction, std::uint64_t seed);

}  // namespace mean
