#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "mean/data.hpp"
#include "mean/errors.hpp"
#include "oracles.hpp"

using namespace mean;

namespace {

using Tokens = std::vector<std::string>;

std::vector<Example> labelled(std::size_t per_class, std::size_t classes) {
  std::vector<Example> out;
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      Example ex;
      ex.raw_text = "s" + std::to_string(c) + "_" + std::to_string(i);
      ex.tokens = {ex.raw_text};
      ex.label = c;
      out.push_back(ex);
    }
  return out;
}

std::string join(const Tokens& t) {
  std::string s;
  for (const auto& w : t) s += (s.empty() ? "" : " ") + w;
  return s;
}

}  // namespace

TEST(Tokenize, SeparatesPunctuationAndLowercases) {
  EXPECT_EQ(tokenize("good, not bad."), (Tokens{"good", ",", "not", "bad", "."}));
  EXPECT_EQ(tokenize("It's \"Great\"!(really)"),
            (Tokens{"it", "'", "s", "\"", "great", "\"", "!", "(", "really", ")"}));
  EXPECT_TRUE(tokenize("   \t ").empty());
}

TEST(Tokenize, IdempotentOnItsOwnOutput) {
  for (const char* s : {"good, not bad.", "A; b: c? (d)", "it's \"so\" dull!!"}) {
    auto once = tokenize(s);
    EXPECT_EQ(tokenize(join(once)), once) << s;
  }
}

TEST(ToUtf8, Latin1Fallback) {
  EXPECT_EQ(to_utf8("caf\xe9"), "caf\xc3\xa9");
  EXPECT_EQ(to_utf8("caf\xc3\xa9"), "caf\xc3\xa9");
}

TEST(ParseMr, ThreeLineFixture) {
  oracle::TempDir dir;
  auto pos = dir.write("pos.txt", "a gripping film .\nwitty and warm\n");
  auto neg = dir.write("neg.txt", "dull , tedious .\n");
  auto corpus = parse_mr(pos, neg);
  ASSERT_EQ(corpus.examples.size(), 3u);
  EXPECT_EQ(corpus.examples[0].label, 1u);
  EXPECT_EQ(corpus.examples[1].label, 1u);
  EXPECT_EQ(corpus.examples[2].label, 0u);
  EXPECT_EQ(corpus.examples[2].tokens, (Tokens{"dull", ",", "tedious", "."}));
}

TEST(ParseMr, BlankLinesSkippedAndCounted) {
  oracle::TempDir dir;
  auto corpus = parse_mr(dir.write("p.txt", "good\n\n  \nfine\n"), dir.write("n.txt", "bad\n"));
  EXPECT_EQ(corpus.examples.size(), 3u);
  EXPECT_EQ(corpus.skipped_lines, 2u);
}

TEST(ParseMr, EmptyFileAndMissingFile) {
  oracle::TempDir dir;
  EXPECT_THROW(parse_mr(dir.write("p.txt", ""), dir.write("n.txt", "bad\n")), ParseError);
  EXPECT_THROW(parse_mr(dir.path() / "none", dir.path() / "n.txt"), IoError);
}

TEST(ParseSst, SentenceMode) {
  auto c = parse_sst_text("(3 (2 good) (4 movie))\n", SstMode::SentencesOnly);
  ASSERT_EQ(c.examples.size(), 1u);
  EXPECT_EQ(c.examples[0].label, 3u);
  EXPECT_EQ(c.examples[0].tokens, (Tokens{"good", "movie"}));
}

TEST(ParseSst, PhraseModeYieldsEveryLabelledSpan) {
  auto c = parse_sst_text("(3 (2 good) (4 movie))\n", SstMode::PhrasesAndSentences);
  ASSERT_EQ(c.examples.size(), 3u);
  std::set<std::pair<std::string, std::size_t>> got;
  for (const auto& e : c.examples) got.insert({join(e.tokens), e.label});
  EXPECT_TRUE(got.count({"good movie", 3}));
  EXPECT_TRUE(got.count({"good", 2}));
  EXPECT_TRUE(got.count({"movie", 4}));
}

TEST(ParseSst, PhraseDedupByTextAndLabel) {
  auto c = parse_sst_text("(3 (2 good) (2 good))\n(1 (2 good) (1 bad))\n", SstMode::PhrasesAndSentences);
  std::set<std::pair<std::string, std::size_t>> seen;
  for (const auto& e : c.examples) EXPECT_TRUE(seen.insert({join(e.tokens), e.label}).second);
  EXPECT_EQ(c.examples.size(), 4u);  // "good good"/3, good/2, "good bad"/1, bad/1
}

TEST(ParseSst, BracketTokensAndMalformedTrees) {
  auto c = parse_sst_text("(2 (2 -LRB-) (2 (2 aside) (2 -RRB-)))\n", SstMode::SentencesOnly);
  EXPECT_EQ(c.examples[0].tokens, (Tokens{"(", "aside", ")"}));
  try {
    parse_sst_text("(2 (2 fine) (3 ok))\n(3 (2 good) (4 movie)\n", SstMode::SentencesOnly);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_sst_text("(7 (2 a) (2 b))\n", SstMode::SentencesOnly), ParseError);
}

TEST(ParseTsv, LabelsAndRange) {
  oracle::TempDir dir;
  auto c = parse_tsv(dir.write("d.tsv", "1\tnice one\n0\tnope\n"), 2);
  ASSERT_EQ(c.examples.size(), 2u);
  EXPECT_EQ(c.examples[0].label, 1u);
  EXPECT_THROW(parse_tsv(dir.write("bad.tsv", "2\tout of range\n"), 2), ParseError);
}

TEST(SplitMr, HundredExamplesGiveEightyTenTen) {
  auto ex = labelled(50, 2);
  auto s = split_mr(ex, 7);
  EXPECT_EQ(s.train.size(), 80u);
  EXPECT_EQ(s.validation.size(), 10u);
  EXPECT_EQ(s.test.size(), 10u);
}

TEST(SplitMr, DeterministicDisjointAndStratified) {
  auto ex = labelled(300, 2);
  // Unbalanced classes make the stratification check meaningful.
  auto extra = labelled(200, 1);
  for (auto& e : extra) e.raw_text += "_x", e.tokens = {e.raw_text};
  ex.insert(ex.end(), extra.begin(), extra.end());
  auto a = split_mr(ex, 11);
  auto b = split_mr(ex, 11);
  auto texts = [](const std::vector<Example>& v) {
    std::vector<std::string> t;
    for (const auto& e : v) t.push_back(e.raw_text);
    return t;
  };
  EXPECT_EQ(texts(a.train), texts(b.train));
  EXPECT_EQ(texts(a.test), texts(b.test));
  EXPECT_NE(texts(split_mr(ex, 12).train), texts(a.train));

  std::set<std::string> all;
  for (const auto* part : {&a.train, &a.validation, &a.test})
    for (const auto& e : *part) EXPECT_TRUE(all.insert(e.raw_text).second) << "leak: " << e.raw_text;
  EXPECT_EQ(all.size(), ex.size());

  const double global = 500.0 / 800.0;
  for (const auto* part : {&a.train, &a.validation, &a.test}) {
    double zeros = 0;
    for (const auto& e : *part) zeros += e.label == 0;
    EXPECT_NEAR(zeros / static_cast<double>(part->size()), global, 0.01);
  }
}

TEST(SplitMr, TooFewPerClassRejected) {
  auto ex = labelled(20, 1);
  auto few = labelled(9, 2);
  for (auto& e : few)
    if (e.label == 1) ex.push_back(e);
  EXPECT_THROW(split_mr(ex, 1), std::invalid_argument);
}

TEST(HoldoutSplit, FractionAndDisjoint) {
  auto ex = labelled(50, 2);
  auto [kept, held] = holdout_split(ex, 0.1, 3);
  EXPECT_EQ(held.size(), 10u);
  EXPECT_EQ(kept.size(), 90u);
}

TEST(DatasetFormat, Names) {
  EXPECT_EQ(parse_dataset_format("mr"), DatasetFormat::MrPolarity);
  EXPECT_EQ(parse_dataset_format("sst_trees"), DatasetFormat::SstTrees);
  EXPECT_EQ(parse_dataset_format("tsv"), DatasetFormat::TsvGeneric);
  EXPECT_THROW(parse_dataset_format("csv"), std::invalid_argument);
}

// Counts against the original distributions; runs only when the corpora are supplied.
TEST(FullCorpora, MrHas5331PerClass) {
  const char* dir = std::getenv("MEAN_MR_DIR");
  if (!dir) GTEST_SKIP() << "MEAN_MR_DIR not set";
  std::filesystem::path d(dir);
  auto c = parse_mr(d / "rt-polarity.pos", d / "rt-polarity.neg");
  std::size_t pos = 0;
  for (const auto& e : c.examples) pos += e.label == 1;
  EXPECT_EQ(pos, kMrPerClass);
  EXPECT_EQ(c.examples.size() - pos, kMrPerClass);
}

TEST(FullCorpora, SstTestHas2210Sentences) {
  const char* dir = std::getenv("MEAN_SST_DIR");
  if (!dir) GTEST_SKIP() << "MEAN_SST_DIR not set";
  auto c = parse_sst(std::filesystem::path(dir) / "test.txt", SstMode::SentencesOnly);
  EXPECT_EQ(c.examples.size(), kSstTestSize);
}
