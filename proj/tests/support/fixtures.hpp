#pragma once

// Synthetic corpora whose labels are fixed by which sentiment-lexicon word a sentence holds.

#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "mean/config.hpp"
#include "mean/data.hpp"
#include "mean/resources.hpp"
#include "mean/synthetic.hpp"
#include "mean/training.hpp"
#include "oracles.hpp"

namespace fixture {

inline const std::vector<std::string> kPositive{"good", "great", "superb", "lovely", "fine"};
inline const std::vector<std::string> kNegative{"bad", "awful", "dull", "poor", "boring"};
inline const std::vector<std::string> kNegation{"not", "never"};
inline const std::vector<std::string> kIntensity{"very", "so"};
inline const std::vector<std::string> kOpeners{"the", "this", "that", "a"};
inline const std::vector<std::string> kNouns{"film", "movie", "plot", "story", "cast", "script"};
inline const std::vector<std::string> kVerbs{"was", "is", "seems", "felt"};

struct Corpus {
  std::vector<mean::Example> train;
  std::vector<mean::Example> held_out;
};

inline mean::Example make_example(std::vector<std::string> tokens, std::size_t label) {
  mean::Example ex;
  for (const auto& t : tokens) ex.raw_text += (ex.raw_text.empty() ? "" : " ") + t;
  ex.tokens = std::move(tokens);
  ex.label = label;
  return ex;
}

/// `per_class_train` and `per_class_held` sentences per label, e.g. "the plot was very good".
/// Held-out sentences never repeat a training sentence.
inline Corpus separable_corpus(std::size_t per_class_train, std::size_t per_class_held, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  Corpus c;
  std::set<std::string> used;
  auto fill = [&](std::vector<mean::Example>& out, std::size_t per_class) {
    for (std::size_t i = 0; i < per_class; ++i) {
      for (std::size_t label : {1u, 0u}) {
        while (true) {
          const auto& words = label == 1 ? kPositive : kNegative;
          std::vector<std::string> t{pick(kOpeners), pick(kNouns), pick(kVerbs)};
          if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) t.push_back(pick(kIntensity));
          t.push_back(pick(words));
          auto ex = make_example(t, label);
          if (used.insert(ex.raw_text).second) {
            out.push_back(std::move(ex));
            break;
          }
        }
      }
    }
  };
  fill(c.train, per_class_train);
  fill(c.held_out, per_class_held);
  return c;
}

inline std::vector<std::string> vocabulary() {
  std::vector<std::string> all;
  for (const auto* v : {&kPositive, &kNegative, &kNegation, &kIntensity, &kOpeners, &kNouns, &kVerbs})
    all.insert(all.end(), v->begin(), v->end());
  return all;
}

inline mean::ResourceBundle bundle() {
  std::unordered_set<std::string> s(kPositive.begin(), kPositive.end());
  s.insert(kNegative.begin(), kNegative.end());
  return mean::ResourceBundle(mean::Lexicon(mean::ResourceKind::Sentiment, s),
                              mean::Lexicon(mean::ResourceKind::Negation, {kNegation.begin(), kNegation.end()}),
                              mean::Lexicon(mean::ResourceKind::Intensity, {kIntensity.begin(), kIntensity.end()}));
}

/// Small network sized for sub-second epochs on the synthetic corpus.
inline mean::TrainConfig small_config() {
  mean::TrainConfig cfg;
  cfg.batch_size = 5;
  cfg.dropout_rate = 0.1;
  cfg.d_char = 8;
  cfg.char_channels = 6;
  cfg.d_word = 12;
  cfg.h_dim = 8;
  cfg.a_dim = 6;
  cfg.learning_rate = 5e-3;
  cfg.max_epochs = 50;
  cfg.patience = 50;
  cfg.rng_seed = 3;
  cfg.num_classes = 2;
  return cfg;
}

inline mean::TrainResources resources(const mean::TrainConfig& cfg, std::uint64_t vector_seed = 99) {
  mean::TrainResources r;
  r.vectors = mean::random_word_vectors(vocabulary(), cfg.d_word, vector_seed);
  r.bundle = bundle();
  r.vocab = mean::CharVocab::from_words(vocabulary());
  return r;
}

/// Writes the corpus, lexicons and word vectors as files in `dir` for CLI runs.
struct FileSet {
  std::filesystem::path train_tsv, dev_tsv, test_tsv, pos, neg, sentiment, negation, intensity, vectors;
};

inline FileSet write_files(const oracle::TempDir& dir, const Corpus& c, std::size_t d_word, std::uint64_t seed = 99) {
  auto tsv = [](const std::vector<mean::Example>& v) {
    std::string s;
    for (const auto& e : v) s += std::to_string(e.label) + "\t" + e.raw_text + "\n";
    return s;
  };
  auto polarity = [](const std::vector<mean::Example>& v, std::size_t label) {
    std::string s;
    for (const auto& e : v)
      if (e.label == label) s += e.raw_text + "\n";
    return s;
  };
  auto lines = [](std::initializer_list<const std::vector<std::string>*> lists) {
    std::string s = "# fixture lexicon\n";
    for (const auto* l : lists)
      for (const auto& w : *l) s += w + "\n";
    return s;
  };
  FileSet f;
  f.train_tsv = dir.write("train.tsv", tsv(c.train));
  f.dev_tsv = dir.write("dev.tsv", tsv(c.train));
  f.test_tsv = dir.write("test.tsv", tsv(c.held_out));
  std::vector<mean::Example> all = c.train;
  all.insert(all.end(), c.held_out.begin(), c.held_out.end());
  f.pos = dir.write("pos.txt", polarity(all, 1));
  f.neg = dir.write("neg.txt", polarity(all, 0));
  f.sentiment = dir.write("sentiment.txt", lines({&kPositive, &kNegative}));
  f.negation = dir.write("negation.txt", lines({&kNegation}));
  f.intensity = dir.write("intensity.txt", lines({&kIntensity}));
  auto store = mean::random_word_vectors(vocabulary(), d_word, seed);
  std::string vec;
  char buf[40];
  for (const auto& w : store->words()) {
    vec += w;
    for (double v : store->lookup(w)) {
      std::snprintf(buf, sizeof buf, " %.17g", v);
      vec += buf;
    }
    vec += "\n";
  }
  f.vectors = dir.write("vectors.txt", vec);
  return f;
}

}  // namespace fixture
