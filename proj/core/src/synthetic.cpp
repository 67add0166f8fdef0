#include "mean/synthetic.hpp"

#include <random>

#include "mean/random.hpp"

namespace mean {

std::shared_ptr<WordVectorStore> random_word_vectors(const std::vector<std::string>& words, std::size_t dim,
                                                     std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto store = std::make_shared<WordVectorStore>(dim);
  for (const auto& w : words) {
    std::vector<double> v(dim);
    for (auto& x : v) x = unit(rng);
    store->insert(w, std::move(v));
  }
  return store;
}

AuditSetup make_audit_setup(std::uint64_t seed) {
  AuditSetup s;
  s.config.d_char = 4;
  s.config.char_channels = 3;
  s.config.kernel_sizes = {2, 3};
  s.config.d_word = 5;
  s.config.h_dim = 4;
  s.config.a_dim = 3;
  s.config.num_classes = 3;
  s.config.rng_seed = seed;
  s.example.tokens = {"not", "very", "good", "film"};
  s.example.label = 2;
  s.example.raw_text = "not very good film";
  s.vectors = random_word_vectors({"not", "very", "good", "film", "bad"}, s.config.d_word, seed ^ 0x9E3779B97F4A7C15ULL);
  s.bundle = ResourceBundle(Lexicon(ResourceKind::Sentiment, {"good", "bad"}), Lexicon(ResourceKind::Negation, {"not"}),
                            Lexicon(ResourceKind::Intensity, {"very"}));
  s.vocab = CharVocab::from_words(s.example.tokens);
  return s;
}

}  // namespace mean
