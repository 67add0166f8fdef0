#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "mean/attention.hpp"
#include "mean/embeddings.hpp"
#include "mean/ops.hpp"
#include "mean/synthetic.hpp"
#include "mean/training.hpp"

using namespace mean;

namespace {

Tensor random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, bool rg = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(r * c);
  for (auto& x : v) x = u(rng);
  return Tensor({r, c}, std::move(v), rg);
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  auto a = random_matrix(n, n, rng), b = random_matrix(n, n, rng);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128)->Arg(300);

void BM_CharCnnWord(benchmark::State& state) {
  const std::size_t windows[] = {2, 3};
  auto vocab = CharVocab::ascii();
  auto p = CharCnnParams::zeros(vocab.size(), 150, static_cast<std::size_t>(state.range(0)), windows);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (auto& param : [&] { ParameterList l; p.append_parameters(l); return l; }())
    for (double& v : param.value.values_mut()) v = u(rng);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(char_cnn_embed("unforgettable", vocab, p));
}
BENCHMARK(BM_CharCnnWord)->Arg(50)->Arg(300);

void BM_GruEncode(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  auto p = GruParams::zeros(100, 50);
  for (Tensor* w : {&p.w_z, &p.w_r, &p.w_h, &p.u_z, &p.u_r, &p.u_h})
    for (double& v : w->values_mut()) v = std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
  auto x = random_matrix(100, t, rng);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(gru_encode(x, p));
}
BENCHMARK(BM_GruEncode)->Arg(10)->Arg(20)->Arg(50);

struct ScaledModel {
  TrainConfig config;
  std::shared_ptr<WordVectorStore> vectors;
  ResourceBundle bundle;
  CharVocab vocab;
  std::vector<std::string> tokens;

  explicit ScaledModel(std::size_t h) {
    tokens = {"this", "film", "is", "not", "very", "good", "but", "the", "cast", "is", "so", "charming"};
    config.d_char = 50;
    config.char_channels = 25;
    config.d_word = 50;
    config.h_dim = h;
    config.a_dim = h;
    vectors = random_word_vectors(tokens, config.d_word, 4);
    bundle = ResourceBundle(Lexicon(ResourceKind::Sentiment, {"good", "charming"}),
                            Lexicon(ResourceKind::Negation, {"not"}), Lexicon(ResourceKind::Intensity, {"very", "so"}));
    vocab = CharVocab::from_words(tokens);
  }
};

void BM_ForwardSentence(benchmark::State& state) {
  ScaledModel s(static_cast<std::size_t>(state.range(0)));
  Rng rng(5);
  auto model = initial_model(s.config, {s.vectors, s.bundle, s.vocab}, rng);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(s.tokens).label);
}
BENCHMARK(BM_ForwardSentence)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_ForwardBackwardBatch(benchmark::State& state) {
  ScaledModel s(50);
  Rng rng(6);
  auto model = initial_model(s.config, {s.vectors, s.bundle, s.vocab}, rng);
  const auto batch_size = static_cast<std::size_t>(state.range(0));
  Example ex{s.tokens, 1, "x"};
  std::vector<const Example*> batch(batch_size, &ex);
  auto params = model.params().parameters();
  for (auto _ : state) {
    for (auto& p : params) p.value.zero_grad();
    auto result = batch_loss(model, batch, Mode::Train, rng);
    backward(result.loss.total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(batch_size));
}
BENCHMARK(BM_ForwardBackwardBatch)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
