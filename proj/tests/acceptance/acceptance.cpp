// Acceptance suite. Usage: mean_acceptance [all|1..8]
// Prints one line per criterion: PASS, FAIL or SKIP followed by measured values.
// Exit status: 0 when nothing failed, 1 on any failure, 77 when every selected criterion skipped.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "fixtures.hpp"
#include "mean/checkpoint.hpp"
#include "mean/classifier.hpp"
#include "mean/data.hpp"
#include "mean/embeddings.hpp"
#include "mean/gradcheck.hpp"
#include "mean/ops.hpp"
#include "mean/resources.hpp"
#include "mean/synthetic.hpp"
#include "mean/training.hpp"
#include "oracles.hpp"
#include "reference_model.hpp"

using namespace mean;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void randomize_all(ModelParams& params, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& p : params.parameters())
    for (double& v : p.value.values_mut()) v = u(rng);
}

Outcome gradient_audit() {
  const auto start = Clock::now();
  auto setup = make_audit_setup(20240601);
  Rng rng(setup.config.rng_seed);
  Model model = initial_model(setup.config, {setup.vectors, setup.bundle, setup.vocab}, rng);
  std::mt19937_64 prng(setup.config.rng_seed);
  randomize_all(model.params(), prng, 0.5);  // biases included, so no gradient is trivially zero
  GradCheckOptions opt;
  opt.step = 1e-5;
  opt.tolerance = 1e-4;
  auto report = audit_gradients(model, setup.example, opt);
  std::size_t entries = 0;
  std::string worst = "-";
  double worst_err = -1.0;
  for (const auto& t : report.tensors) {
    entries += t.entries_checked;
    if (t.max_rel_error > worst_err) {
      worst_err = t.max_rel_error;
      worst = t.name;
    }
  }
  const double elapsed = seconds_since(start);
  const bool ok = report.passed && report.tensors.size() == model.params().parameters().size() && elapsed < 60.0;
  return {ok ? Status::Pass : Status::Fail,
          fmt::format("tensors={} entries={} max_rel_error={:.3e} worst={} time={:.1f}s", report.tensors.size(),
                      entries, report.max_rel_error, worst, elapsed)};
}

Outcome attention_algebra() {
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<std::size_t> len(1, 9), dim(2, 8);
  std::uniform_real_distribution<double> shift(-50.0, 50.0), scale(0.1, 5.0);
  std::size_t failures = 0;
  double worst_sum = 0.0, worst_shift = 0.0, worst_uniform = 0.0, worst_corr = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t t = len(rng), m = len(rng), h = dim(rng), a = dim(rng), d = dim(rng);
    auto hc = oracle::random_tensor({h, t}, rng, false);
    auto hr = oracle::random_tensor({h, m}, rng, false);
    auto p = AttentionParams::zeros(h, a);
    const double s = scale(rng);
    for (double& v : p.w.values_mut()) v = s * std::uniform_real_distribution<double>(-1, 1)(rng);
    for (double& v : p.u.values_mut()) v = s * std::uniform_real_distribution<double>(-1, 1)(rng);
    auto att = attend(hc, hr, p);

    double total = 0.0;
    bool nonneg = true;
    for (double v : att.alpha.values()) {
      total += v;
      nonneg = nonneg && v >= 0.0;
    }
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));

    const double c = shift(rng);
    std::vector<double> shifted(att.scores.values().begin(), att.scores.values().end());
    for (double& v : shifted) v += c;
    auto alpha2 = softmax_rows(Tensor({1, t}, shifted));
    double dshift = 0.0;
    for (std::size_t j = 0; j < t; ++j) dshift = std::max(dshift, std::abs(alpha2[j] - att.alpha[j]));
    worst_shift = std::max(worst_shift, dshift);

    auto zero = p;
    zero.u = Tensor::zeros(p.u.shape());
    auto uni = attend(hc, hr, zero);
    double duni = 0.0;
    for (double v : uni.alpha.values()) duni = std::max(duni, std::abs(v - 1.0 / static_cast<double>(t)));
    worst_uniform = std::max(worst_uniform, duni);

    auto wc = l2_normalize_cols(oracle::random_tensor({d, t}, rng, false)).detach();
    auto wr = l2_normalize_cols(oracle::random_tensor({d, m}, rng, false)).detach();
    auto corr = correlations(wc, wr, wr, wr);
    double excess = 0.0;
    for (const Tensor* k : {&corr.sentiment, &corr.intensity, &corr.negation})
      for (double v : k->values()) excess = std::max(excess, std::abs(v) - 1.0);
    worst_corr = std::max(worst_corr, excess);

    if (!nonneg || std::abs(total - 1.0) > 1e-12 || dshift > 1e-12 || duni > 1e-12 || excess > 1e-12) ++failures;
  }
  return {failures == 0 ? Status::Pass : Status::Fail,
          fmt::format("trials=1000 failures={} max|sum-1|={:.2e} max_shift_diff={:.2e} max_uniform_diff={:.2e} "
                      "max(|corr|-1)={:.2e}",
                      failures, worst_sum, worst_shift, worst_uniform, worst_corr)};
}

Outcome penalty_analytics() {
  const double psi = 0.9;
  std::mt19937_64 rng(3);
  // Signed, scaled standard basis vectors at shuffled positions.
  double worst_orth = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t h = 3 + trial % 5;
    std::vector<std::size_t> idx(h);
    for (std::size_t i = 0; i < h; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::array<Tensor, 3> o;
    for (std::size_t r = 0; r < 3; ++r) {
      std::vector<double> v(h, 0.0);
      v[idx[r]] = (rng() & 1 ? 1.0 : -1.0) * std::sqrt(psi);
      o[r] = Tensor({h, 1}, v);
    }
    worst_orth = std::max(worst_orth, std::abs(diversity_penalty(o[0], o[1], o[2], psi).item()));
  }
  auto z = Tensor::zeros({6, 1});
  const double zero_rows = diversity_penalty(z, z, z, psi).item();

  double worst_grad = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::array<Tensor, 3> o{oracle::random_tensor({4, 1}, rng), oracle::random_tensor({4, 1}, rng),
                            oracle::random_tensor({4, 1}, rng)};
    auto f = [&] { return diversity_penalty(o[0], o[1], o[2], psi); };
    backward(f());
    for (auto& t : o) {
      auto num = oracle::finite_difference([&] { return f().item(); }, t);
      for (std::size_t i = 0; i < num.size(); ++i) worst_grad = std::max(worst_grad, std::abs(t.grad()[i] - num[i]));
    }
  }
  const bool ok = worst_orth <= 1e-12 && std::abs(zero_rows - 2.43) <= 1e-12 && worst_grad <= 1e-6;
  return {ok ? Status::Pass : Status::Fail,
          fmt::format("orthogonal={:.2e} zero_rows={:.15g} max_grad_diff={:.2e}", worst_orth, zero_rows, worst_grad)};
}

Outcome oracle_equivalence() {
  auto setup = make_audit_setup(5);
  auto& cfg = setup.config;
  const std::vector<std::string> tokens{"film", "was", "not", "very", "good"};
  auto vectors = random_word_vectors({"film", "was", "not", "very", "good"}, cfg.d_word, 77);
  Rng rng(11);
  Model model = initial_model(cfg, {vectors, setup.bundle, CharVocab::from_words(tokens)}, rng);
  std::mt19937_64 prng(12);
  randomize_all(model.params(), prng, 0.8);
  const auto& p = model.params();

  // Embeddings from the scalar char CNN and the raw word vectors.
  oracle::Mat w = oracle::zeros(cfg.d_char + cfg.d_word, tokens.size());
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    auto col = oracle::reference_char_cnn(model.vocab().encode(tokens[j]), p.char_cnn);
    auto wv = vectors->lookup(tokens[j]);
    col.insert(col.end(), wv.begin(), wv.end());
    double norm = 0.0;
    for (double v : col) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < col.size(); ++i) w[i][j] = col[i] / norm;
  }
  auto pick = [&](std::initializer_list<std::size_t> cols) {
    oracle::Mat m = oracle::zeros(w.size(), cols.size());
    std::size_t k = 0;
    for (std::size_t c : cols) {
      for (std::size_t i = 0; i < w.size(); ++i) m[i][k] = w[i][c];
      ++k;
    }
    return m;
  };
  // Context is the whole sentence; sentiment: good, intensity: very, negation: not.
  auto ref = oracle::reference_sentence(pick({0, 1, 2, 3, 4}), {pick({4}), pick({3}), pick({2})}, p.encoder);
  auto probs = oracle::reference_predict(ref.combined, p.classifier);

  auto pred = model.forward(tokens);
  double diff = 0.0;
  for (std::size_t i = 0; i < ref.combined.size(); ++i)
    diff = std::max(diff, std::abs(pred.rep.combined[i] - ref.combined[i]));
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t j = 0; j < ref.alpha[r].size(); ++j)
      diff = std::max(diff, std::abs(pred.rep.alpha[r][j] - ref.alpha[r][j]));
  for (std::size_t c = 0; c < probs.size(); ++c) diff = std::max(diff, std::abs(pred.probabilities[c] - probs[c]));
  const bool layout = pred.annotation.context_tokens == tokens &&
                      !pred.annotation.fallback_used;
  return {diff <= 1e-10 && layout ? Status::Pass : Status::Fail,
          fmt::format("tokens=5 max_abs_diff={:.2e} annotation={}", diff, layout ? "as expected" : "unexpected")};
}

Outcome separable_learning() {
  const auto start = Clock::now();
  auto cfg = fixture::small_config();
  auto res = fixture::resources(cfg);
  auto corpus = fixture::separable_corpus(10, 5, 21);
  TrainOptions opt;
  opt.stop_at_perfect_train = true;
  auto run = [&] { return train({corpus.train, corpus.train}, cfg, res, opt); };
  auto a = run();
  auto b = run();
  auto model = make_model(a.best, res.vectors);
  const double train_acc = evaluate(corpus.train, model).accuracy;
  const double held_acc = evaluate(corpus.held_out, model).accuracy;
  const bool deterministic = serialize_checkpoint(a.best) == serialize_checkpoint(b.best) &&
                             a.history.size() == b.history.size();
  const double elapsed = seconds_since(start);
  const bool ok = corpus.train.size() == 20 && corpus.held_out.size() == 10 && train_acc == 1.0 &&
                  a.history.size() <= 50 && held_acc >= 0.9 && deterministic && elapsed < 120.0;
  return {ok ? Status::Pass : Status::Fail,
          fmt::format("epochs={} train_acc={:.3f} held_out_acc={:.3f} deterministic={} time={:.1f}s (two runs)",
                      a.history.size(), train_acc, held_acc, deterministic, elapsed)};
}

std::filesystem::path source_dir() { return MEAN_SOURCE_DIR; }

Outcome ablation_direction() {
  const char* mr = std::getenv("MEAN_MR_DIR");
  const char* vec = std::getenv("MEAN_VECTORS_50D");
  if (!mr || !vec) return {Status::Skip, "needs MEAN_MR_DIR and MEAN_VECTORS_50D"};
  const auto start = Clock::now();
  auto corpus = parse_mr(std::filesystem::path(mr) / "rt-polarity.pos", std::filesystem::path(mr) / "rt-polarity.neg");
  auto vectors = std::make_shared<WordVectorStore>(load_word_vectors(vec));
  if (vectors->dim() != 50) return {Status::Fail, fmt::format("vector width {} != 50", vectors->dim())};
  const auto lex = source_dir() / "data" / "lexicons";
  ResourceBundle bundle(load_lexicon(lex / "sentiment.txt", ResourceKind::Sentiment),
                        load_lexicon(lex / "negation.txt", ResourceKind::Negation),
                        load_lexicon(lex / "intensity.txt", ResourceKind::Intensity));

  // 250 + 250 sentences drawn with a fixed seed.
  std::vector<Example> pos, neg;
  for (const auto& e : corpus.examples) (e.label == 1 ? pos : neg).push_back(e);
  std::mt19937_64 sub(500);
  std::shuffle(pos.begin(), pos.end(), sub);
  std::shuffle(neg.begin(), neg.end(), sub);
  std::vector<Example> sample(pos.begin(), pos.begin() + 250);
  sample.insert(sample.end(), neg.begin(), neg.begin() + 250);

  std::vector<std::string> words;
  for (const auto& e : sample) words.insert(words.end(), e.tokens.begin(), e.tokens.end());
  for (const auto* l : {&bundle.sentiment(), &bundle.negation(), &bundle.intensity()}) {
    auto w = l->sorted_words();
    words.insert(words.end(), w.begin(), w.end());
  }
  TrainResources res{vectors, bundle, CharVocab::from_words(words)};

  TrainConfig cfg;
  cfg.d_word = 50;
  cfg.d_char = 50;
  cfg.char_channels = 25;
  cfg.h_dim = 50;
  cfg.a_dim = 50;
  cfg.batch_size = 25;
  cfg.max_epochs = 10;
  cfg.patience = 3;
  std::size_t wins = 0;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto split = split_mr(sample, seed);
    cfg.rng_seed = seed;
    cfg.path_enabled = {true, true, true};
    const double full = train({split.train, split.validation}, cfg, res).best.validation_accuracy;
    cfg.path_enabled = {false, true, true};
    const double ablated = train({split.train, split.validation}, cfg, res).best.validation_accuracy;
    wins += full >= ablated;
    detail += fmt::format(" seed{}={:.3f}/{:.3f}", seed, full, ablated);
  }
  const double elapsed = seconds_since(start);
  return {wins >= 2 && elapsed < 1800.0 ? Status::Pass : Status::Fail,
          fmt::format("full/no-sentiment{} majority={}/3 time={:.0f}s", detail, wins, elapsed)};
}

Outcome reproducibility() {
  auto cfg = fixture::small_config();
  cfg.max_epochs = 5;
  auto res = fixture::resources(cfg);
  auto corpus = fixture::separable_corpus(10, 5, 21);
  oracle::TempDir dir;
  for (const char* name : {"a", "b"}) {
    auto r = train({corpus.train, corpus.held_out}, cfg, res);
    save_checkpoint(r.best, dir.path() / (std::string(name) + ".best"));
    save_checkpoint(r.last, dir.path() / (std::string(name) + ".last"));
  }
  const auto a_best = oracle::read_file(dir.path() / "a.best"), b_best = oracle::read_file(dir.path() / "b.best");
  const auto a_last = oracle::read_file(dir.path() / "a.last"), b_last = oracle::read_file(dir.path() / "b.last");
  const bool ok = a_best == b_best && a_last == b_last;
  return {ok ? Status::Pass : Status::Fail,
          fmt::format("best_bytes={} identical={} last_identical={}", a_best.size(), a_best == b_best,
                      a_last == b_last)};
}

Outcome format_fidelity() {
  const char* mr = std::getenv("MEAN_MR_DIR");
  const char* sst = std::getenv("MEAN_SST_DIR");
  if (!mr && !sst) return {Status::Skip, "needs MEAN_MR_DIR and/or MEAN_SST_DIR"};
  bool ok = true;
  std::string detail;
  if (mr) {
    auto c = parse_mr(std::filesystem::path(mr) / "rt-polarity.pos", std::filesystem::path(mr) / "rt-polarity.neg");
    std::size_t p = 0, n = 0;
    for (const auto& e : c.examples) (e.label == 1 ? p : n) += 1;
    ok = ok && p == kMrPerClass && n == kMrPerClass;
    detail += fmt::format("mr_pos={} mr_neg={} ", p, n);
  } else {
    detail += "mr=absent ";
  }
  if (sst) {
    auto c = parse_sst(std::filesystem::path(sst) / "test.txt", SstMode::SentencesOnly);
    ok = ok && c.examples.size() == kSstTestSize;
    detail += fmt::format("sst_test={}", c.examples.size());
  } else {
    detail += "sst=absent";
  }
  return {ok ? Status::Pass : Status::Fail, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "gradient-audit", gradient_audit},         {2, "attention-algebra", attention_algebra},
      {3, "penalty-analytics", penalty_analytics},   {4, "oracle-equivalence", oracle_equivalence},
      {5, "separable-learning", separable_learning}, {6, "ablation-direction", ablation_direction},
      {7, "reproducibility", reproducibility},       {8, "format-fidelity", format_fidelity},
  };
  const std::string which = argc > 1 ? argv[1] : "all";
  std::size_t ran = 0, failed = 0, skipped = 0;
  for (const auto& c : criteria) {
    if (which != "all" && which != std::to_string(c.id)) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    failed += o.status == Status::Fail;
    skipped += o.status == Status::Skip;
    std::printf("%s criterion %d %s: %s\n", tag, c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s' (expected all or 1..8)\n", which.c_str());
    return 2;
  }
  if (failed) return 1;
  return skipped == ran ? 77 : 0;
}
