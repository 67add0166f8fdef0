#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "mean/checkpoint.hpp"
#include "mean/data.hpp"
#include "mean/errors.hpp"
#include "mean/gradcheck.hpp"
#include "mean/synthetic.hpp"
#include "mean/training.hpp"

namespace mean::cli {

namespace {

namespace fs = std::filesystem;

struct DataArgs {
  std::string format = "mr";
  std::string pos, neg, train, dev, test;
  bool sst_phrases = false;
};

struct TrainArgs {
  std::string config_path;
  DataArgs data;
  std::string lexicon_sentiment, lexicon_negation, lexicon_intensity;
  std::string vectors;
  std::string char_vocab;
  std::string out;
  std::string metrics;
  std::optional<std::size_t> batch_size, epochs, patience, d_char, d_word, h_dim, a_dim, char_channels;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr, dropout, lambda, mu, psi;
  bool disable_charcnn = false;
  std::vector<std::string> disable_paths;
  bool gradcheck = false;
  std::vector<std::string> overrides;
};

struct ServeArgs {
  std::string ckpt;
  std::string vectors;
  DataArgs data;
  std::string split = "test";
};

struct GradcheckArgs {
  std::string ckpt;
  std::string vectors;
  std::uint64_t seed = 7;
  double tolerance = 1e-4;
  double step = 1e-5;
  std::size_t samples = 0;
};

void add_data_options(CLI::App& cmd, DataArgs& d) {
  cmd.add_option("--data-format", d.format, "Corpus format: mr, sst or tsv")
      ->check(CLI::IsMember({"mr", "sst", "tsv", "mr_polarity", "sst_trees", "tsv_generic"}));
  cmd.add_option("--data-pos", d.pos, "MR: positive sentences, one per line");
  cmd.add_option("--data-neg", d.neg, "MR: negative sentences, one per line");
  cmd.add_option("--data-train", d.train, "SST/TSV: training file");
  cmd.add_option("--data-dev", d.dev, "SST/TSV: validation file");
  cmd.add_option("--data-test", d.test, "SST/TSV: test file");
  cmd.add_flag("--sst-phrases", d.sst_phrases, "SST: train on every labelled phrase, not only sentences");
}

std::size_t format_classes(DatasetFormat f, std::size_t configured) {
  switch (f) {
    case DatasetFormat::MrPolarity: return 2;
    case DatasetFormat::SstTrees: return 5;
    case DatasetFormat::TsvGeneric: return configured;
  }
  return configured;
}

struct LoadedData {
  std::vector<Example> train, dev, test;
  std::size_t skipped = 0;
};

fs::path need(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required for this data format");
  return value;
}

/// Reads the three splits. MR is split 80/10/10 with `seed`; TSV without a dev file holds
/// out 10% of the training file.
LoadedData load_data(const DataArgs& args, std::size_t num_classes, std::uint64_t seed) {
  LoadedData out;
  switch (parse_dataset_format(args.format)) {
    case DatasetFormat::MrPolarity: {
      auto corpus = parse_mr(need(args.pos, "--data-pos"), need(args.neg, "--data-neg"));
      out.skipped = corpus.skipped_lines;
      auto split = split_mr(corpus.examples, seed);
      out.train = std::move(split.train);
      out.dev = std::move(split.validation);
      out.test = std::move(split.test);
      break;
    }
    case DatasetFormat::SstTrees: {
      const auto mode = args.sst_phrases ? SstMode::PhrasesAndSentences : SstMode::SentencesOnly;
      if (!args.train.empty()) out.train = parse_sst(args.train, mode).examples;
      if (!args.dev.empty()) out.dev = parse_sst(args.dev, SstMode::SentencesOnly).examples;
      if (!args.test.empty()) out.test = parse_sst(args.test, SstMode::SentencesOnly).examples;
      break;
    }
    case DatasetFormat::TsvGeneric: {
      if (!args.train.empty()) {
        auto corpus = parse_tsv(args.train, num_classes);
        out.skipped += corpus.skipped_lines;
        out.train = std::move(corpus.examples);
      }
      if (!args.dev.empty()) {
        out.dev = parse_tsv(args.dev, num_classes).examples;
      } else if (!out.train.empty()) {
        auto [kept, held] = holdout_split(out.train, 0.1, seed);
        out.train = std::move(kept);
        out.dev = std::move(held);
      }
      if (!args.test.empty()) out.test = parse_tsv(args.test, num_classes).examples;
      break;
    }
  }
  return out;
}

ResourceBundle load_bundle(const TrainArgs& a) {
  return ResourceBundle(load_lexicon(a.lexicon_sentiment, ResourceKind::Sentiment),
                        load_lexicon(a.lexicon_negation, ResourceKind::Negation),
                        load_lexicon(a.lexicon_intensity, ResourceKind::Intensity));
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

int train_command(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  TrainConfig config;
  std::vector<std::string> file_keys;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw IoError("cannot open config " + a.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    file_keys = apply_config_text(config, buf.str());
  }
  for (const auto& kv : a.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    file_keys.push_back(kv.substr(0, eq));
  }
  if (a.batch_size) config.batch_size = *a.batch_size;
  if (a.epochs) config.max_epochs = *a.epochs;
  if (a.patience) config.patience = *a.patience;
  if (a.seed) config.rng_seed = *a.seed;
  if (a.lr) config.learning_rate = *a.lr;
  if (a.dropout) config.dropout_rate = *a.dropout;
  if (a.lambda) config.lambda = *a.lambda;
  if (a.mu) config.mu = *a.mu;
  if (a.psi) config.psi = *a.psi;
  if (a.d_char) config.d_char = *a.d_char;
  if (a.h_dim) config.h_dim = *a.h_dim;
  if (a.a_dim) config.a_dim = *a.a_dim;
  if (a.char_channels) config.char_channels = *a.char_channels;
  if (a.disable_charcnn) config.use_char_cnn = false;
  for (const auto& p : a.disable_paths) config.path_enabled[static_cast<std::size_t>(parse_path_name(p))] = false;
  if (a.gradcheck) config.gradcheck = true;

  auto vectors = std::make_shared<WordVectorStore>(load_word_vectors(a.vectors));
  const bool d_word_pinned =
      a.d_word.has_value() || std::find(file_keys.begin(), file_keys.end(), "d_word") != file_keys.end();
  if (a.d_word) config.d_word = *a.d_word;
  if (!d_word_pinned) config.d_word = vectors->dim();
  if (config.d_word != vectors->dim()) {
    throw ConfigError("d_word is " + std::to_string(config.d_word) + " but " + a.vectors + " has width " +
                      std::to_string(vectors->dim()));
  }
  config.vectors_path = fs::absolute(a.vectors).string();
  const auto format = parse_dataset_format(a.data.format);
  config.num_classes = format_classes(format, config.num_classes);
  config.validate();

  auto data = load_data(a.data, config.num_classes, config.rng_seed);
  if (data.skipped) err << "warning: skipped " << data.skipped << " empty line(s)\n";
  if (data.train.empty()) throw ConfigError("no training data (check --data-* flags)");
  if (data.dev.empty()) throw ConfigError("no validation data (check --data-dev)");

  TrainResources resources;
  resources.vectors = vectors;
  resources.bundle = load_bundle(a);
  if (!a.char_vocab.empty()) {
    resources.vocab = CharVocab::load(a.char_vocab);
  } else {
    std::vector<std::string> words;
    for (const auto& ex : data.train) words.insert(words.end(), ex.tokens.begin(), ex.tokens.end());
    for (auto kind : {ResourceKind::Sentiment, ResourceKind::Negation, ResourceKind::Intensity}) {
      auto lex = resources.bundle.lexicon(kind).sorted_words();
      words.insert(words.end(), lex.begin(), lex.end());
    }
    resources.vocab = CharVocab::from_words(words);
  }

  const std::string metrics_path = a.metrics.empty() ? a.out + ".metrics.tsv" : a.metrics;
  std::string metrics = "epoch\ttrain_loss\tval_accuracy\n";
  TrainOptions options;
  options.on_epoch = [&](const EpochMetrics& m) {
    metrics += std::to_string(m.epoch) + "\t" + fixed(m.train_loss, 6) + "\t" + fixed(m.validation_accuracy, 4) + "\n";
    out << "epoch " << m.epoch << "\tloss " << fixed(m.train_loss, 6) << "\tval_accuracy "
        << fixed(m.validation_accuracy, 4) << '\n';
  };
  auto result = train({std::move(data.train), std::move(data.dev)}, config, resources, options);
  save_checkpoint(result.best, a.out);
  write_file_atomically(metrics_path, metrics);
  out << "best epoch " << result.best.epoch << "\tval_accuracy " << fixed(result.best.validation_accuracy, 4)
      << "\ncheckpoint " << a.out << '\n';
  return kExitOk;
}

Model load_model(const std::string& ckpt, const std::string& vectors_override) {
  auto checkpoint = load_checkpoint(ckpt);
  const std::string path = vectors_override.empty() ? checkpoint.config.vectors_path : vectors_override;
  if (path.empty()) throw ConfigError("checkpoint names no word vectors; pass --vectors");
  auto vectors = std::make_shared<WordVectorStore>(load_word_vectors(path));
  return make_model(checkpoint, std::move(vectors));
}

int eval_command(const ServeArgs& a, std::ostream& out) {
  Model model = load_model(a.ckpt, a.vectors);
  const auto format = parse_dataset_format(a.data.format);
  const std::size_t classes = model.config().num_classes;
  if (format != DatasetFormat::TsvGeneric && format_classes(format, classes) != classes) {
    throw ConfigError("checkpoint has " + std::to_string(classes) + " classes but the " + a.data.format +
                      " corpus has " + std::to_string(format_classes(format, classes)));
  }
  auto data = load_data(a.data, classes, model.config().rng_seed);
  const auto& split = a.split == "train" ? data.train : a.split == "dev" ? data.dev : data.test;
  if (split.empty()) throw ConfigError("split '" + a.split + "' is empty or was not supplied");
  auto result = evaluate(split, model);
  out << "accuracy\t" << fixed(result.accuracy, 4) << '\n';
  for (std::size_t c = 0; c < classes; ++c) {
    out << "class\t" << c << "\tcorrect\t" << result.class_correct(c) << "\ttotal\t" << result.class_total(c) << '\n';
  }
  return kExitOk;
}

int predict_command(const ServeArgs& a, std::istream& in, std::ostream& out) {
  Model model = load_model(a.ckpt, a.vectors);
  NoGradGuard no_grad;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = tokenize(to_utf8(line));
    if (tokens.empty()) {
      out << "SKIP\n";
      continue;
    }
    auto pred = model.forward(tokens, Mode::Eval);
    out << pred.label << '\t';
    const auto probs = pred.probabilities.values();
    for (std::size_t c = 0; c < probs.size(); ++c) out << (c ? "," : "") << fixed(probs[c], 12);
    out << '\n';
  }
  return kExitOk;
}

int inspect_command(const ServeArgs& a, std::istream& in, std::ostream& out) {
  Model model = load_model(a.ckpt, a.vectors);
  NoGradGuard no_grad;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = tokenize(to_utf8(line));
    if (tokens.empty()) {
      out << "SKIP\n";
      continue;
    }
    auto pred = model.forward(tokens, Mode::Eval);
    out << "sentence\t" << line << '\n'
        << "fallback_used\t" << (pred.annotation.fallback_used ? "true" : "false") << '\n'
        << "label\t" << pred.label << '\n';
    for (auto path : kPaths) {
      const auto idx = static_cast<std::size_t>(path);
      out << "path\t" << to_string(path);
      const auto& alpha = pred.rep.alpha[idx];
      if (!alpha.defined()) {
        out << "\tdisabled\n";
        continue;
      }
      out << '\n';
      for (std::size_t t = 0; t < tokens.size(); ++t) out << tokens[t] << '\t' << fixed(alpha[t], 4) << '\n';
    }
    out << '\n';
  }
  return kExitOk;
}

int gradcheck_command(const GradcheckArgs& a, std::istream& in, std::ostream& out) {
  GradCheckOptions options;
  options.step = a.step;
  options.tolerance = a.tolerance;
  options.max_entries_per_tensor = a.samples;
  options.seed = a.seed;

  GradCheckReport report;
  if (a.ckpt.empty()) {
    auto setup = make_audit_setup(a.seed);
    Rng rng(a.seed);
    Model model(setup.config, ModelParams::initialize(setup.config, setup.vocab.size(), rng), setup.vocab,
                setup.bundle, setup.vectors);
    report = audit_gradients(model, setup.example, options);
  } else {
    Model model = load_model(a.ckpt, a.vectors);
    std::string line;
    std::getline(in, line);
    Example ex;
    ex.tokens = tokenize(to_utf8(line));
    if (ex.tokens.empty()) throw ConfigError("gradcheck with --ckpt reads one sentence on standard input");
    if (options.max_entries_per_tensor == 0) options.max_entries_per_tensor = 16;
    report = audit_gradients(model, ex, options);
  }
  for (const auto& t : report.tensors) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", t.max_rel_error);
    out << t.name << '\t' << t.entries_checked << '\t' << buf << '\n';
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", report.max_rel_error);
  out << (report.passed ? "PASS" : "FAIL") << "\tmax_rel_error\t" << buf << '\n';
  return report.passed ? kExitOk : kExitError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentiment classification with lexicon-driven multi-path attention", "mean"};
  app.require_subcommand(1, 1);
  app.footer(
      "Precedence for training settings: built-in defaults < --config file < --set key=value < dedicated flags.");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write the best checkpoint");
  train_cmd->add_option("--config", ta.config_path, "key=value config file");
  add_data_options(*train_cmd, ta.data);
  train_cmd->add_option("--lexicon-sentiment", ta.lexicon_sentiment, "Sentiment lexicon, one word per line")->required();
  train_cmd->add_option("--lexicon-negation", ta.lexicon_negation, "Negation word list")->required();
  train_cmd->add_option("--lexicon-intensity", ta.lexicon_intensity, "Intensity word list")->required();
  train_cmd->add_option("--vectors", ta.vectors, "Pretrained word vectors (token v1 ... vd per line)")->required();
  train_cmd->add_option("--char-vocab", ta.char_vocab, "Character vocabulary, one character per line");
  train_cmd->add_option("--out", ta.out, "Checkpoint output path")->required();
  train_cmd->add_option("--metrics", ta.metrics, "Per-epoch metrics TSV (default: <out>.metrics.tsv)");
  train_cmd->add_option("--batch-size", ta.batch_size, "Mini-batch size");
  train_cmd->add_option("--epochs", ta.epochs, "Maximum number of epochs");
  train_cmd->add_option("--patience", ta.patience, "Epochs without validation improvement before stopping");
  train_cmd->add_option("--seed", ta.seed, "Random seed");
  train_cmd->add_option("--lr", ta.lr, "RMSprop learning rate");
  train_cmd->add_option("--dropout", ta.dropout, "Dropout rate");
  train_cmd->add_option("--lambda", ta.lambda, "L2 coefficient");
  train_cmd->add_option("--mu", ta.mu, "Diversity penalty coefficient");
  train_cmd->add_option("--psi", ta.psi, "Diversity penalty target");
  train_cmd->add_option("--d-char", ta.d_char, "Character embedding width");
  train_cmd->add_option("--d-word", ta.d_word, "Word vector width (default: taken from --vectors)");
  train_cmd->add_option("--h-dim", ta.h_dim, "GRU hidden size");
  train_cmd->add_option("--a-dim", ta.a_dim, "Attention projection size");
  train_cmd->add_option("--char-channels", ta.char_channels, "Channels of the 1x1 character convolution");
  train_cmd->add_flag("--disable-charcnn", ta.disable_charcnn, "Use word vectors only");
  train_cmd->add_option("--disable-path", ta.disable_paths, "Replace a path output by zeros: s, i or n")
      ->check(CLI::IsMember({"s", "i", "n"}));
  train_cmd->add_flag("--gradcheck", ta.gradcheck, "Run a finite-difference audit before training");
  train_cmd->add_option("--set", ta.overrides, "Override any config key (key=value)");

  ServeArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Report accuracy of a checkpoint on a data split");
  eval_cmd->add_option("--ckpt", ea.ckpt, "Checkpoint")->required();
  eval_cmd->add_option("--vectors", ea.vectors, "Word vectors (default: path stored in the checkpoint)");
  add_data_options(*eval_cmd, ea.data);
  eval_cmd->add_option("--split", ea.split, "train, dev or test")->check(CLI::IsMember({"train", "dev", "test"}));

  ServeArgs pa;
  auto* predict_cmd = app.add_subcommand("predict", "Classify sentences read from standard input");
  predict_cmd->add_option("--ckpt", pa.ckpt, "Checkpoint")->required();
  predict_cmd->add_option("--vectors", pa.vectors, "Word vectors (default: path stored in the checkpoint)");

  ServeArgs ia;
  auto* inspect_cmd = app.add_subcommand("inspect-attention", "Print per-path attention weights for stdin sentences");
  inspect_cmd->add_option("--ckpt", ia.ckpt, "Checkpoint")->required();
  inspect_cmd->add_option("--vectors", ia.vectors, "Word vectors (default: path stored in the checkpoint)");

  GradcheckArgs ga;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare tape gradients with central finite differences");
  grad_cmd->add_option("--ckpt", ga.ckpt, "Audit this checkpoint on one sentence from stdin");
  grad_cmd->add_option("--vectors", ga.vectors, "Word vectors for --ckpt");
  grad_cmd->add_option("--seed", ga.seed, "Seed of the synthetic audit model");
  grad_cmd->add_option("--tolerance", ga.tolerance, "Maximum relative error");
  grad_cmd->add_option("--step", ga.step, "Finite-difference step");
  grad_cmd->add_option("--samples", ga.samples, "Entries per tensor (0 = all)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (*train_cmd) return train_command(ta, out, err);
    if (*eval_cmd) return eval_command(ea, out);
    if (*predict_cmd) return predict_command(pa, in, out);
    if (*inspect_cmd) return inspect_command(ia, in, out);
    if (*grad_cmd) return gradcheck_command(ga, in, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace mean::cli
