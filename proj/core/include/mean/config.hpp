#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mean/classifier.hpp"
#include "mean/resources.hpp"

namespace mean {

/// Every training hyperparameter, with defaults.
struct TrainConfig {
  std::size_t batch_size = 60;
  double dropout_rate = 0.5;
  double lambda = 1e-5;
  double mu = 1e-4;
  double psi = 0.9;
  std::size_t d_char = 300;
  std::size_t d_word = 300;
  std::vector<std::size_t> kernel_sizes{2, 3};
  std::size_t char_channels = 64;
  std::size_t h_dim = 150;
  std::size_t a_dim = 100;
  double learning_rate = 1e-3;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  std::size_t max_epochs = 30;
  std::size_t patience = 10;
  std::uint64_t rng_seed = 1;
  std::size_t num_classes = 2;
  bool use_char_cnn = true;
  std::array<bool, kNumPaths> path_enabled{true, true, true};
  bool gradcheck = false;
  std::string vectors_path;

  LossConfig loss() const { return {lambda, mu, psi}; }
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Sets one field from its textual value. Throws ConfigError for unknown keys or bad values.
void set_config_value(TrainConfig& config, std::string_view key, std::string_view value);

/// Applies flat `key=value` lines (`#` comments, blank lines allowed) and returns the keys seen.
std::vector<std::string> apply_config_text(TrainConfig& config, std::string_view text);
TrainConfig parse_config(std::string_view text);
TrainConfig load_config(const std::filesystem::path& path);

/// Canonical text form: every field, fixed order, doubles in shortest round-trip form.
std::string to_config_text(const TrainConfig& config);

/// Path letters s/i/n (or full names) → Path.
Path parse_path_name(std::string_view name);

}  // namespace mean
