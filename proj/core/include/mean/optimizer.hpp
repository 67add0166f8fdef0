#pragma once

#include <span>
#include <vector>

#include "mean/parameter.hpp"

namespace mean {

struct RmsPropOptions {
  double learning_rate = 1e-3;
  double decay = 0.9;
  double epsilon = 1e-8;
};

/// RMSprop with one running mean of squared gradients per parameter entry:
///   s ← decay·s + (1 − decay)·g²,  θ ← θ − lr·g / √(s + ε)
class RmsProp {
 public:
  RmsProp(const ParameterList& params, RmsPropOptions options);

  /// Applies one update from the parameters' accumulated gradients.
  /// Parameters without a gradient buffer are treated as g = 0.
  void step(ParameterList& params);

  const std::vector<std::vector<double>>& state() const { return mean_square_; }
  std::vector<std::vector<double>>& state() { return mean_square_; }
  const RmsPropOptions& options() const { return options_; }

 private:
  RmsPropOptions options_;
  std::vector<std::vector<double>> mean_square_;
};

/// Single-tensor form used by tests and the scalar reference: updates `values` and `state`.
void rmsprop_update(std::span<double> values, std::span<const double> grads, std::span<double> state,
                    const RmsPropOptions& options);

}  // namespace mean
