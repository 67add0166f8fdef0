#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mean/parameter.hpp"
#include "mean/resources.hpp"
#include "mean/tensor.hpp"

namespace mean {

struct ClassifierParams {
  Tensor w;  // C × 3h
  Tensor b;  // C × 1

  std::size_t num_classes() const { return w.rows(); }
  void append_parameters(ParameterList& out) const;
  static ClassifierParams zeros(std::size_t num_classes, std::size_t input_dim);
};

struct LossConfig {
  double lambda = 1e-5;  // L2 coefficient
  double mu = 1e-4;      // diversity penalty coefficient
  double psi = 0.9;      // target squared norm of each path output

  void validate() const;
};

/// Smallest probability fed to log in the cross-entropy.
inline constexpr double kLogClamp = 1e-12;

Tensor logits(const Tensor& combined, const ClassifierParams& params);
/// softmax(W·o + b) as a C × 1 column.
Tensor predict(const Tensor& combined, const ClassifierParams& params);

/// ‖O·Oᵀ − ψ·I‖²_F where O stacks o1, o2, o3 as rows.
Tensor diversity_penalty(const Tensor& o1, const Tensor& o2, const Tensor& o3, double psi);

/// One-hot target of length `num_classes`.
std::vector<double> one_hot(std::size_t label, std::size_t num_classes);

struct LossTerms {
  Tensor total;
  double cross_entropy = 0.0;
  double l2 = 0.0;       // Σθ² (before λ)
  double penalty = 0.0;  // Σ over the batch (before μ)
};

/// −Σ_i Σ_j y_ij log max(ŷ_ij, 1e−12) + λ Σ_θ θ² + μ Σ_i penalty_i.
///
/// `predictions[i]` is a C × 1 distribution, `targets[i]` must be one-hot over C
/// (std::invalid_argument otherwise), `outputs[i]` holds that example's o1, o2, o3.
/// `regularized` lists the tensors entering the L2 term.
LossTerms total_loss(std::span<const Tensor> predictions, std::span<const std::vector<double>> targets,
                     std::span<const Tensor> regularized,
                     std::span<const std::array<Tensor, kNumPaths>> outputs, const LossConfig& config);

}  // namespace mean
