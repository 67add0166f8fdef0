#include "mean/classifier.hpp"

#include <stdexcept>
#include <string>

#include "mean/errors.hpp"
#include "mean/ops.hpp"

namespace mean {

void ClassifierParams::append_parameters(ParameterList& out) const {
  out.push_back({"classifier.w", w, true});
  out.push_back({"classifier.b", b, false});
}

ClassifierParams ClassifierParams::zeros(std::size_t num_classes, std::size_t input_dim) {
  if (num_classes < 2) throw DimensionError("classifier needs at least 2 classes");
  return {Tensor::zeros({num_classes, input_dim}, true), Tensor::zeros({num_classes, 1}, true)};
}

void LossConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(mu >= 0.0)) throw ConfigError("mu must be >= 0");
  if (!(psi > 0.0)) throw ConfigError("psi must be > 0");
}

Tensor logits(const Tensor& combined, const ClassifierParams& params) {
  if (combined.rank() != 2 || combined.cols() != 1 || combined.rows() != params.w.cols()) {
    throw DimensionError("predict: sentence representation " + shape_string(combined.shape()) +
                         " does not match classifier " + shape_string(params.w.shape()));
  }
  return add(matmul(params.w, combined), params.b);
}

Tensor predict(const Tensor& combined, const ClassifierParams& params) {
  return transpose(softmax_rows(transpose(logits(combined, params))));
}

Tensor diversity_penalty(const Tensor& o1, const Tensor& o2, const Tensor& o3, double psi) {
  if (o1.shape() != o2.shape() || o1.shape() != o3.shape()) {
    throw DimensionError("diversity_penalty: path outputs differ in shape");
  }
  const Tensor rows[] = {transpose(o1), transpose(o2), transpose(o3)};
  const Tensor stacked = concat(rows, Axis::Rows);
  const Tensor gram = matmul(stacked, transpose(stacked));
  return frobenius_norm_sq(sub(gram, scale(Tensor::identity(kNumPaths), psi)));
}

std::vector<double> one_hot(std::size_t label, std::size_t num_classes) {
  if (label >= num_classes) {
    throw std::invalid_argument("label " + std::to_string(label) + " out of range for " +
                                std::to_string(num_classes) + " classes");
  }
  std::vector<double> y(num_classes, 0.0);
  y[label] = 1.0;
  return y;
}

namespace {

void require_one_hot(const std::vector<double>& y, std::size_t num_classes, std::size_t index) {
  std::size_t ones = 0;
  bool ok = y.size() == num_classes;
  for (double v : y) {
    if (v == 1.0) {
      ++ones;
    } else if (v != 0.0) {
      ok = false;
    }
  }
  if (!ok || ones != 1) {
    throw std::invalid_argument("target " + std::to_string(index) + " is not one-hot over " +
                                std::to_string(num_classes) + " classes");
  }
}

}  // namespace

LossTerms total_loss(std::span<const Tensor> predictions, std::span<const std::vector<double>> targets,
                     std::span<const Tensor> regularized,
                     std::span<const std::array<Tensor, kNumPaths>> outputs, const LossConfig& config) {
  config.validate();
  if (predictions.empty()) throw std::invalid_argument("total_loss: empty batch");
  if (targets.size() != predictions.size() || outputs.size() != predictions.size()) {
    throw std::invalid_argument("total_loss: predictions, targets and outputs differ in length");
  }
  LossTerms terms;
  Tensor ce = Tensor::scalar(0.0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& pred = predictions[i];
    require_one_hot(targets[i], pred.size(), i);
    const Tensor y(pred.shape(), targets[i]);
    ce = add(ce, sum(mul(log(clamp_min(pred, kLogClamp)), y)));
  }
  ce = scale(ce, -1.0);
  terms.cross_entropy = ce.item();

  Tensor l2 = Tensor::scalar(0.0);
  for (const auto& theta : regularized) l2 = add(l2, frobenius_norm_sq(theta));
  terms.l2 = l2.item();

  Tensor penalty = Tensor::scalar(0.0);
  for (const auto& o : outputs) penalty = add(penalty, diversity_penalty(o[0], o[1], o[2], config.psi));
  terms.penalty = penalty.item();

  terms.total = add(add(ce, scale(l2, config.lambda)), scale(penalty, config.mu));
  return terms;
}

}  // namespace mean
