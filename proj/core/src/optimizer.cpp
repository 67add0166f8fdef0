#include "mean/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "mean/tensor.hpp"

namespace mean {

void rmsprop_update(std::span<double> values, std::span<const double> grads, std::span<double> state,
                    const RmsPropOptions& o) {
  if (values.size() != state.size() || (!grads.empty() && grads.size() != values.size())) {
    throw DimensionError("rmsprop_update: parameter, gradient and state sizes differ");
  }
  if (grads.empty()) {
    for (auto& s : state) s = o.decay * s;
    return;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double g = grads[i];
    state[i] = o.decay * state[i] + (1.0 - o.decay) * g * g;
    values[i] -= o.learning_rate * g / std::sqrt(state[i] + o.epsilon);
  }
}

RmsProp::RmsProp(const ParameterList& params, RmsPropOptions options) : options_(options) {
  mean_square_.reserve(params.size());
  for (const auto& p : params) mean_square_.emplace_back(p.value.size(), 0.0);
}

void RmsProp::step(ParameterList& params) {
  if (params.size() != mean_square_.size()) {
    throw std::invalid_argument("RmsProp::step: parameter list changed since construction");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& t = params[k].value;
    rmsprop_update(t.values_mut(), t.grad(), mean_square_[k], options_);
  }
}

}  // namespace mean
