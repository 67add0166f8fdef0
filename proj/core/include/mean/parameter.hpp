#pragma once

#include <string>
#include <vector>

#include "mean/tensor.hpp"

namespace mean {

/// A named trainable leaf. `regularized` marks membership in the L2 set (weights, not biases).
struct Parameter {
  std::string name;
  Tensor value;
  bool regularized = true;
};

using ParameterList = std::vector<Parameter>;

}  // namespace mean
