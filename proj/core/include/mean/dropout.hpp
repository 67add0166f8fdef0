#pragma once

#include "mean/random.hpp"
#include "mean/tensor.hpp"

namespace mean {

enum class Mode { Train, Eval };

/// Inverted dropout: in train mode each entry is kept with probability 1−rate and scaled by
/// 1/(1−rate); eval mode and rate 0 are the identity. Throws std::invalid_argument unless
/// 0 ≤ rate < 1.
Tensor apply_dropout(const Tensor& x, double rate, Rng& rng, Mode mode);

}  // namespace mean
