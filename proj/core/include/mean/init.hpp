#pragma once

#include <cstddef>

#include "mean/random.hpp"
#include "mean/tensor.hpp"

namespace mean {

/// Random orthogonal r×c matrix from the QR factorisation of a Gaussian matrix.
/// Rows are orthonormal when r ≤ c, columns when r > c.
Tensor orthogonal_init(std::size_t rows, std::size_t cols, Rng& rng, bool requires_grad = true);

/// Overwrites a leaf's values with an orthogonal matrix of the same shape.
void fill_orthogonal(Tensor& leaf, Rng& rng);

}  // namespace mean
