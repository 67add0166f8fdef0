#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mean/tensor.hpp"

// Differentiable kernels. Matrix kernels take rank-2 tensors; vectors are n×1 columns.
namespace mean {

enum class Axis { Rows = 0, Cols = 1 };

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// Elementwise; binary forms require identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
/// Throws DomainError on any non-positive entry.
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);
/// max(a, floor); gradient flows only where a > floor.
Tensor clamp_min(const Tensor& a, double floor);

/// Sum of all entries as a rank-0 scalar.
Tensor sum(const Tensor& a);
/// Axis::Rows collapses rows (result 1×c); Axis::Cols collapses columns (result r×1).
Tensor sum_axis(const Tensor& a, Axis axis);
Tensor mean_axis(const Tensor& a, Axis axis);

/// Row-wise softmax with max subtraction.
Tensor softmax_rows(const Tensor& x);
Tensor frobenius_norm_sq(const Tensor& x);

/// Axis::Rows stacks vertically (equal cols); Axis::Cols side by side (equal rows).
Tensor concat(std::span<const Tensor> parts, Axis axis);
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end);
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end);
/// Columns a[:, indices[0]], a[:, indices[1]], ... (repeats allowed).
Tensor gather_cols(const Tensor& a, std::span<const std::size_t> indices);
/// Repeats an r×1 column n times into r×n.
Tensor repeat_cols(const Tensor& col, std::size_t n);
/// a + col broadcast across columns; col is r×1.
Tensor add_col_broadcast(const Tensor& a, const Tensor& col);
/// Zero-pads on the right to at least `min_cols` columns.
Tensor pad_cols(const Tensor& a, std::size_t min_cols);
/// im2col for a 1-D valid convolution of width `window` over the columns of a c×L input:
/// result is (c·window)×(L−window+1), block k of rows holds column j+k of the input.
Tensor unfold_cols(const Tensor& a, std::size_t window);
/// Divides each column by its L2 norm; columns with norm < eps are passed through unchanged.
Tensor l2_normalize_cols(const Tensor& a, double eps = 1e-12);
/// a ⊙ mask · factor, mask constant (used for dropout).
Tensor apply_mask(const Tensor& a, std::span<const double> mask, double factor);

}  // namespace mean
