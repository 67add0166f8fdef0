#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mean/parameter.hpp"

namespace mean {

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Denominator floor of the relative error, so near-zero gradients are compared absolutely.
  double floor = 1e-6;
  /// 0 checks every entry; otherwise a seeded sample of at most this many per tensor.
  std::size_t max_entries_per_tensor = 0;
  std::uint64_t seed = 0;
};

struct TensorCheck {
  std::string name;
  std::size_t entries_checked = 0;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  double max_rel_error = 0.0;
  bool passed = true;
};

/// |a − n| / max(|a|, |n|, floor)
double relative_error(double analytic, double numeric, double floor);

/// Compares tape gradients of `loss_fn()` against central differences for every entry (or a
/// sample) of every parameter. `loss_fn` must rebuild the graph on each call and be
/// deterministic. Parameter values are restored afterwards; their grads hold the tape result.
GradCheckReport check_gradients(const std::function<Tensor()>& loss_fn, ParameterList& params,
                                const GradCheckOptions& options = {});

}  // namespace mean
