#include "mean/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mean/random.hpp"

namespace mean {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport check_gradients(const std::function<Tensor()>& loss_fn, ParameterList& params,
                                const GradCheckOptions& options) {
  for (auto& p : params) p.value.zero_grad();
  backward(loss_fn());

  GradCheckReport report;
  Rng rng(options.seed);
  for (auto& p : params) {
    TensorCheck check;
    check.name = p.name;
    const std::vector<double> analytic(p.value.grad().begin(), p.value.grad().end());
    std::vector<std::size_t> entries(p.value.size());
    std::iota(entries.begin(), entries.end(), std::size_t{0});
    if (options.max_entries_per_tensor && entries.size() > options.max_entries_per_tensor) {
      std::shuffle(entries.begin(), entries.end(), rng);
      entries.resize(options.max_entries_per_tensor);
      std::sort(entries.begin(), entries.end());
    }
    auto values = p.value.values_mut();
    NoGradGuard no_grad;
    for (auto idx : entries) {
      const double original = values[idx];
      values[idx] = original + options.step;
      const double plus = loss_fn().item();
      values[idx] = original - options.step;
      const double minus = loss_fn().item();
      values[idx] = original;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double err = relative_error(analytic[idx], numeric, options.floor);
      if (err > check.max_rel_error || check.entries_checked == 0) {
        check.max_rel_error = err;
        check.worst_index = idx;
        check.worst_analytic = analytic[idx];
        check.worst_numeric = numeric;
      }
      ++check.entries_checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.tensors.push_back(std::move(check));
  }
  report.passed = report.max_rel_error <= options.tolerance;
  return report;
}

}  // namespace mean
