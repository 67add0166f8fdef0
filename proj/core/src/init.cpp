#include "mean/init.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace mean {

Tensor orthogonal_init(std::size_t rows, std::size_t cols, Rng& rng, bool requires_grad) {
  const std::size_t tall = std::max(rows, cols);
  const std::size_t wide = std::min(rows, cols);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(tall, wide);
  // Fill row-major so the draw order does not depend on Eigen's storage.
  for (std::size_t i = 0; i < tall; ++i)
    for (std::size_t j = 0; j < wide; ++j) a(i, j) = gauss(rng);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall, wide);
  // Sign-fix against diag(R) so the result is uniformly distributed.
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (std::size_t j = 0; j < wide; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }

  std::vector<double> values(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      values[i * cols + j] = rows >= cols ? q(i, j) : q(j, i);
  return Tensor({rows, cols}, std::move(values), requires_grad);
}

void fill_orthogonal(Tensor& leaf, Rng& rng) {
  Tensor q = orthogonal_init(leaf.rows(), leaf.cols(), rng, false);
  auto dst = leaf.values_mut();
  std::copy(q.values().begin(), q.values().end(), dst.begin());
}

}  // namespace mean
