#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mean {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Operand shapes are incompatible with the requested kernel.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of a kernel (e.g. log of a non-positive value).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A kernel produced NaN or Inf while finite checks were enabled.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Post-kernel NaN/Inf checks. Enabled by default in debug builds, off when NDEBUG is set.
void set_finite_checks(bool enabled);
bool finite_checks();

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  bool leaf = true;
  bool consumed = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into the grads of `inputs`.
  std::function<void(Node&)> backward;

  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
  }
};

}  // namespace detail

/// Dense row-major tensor of doubles participating in a define-by-run gradient graph.
///
/// A Tensor is a cheap handle; copies share the same node. Values are fixed once a
/// tensor is produced by a kernel. Leaves (parameters) may be updated in place between
/// graph constructions via `values_mut()`.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  /// n×1 column vector.
  static Tensor column(std::vector<double> values, bool requires_grad = false);
  /// Row-major matrix from nested rows; all rows must have equal length.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows,
                       bool requires_grad = false);
  static Tensor identity(std::size_t n);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  /// Rank-2 accessors; throw DimensionError on other ranks.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const;
  std::span<double> values_mut();
  double operator()(std::size_t r, std::size_t c) const;
  double operator[](std::size_t i) const { return values()[i]; }
  double item() const;

  bool requires_grad() const;
  bool is_leaf() const;
  bool has_grad() const;
  /// Gradient buffer; empty span when no gradient has been accumulated.
  std::span<const double> grad() const;
  std::span<double> grad_mut();
  void zero_grad();

  /// Copy of the values as a fresh leaf with no history.
  Tensor detach(bool requires_grad = false) const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

  static Tensor from_node(std::shared_ptr<detail::Node> node);

 private:
  std::shared_ptr<detail::Node> node_;
};

/// Topologically ordered list of the grad-requiring nodes reachable from a root.
/// Every node's inputs precede it; each node appears once.
class Tape {
 public:
  static Tape record(const Tensor& root);

  std::size_t size() const { return order_.size(); }
  std::span<detail::Node* const> nodes() const { return order_; }
  /// Seeds d(root)/d(root) = 1 and runs every backward rule in reverse order.
  void run();

 private:
  std::vector<detail::Node*> order_;
  std::shared_ptr<detail::Node> root_;
};

/// Accumulates d(loss)/d(leaf) into every reachable leaf with requires_grad.
///
/// `loss` must hold exactly one value. A given loss may be back-propagated once;
/// a second call throws std::logic_error. Leaf gradients accumulate across calls
/// on different losses until `zero_grad()`.
void backward(const Tensor& loss);

/// While alive, kernels on this thread record no backward rules (results never require grad).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_recording();

namespace detail {

/// Creates a non-leaf result. `backward_fn` is kept only when an input requires grad.
Tensor make_result(Shape shape, std::vector<double> value,
                   std::vector<std::shared_ptr<Node>> inputs,
                   std::function<void(Node&)> backward_fn);

void check_finite(std::span<const double> values, const char* kernel);

}  // namespace detail

}  // namespace mean
