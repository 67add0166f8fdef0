#include "mean/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace mean {

namespace {

#ifdef NDEBUG
std::atomic<bool> g_finite_checks{false};
#else
std::atomic<bool> g_finite_checks{true};
#endif

thread_local bool t_recording = true;

}  // namespace

NoGradGuard::NoGradGuard() : previous_(t_recording) { t_recording = false; }
NoGradGuard::~NoGradGuard() { t_recording = previous_; }
bool grad_recording() { return t_recording; }

void set_finite_checks(bool enabled) { g_finite_checks.store(enabled); }
bool finite_checks() { return g_finite_checks.load(std::memory_order_relaxed); }

std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
  for (auto d : shape) {
    if (d == 0) throw DimensionError("tensor dimensions must be positive, got " + shape_string(shape));
  }
  if (numel(shape) != values.size()) {
    throw DimensionError("shape " + shape_string(shape) + " needs " +
                         std::to_string(numel(shape)) + " values, got " +
                         std::to_string(values.size()));
  }
  node_ = std::make_shared<detail::Node>();
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
  node_->leaf = true;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto n = numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  auto n = numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(Shape{}, std::vector<double>{value}, requires_grad);
}

Tensor Tensor::column(std::vector<double> values, bool requires_grad) {
  auto n = values.size();
  return Tensor(Shape{n, 1}, std::move(values), requires_grad);
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows,
                      bool requires_grad) {
  if (rows.size() == 0) throw DimensionError("matrix needs at least one row");
  const auto ncols = rows.begin()->size();
  std::vector<double> values;
  values.reserve(rows.size() * ncols);
  for (const auto& row : rows) {
    if (row.size() != ncols) throw DimensionError("ragged matrix rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor(Shape{rows.size(), ncols}, std::move(values), requires_grad);
}

Tensor Tensor::identity(std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return Tensor(Shape{n, n}, std::move(v));
}

Tensor Tensor::from_node(std::shared_ptr<detail::Node> node) {
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

const Shape& Tensor::shape() const {
  if (!node_) throw std::logic_error("use of undefined tensor");
  return node_->shape;
}

std::size_t Tensor::size() const { return numel(shape()); }

std::size_t Tensor::rows() const {
  if (rank() != 2) throw DimensionError("rows() needs a matrix, got " + shape_string(shape()));
  return node_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw DimensionError("cols() needs a matrix, got " + shape_string(shape()));
  return node_->shape[1];
}

std::span<const double> Tensor::values() const {
  if (!node_) throw std::logic_error("use of undefined tensor");
  return node_->value;
}

std::span<double> Tensor::values_mut() {
  if (!node_) throw std::logic_error("use of undefined tensor");
  if (!node_->leaf) throw std::logic_error("only leaf tensors may be modified in place");
  return node_->value;
}

double Tensor::operator()(std::size_t r, std::size_t c) const {
  return node_->value[r * cols() + c];
}

double Tensor::item() const {
  if (size() != 1) throw DimensionError("item() needs a single-element tensor, got " + shape_string(shape()));
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }
bool Tensor::is_leaf() const { return node_ && node_->leaf; }
bool Tensor::has_grad() const { return node_ && !node_->grad.empty(); }

std::span<const double> Tensor::grad() const {
  if (!node_) throw std::logic_error("use of undefined tensor");
  return node_->grad;
}

std::span<double> Tensor::grad_mut() {
  if (!node_) throw std::logic_error("use of undefined tensor");
  node_->ensure_grad();
  return node_->grad;
}

void Tensor::zero_grad() {
  if (!node_) return;
  node_->grad.assign(node_->value.size(), 0.0);
}

Tensor Tensor::detach(bool requires_grad) const {
  return Tensor(shape(), node_->value, requires_grad);
}

Tape Tape::record(const Tensor& root) {
  Tape tape;
  tape.root_ = root.node_ptr();
  if (!root.requires_grad()) return tape;

  // Iterative post-order DFS restricted to nodes that require grad.
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(root.node(), 0);
  visited.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      detail::Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
      continue;
    }
    tape.order_.push_back(node);
    stack.pop_back();
  }
  return tape;
}

void Tape::run() {
  if (order_.empty()) return;
  // Interior grads are rebuilt from scratch; leaf grads accumulate.
  for (auto* node : order_) {
    if (!node->leaf) node->grad.assign(node->value.size(), 0.0);
  }
  detail::Node* root = order_.back();
  root->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    detail::Node* node = *it;
    if (node->leaf || !node->backward) continue;
    for (auto& input : node->inputs) {
      if (input->requires_grad) input->ensure_grad();
    }
    node->backward(*node);
  }
}

void backward(const Tensor& loss) {
  if (!loss.defined()) throw std::logic_error("backward on undefined tensor");
  if (loss.size() != 1) {
    throw DimensionError("backward needs a scalar loss, got shape " + shape_string(loss.shape()));
  }
  if (loss.node()->consumed) {
    throw std::logic_error("backward already ran for this loss; rebuild the graph first");
  }
  auto tape = Tape::record(loss);
  tape.run();
  loss.node()->consumed = true;
}

namespace detail {

Tensor make_result(Shape shape, std::vector<double> value,
                   std::vector<std::shared_ptr<Node>> inputs,
                   std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->leaf = false;
  node->requires_grad = t_recording && std::any_of(inputs.begin(), inputs.end(),
                                    [](const auto& n) { return n->requires_grad; });
  if (node->requires_grad) {
    node->inputs = std::move(inputs);
    node->backward = std::move(backward_fn);
  }
  return Tensor::from_node(std::move(node));
}

void check_finite(std::span<const double> values, const char* kernel) {
  if (!finite_checks()) return;
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by ") + kernel);
    }
  }
}

}  // namespace detail

}  // namespace mean
