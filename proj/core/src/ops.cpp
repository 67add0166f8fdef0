#include "mean/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mean {

using detail::Node;
using detail::check_finite;
using detail::make_result;

namespace {

void require_matrix(const Tensor& a, const char* op) {
  if (a.rank() != 2) {
    throw DimensionError(std::string(op) + " needs a matrix, got " + shape_string(a.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shapes " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()) + " differ");
  }
}

// C[r×t] += A[r×s] · B[s×t]
void gemm_nn(const double* a, const double* b, double* c, std::size_t r, std::size_t s,
             std::size_t t) {
  for (std::size_t i = 0; i < r; ++i) {
    double* ci = c + i * t;
    for (std::size_t k = 0; k < s; ++k) {
      const double aik = a[i * s + k];
      if (aik == 0.0) continue;
      const double* bk = b + k * t;
      for (std::size_t j = 0; j < t; ++j) ci[j] += aik * bk[j];
    }
  }
}

// C[r×s] += G[r×t] · B[s×t]ᵀ
void gemm_nt(const double* g, const double* b, double* c, std::size_t r, std::size_t s,
             std::size_t t) {
  for (std::size_t i = 0; i < r; ++i) {
    const double* gi = g + i * t;
    for (std::size_t k = 0; k < s; ++k) {
      const double* bk = b + k * t;
      double acc = 0.0;
      for (std::size_t j = 0; j < t; ++j) acc += gi[j] * bk[j];
      c[i * s + k] += acc;
    }
  }
}

// C[s×t] += A[r×s]ᵀ · G[r×t]
void gemm_tn(const double* a, const double* g, double* c, std::size_t r, std::size_t s,
             std::size_t t) {
  for (std::size_t i = 0; i < r; ++i) {
    const double* gi = g + i * t;
    for (std::size_t k = 0; k < s; ++k) {
      const double aik = a[i * s + k];
      if (aik == 0.0) continue;
      double* ck = c + k * t;
      for (std::size_t j = 0; j < t; ++j) ck[j] += aik * gi[j];
    }
  }
}

template <typename Fwd, typename Deriv>
Tensor unary(const Tensor& a, const char* name, Fwd fwd, Deriv deriv) {
  const auto in = a.values();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  check_finite(out, name);
  return make_result(a.shape(), std::move(out), {a.node_ptr()}, [deriv](Node& self) {
    Node& x = *self.inputs[0];
    if (!x.requires_grad) return;
    for (std::size_t i = 0; i < x.value.size(); ++i) {
      x.grad[i] += self.grad[i] * deriv(x.value[i], self.value[i]);
    }
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t r = a.rows(), s = a.cols(), t = b.cols();
  if (b.rows() != s) {
    throw DimensionError("matmul: inner dimensions disagree for " + shape_string(a.shape()) +
                         " and " + shape_string(b.shape()));
  }
  std::vector<double> out(r * t, 0.0);
  gemm_nn(a.values().data(), b.values().data(), out.data(), r, s, t);
  check_finite(out, "matmul");
  return make_result({r, t}, std::move(out), {a.node_ptr(), b.node_ptr()},
                     [r, s, t](Node& self) {
                       Node& x = *self.inputs[0];
                       Node& y = *self.inputs[1];
                       if (x.requires_grad)
                         gemm_nt(self.grad.data(), y.value.data(), x.grad.data(), r, s, t);
                       if (y.requires_grad)
                         gemm_tn(x.value.data(), self.grad.data(), y.grad.data(), r, s, t);
                     });
}

Tensor transpose(const Tensor& a) {
  require_matrix(a, "transpose");
  const std::size_t r = a.rows(), c = a.cols();
  const auto in = a.values();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = in[i * c + j];
  return make_result({c, r}, std::move(out), {a.node_ptr()}, [r, c](Node& self) {
    Node& x = *self.inputs[0];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) x.grad[i * c + j] += self.grad[j * r + i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  const auto x = a.values(), y = b.values();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  check_finite(out, "add");
  return make_result(a.shape(), std::move(out), {a.node_ptr(), b.node_ptr()}, [](Node& self) {
    for (auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      for (std::size_t i = 0; i < self.grad.size(); ++i) in->grad[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  const auto x = a.values(), y = b.values();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  check_finite(out, "sub");
  return make_result(a.shape(), std::move(out), {a.node_ptr(), b.node_ptr()}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (x.requires_grad) x.grad[i] += self.grad[i];
      if (y.requires_grad) y.grad[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  const auto x = a.values(), y = b.values();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  check_finite(out, "mul");
  return make_result(a.shape(), std::move(out), {a.node_ptr(), b.node_ptr()}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (x.requires_grad) x.grad[i] += self.grad[i] * y.value[i];
      if (y.requires_grad) y.grad[i] += self.grad[i] * x.value[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(
      a, "scale", [factor](double v) { return v * factor; },
      [factor](double, double) { return factor; });
}

Tensor tanh(const Tensor& a) {
  return unary(
      a, "tanh", [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, "sigmoid",
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor exp(const Tensor& a) {
  return unary(
      a, "exp", [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  for (double v : a.values()) {
    if (!(v > 0.0)) throw DomainError("log of non-positive value " + std::to_string(v));
  }
  return unary(
      a, "log", [](double v) { return std::log(v); }, [](double x, double) { return 1.0 / x; });
}

Tensor square(const Tensor& a) {
  return unary(
      a, "square", [](double v) { return v * v; }, [](double x, double) { return 2.0 * x; });
}

Tensor clamp_min(const Tensor& a, double floor) {
  return unary(
      a, "clamp_min", [floor](double v) { return std::max(v, floor); },
      [floor](double x, double) { return x > floor ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.values()) total += v;
  std::vector<double> out{total};
  check_finite(out, "sum");
  return make_result({}, std::move(out), {a.node_ptr()}, [](Node& self) {
    Node& x = *self.inputs[0];
    for (double& g : x.grad) g += self.grad[0];
  });
}

Tensor sum_axis(const Tensor& a, Axis axis) {
  require_matrix(a, "sum_axis");
  const std::size_t r = a.rows(), c = a.cols();
  const auto in = a.values();
  const bool collapse_rows = axis == Axis::Rows;
  std::vector<double> out(collapse_rows ? c : r, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[collapse_rows ? j : i] += in[i * c + j];
  check_finite(out, "sum_axis");
  Shape shape = collapse_rows ? Shape{1, c} : Shape{r, 1};
  return make_result(std::move(shape), std::move(out), {a.node_ptr()},
                     [r, c, collapse_rows](Node& self) {
                       Node& x = *self.inputs[0];
                       for (std::size_t i = 0; i < r; ++i)
                         for (std::size_t j = 0; j < c; ++j)
                           x.grad[i * c + j] += self.grad[collapse_rows ? j : i];
                     });
}

Tensor mean_axis(const Tensor& a, Axis axis) {
  require_matrix(a, "mean_axis");
  const double n = static_cast<double>(axis == Axis::Rows ? a.rows() : a.cols());
  return scale(sum_axis(a, axis), 1.0 / n);
}

Tensor softmax_rows(const Tensor& x) {
  require_matrix(x, "softmax_rows");
  const std::size_t r = x.rows(), c = x.cols();
  const auto in = x.values();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = in.data() + i * c;
    const double m = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      out[i * c + j] = std::exp(row[j] - m);
      z += out[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= z;
  }
  check_finite(out, "softmax_rows");
  return make_result({r, c}, std::move(out), {x.node_ptr()}, [r, c](Node& self) {
    Node& in = *self.inputs[0];
    for (std::size_t i = 0; i < r; ++i) {
      const double* y = self.value.data() + i * c;
      const double* g = self.grad.data() + i * c;
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += y[j] * g[j];
      for (std::size_t j = 0; j < c; ++j) in.grad[i * c + j] += y[j] * (g[j] - dot);
    }
  });
}

Tensor frobenius_norm_sq(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v * v;
  std::vector<double> out{total};
  check_finite(out, "frobenius_norm_sq");
  return make_result({}, std::move(out), {x.node_ptr()}, [](Node& self) {
    Node& in = *self.inputs[0];
    for (std::size_t i = 0; i < in.value.size(); ++i) in.grad[i] += 2.0 * in.value[i] * self.grad[0];
  });
}

Tensor concat(std::span<const Tensor> parts, Axis axis) {
  if (parts.empty()) throw DimensionError("concat of zero tensors");
  for (const auto& p : parts) require_matrix(p, "concat");
  std::vector<std::shared_ptr<Node>> inputs;
  inputs.reserve(parts.size());
  if (axis == Axis::Rows) {
    const std::size_t c = parts[0].cols();
    std::size_t total_rows = 0;
    for (const auto& p : parts) {
      if (p.cols() != c) {
        throw DimensionError("concat(rows): column counts differ, " + shape_string(parts[0].shape()) +
                             " vs " + shape_string(p.shape()));
      }
      total_rows += p.rows();
      inputs.push_back(p.node_ptr());
    }
    std::vector<double> out;
    out.reserve(total_rows * c);
    for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
    return make_result({total_rows, c}, std::move(out), std::move(inputs), [](Node& self) {
      std::size_t offset = 0;
      for (auto& in : self.inputs) {
        const std::size_t n = in->value.size();
        if (in->requires_grad)
          for (std::size_t i = 0; i < n; ++i) in->grad[i] += self.grad[offset + i];
        offset += n;
      }
    });
  }
  const std::size_t r = parts[0].rows();
  std::size_t total_cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != r) {
      throw DimensionError("concat(cols): row counts differ, " + shape_string(parts[0].shape()) +
                           " vs " + shape_string(p.shape()));
    }
    total_cols += p.cols();
    inputs.push_back(p.node_ptr());
  }
  std::vector<double> out(r * total_cols);
  std::size_t col0 = 0;
  for (const auto& p : parts) {
    const std::size_t pc = p.cols();
    const auto v = p.values();
    for (std::size_t i = 0; i < r; ++i)
      std::copy_n(v.data() + i * pc, pc, out.data() + i * total_cols + col0);
    col0 += pc;
  }
  return make_result({r, total_cols}, std::move(out), std::move(inputs),
                     [r, total_cols](Node& self) {
                       std::size_t col = 0;
                       for (auto& in : self.inputs) {
                         const std::size_t pc = in->shape[1];
                         if (in->requires_grad) {
                           for (std::size_t i = 0; i < r; ++i)
                             for (std::size_t j = 0; j < pc; ++j)
                               in->grad[i * pc + j] += self.grad[i * total_cols + col + j];
                         }
                         col += pc;
                       }
                     });
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
  require_matrix(a, "slice_cols");
  const std::size_t r = a.rows(), c = a.cols();
  if (begin >= end || end > c) {
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") invalid for " + shape_string(a.shape()));
  }
  const std::size_t w = end - begin;
  const auto in = a.values();
  std::vector<double> out(r * w);
  for (std::size_t i = 0; i < r; ++i) std::copy_n(in.data() + i * c + begin, w, out.data() + i * w);
  return make_result({r, w}, std::move(out), {a.node_ptr()}, [r, c, w, begin](Node& self) {
    Node& x = *self.inputs[0];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < w; ++j) x.grad[i * c + begin + j] += self.grad[i * w + j];
  });
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end) {
  require_matrix(a, "slice_rows");
  const std::size_t r = a.rows(), c = a.cols();
  if (begin >= end || end > r) {
    throw DimensionError("slice_rows: range [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") invalid for " + shape_string(a.shape()));
  }
  const auto in = a.values();
  std::vector<double> out(in.begin() + begin * c, in.begin() + end * c);
  return make_result({end - begin, c}, std::move(out), {a.node_ptr()}, [c, begin](Node& self) {
    Node& x = *self.inputs[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) x.grad[begin * c + i] += self.grad[i];
  });
}

Tensor gather_cols(const Tensor& a, std::span<const std::size_t> indices) {
  require_matrix(a, "gather_cols");
  if (indices.empty()) throw DimensionError("gather_cols: empty index list");
  const std::size_t r = a.rows(), c = a.cols(), n = indices.size();
  for (auto idx : indices) {
    if (idx >= c) {
      throw DimensionError("gather_cols: index " + std::to_string(idx) + " out of range for " +
                           shape_string(a.shape()));
    }
  }
  const auto in = a.values();
  std::vector<double> out(r * n);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = in[i * c + indices[j]];
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return make_result({r, n}, std::move(out), {a.node_ptr()},
                     [r, c, n, idx = std::move(idx)](Node& self) {
                       Node& x = *self.inputs[0];
                       for (std::size_t i = 0; i < r; ++i)
                         for (std::size_t j = 0; j < n; ++j)
                           x.grad[i * c + idx[j]] += self.grad[i * n + j];
                     });
}

Tensor repeat_cols(const Tensor& col, std::size_t n) {
  require_matrix(col, "repeat_cols");
  if (col.cols() != 1) throw DimensionError("repeat_cols needs a column, got " + shape_string(col.shape()));
  if (n == 0) throw DimensionError("repeat_cols: zero repetitions");
  const std::size_t r = col.rows();
  const auto in = col.values();
  std::vector<double> out(r * n);
  for (std::size_t i = 0; i < r; ++i) std::fill_n(out.data() + i * n, n, in[i]);
  return make_result({r, n}, std::move(out), {col.node_ptr()}, [r, n](Node& self) {
    Node& x = *self.inputs[0];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < n; ++j) x.grad[i] += self.grad[i * n + j];
  });
}

Tensor add_col_broadcast(const Tensor& a, const Tensor& col) {
  require_matrix(a, "add_col_broadcast");
  require_matrix(col, "add_col_broadcast");
  const std::size_t r = a.rows(), c = a.cols();
  if (col.rows() != r || col.cols() != 1) {
    throw DimensionError("add_col_broadcast: " + shape_string(col.shape()) + " does not broadcast over " +
                         shape_string(a.shape()));
  }
  const auto x = a.values(), b = col.values();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = x[i * c + j] + b[i];
  check_finite(out, "add_col_broadcast");
  return make_result({r, c}, std::move(out), {a.node_ptr(), col.node_ptr()}, [r, c](Node& self) {
    Node& x = *self.inputs[0];
    Node& b = *self.inputs[1];
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        const double g = self.grad[i * c + j];
        if (x.requires_grad) x.grad[i * c + j] += g;
        if (b.requires_grad) b.grad[i] += g;
      }
    }
  });
}

Tensor pad_cols(const Tensor& a, std::size_t min_cols) {
  require_matrix(a, "pad_cols");
  const std::size_t r = a.rows(), c = a.cols();
  if (c >= min_cols) return a;
  const auto in = a.values();
  std::vector<double> out(r * min_cols, 0.0);
  for (std::size_t i = 0; i < r; ++i) std::copy_n(in.data() + i * c, c, out.data() + i * min_cols);
  return make_result({r, min_cols}, std::move(out), {a.node_ptr()}, [r, c, min_cols](Node& self) {
    Node& x = *self.inputs[0];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) x.grad[i * c + j] += self.grad[i * min_cols + j];
  });
}

Tensor unfold_cols(const Tensor& a, std::size_t window) {
  require_matrix(a, "unfold_cols");
  const std::size_t ch = a.rows(), len = a.cols();
  if (window == 0 || window > len) {
    throw DimensionError("unfold_cols: window " + std::to_string(window) + " does not fit " +
                         shape_string(a.shape()));
  }
  const std::size_t positions = len - window + 1;
  const std::size_t out_rows = ch * window;
  const auto in = a.values();
  std::vector<double> out(out_rows * positions);
  for (std::size_t k = 0; k < window; ++k)
    for (std::size_t i = 0; i < ch; ++i)
      for (std::size_t j = 0; j < positions; ++j)
        out[(k * ch + i) * positions + j] = in[i * len + j + k];
  return make_result({out_rows, positions}, std::move(out), {a.node_ptr()},
                     [ch, len, window, positions](Node& self) {
                       Node& x = *self.inputs[0];
                       for (std::size_t k = 0; k < window; ++k)
                         for (std::size_t i = 0; i < ch; ++i)
                           for (std::size_t j = 0; j < positions; ++j)
                             x.grad[i * len + j + k] += self.grad[(k * ch + i) * positions + j];
                     });
}

Tensor l2_normalize_cols(const Tensor& a, double eps) {
  require_matrix(a, "l2_normalize_cols");
  const std::size_t r = a.rows(), c = a.cols();
  const auto in = a.values();
  std::vector<double> norms(c, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) norms[j] += in[i * c + j] * in[i * c + j];
  for (auto& n : norms) n = std::sqrt(n);
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      out[i * c + j] = norms[j] < eps ? in[i * c + j] : in[i * c + j] / norms[j];
  check_finite(out, "l2_normalize_cols");
  return make_result({r, c}, std::move(out), {a.node_ptr()},
                     [r, c, eps, norms = std::move(norms)](Node& self) {
                       Node& x = *self.inputs[0];
                       // d(x/|x|) = (g - y (y·g)) / |x|
                       for (std::size_t j = 0; j < c; ++j) {
                         if (norms[j] < eps) {
                           for (std::size_t i = 0; i < r; ++i) x.grad[i * c + j] += self.grad[i * c + j];
                           continue;
                         }
                         double dot = 0.0;
                         for (std::size_t i = 0; i < r; ++i)
                           dot += self.value[i * c + j] * self.grad[i * c + j];
                         for (std::size_t i = 0; i < r; ++i)
                           x.grad[i * c + j] +=
                               (self.grad[i * c + j] - self.value[i * c + j] * dot) / norms[j];
                       }
                     });
}

Tensor apply_mask(const Tensor& a, std::span<const double> mask, double factor) {
  if (mask.size() != a.size()) {
    throw DimensionError("apply_mask: mask of " + std::to_string(mask.size()) + " entries for " +
                         shape_string(a.shape()));
  }
  const auto in = a.values();
  std::vector<double> m(mask.begin(), mask.end());
  for (auto& v : m) v *= factor;
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * m[i];
  return make_result(a.shape(), std::move(out), {a.node_ptr()}, [m = std::move(m)](Node& self) {
    Node& x = *self.inputs[0];
    for (std::size_t i = 0; i < m.size(); ++i) x.grad[i] += self.grad[i] * m[i];
  });
}

}  // namespace mean
