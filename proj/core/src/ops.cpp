#include "metaphor/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "metaphor/errors.hpp"

namespace metaphor {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

using detail::Node;

ConstMatMap as_matrix(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
  return {v.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

MatMap as_matrix(std::vector<double>& v, std::size_t rows, std::size_t cols) {
  return {v.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

ConstVecMap as_vector(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

VecMap as_vector(std::vector<double>& v) { return {v.data(), static_cast<Eigen::Index>(v.size())}; }

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         " tensor, got " + shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
}

Node& parent(Node& self, std::size_t i) { return *self.parents[i]; }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const auto m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner dims differ for " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()));
  }
  std::vector<double> out(m * n);
  as_matrix(out, m, n).noalias() =
      as_matrix(a.node()->value, m, k) * as_matrix(b.node()->value, k, n);
  return Tensor::from_op({m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    auto& pa = parent(self, 0);
    auto& pb = parent(self, 1);
    auto dout = as_matrix(std::as_const(self.grad), m, n);
    if (pa.requires_grad)
      as_matrix(pa.grad, m, k).noalias() += dout * as_matrix(std::as_const(pb.value), k, n).transpose();
    if (pb.requires_grad)
      as_matrix(pb.grad, k, n).noalias() += as_matrix(std::as_const(pa.value), m, k).transpose() * dout;
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank(weight, 2, "linear");
  if (x.rank() != 1 && x.rank() != 2) {
    throw DimensionError("linear: input must be a vector or matrix, got " + shape_string(x.shape()));
  }
  const bool batched = x.rank() == 2;
  const auto n = batched ? x.dim(0) : 1;
  const auto k = batched ? x.dim(1) : x.dim(0);
  const auto m = weight.dim(0);
  if (weight.dim(1) != k) {
    throw DimensionError("linear: input " + shape_string(x.shape()) + " does not match weight " +
                         shape_string(weight.shape()));
  }
  if (bias.defined() && bias.shape() != Shape{m}) {
    throw DimensionError("linear: bias " + shape_string(bias.shape()) + " does not match weight " +
                         shape_string(weight.shape()));
  }
  std::vector<double> out(n * m);
  auto y = as_matrix(out, n, m);
  y.noalias() = as_matrix(x.node()->value, n, k) * as_matrix(weight.node()->value, m, k).transpose();
  if (bias.defined()) y.rowwise() += as_vector(bias.node()->value).transpose();

  std::vector<Tensor> parents{x, weight};
  if (bias.defined()) parents.push_back(bias);
  Shape shape = batched ? Shape{n, m} : Shape{m};
  return Tensor::from_op(std::move(shape), std::move(out), std::move(parents),
                         [n, k, m](Node& self) {
                           auto& px = parent(self, 0);
                           auto& pw = parent(self, 1);
                           auto dy = as_matrix(std::as_const(self.grad), n, m);
                           if (px.requires_grad)
                             as_matrix(px.grad, n, k).noalias() +=
                                 dy * as_matrix(std::as_const(pw.value), m, k);
                           if (pw.requires_grad)
                             as_matrix(pw.grad, m, k).noalias() +=
                                 dy.transpose() * as_matrix(std::as_const(px.value), n, k);
                           if (self.parents.size() > 2 && parent(self, 2).requires_grad)
                             as_vector(parent(self, 2).grad) += dy.colwise().sum().transpose();
                         });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_rank(bias, 1, "add_bias");
  if (x.rank() == 1) return add(x, bias);
  require_rank(x, 2, "add_bias");
  const auto n = x.dim(0), m = x.dim(1);
  if (bias.dim(0) != m) {
    throw DimensionError("add_bias: bias " + shape_string(bias.shape()) + " does not match rows of " +
                         shape_string(x.shape()));
  }
  std::vector<double> out = x.to_vector();
  as_matrix(out, n, m).rowwise() += as_vector(bias.node()->value).transpose();
  return Tensor::from_op({n, m}, std::move(out), {x, bias}, [n, m](Node& self) {
    auto& px = parent(self, 0);
    auto& pb = parent(self, 1);
    if (px.requires_grad) as_vector(px.grad) += as_vector(std::as_const(self.grad));
    if (pb.requires_grad)
      as_vector(pb.grad) += as_matrix(std::as_const(self.grad), n, m).colwise().sum().transpose();
  });
}

Tensor elementwise(const Tensor& a, const Tensor& b, Pointwise op) {
  require_same_shape(a, b, "elementwise");
  const auto& av = a.node()->value;
  const auto& bv = b.node()->value;
  std::vector<double> out(av.size());
  switch (op) {
    case Pointwise::add:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
      break;
    case Pointwise::sub:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
      break;
    case Pointwise::mul:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
      break;
  }
  return Tensor::from_op(a.shape(), std::move(out), {a, b}, [op](Node& self) {
    auto& pa = parent(self, 0);
    auto& pb = parent(self, 1);
    const auto& g = self.grad;
    const std::size_t n = g.size();
    switch (op) {
      case Pointwise::add:
        if (pa.requires_grad) for (std::size_t i = 0; i < n; ++i) pa.grad[i] += g[i];
        if (pb.requires_grad) for (std::size_t i = 0; i < n; ++i) pb.grad[i] += g[i];
        break;
      case Pointwise::sub:
        if (pa.requires_grad) for (std::size_t i = 0; i < n; ++i) pa.grad[i] += g[i];
        if (pb.requires_grad) for (std::size_t i = 0; i < n; ++i) pb.grad[i] -= g[i];
        break;
      case Pointwise::mul:
        // Reading the value of the other operand is safe even when pa and pb alias.
        if (pa.requires_grad) for (std::size_t i = 0; i < n; ++i) pa.grad[i] += g[i] * pb.value[i];
        if (pb.requires_grad) for (std::size_t i = 0; i < n; ++i) pb.grad[i] += g[i] * pa.value[i];
        break;
    }
  });
}

Tensor elementwise(const Tensor& x, Activation f) {
  const auto& xv = x.node()->value;
  std::vector<double> out(xv.size());
  switch (f) {
    case Activation::sigmoid:
      for (std::size_t i = 0; i < out.size(); ++i) {
        // Branches keep exp() from overflowing for large |x|.
        out[i] = xv[i] >= 0 ? 1.0 / (1.0 + std::exp(-xv[i]))
                            : std::exp(xv[i]) / (1.0 + std::exp(xv[i]));
      }
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xv[i]);
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > 0 ? xv[i] : 0.0;
      break;
  }
  return Tensor::from_op(x.shape(), std::move(out), {x}, [f](Node& self) {
    auto& px = parent(self, 0);
    const auto& y = self.value;
    const auto& g = self.grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      switch (f) {
        case Activation::sigmoid: px.grad[i] += g[i] * y[i] * (1.0 - y[i]); break;
        case Activation::tanh: px.grad[i] += g[i] * (1.0 - y[i] * y[i]); break;
        case Activation::relu: px.grad[i] += px.value[i] > 0 ? g[i] : 0.0; break;
      }
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  std::vector<double> out = x.to_vector();
  for (auto& v : out) v *= factor;
  return Tensor::from_op(x.shape(), std::move(out), {x}, [factor](Node& self) {
    auto& px = parent(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) px.grad[i] += factor * self.grad[i];
  });
}

Tensor mask(const Tensor& x, std::vector<double> factors) {
  if (factors.size() != x.size()) {
    throw DimensionError("mask: " + std::to_string(factors.size()) + " factors for tensor " +
                         shape_string(x.shape()));
  }
  std::vector<double> out = x.to_vector();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factors[i];
  return Tensor::from_op(x.shape(), std::move(out), {x},
                         [factors = std::move(factors)](Node& self) {
                           auto& px = parent(self, 0);
                           for (std::size_t i = 0; i < self.grad.size(); ++i)
                             px.grad[i] += factors[i] * self.grad[i];
                         });
}

Tensor softmax(const Tensor& x) {
  require_rank(x, 1, "softmax");
  const auto& xv = x.node()->value;
  const double mx = *std::max_element(xv.begin(), xv.end());
  std::vector<double> out(xv.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) total += out[i] = std::exp(xv[i] - mx);
  for (auto& v : out) v /= total;
  return Tensor::from_op(x.shape(), std::move(out), {x}, [](Node& self) {
    auto& px = parent(self, 0);
    const auto& y = self.value;
    const auto& g = self.grad;
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += g[i] * y[i];
    for (std::size_t i = 0; i < y.size(); ++i) px.grad[i] += y[i] * (g[i] - dot);
  });
}

Tensor log_softmax(const Tensor& x) {
  require_rank(x, 1, "log_softmax");
  const auto& xv = x.node()->value;
  const double mx = *std::max_element(xv.begin(), xv.end());
  double total = 0.0;
  for (double v : xv) total += std::exp(v - mx);
  const double log_z = mx + std::log(total);
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] - log_z;
  return Tensor::from_op(x.shape(), std::move(out), {x}, [](Node& self) {
    auto& px = parent(self, 0);
    const auto& y = self.value;
    const auto& g = self.grad;
    double gsum = 0.0;
    for (double v : g) gsum += v;
    for (std::size_t i = 0; i < y.size(); ++i) px.grad[i] += g[i] - std::exp(y[i]) * gsum;
  });
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw DomainError("concat: no parts");
  std::vector<double> out;
  std::vector<std::size_t> offsets;
  for (const auto& p : parts) {
    require_rank(p, 1, "concat");
    offsets.push_back(out.size());
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  const auto total = out.size();
  return Tensor::from_op({total}, std::move(out), {parts.begin(), parts.end()},
                         [offsets = std::move(offsets)](Node& self) {
                           for (std::size_t k = 0; k < self.parents.size(); ++k) {
                             auto& p = parent(self, k);
                             if (!p.requires_grad) continue;
                             for (std::size_t i = 0; i < p.grad.size(); ++i)
                               p.grad[i] += self.grad[offsets[k] + i];
                           }
                         });
}

Tensor concat(std::initializer_list<Tensor> parts) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor slice(const Tensor& x, std::size_t offset, std::size_t length) {
  require_rank(x, 1, "slice");
  if (length == 0 || offset + length > x.size()) {
    throw DimensionError("slice: [" + std::to_string(offset) + ", " +
                         std::to_string(offset + length) + ") out of range for " +
                         shape_string(x.shape()));
  }
  const auto data = x.data();
  std::vector<double> out(data.begin() + offset, data.begin() + offset + length);
  return Tensor::from_op({length}, std::move(out), {x}, [offset](Node& self) {
    auto& px = parent(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) px.grad[offset + i] += self.grad[i];
  });
}

Tensor row(const Tensor& matrix, std::size_t i) {
  require_rank(matrix, 2, "row");
  const auto rows = matrix.dim(0), cols = matrix.dim(1);
  if (i >= rows) {
    throw LookupError("row " + std::to_string(i) + " out of range for " +
                      shape_string(matrix.shape()));
  }
  const auto data = matrix.data();
  std::vector<double> out(data.begin() + i * cols, data.begin() + (i + 1) * cols);
  return Tensor::from_op({cols}, std::move(out), {matrix}, [i, cols](Node& self) {
    auto& pm = parent(self, 0);
    for (std::size_t j = 0; j < cols; ++j) pm.grad[i * cols + j] += self.grad[j];
  });
}

Tensor stack(std::span<const Tensor> rows) {
  if (rows.empty()) throw DomainError("stack: no rows");
  const auto width = rows.front().size();
  std::vector<double> out;
  out.reserve(rows.size() * width);
  for (const auto& r : rows) {
    require_rank(r, 1, "stack");
    if (r.size() != width) {
      throw DimensionError("stack: row " + shape_string(r.shape()) + " differs from " +
                           shape_string(rows.front().shape()));
    }
    out.insert(out.end(), r.data().begin(), r.data().end());
  }
  return Tensor::from_op({rows.size(), width}, std::move(out), {rows.begin(), rows.end()},
                         [width](Node& self) {
                           for (std::size_t k = 0; k < self.parents.size(); ++k) {
                             auto& p = parent(self, k);
                             if (!p.requires_grad) continue;
                             for (std::size_t j = 0; j < width; ++j)
                               p.grad[j] += self.grad[k * width + j];
                           }
                         });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw DimensionError("reshape: cannot view " + shape_string(x.shape()) + " as " +
                         shape_string(shape));
  }
  return Tensor::from_op(std::move(shape), x.to_vector(), {x}, [](Node& self) {
    auto& px = parent(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) px.grad[i] += self.grad[i];
  });
}

Tensor pick(const Tensor& x, std::size_t i) {
  require_rank(x, 1, "pick");
  if (i >= x.size()) {
    throw LookupError("pick: index " + std::to_string(i) + " out of range for " +
                      shape_string(x.shape()));
  }
  return Tensor::from_op({}, {x.at(i)}, {x}, [i](Node& self) {
    parent(self, 0).grad[i] += self.grad[0];
  });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return Tensor::from_op({}, {total}, {x}, [](Node& self) {
    auto& px = parent(self, 0);
    for (auto& g : px.grad) g += self.grad[0];
  });
}

Tensor add_all(std::span<const Tensor> scalars) {
  if (scalars.empty()) throw DomainError("add_all: no terms");
  double total = 0.0;
  for (const auto& s : scalars) total += s.item();
  return Tensor::from_op({}, {total}, {scalars.begin(), scalars.end()}, [](Node& self) {
    for (auto& p : self.parents) {
      if (p->requires_grad) p->grad[0] += self.grad[0];
    }
  });
}

Tensor mean(std::span<const Tensor> scalars) {
  return scale(add_all(scalars), 1.0 / static_cast<double>(scalars.size()));
}

}  // namespace metaphor
