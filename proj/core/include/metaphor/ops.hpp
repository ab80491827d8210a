#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "metaphor/tensor.hpp"

namespace metaphor {

// Differentiable primitives. Vectors have shape {n}, matrices {rows, cols},
// scalars shape {}. Binary pointwise ops require equal shapes; the only
// broadcast is add_bias (a vector added to every row of a matrix).

/// a{m,k} . b{k,n} -> {m,n}
Tensor matmul(const Tensor& a, const Tensor& b);

/// x . Wᵀ (+ bias). x is {k} or {n,k}, weight {m,k}, bias {m} or undefined.
/// Returns {m} or {n,m}.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias = {});

/// Adds a vector to each row of a matrix, or to a vector of the same length.
Tensor add_bias(const Tensor& x, const Tensor& bias);

enum class Pointwise { add, sub, mul };
enum class Activation { sigmoid, tanh, relu };

Tensor elementwise(const Tensor& a, const Tensor& b, Pointwise op);
Tensor elementwise(const Tensor& x, Activation f);

inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(a, b, Pointwise::add); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(a, b, Pointwise::sub); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(a, b, Pointwise::mul); }
inline Tensor sigmoid(const Tensor& x) { return elementwise(x, Activation::sigmoid); }
inline Tensor tanh(const Tensor& x) { return elementwise(x, Activation::tanh); }
inline Tensor relu(const Tensor& x) { return elementwise(x, Activation::relu); }

Tensor scale(const Tensor& x, double factor);

/// Multiplies by a fixed (non-differentiable) mask of the same size.
Tensor mask(const Tensor& x, std::vector<double> factors);

/// Numerically stable softmax of a vector (max subtracted first).
Tensor softmax(const Tensor& x);
Tensor log_softmax(const Tensor& x);

Tensor concat(std::span<const Tensor> parts);
Tensor concat(std::initializer_list<Tensor> parts);

/// Contiguous sub-vector [offset, offset+length).
Tensor slice(const Tensor& x, std::size_t offset, std::size_t length);

/// Row i of a matrix as a vector; gradient flows back into that row only.
Tensor row(const Tensor& matrix, std::size_t i);

/// Stacks equal-length vectors into a {n, d} matrix.
Tensor stack(std::span<const Tensor> rows);

Tensor reshape(const Tensor& x, Shape shape);

/// Element i of a vector as a scalar.
Tensor pick(const Tensor& x, std::size_t i);

Tensor sum(const Tensor& x);
Tensor add_all(std::span<const Tensor> scalars);
Tensor mean(std::span<const Tensor> scalars);

}  // namespace metaphor
