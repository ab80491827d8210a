#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace metaphor {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

// One vertex of the define-by-run graph. Leaves (parameters, constants) have
// no backward function; interior nodes propagate their grad into parents.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;
};

}  // namespace detail

/// Handle to a node of the computation graph. Copies share the same node, so a
/// tensor captured by several ops accumulates gradient from all of them.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor parameter(Shape shape, std::vector<double> values);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  /// Builds an interior node. When no parent requires a gradient the result is
  /// a plain constant and the graph below it is dropped.
  static Tensor from_op(Shape shape, std::vector<double> values, std::vector<Tensor> parents,
                        std::function<void(detail::Node&)> backward);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  std::size_t dim(std::size_t axis) const;

  std::span<const double> data() const;
  std::span<double> mutable_data() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad() const;

  double item() const;
  double at(std::size_t i) const { return data()[i]; }
  std::vector<double> to_vector() const;

  bool requires_grad() const;
  bool is_leaf() const;
  void zero_grad() const;

  /// Detached copy of the values (no graph, no grad).
  Tensor detach() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  std::shared_ptr<detail::Node> node_;
};

/// Reverse-mode sweep from a scalar loss. Leaf gradients accumulate across
/// calls; interior gradients are reset at the start of every sweep.
void backward(const Tensor& loss);

void zero_grads(std::span<const Tensor> params);

}  // namespace metaphor
