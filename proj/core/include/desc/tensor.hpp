#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace desc::autodiff {

using Shape = std::vector<std::size_t>;

namespace detail {
struct Node;
struct NodeAccess;
}  // namespace detail

// Dense row-major tensor participating in a recorded computation graph.
// Copies are shallow: they share the underlying node, so a parameter tensor
// stays live across training steps while op results are released with the
// graph that produced them. Gradients accumulate across backward calls until
// zero_grad() is invoked.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor parameter(Shape shape, std::vector<double> values);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t size() const;
  std::size_t rank() const;
  bool requires_grad() const;

  std::span<const double> values() const;
  std::span<double> values_mut();  // in-place leaf updates (optimizer)
  std::span<const double> grad() const;
  std::span<double> grad_mut();    // sized on demand
  void zero_grad();
  double item() const;  // single-element tensors only

 private:
  friend struct detail::NodeAccess;
  std::shared_ptr<detail::Node> node_;
};

std::string shape_string(const Shape& shape);

// ---- forward operations with recorded backward rules ----

// (m,k)x(k,n)->(m,n); vector operands are treated as a row (left) or a
// column (right) and the unit axis is squeezed from the result.
Tensor matmul(const Tensor& a, const Tensor& b);

// same shape, or matrix + row-vector bias broadcast (either operand order)
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& x);

Tensor elementwise_mul(const Tensor& a, const Tensor& b);  // same shape
Tensor smul(const Tensor& scalar, const Tensor& x);        // scalar tensor * x
Tensor scale(double c, const Tensor& x);

Tensor concat(const Tensor& a, const Tensor& b);        // 1-D
Tensor concat_all(std::span<const Tensor> parts);       // 1-D
Tensor stack_rows(std::span<const Tensor> rows);        // T vectors -> (T, n)

Tensor tanh_op(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope);
Tensor softmax(const Tensor& x);  // 1-D; output sums to 1
Tensor log_op(const Tensor& x);

Tensor sum(const Tensor& x);   // scalar
Tensor mean(const Tensor& x);  // scalar
Tensor pick(const Tensor& x, std::size_t index);  // scalar element of a 1-D tensor

// loss = logsumexp(logits) - logits[label]; gradient is softmax - onehot
Tensor cross_entropy_with_logits(const Tensor& logits, std::size_t label);

// Reverse-topological record of the operations reaching a root tensor; the
// backward sweep visits each node exactly once.
class ComputationTape {
 public:
  static ComputationTape record(const Tensor& root);
  std::size_t size() const { return order_.size(); }
  void run_backward();

 private:
  std::shared_ptr<detail::Node> root_;
  std::vector<detail::Node*> order_;  // root first, leaves last
};

// Populates grad = d(loss)/d(tensor) for every tensor with requires_grad
// reachable from loss. Throws NonScalarLoss unless loss has a single element.
void backward(const Tensor& loss);

}  // namespace desc::autodiff
