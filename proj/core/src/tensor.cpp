#include "desc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "desc/errors.hpp"

namespace desc::autodiff {

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;  // sized lazily on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Receives the node itself; reads its grad and accumulates into parents.
  std::function<void(Node&)> backward_fn;

  std::vector<double>& ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
    return grad;
  }
};

struct NodeAccess {
  static const std::shared_ptr<Node>& get(const Tensor& t) { return t.node_; }
  static Tensor wrap(std::shared_ptr<Node> node) {
    Tensor t;
    t.node_ = std::move(node);
    return t;
  }
};

}  // namespace detail

namespace {

using detail::Node;
using detail::NodeAccess;

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::shared_ptr<Node> make_leaf(Shape shape, std::vector<double> values,
                                bool requires_grad) {
  if (shape_size(shape) != values.size()) {
    throw ShapeMismatch("value count " + std::to_string(values.size()) +
                        " does not fill shape " + shape_string(shape));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return node;
}

// An op node only records parents and a backward rule when some parent
// requires gradients; otherwise it degenerates to a constant leaf.
Tensor make_op(Shape shape, std::vector<double> values,
               std::vector<std::shared_ptr<Node>> parents,
               std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  for (const auto& p : parents) {
    if (p->requires_grad) {
      node->requires_grad = true;
      break;
    }
  }
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward_fn = std::move(backward_fn);
  }
  return NodeAccess::wrap(std::move(node));
}

const std::shared_ptr<Node>& node_of(const Tensor& t) {
  return NodeAccess::get(t);
}

void require_defined(const Tensor& t) {
  if (!t.defined()) throw ShapeMismatch("operation on an undefined tensor");
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch(std::string(op) + ": shapes " + shape_string(a.shape()) +
                        " and " + shape_string(b.shape()) + " differ");
  }
}

Tensor unary_pointwise(const Tensor& x, double (*f)(double),
                       std::function<double(double y, double xv)> dfdx) {
  require_defined(x);
  const auto& xs = node_of(x)->values;
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  auto xn = node_of(x);
  return make_op(x.shape(), std::move(out), {xn},
                 [xn, dfdx](Node& self) {
                   auto& gx = xn->ensure_grad();
                   for (std::size_t i = 0; i < gx.size(); ++i) {
                     gx[i] += self.grad[i] * dfdx(self.values[i], xn->values[i]);
                   }
                 });
}

}  // namespace

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ", ";
    out << shape[i];
  }
  out << ')';
  return out.str();
}

// ---- Tensor ----

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  return detail::NodeAccess::wrap(
      make_leaf(std::move(shape), std::move(values), false));
}

Tensor Tensor::parameter(Shape shape, std::vector<double> values) {
  return detail::NodeAccess::wrap(
      make_leaf(std::move(shape), std::move(values), true));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::vector<double> values(shape_size(shape), 0.0);
  return detail::NodeAccess::wrap(
      make_leaf(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return detail::NodeAccess::wrap(make_leaf({1}, {value}, requires_grad));
}

const Shape& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::size() const { return node_->values.size(); }
std::size_t Tensor::rank() const { return node_->shape.size(); }
bool Tensor::requires_grad() const { return node_->requires_grad; }

std::span<const double> Tensor::values() const { return node_->values; }
std::span<double> Tensor::values_mut() { return node_->values; }

std::span<const double> Tensor::grad() const {
  if (node_->grad.size() != node_->values.size()) {
    return {};  // never touched by a backward pass
  }
  return node_->grad;
}

std::span<double> Tensor::grad_mut() { return node_->ensure_grad(); }

void Tensor::zero_grad() { node_->grad.assign(node_->values.size(), 0.0); }

double Tensor::item() const {
  if (size() != 1) {
    throw ShapeMismatch("item() on tensor of shape " + shape_string(shape()));
  }
  return node_->values[0];
}

// ---- operations ----

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined(a);
  require_defined(b);
  if (a.rank() == 0 || a.rank() > 2 || b.rank() == 0 || b.rank() > 2) {
    throw ShapeMismatch("matmul: unsupported ranks " + shape_string(a.shape()) +
                        " x " + shape_string(b.shape()));
  }
  const bool a_vec = a.rank() == 1;
  const bool b_vec = b.rank() == 1;
  const std::size_t m = a_vec ? 1 : a.shape()[0];
  const std::size_t k = a_vec ? a.shape()[0] : a.shape()[1];
  const std::size_t k2 = b_vec ? b.shape()[0] : b.shape()[0];
  const std::size_t n = b_vec ? 1 : b.shape()[1];
  if (k != k2) {
    throw ShapeMismatch("matmul: inner dimensions of " + shape_string(a.shape()) +
                        " and " + shape_string(b.shape()) + " do not match");
  }

  const auto& av = node_of(a)->values;
  const auto& bv = node_of(b)->values;
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const double aval = av[i * k + l];
      if (aval == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out[i * n + j] += aval * bv[l * n + j];
      }
    }
  }

  Shape out_shape;
  if (a_vec && b_vec) {
    out_shape = {1};
  } else if (a_vec) {
    out_shape = {n};
  } else if (b_vec) {
    out_shape = {m};
  } else {
    out_shape = {m, n};
  }

  auto an = node_of(a);
  auto bn = node_of(b);
  return make_op(std::move(out_shape), std::move(out), {an, bn},
                 [an, bn, m, k, n](Node& self) {
                   const auto& g = self.grad;
                   if (an->requires_grad) {
                     auto& ga = an->ensure_grad();
                     // dA = dC * B^T
                     for (std::size_t i = 0; i < m; ++i) {
                       for (std::size_t l = 0; l < k; ++l) {
                         double acc = 0.0;
                         for (std::size_t j = 0; j < n; ++j) {
                           acc += g[i * n + j] * bn->values[l * n + j];
                         }
                         ga[i * k + l] += acc;
                       }
                     }
                   }
                   if (bn->requires_grad) {
                     auto& gb = bn->ensure_grad();
                     // dB = A^T * dC
                     for (std::size_t l = 0; l < k; ++l) {
                       for (std::size_t j = 0; j < n; ++j) {
                         double acc = 0.0;
                         for (std::size_t i = 0; i < m; ++i) {
                           acc += an->values[i * k + l] * g[i * n + j];
                         }
                         gb[l * n + j] += acc;
                       }
                     }
                   }
                 });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_defined(a);
  require_defined(b);

  // matrix + row-vector bias broadcast, in either order
  const bool broadcast_b = a.rank() == 2 && b.rank() == 1 &&
                           a.shape()[1] == b.shape()[0];
  const bool broadcast_a = b.rank() == 2 && a.rank() == 1 &&
                           b.shape()[1] == a.shape()[0];
  if (!broadcast_a && !broadcast_b) {
    require_same_shape(a, b, "add");
  }

  const Tensor& big = broadcast_a ? b : a;
  const Tensor& row = broadcast_a ? a : b;
  const auto& bigv = node_of(big)->values;
  const auto& rowv = node_of(row)->values;

  std::vector<double> out(bigv.size());
  if (broadcast_a || broadcast_b) {
    const std::size_t cols = big.shape()[1];
    for (std::size_t i = 0; i < bigv.size(); ++i) {
      out[i] = bigv[i] + rowv[i % cols];
    }
  } else {
    for (std::size_t i = 0; i < bigv.size(); ++i) out[i] = bigv[i] + rowv[i];
  }

  auto bign = node_of(big);
  auto rown = node_of(row);
  const bool broadcast = broadcast_a || broadcast_b;
  return make_op(big.shape(), std::move(out), {bign, rown},
                 [bign, rown, broadcast](Node& self) {
                   if (bign->requires_grad) {
                     auto& g = bign->ensure_grad();
                     for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                   }
                   if (rown->requires_grad) {
                     auto& g = rown->ensure_grad();
                     if (broadcast) {
                       const std::size_t cols = g.size();
                       for (std::size_t i = 0; i < self.grad.size(); ++i) {
                         g[i % cols] += self.grad[i];
                       }
                     } else {
                       for (std::size_t i = 0; i < g.size(); ++i) {
                         g[i] += self.grad[i];
                       }
                     }
                   }
                 });
}

Tensor sub(const Tensor& a, const Tensor& b) { return add(a, neg(b)); }

Tensor neg(const Tensor& x) { return scale(-1.0, x); }

Tensor elementwise_mul(const Tensor& a, const Tensor& b) {
  require_defined(a);
  require_defined(b);
  require_same_shape(a, b, "elementwise_mul");
  const auto& av = node_of(a)->values;
  const auto& bv = node_of(b)->values;
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  auto an = node_of(a);
  auto bn = node_of(b);
  return make_op(a.shape(), std::move(out), {an, bn}, [an, bn](Node& self) {
    if (an->requires_grad) {
      auto& g = an->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += self.grad[i] * bn->values[i];
      }
    }
    if (bn->requires_grad) {
      auto& g = bn->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += self.grad[i] * an->values[i];
      }
    }
  });
}

Tensor smul(const Tensor& scalar, const Tensor& x) {
  require_defined(scalar);
  require_defined(x);
  if (scalar.size() != 1) {
    throw ShapeMismatch("smul: scalar operand has shape " +
                        shape_string(scalar.shape()));
  }
  const double s = node_of(scalar)->values[0];
  const auto& xv = node_of(x)->values;
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = s * xv[i];
  auto sn = node_of(scalar);
  auto xn = node_of(x);
  return make_op(x.shape(), std::move(out), {sn, xn}, [sn, xn](Node& self) {
    if (sn->requires_grad) {
      auto& g = sn->ensure_grad();
      double acc = 0.0;
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        acc += self.grad[i] * xn->values[i];
      }
      g[0] += acc;
    }
    if (xn->requires_grad) {
      auto& g = xn->ensure_grad();
      const double s = sn->values[0];
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * s;
    }
  });
}

Tensor scale(double c, const Tensor& x) {
  require_defined(x);
  const auto& xv = node_of(x)->values;
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = c * xv[i];
  auto xn = node_of(x);
  return make_op(x.shape(), std::move(out), {xn}, [xn, c](Node& self) {
    auto& g = xn->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * c;
  });
}

Tensor concat(const Tensor& a, const Tensor& b) {
  const Tensor parts[] = {a, b};
  return concat_all(parts);
}

Tensor concat_all(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeMismatch("concat of zero tensors");
  std::vector<double> out;
  std::vector<std::shared_ptr<Node>> nodes;
  nodes.reserve(parts.size());
  for (const Tensor& p : parts) {
    require_defined(p);
    if (p.rank() != 1) {
      throw ShapeMismatch("concat expects 1-D tensors, got " +
                          shape_string(p.shape()));
    }
    const auto& v = node_of(p)->values;
    out.insert(out.end(), v.begin(), v.end());
    nodes.push_back(node_of(p));
  }
  const std::size_t total = out.size();
  auto nodes_copy = nodes;
  return make_op({total}, std::move(out), std::move(nodes),
                 [nodes_copy](Node& self) {
                   std::size_t offset = 0;
                   for (const auto& part : nodes_copy) {
                     const std::size_t len = part->values.size();
                     if (part->requires_grad) {
                       auto& g = part->ensure_grad();
                       for (std::size_t i = 0; i < len; ++i) {
                         g[i] += self.grad[offset + i];
                       }
                     }
                     offset += len;
                   }
                 });
}

Tensor stack_rows(std::span<const Tensor> rows) {
  if (rows.empty()) throw ShapeMismatch("stack_rows of zero tensors");
  const std::size_t n = rows.front().shape()[0];
  std::vector<double> out;
  out.reserve(rows.size() * n);
  std::vector<std::shared_ptr<Node>> nodes;
  for (const Tensor& r : rows) {
    require_defined(r);
    if (r.rank() != 1 || r.shape()[0] != n) {
      throw ShapeMismatch("stack_rows expects 1-D tensors of equal length, got " +
                          shape_string(r.shape()));
    }
    const auto& v = node_of(r)->values;
    out.insert(out.end(), v.begin(), v.end());
    nodes.push_back(node_of(r));
  }
  auto nodes_copy = nodes;
  return make_op({rows.size(), n}, std::move(out), std::move(nodes),
                 [nodes_copy, n](Node& self) {
                   for (std::size_t r = 0; r < nodes_copy.size(); ++r) {
                     const auto& part = nodes_copy[r];
                     if (!part->requires_grad) continue;
                     auto& g = part->ensure_grad();
                     for (std::size_t i = 0; i < n; ++i) {
                       g[i] += self.grad[r * n + i];
                     }
                   }
                 });
}

Tensor tanh_op(const Tensor& x) {
  return unary_pointwise(
      x, [](double v) { return std::tanh(v); },
      [](double y, double) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary_pointwise(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double y, double) { return y * (1.0 - y); });
}

Tensor relu(const Tensor& x) {
  return unary_pointwise(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double, double xv) { return xv > 0.0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  require_defined(x);
  const auto& xv = node_of(x)->values;
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = xv[i] > 0.0 ? xv[i] : slope * xv[i];
  }
  auto xn = node_of(x);
  return make_op(x.shape(), std::move(out), {xn}, [xn, slope](Node& self) {
    auto& g = xn->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += self.grad[i] * (xn->values[i] > 0.0 ? 1.0 : slope);
    }
  });
}

Tensor softmax(const Tensor& x) {
  require_defined(x);
  if (x.rank() != 1) {
    throw ShapeMismatch("softmax expects a 1-D tensor, got " +
                        shape_string(x.shape()));
  }
  const auto& xv = node_of(x)->values;
  const double max = *std::max_element(xv.begin(), xv.end());
  std::vector<double> out(xv.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = std::exp(xv[i] - max);
    denom += out[i];
  }
  for (double& v : out) v /= denom;
  auto xn = node_of(x);
  return make_op(x.shape(), std::move(out), {xn}, [xn](Node& self) {
    auto& g = xn->ensure_grad();
    double dot = 0.0;
    for (std::size_t i = 0; i < self.values.size(); ++i) {
      dot += self.grad[i] * self.values[i];
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += self.values[i] * (self.grad[i] - dot);
    }
  });
}

Tensor log_op(const Tensor& x) {
  return unary_pointwise(
      x, [](double v) { return std::log(v); },
      [](double, double xv) { return 1.0 / xv; });
}

Tensor sum(const Tensor& x) {
  require_defined(x);
  const auto& xv = node_of(x)->values;
  const double total = std::accumulate(xv.begin(), xv.end(), 0.0);
  auto xn = node_of(x);
  return make_op({1}, {total}, {xn}, [xn](Node& self) {
    auto& g = xn->ensure_grad();
    for (double& gi : g) gi += self.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  require_defined(x);
  return scale(1.0 / static_cast<double>(x.size()), sum(x));
}

Tensor pick(const Tensor& x, std::size_t index) {
  require_defined(x);
  if (x.rank() != 1 || index >= x.size()) {
    throw ShapeMismatch("pick: index " + std::to_string(index) +
                        " out of range for shape " + shape_string(x.shape()));
  }
  auto xn = node_of(x);
  return make_op({1}, {xn->values[index]}, {xn}, [xn, index](Node& self) {
    auto& g = xn->ensure_grad();
    g[index] += self.grad[0];
  });
}

Tensor cross_entropy_with_logits(const Tensor& logits, std::size_t label) {
  require_defined(logits);
  if (logits.rank() != 1) {
    throw ShapeMismatch("cross_entropy expects 1-D logits, got " +
                        shape_string(logits.shape()));
  }
  if (label >= logits.size()) {
    throw LabelOutOfRange("label " + std::to_string(label) +
                          " >= class count " + std::to_string(logits.size()));
  }
  const auto& lv = node_of(logits)->values;
  const double max = *std::max_element(lv.begin(), lv.end());
  double denom = 0.0;
  std::vector<double> probs(lv.size());
  for (std::size_t i = 0; i < lv.size(); ++i) {
    probs[i] = std::exp(lv[i] - max);
    denom += probs[i];
  }
  for (double& p : probs) p /= denom;
  const double loss = max + std::log(denom) - lv[label];

  auto ln = node_of(logits);
  return make_op({1}, {loss}, {ln},
                 [ln, label, probs = std::move(probs)](Node& self) {
                   auto& g = ln->ensure_grad();
                   for (std::size_t i = 0; i < g.size(); ++i) {
                     const double onehot = i == label ? 1.0 : 0.0;
                     g[i] += self.grad[0] * (probs[i] - onehot);
                   }
                 });
}

// ---- backward ----

ComputationTape ComputationTape::record(const Tensor& root) {
  ComputationTape tape;
  tape.root_ = NodeAccess::get(root);

  // iterative post-order DFS; nodes come out parents-after-children, so the
  // final list is already reverse-topological from the root
  std::unordered_set<const Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  std::vector<Node*> postorder;
  if (tape.root_ && tape.root_->requires_grad) {
    stack.emplace_back(tape.root_.get(), 0);
    visited.insert(tape.root_.get());
  }
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (next_child < node->parents.size()) {
      Node* child = node->parents[next_child].get();
      ++next_child;
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      postorder.push_back(node);
      stack.pop_back();
    }
  }
  tape.order_.assign(postorder.rbegin(), postorder.rend());
  return tape;
}

void ComputationTape::run_backward() {
  if (order_.empty()) return;
  Node* root = order_.front();
  auto& g = root->ensure_grad();
  g[0] += 1.0;
  for (Node* node : order_) {
    if (node->backward_fn) {
      node->ensure_grad();
      node->backward_fn(*node);
    }
  }
}

void backward(const Tensor& loss) {
  require_defined(loss);
  if (loss.size() != 1) {
    throw NonScalarLoss("backward requires a scalar loss, got shape " +
                        shape_string(loss.shape()));
  }
  ComputationTape::record(loss).run_backward();
}

}  // namespace desc::autodiff
