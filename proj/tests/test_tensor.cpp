#include <doctest.h>

#include <cmath>

#include "desc/errors.hpp"
#include "desc/rng.hpp"
#include "desc/tensor.hpp"
#include "helpers.hpp"

using namespace desc::autodiff;
using desc::Rng;

namespace {

Tensor random_param(Shape shape, Rng& rng) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  std::vector<double> values(n);
  for (double& v : values) v = rng.uniform(-1.0, 1.0);
  return Tensor::parameter(std::move(shape), std::move(values));
}

}  // namespace

TEST_SUITE("tensor") {

TEST_CASE("definitional forward values") {
  const Tensor z = softmax(Tensor::constant({3}, {0, 0, 0}));
  for (double v : z.values()) CHECK(v == doctest::Approx(1.0 / 3));

  CHECK(tanh_op(Tensor::scalar(0.0)).item() == 0.0);
  CHECK(leaky_relu(Tensor::scalar(-1.0), 0.01).item() == doctest::Approx(-0.01));
  CHECK(relu(Tensor::scalar(-2.0)).item() == 0.0);
  CHECK(sigmoid(Tensor::scalar(0.0)).item() == doctest::Approx(0.5));
}

TEST_CASE("matmul shape algebra") {
  const Tensor a = Tensor::constant({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor b = Tensor::constant({3, 1}, {1, 1, 1});
  const Tensor c = matmul(a, b);
  REQUIRE(c.shape() == Shape{2, 1});
  CHECK(c.values()[0] == 6);
  CHECK(c.values()[1] == 15);

  const Tensor v = Tensor::constant({3}, {1, 0, 1});
  CHECK(matmul(a, v).shape() == Shape{2});
  const Tensor row = Tensor::constant({2}, {1, 1});
  CHECK(matmul(row, a).shape() == Shape{3});
}

TEST_CASE("shape mismatches carry both shapes") {
  const Tensor a = Tensor::constant({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor b = Tensor::constant({2, 2}, {1, 2, 3, 4});
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("(2, 3)"),
                       desc::ShapeMismatch);
  CHECK_THROWS_WITH_AS(add(a, b), doctest::Contains("(2, 2)"),
                       desc::ShapeMismatch);
}

TEST_CASE("simple analytic gradients") {
  Tensor w = Tensor::parameter({3}, {1, 2, 3});
  backward(sum(w));
  for (double g : w.grad()) CHECK(g == 1.0);

  Tensor x = Tensor::scalar(3.0, true);
  backward(elementwise_mul(x, x));
  CHECK(x.grad()[0] == doctest::Approx(6.0));
}

TEST_CASE("backward demands a scalar and accumulates until reset") {
  Tensor w = Tensor::parameter({2}, {1.0, 2.0});
  CHECK_THROWS_AS(backward(scale(2.0, w)), desc::NonScalarLoss);

  backward(sum(w));
  backward(sum(w));
  CHECK(w.grad()[0] == doctest::Approx(2.0));  // two passes accumulate
  w.zero_grad();
  backward(sum(w));
  CHECK(w.grad()[0] == doctest::Approx(1.0));
}

TEST_CASE("shared subexpressions are visited once") {
  Tensor x = Tensor::scalar(1.5, true);
  const Tensor y = add(x, x);  // diamond: dy/dx = 2
  backward(sum(y));
  CHECK(x.grad()[0] == doctest::Approx(2.0));

  Tensor z = Tensor::scalar(0.7, true);
  const Tensor t = tanh_op(z);
  const ComputationTape tape = ComputationTape::record(elementwise_mul(t, t));
  CHECK(tape.size() == 3);  // product, tanh, leaf
}

TEST_CASE("bias broadcast add routes gradients by column") {
  Tensor m = Tensor::parameter({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor b = Tensor::parameter({3}, {10, 20, 30});
  backward(sum(add(m, b)));
  for (double g : m.grad()) CHECK(g == 1.0);
  for (double g : b.grad()) CHECK(g == 2.0);  // two rows fold into each column
}

TEST_CASE("composite graph matches finite differences") {
  Rng rng(42);
  std::vector<desc::models::NamedTensor> params;
  Tensor w1 = random_param({4, 3}, rng);
  Tensor b1 = random_param({4}, rng);
  Tensor w2 = random_param({2}, rng);
  Tensor s = random_param({1}, rng);
  Tensor u = random_param({4}, rng);
  Tensor v = random_param({4}, rng);
  params.push_back({"w1", w1});
  params.push_back({"b1", b1});
  params.push_back({"w2", w2});
  params.push_back({"s", s});
  params.push_back({"u", u});
  params.push_back({"v", v});

  const Tensor x = Tensor::constant({3}, {0.3, -0.8, 0.5});
  const auto build = [&]() {
    Tensor h = tanh_op(add(matmul(w1, x), b1));
    h = leaky_relu(h, 0.05);
    Tensor g = sigmoid(elementwise_mul(h, u));
    Tensor rows = stack_rows(std::array<Tensor, 2>{g, v});
    Tensor mixed = matmul(softmax(w2), rows);  // weighted row mix
    Tensor joined = concat(mixed, smul(s, h));
    Tensor probs = softmax(joined);
    return mean(log_op(add(scale(0.5, probs), scale(0.5, sigmoid(joined)))));
  };

  const double err = testutil::max_grad_relative_error(
      [&]() { return build().item(); }, build, params);
  CHECK(err < 1e-4);
}

TEST_CASE("cross entropy agrees with the log-softmax route") {
  Rng rng(7);
  Tensor logits = random_param({5}, rng);
  std::vector<desc::models::NamedTensor> params = {{"logits", logits}};

  const auto fused = [&]() { return cross_entropy_with_logits(logits, 2); };
  const auto manual = [&]() {
    return neg(log_op(pick(softmax(logits), 2)));
  };
  CHECK(fused().item() == doctest::Approx(manual().item()).epsilon(1e-12));

  const double err = testutil::max_grad_relative_error(
      [&]() { return fused().item(); }, fused, params);
  CHECK(err < 1e-4);

  CHECK_THROWS_AS(cross_entropy_with_logits(logits, 9), desc::LabelOutOfRange);
}

TEST_CASE("softmax output sums to one") {
  Rng rng(9);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 1 + rng.below(8);
    std::vector<double> values(n);
    for (double& v : values) v = rng.uniform(-30.0, 30.0);
    const Tensor y = softmax(Tensor::constant({n}, values));
    double total = 0.0;
    for (double v : y.values()) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

}  // TEST_SUITE
