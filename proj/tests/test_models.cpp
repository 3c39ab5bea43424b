#include <doctest.h>

#include <cmath>
#include <sstream>

#include "desc/errors.hpp"
#include "desc/models.hpp"
#include "helpers.hpp"

using namespace desc;
using namespace desc::models;

namespace {

ModelConfig tiny_dense(std::size_t input_dim = 6, std::size_t classes = 2) {
  ModelConfig cfg;
  cfg.classes = classes;
  cfg.input_dim = input_dim;
  cfg.dnn_widths = {8, 7, 6, 5, 4};  // six affine layers with the class head
  return cfg;
}

ModelConfig tiny_sequence(std::size_t emb = 3, std::size_t classes = 2) {
  ModelConfig cfg;
  cfg.classes = classes;
  cfg.embedding_dim = emb;
  cfg.hidden_dim = 3;
  cfg.mid_dense_dim = 4;
  cfg.max_seq_len = 8;
  return cfg;
}

std::vector<std::vector<double>> random_sequence(std::size_t len, std::size_t dim,
                                                 Rng& rng) {
  std::vector<std::vector<double>> steps(len, std::vector<double>(dim));
  for (auto& step : steps) {
    for (double& v : step) v = rng.uniform(-1.0, 1.0);
  }
  return steps;
}

void zero_all(std::vector<NamedTensor> params) {
  for (auto& p : params) {
    for (double& v : p.tensor.values_mut()) v = 0.0;
  }
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("zero weights give a uniform confidence vector") {
  Rng rng(1);
  DnnModel dnn(tiny_dense(), rng);
  zero_all(dnn.parameters());
  const auto probs = dnn.predict(std::vector<double>{1, 2, 3, 4, 5, 6});
  for (double p : probs.probs) CHECK(p == doctest::Approx(0.5));

  BilstmModel bilstm(tiny_sequence(), rng);
  zero_all(bilstm.parameters());
  const auto steps = random_sequence(4, 3, rng);
  const auto probs2 = bilstm.predict(steps);
  for (double p : probs2.probs) CHECK(p == doctest::Approx(0.5));
}

TEST_CASE("dnn layer widths chain from the input to the class count") {
  Rng rng(2);
  DnnModel dnn(tiny_dense(10, 3), rng);
  const auto params = dnn.parameters();
  REQUIRE(params.size() == 12);  // 6 affine layers
  CHECK(params[0].tensor.shape() == autodiff::Shape{8, 10});
  CHECK(params[10].tensor.shape() == autodiff::Shape{3, 4});
  CHECK(dnn.predict(std::vector<double>(10, 0.1)).probs.size() == 3);

  CHECK_THROWS_AS(dnn.predict(std::vector<double>(9, 0.1)),
                  desc::DimensionMismatch);
}

TEST_CASE("sequence models reject empty and misshapen input") {
  Rng rng(3);
  BilstmModel bilstm(tiny_sequence(), rng);
  CHECK_THROWS_AS(bilstm.predict(std::vector<std::vector<double>>{}),
                  desc::EmptySequence);
  CHECK_THROWS_AS(bilstm.predict(std::vector<std::vector<double>>{{1.0, 2.0}}),
                  desc::DimensionMismatch);

  // a single step is a valid degenerate sequence
  const auto one = bilstm.predict(random_sequence(1, 3, rng));
  CHECK(one.probs.size() == 2);
  CHECK(one.probs[0] + one.probs[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reversed input mirrors the states of a single direction") {
  Rng rng(4);
  const LstmCell cell = LstmCell::init(3, 3, rng);
  const auto steps = random_sequence(5, 3, rng);

  std::vector<autodiff::Tensor> inputs, reversed;
  for (const auto& s : steps) {
    inputs.push_back(autodiff::Tensor::constant({3}, s));
  }
  for (std::size_t i = steps.size(); i > 0; --i) {
    reversed.push_back(autodiff::Tensor::constant({3}, steps[i - 1]));
  }

  const auto forward = lstm_states(cell, inputs, false);
  const auto backward_states = lstm_states(cell, reversed, true);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto a = forward[t].values();
    const auto b = backward_states[steps.size() - 1 - t].values();
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("attention weights: single step, symmetry, masking") {
  Rng rng(5);
  AttentionLstmModel model(tiny_sequence(), rng);

  const auto single = model.forward_with_attention(random_sequence(1, 3, rng));
  CHECK(single.attention[0] == doctest::Approx(1.0).epsilon(1e-12));

  const auto result = model.forward_with_attention(random_sequence(4, 3, rng));
  double total = 0.0;
  for (double a : result.attention) total += a;
  CHECK(std::abs(total - 1.0) < 1e-9);
  for (std::size_t t = 4; t < result.attention.size(); ++t) {
    CHECK(result.attention[t] == 0.0);  // masked slots, exactly
  }

  // identical states score identically, so the weights are uniform
  std::vector<std::vector<double>> states(6, {0.4, -0.2, 0.9, 0.1});
  std::vector<double> w = {0.3, -0.7, 0.2, 0.5};
  const auto uniform = attention_weights_for_states(states, w, 0.1);
  for (double a : uniform) CHECK(a == doctest::Approx(1.0 / 6).epsilon(1e-12));
}

TEST_CASE("model attention agrees with the plain-vector reference") {
  Rng rng(6);
  AttentionLstmModel model(tiny_sequence(), rng);
  const auto steps = random_sequence(5, 3, rng);
  const auto result = model.forward_with_attention(steps);

  // rebuild the hidden states the model saw, then score them independently
  std::vector<autodiff::Tensor> inputs;
  for (const auto& s : steps) inputs.push_back(autodiff::Tensor::constant({3}, s));
  const auto params = model.parameters();
  LstmCell fwd, bwd;
  autodiff::Tensor attn_w, attn_b;
  // parameters() order: f.*, b.*, attn.w, attn.b, head.W, head.b
  fwd = LstmCell{3, 3, params[0].tensor,  params[1].tensor,  params[2].tensor,
                 params[3].tensor, params[4].tensor,  params[5].tensor,
                 params[6].tensor, params[7].tensor,  params[8].tensor,
                 params[9].tensor, params[10].tensor, params[11].tensor};
  bwd = LstmCell{3, 3, params[12].tensor, params[13].tensor, params[14].tensor,
                 params[15].tensor, params[16].tensor, params[17].tensor,
                 params[18].tensor, params[19].tensor, params[20].tensor,
                 params[21].tensor, params[22].tensor, params[23].tensor};
  attn_w = params[24].tensor;
  attn_b = params[25].tensor;

  const auto f = lstm_states(fwd, inputs, false);
  const auto b = lstm_states(bwd, inputs, true);
  std::vector<std::vector<double>> hidden;
  const double slope = model.config().leaky_slope;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    std::vector<double> h;
    for (double v : f[t].values()) h.push_back(v > 0 ? v : slope * v);
    for (double v : b[t].values()) h.push_back(v > 0 ? v : slope * v);
    hidden.push_back(std::move(h));
  }
  const auto expected = attention_weights_for_states(
      hidden, attn_w.values(), attn_b.values()[0]);
  for (std::size_t t = 0; t < expected.size(); ++t) {
    CHECK(result.attention[t] == doctest::Approx(expected[t]).epsilon(1e-12));
  }
}

TEST_CASE("gradients match finite differences for all three architectures") {
  Rng rng(8);

  SUBCASE("dnn") {
    DnnModel model(tiny_dense(), rng);
    auto params = model.parameters();
    std::vector<double> input(6);
    for (double& v : input) v = rng.uniform(-1.0, 1.0);
    const auto graph = [&]() { return model.loss_graph(input, 1); };
    const double err = testutil::max_grad_relative_error(
        [&]() { return graph().item(); }, graph, params);
    CHECK(err < 1e-4);
  }
  SUBCASE("bilstm") {
    BilstmModel model(tiny_sequence(), rng);
    auto params = model.parameters();
    const auto steps = random_sequence(5, 3, rng);
    const auto graph = [&]() { return model.loss_graph(steps, 0); };
    const double err = testutil::max_grad_relative_error(
        [&]() { return graph().item(); }, graph, params);
    CHECK(err < 1e-4);
  }
  SUBCASE("attention lstm") {
    AttentionLstmModel model(tiny_sequence(), rng);
    auto params = model.parameters();
    const auto steps = random_sequence(4, 3, rng);
    const auto graph = [&]() { return model.loss_graph(steps, 1); };
    const double err = testutil::max_grad_relative_error(
        [&]() { return graph().item(); }, graph, params);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("training: null update, descent on separable data, determinism") {
  // toy set: label 1 iff the first coordinate is high
  Rng data_rng(9);
  std::vector<std::vector<double>> inputs;
  std::vector<std::size_t> labels;
  for (int i = 0; i < 40; ++i) {
    const bool hot = i % 2 == 0;
    std::vector<double> x(6);
    for (double& v : x) v = data_rng.uniform(-0.2, 0.2);
    x[0] = hot ? 1.0 + data_rng.uniform(0.0, 0.2) : -1.0 - data_rng.uniform(0.0, 0.2);
    inputs.push_back(std::move(x));
    labels.push_back(hot ? 1 : 0);
  }

  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 8;
  cfg.seed = 77;

  SUBCASE("zero learning rate leaves parameters untouched") {
    Rng rng(10);
    DnnModel model(tiny_dense(), rng);
    std::vector<std::vector<double>> before;
    for (const auto& p : model.parameters()) {
      before.emplace_back(p.tensor.values().begin(), p.tensor.values().end());
    }
    TrainConfig frozen = cfg;
    frozen.learning_rate = 0.0;
    train_model<DnnModel, std::vector<double>>(model, inputs, labels, frozen);
    const auto params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto now = params[i].tensor.values();
      for (std::size_t j = 0; j < now.size(); ++j) {
        CHECK(now[j] == before[i][j]);  // bit-for-bit
      }
    }
  }

  SUBCASE("loss strictly decreases over the first epochs") {
    Rng rng(10);
    DnnModel model(tiny_dense(), rng);
    const auto trace =
        train_model<DnnModel, std::vector<double>>(model, inputs, labels, cfg);
    REQUIRE(trace.train_loss.size() == 5);
    for (std::size_t e = 1; e < trace.train_loss.size(); ++e) {
      CHECK(trace.train_loss[e] < trace.train_loss[e - 1]);
    }
  }

  SUBCASE("the same seed reproduces the loss trace exactly") {
    Rng rng_a(10), rng_b(10);
    DnnModel a(tiny_dense(), rng_a), b(tiny_dense(), rng_b);
    const auto trace_a =
        train_model<DnnModel, std::vector<double>>(a, inputs, labels, cfg);
    const auto trace_b =
        train_model<DnnModel, std::vector<double>>(b, inputs, labels, cfg);
    REQUIRE(trace_a.train_loss.size() == trace_b.train_loss.size());
    for (std::size_t e = 0; e < trace_a.train_loss.size(); ++e) {
      CHECK(trace_a.train_loss[e] == trace_b.train_loss[e]);
    }
  }

  SUBCASE("label range and empty dataset are rejected") {
    Rng rng(10);
    DnnModel model(tiny_dense(), rng);
    std::vector<std::size_t> bad = labels;
    bad[3] = 7;
    CHECK_THROWS_AS((train_model<DnnModel, std::vector<double>>(model, inputs,
                                                                bad, cfg)),
                    desc::LabelOutOfRange);
    const std::vector<std::vector<double>> none;
    const std::vector<std::size_t> no_labels;
    CHECK_THROWS_AS((train_model<DnnModel, std::vector<double>>(
                        model, none, no_labels, cfg)),
                    desc::EmptyDataset);
  }
}

TEST_CASE("overlong sequences truncate to max_seq_len") {
  Rng rng(18);
  const auto cfg = tiny_sequence();  // max_seq_len = 8
  BilstmModel bilstm(cfg, rng);
  AttentionLstmModel attention(cfg, rng);

  const auto steps = random_sequence(12, 3, rng);
  const std::vector<std::vector<double>> head(steps.begin(), steps.begin() + 8);

  const auto full = bilstm.predict(steps);
  const auto cut = bilstm.predict(head);
  for (std::size_t c = 0; c < full.probs.size(); ++c) {
    CHECK(full.probs[c] == cut.probs[c]);
  }

  const auto att_full = attention.forward_with_attention(steps);
  const auto att_cut = attention.forward_with_attention(head);
  for (std::size_t c = 0; c < att_full.confidence.probs.size(); ++c) {
    CHECK(att_full.confidence.probs[c] == att_cut.confidence.probs[c]);
  }
  CHECK(att_full.attention.size() == cfg.max_seq_len);
}

TEST_CASE("dropout training stays deterministic and off at prediction time") {
  Rng data_rng(14);
  std::vector<std::vector<double>> inputs;
  std::vector<std::size_t> labels;
  for (int i = 0; i < 24; ++i) {
    std::vector<double> x(6);
    for (double& v : x) v = data_rng.uniform(-1.0, 1.0);
    inputs.push_back(std::move(x));
    labels.push_back(i % 2);
  }
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 8;
  cfg.seed = 5;
  cfg.dropout = 0.5;

  Rng rng_a(15), rng_b(15);
  DnnModel a(tiny_dense(), rng_a), b(tiny_dense(), rng_b);
  const auto trace_a =
      train_model<DnnModel, std::vector<double>>(a, inputs, labels, cfg);
  const auto trace_b =
      train_model<DnnModel, std::vector<double>>(b, inputs, labels, cfg);
  for (std::size_t e = 0; e < trace_a.train_loss.size(); ++e) {
    CHECK(trace_a.train_loss[e] == trace_b.train_loss[e]);
  }

  // prediction ignores dropout: two calls agree bit-for-bit
  const auto p1 = a.predict(inputs[0]);
  const auto p2 = a.predict(inputs[0]);
  for (std::size_t c = 0; c < p1.probs.size(); ++c) {
    CHECK(p1.probs[c] == p2.probs[c]);
  }
}

TEST_CASE("early stopping halts on a stale validation loss") {
  Rng data_rng(16);
  std::vector<std::vector<double>> inputs;
  std::vector<std::size_t> labels;
  for (int i = 0; i < 32; ++i) {
    std::vector<double> x(6);
    for (double& v : x) v = data_rng.uniform(-1.0, 1.0);
    inputs.push_back(std::move(x));
    labels.push_back(i % 2);  // labels unrelated to inputs: validation plateaus
  }
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch_size = 8;
  cfg.seed = 6;
  cfg.learning_rate = 0.05;
  cfg.validation_fraction = 0.25;
  cfg.patience = 2;

  Rng rng(17);
  DnnModel model(tiny_dense(), rng);
  const auto trace =
      train_model<DnnModel, std::vector<double>>(model, inputs, labels, cfg);
  CHECK(trace.epochs_run < 60);
  CHECK(trace.val_loss.size() == trace.epochs_run);
}

TEST_CASE("predict_batch preserves order and matches single predictions") {
  Rng rng(11);
  AttentionLstmModel model(tiny_sequence(), rng);
  std::vector<std::vector<std::vector<double>>> batch;
  for (int i = 0; i < 6; ++i) {
    batch.push_back(random_sequence(1 + rng.below(6), 3, rng));
  }
  const auto together = model.predict_batch(batch);
  REQUIRE(together.size() == batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto alone = model.predict(batch[i]);
    double total = 0.0;
    for (std::size_t c = 0; c < alone.probs.size(); ++c) {
      CHECK(together[i].probs[c] == alone.probs[c]);
      total += together[i].probs[c];
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
  CHECK(model.predict_batch({}).empty());
}

TEST_CASE("serialization round-trips bit-exactly for every architecture") {
  Rng rng(12);

  const auto roundtrip_predicts_identically = [&](auto& model, auto make_input) {
    std::stringstream buffer;
    model.to_params().save(buffer);
    const auto params = ModelParams::load(buffer);
    const auto restored = std::remove_reference_t<decltype(model)>::from_params(params);
    for (int i = 0; i < 10; ++i) {
      const auto input = make_input();
      const auto a = model.predict(input);
      const auto b = restored.predict(input);
      REQUIRE(a.probs.size() == b.probs.size());
      for (std::size_t c = 0; c < a.probs.size(); ++c) {
        CHECK(a.probs[c] == b.probs[c]);  // bit-for-bit
      }
    }
  };

  DnnModel dnn(tiny_dense(), rng);
  roundtrip_predicts_identically(dnn, [&]() {
    std::vector<double> x(6);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    return x;
  });

  BilstmModel bilstm(tiny_sequence(), rng);
  roundtrip_predicts_identically(bilstm, [&]() {
    return random_sequence(1 + rng.below(6), 3, rng);
  });

  AttentionLstmModel attention(tiny_sequence(), rng);
  roundtrip_predicts_identically(attention, [&]() {
    return random_sequence(1 + rng.below(6), 3, rng);
  });
}

TEST_CASE("unknown model file versions fail closed") {
  std::stringstream bad("desc-model 2\narchitecture DNN\n");
  CHECK_THROWS_AS(ModelParams::load(bad), desc::VersionMismatch);

  Rng rng(13);
  DnnModel dnn(tiny_dense(), rng);
  std::stringstream buffer;
  dnn.to_params().save(buffer);
  const auto params = ModelParams::load(buffer);
  CHECK_THROWS_AS(BilstmModel::from_params(params), desc::VersionMismatch);
}

}  // TEST_SUITE
