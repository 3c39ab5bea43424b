#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "desc/errors.hpp"
#include "desc/rng.hpp"
#include "desc/tensor.hpp"

namespace desc::models {

using autodiff::Tensor;

// Per-class probabilities; entries are non-negative and sum to 1.
struct ConfidenceVector {
  std::vector<double> probs;

  // ties break toward the lowest class id
  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    return best;
  }
};

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double clip_norm = 5.0;        // global gradient-norm clip
  double beta1 = 0.9;            // adaptive-moment coefficients
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t patience = 0;      // early stop after this many stale epochs
  double validation_fraction = 0.0;  // > 0 carves a validation split
  double dropout = 0.0;
};

struct ModelConfig {
  std::size_t classes = 2;
  // sequence models
  std::size_t embedding_dim = 0;
  std::size_t max_seq_len = 50;
  std::size_t hidden_dim = 64;      // per direction
  std::size_t mid_dense_dim = 128;  // dense layer between the two BiLSTM layers
  double leaky_slope = 0.01;
  // dense model
  std::size_t input_dim = 0;
  std::vector<std::size_t> dnn_widths = {512, 256, 128, 64, 32};
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Inverted dropout; inactive unless rng is set and p > 0.
struct Dropout {
  Rng* rng = nullptr;
  double p = 0.0;
  Tensor apply(const Tensor& x) const;
};

// ---- LSTM ----

// One direction's gate parameters. Forget-gate biases start at 1.
struct LstmCell {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Tensor w_f, w_i, w_o, w_c;  // (hidden, input)
  Tensor u_f, u_i, u_o, u_c;  // (hidden, hidden)
  Tensor b_f, b_i, b_o, b_c;  // (hidden)

  static LstmCell init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);
  void collect_parameters(const std::string& prefix,
                          std::vector<NamedTensor>& out) const;
};

// Hidden state per input position. With reverse = true the cell reads the
// sequence from the end; output[t] stays aligned to input position t, so
// output.front() is then the final state of the backward read.
std::vector<Tensor> lstm_states(const LstmCell& cell,
                                std::span<const Tensor> inputs, bool reverse);

// Reference attention computation on plain vectors: score_t = tanh(w.h_t + b),
// weights = softmax over scores. Shared contract with the attentive model and
// usable as an independent oracle.
std::vector<double> attention_weights_for_states(
    std::span<const std::vector<double>> states, std::span<const double> w,
    double b);

// ---- serialized parameter sets ----

struct RawTensor {
  std::string name;
  autodiff::Shape shape;
  std::vector<double> values;
};

struct ModelParams {
  std::string architecture;  // DNN | BILSTM | ATTLSTM
  std::size_t classes = 0;
  double leaky_slope = 0.01;
  // dense input spec
  std::size_t input_dim = 0;
  std::vector<std::string> feature_names;  // optional column names
  // sequence input spec
  std::size_t embedding_dim = 0;
  std::size_t max_seq_len = 0;
  std::vector<RawTensor> tensors;

  void save(std::ostream& out) const;
  static ModelParams load(std::istream& in);
  void save_file(const std::filesystem::path& path) const;
  static ModelParams load_file(const std::filesystem::path& path);
};

// ---- the three classifiers ----

class DnnModel {
 public:
  DnnModel() = default;
  DnnModel(ModelConfig config, Rng& rng);

  const ModelConfig& config() const { return config_; }
  Tensor logits(std::span<const double> input, const Dropout& drop = {}) const;
  Tensor loss_graph(const std::vector<double>& input, std::size_t label,
                    const Dropout& drop = {}) const;
  ConfidenceVector predict(std::span<const double> input) const;
  std::vector<ConfidenceVector> predict_batch(
      std::span<const std::vector<double>> inputs) const;

  std::vector<NamedTensor> parameters() const;
  ModelParams to_params() const;
  static DnnModel from_params(const ModelParams& params);

 private:
  ModelConfig config_;
  std::vector<Tensor> weights_;  // one (out, in) matrix per affine layer
  std::vector<Tensor> biases_;
};

class BilstmModel {
 public:
  BilstmModel() = default;
  BilstmModel(ModelConfig config, Rng& rng);

  const ModelConfig& config() const { return config_; }
  Tensor logits(std::span<const std::vector<double>> steps,
                const Dropout& drop = {}) const;
  Tensor loss_graph(const std::vector<std::vector<double>>& steps,
                    std::size_t label, const Dropout& drop = {}) const;
  ConfidenceVector predict(std::span<const std::vector<double>> steps) const;
  std::vector<ConfidenceVector> predict_batch(
      std::span<const std::vector<std::vector<double>>> inputs) const;

  std::vector<NamedTensor> parameters() const;
  ModelParams to_params() const;
  static BilstmModel from_params(const ModelParams& params);

 private:
  ModelConfig config_;
  LstmCell l1f_, l1b_, l2f_, l2b_;
  Tensor mid_w_, mid_b_;
  Tensor head_w_, head_b_;
};

struct AttentionResult {
  ConfidenceVector confidence;
  // one weight per input slot up to max_seq_len; masked slots are exactly 0
  std::vector<double> attention;
};

class AttentionLstmModel {
 public:
  AttentionLstmModel() = default;
  AttentionLstmModel(ModelConfig config, Rng& rng);

  const ModelConfig& config() const { return config_; }
  AttentionResult forward_with_attention(
      std::span<const std::vector<double>> steps, const Dropout& drop = {}) const;
  Tensor loss_graph(const std::vector<std::vector<double>>& steps,
                    std::size_t label, const Dropout& drop = {}) const;
  ConfidenceVector predict(std::span<const std::vector<double>> steps) const;
  std::vector<ConfidenceVector> predict_batch(
      std::span<const std::vector<std::vector<double>>> inputs) const;

  std::vector<NamedTensor> parameters() const;
  ModelParams to_params() const;
  static AttentionLstmModel from_params(const ModelParams& params);

 private:
  Tensor logits_graph(std::span<const std::vector<double>> steps,
                      const Dropout& drop, Tensor* attention_out) const;

  ModelConfig config_;
  LstmCell fwd_, bwd_;
  Tensor attn_w_, attn_b_;
  Tensor head_w_, head_b_;
};

// ---- shared training loop ----

struct TrainTrace {
  std::vector<double> train_loss;  // mean cross-entropy per epoch
  std::vector<double> val_loss;    // empty without a validation split
  std::size_t epochs_run = 0;
};

namespace detail {
void adam_step(std::vector<NamedTensor>& params, std::vector<std::vector<double>>& m,
               std::vector<std::vector<double>>& v, std::size_t t,
               const TrainConfig& cfg);
double clip_gradients(std::vector<NamedTensor>& params, double clip_norm);
}  // namespace detail

// Minibatch adaptive-moment gradient descent on cross-entropy. Deterministic
// given cfg.seed. Early stopping kicks in when a validation split exists,
// patience > 0, and the validation loss has not improved for more than
// `patience` epochs.
template <class Model, class Input>
TrainTrace train_model(Model& model, std::span<const Input> inputs,
                       std::span<const std::size_t> labels,
                       const TrainConfig& cfg) {
  if (inputs.size() != labels.size()) {
    throw LengthMismatch("train: " + std::to_string(inputs.size()) +
                         " inputs vs " + std::to_string(labels.size()) +
                         " labels");
  }
  if (inputs.empty()) throw EmptyDataset("train: empty dataset");
  const std::size_t classes = model.config().classes;
  for (std::size_t label : labels) {
    if (label >= classes) {
      throw LabelOutOfRange("label " + std::to_string(label) +
                            " >= class count " + std::to_string(classes));
    }
  }

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<std::size_t> val_idx;
  if (cfg.validation_fraction > 0.0) {
    rng.shuffle(order);
    std::size_t n_val = static_cast<std::size_t>(
        cfg.validation_fraction * static_cast<double>(order.size()));
    n_val = std::min(n_val, order.size() - 1);
    val_idx.assign(order.end() - n_val, order.end());
    order.resize(order.size() - n_val);
  }

  std::vector<NamedTensor> params = model.parameters();
  std::vector<std::vector<double>> m(params.size()), v(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i].assign(params[i].tensor.size(), 0.0);
    v[i].assign(params[i].tensor.size(), 0.0);
  }

  TrainTrace trace;
  std::size_t step = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, order.size());
      for (auto& p : params) p.tensor.zero_grad();

      std::vector<Tensor> losses;
      losses.reserve(end - start);
      Dropout drop{cfg.dropout > 0.0 ? &rng : nullptr, cfg.dropout};
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        Tensor loss = model.loss_graph(inputs[i], labels[i], drop);
        epoch_loss += loss.item();
        losses.push_back(std::move(loss));
      }
      Tensor batch_loss = autodiff::mean(autodiff::concat_all(losses));
      autodiff::backward(batch_loss);

      detail::clip_gradients(params, cfg.clip_norm);
      detail::adam_step(params, m, v, ++step, cfg);
    }

    trace.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    trace.epochs_run = epoch + 1;

    if (!val_idx.empty()) {
      double val_loss = 0.0;
      for (std::size_t i : val_idx) {
        val_loss += model.loss_graph(inputs[i], labels[i], {}).item();
      }
      val_loss /= static_cast<double>(val_idx.size());
      trace.val_loss.push_back(val_loss);
      if (val_loss < best_val) {
        best_val = val_loss;
        best_epoch = epoch;
      } else if (cfg.patience > 0 && epoch - best_epoch > cfg.patience) {
        break;
      }
    }
  }
  return trace;
}

}  // namespace desc::models
