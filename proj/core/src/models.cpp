#include "desc/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace desc::models {

namespace {

using autodiff::Shape;

std::vector<double> xavier_uniform(std::size_t fan_in, std::size_t fan_out,
                                   std::size_t count, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> values(count);
  for (double& v : values) v = rng.uniform(-limit, limit);
  return values;
}

Tensor xavier_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  return Tensor::parameter({rows, cols}, xavier_uniform(cols, rows, rows * cols, rng));
}

Tensor const_vector(std::span<const double> values) {
  return Tensor::constant({values.size()},
                          std::vector<double>(values.begin(), values.end()));
}

Tensor affine(const Tensor& w, const Tensor& b, const Tensor& x) {
  return autodiff::add(autodiff::matmul(w, x), b);
}

ConfidenceVector probs_from_logits(const Tensor& logits) {
  const Tensor p = autodiff::softmax(logits);
  ConfidenceVector out;
  out.probs.assign(p.values().begin(), p.values().end());
  return out;
}

void check_sequence(std::span<const std::vector<double>> steps,
                    std::size_t embedding_dim) {
  if (steps.empty()) throw EmptySequence("sequence model fed zero timesteps");
  for (const auto& step : steps) {
    if (step.size() != embedding_dim) {
      throw DimensionMismatch("timestep has " + std::to_string(step.size()) +
                              " values, embedding dimension is " +
                              std::to_string(embedding_dim));
    }
  }
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const RawTensor& find_tensor(const ModelParams& params, const std::string& name) {
  for (const auto& t : params.tensors) {
    if (t.name == name) return t;
  }
  throw MalformedRow("model file is missing tensor '" + name + "'");
}

Tensor param_from_raw(const RawTensor& raw) {
  return Tensor::parameter(raw.shape, raw.values);
}

void push_raw(std::vector<RawTensor>& out, const std::string& name,
              const Tensor& t) {
  out.push_back({name,
                 t.shape(),
                 std::vector<double>(t.values().begin(), t.values().end())});
}

LstmCell cell_from_params(const ModelParams& params, const std::string& prefix) {
  LstmCell cell;
  cell.w_f = param_from_raw(find_tensor(params, prefix + ".W_f"));
  cell.w_i = param_from_raw(find_tensor(params, prefix + ".W_i"));
  cell.w_o = param_from_raw(find_tensor(params, prefix + ".W_o"));
  cell.w_c = param_from_raw(find_tensor(params, prefix + ".W_c"));
  cell.u_f = param_from_raw(find_tensor(params, prefix + ".U_f"));
  cell.u_i = param_from_raw(find_tensor(params, prefix + ".U_i"));
  cell.u_o = param_from_raw(find_tensor(params, prefix + ".U_o"));
  cell.u_c = param_from_raw(find_tensor(params, prefix + ".U_c"));
  cell.b_f = param_from_raw(find_tensor(params, prefix + ".b_f"));
  cell.b_i = param_from_raw(find_tensor(params, prefix + ".b_i"));
  cell.b_o = param_from_raw(find_tensor(params, prefix + ".b_o"));
  cell.b_c = param_from_raw(find_tensor(params, prefix + ".b_c"));
  cell.hidden_dim = cell.w_f.shape()[0];
  cell.input_dim = cell.w_f.shape()[1];
  return cell;
}

}  // namespace

// ---- Dropout ----

Tensor Dropout::apply(const Tensor& x) const {
  if (rng == nullptr || p <= 0.0) return x;
  std::vector<double> mask(x.size());
  const double keep_scale = 1.0 / (1.0 - p);
  for (double& m : mask) m = rng->uniform() < p ? 0.0 : keep_scale;
  return autodiff::elementwise_mul(
      x, Tensor::constant(x.shape(), std::move(mask)));
}

// ---- LstmCell ----

LstmCell LstmCell::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  LstmCell cell;
  cell.input_dim = input_dim;
  cell.hidden_dim = hidden_dim;
  cell.w_f = xavier_matrix(hidden_dim, input_dim, rng);
  cell.w_i = xavier_matrix(hidden_dim, input_dim, rng);
  cell.w_o = xavier_matrix(hidden_dim, input_dim, rng);
  cell.w_c = xavier_matrix(hidden_dim, input_dim, rng);
  cell.u_f = xavier_matrix(hidden_dim, hidden_dim, rng);
  cell.u_i = xavier_matrix(hidden_dim, hidden_dim, rng);
  cell.u_o = xavier_matrix(hidden_dim, hidden_dim, rng);
  cell.u_c = xavier_matrix(hidden_dim, hidden_dim, rng);
  cell.b_f = Tensor::parameter({hidden_dim}, std::vector<double>(hidden_dim, 1.0));
  cell.b_i = Tensor::zeros({hidden_dim}, true);
  cell.b_o = Tensor::zeros({hidden_dim}, true);
  cell.b_c = Tensor::zeros({hidden_dim}, true);
  return cell;
}

void LstmCell::collect_parameters(const std::string& prefix,
                                  std::vector<NamedTensor>& out) const {
  out.push_back({prefix + ".W_f", w_f});
  out.push_back({prefix + ".W_i", w_i});
  out.push_back({prefix + ".W_o", w_o});
  out.push_back({prefix + ".W_c", w_c});
  out.push_back({prefix + ".U_f", u_f});
  out.push_back({prefix + ".U_i", u_i});
  out.push_back({prefix + ".U_o", u_o});
  out.push_back({prefix + ".U_c", u_c});
  out.push_back({prefix + ".b_f", b_f});
  out.push_back({prefix + ".b_i", b_i});
  out.push_back({prefix + ".b_o", b_o});
  out.push_back({prefix + ".b_c", b_c});
}

std::vector<Tensor> lstm_states(const LstmCell& cell,
                                std::span<const Tensor> inputs, bool reverse) {
  const std::size_t n = inputs.size();
  std::vector<Tensor> states(n);
  Tensor h = Tensor::zeros({cell.hidden_dim});
  Tensor c = Tensor::zeros({cell.hidden_dim});
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = reverse ? n - 1 - k : k;
    const Tensor& x = inputs[t];
    using namespace autodiff;
    const Tensor f = sigmoid(add(add(matmul(cell.w_f, x), matmul(cell.u_f, h)), cell.b_f));
    const Tensor i = sigmoid(add(add(matmul(cell.w_i, x), matmul(cell.u_i, h)), cell.b_i));
    const Tensor o = sigmoid(add(add(matmul(cell.w_o, x), matmul(cell.u_o, h)), cell.b_o));
    const Tensor g = tanh_op(add(add(matmul(cell.w_c, x), matmul(cell.u_c, h)), cell.b_c));
    c = add(elementwise_mul(f, c), elementwise_mul(i, g));
    h = elementwise_mul(o, tanh_op(c));
    states[t] = h;
  }
  return states;
}

std::vector<double> attention_weights_for_states(
    std::span<const std::vector<double>> states, std::span<const double> w,
    double b) {
  std::vector<double> scores(states.size());
  for (std::size_t t = 0; t < states.size(); ++t) {
    double dot = b;
    for (std::size_t j = 0; j < w.size(); ++j) dot += w[j] * states[t][j];
    scores[t] = std::tanh(dot);
  }
  const double max = *std::max_element(scores.begin(), scores.end());
  double denom = 0.0;
  std::vector<double> weights(scores.size());
  for (std::size_t t = 0; t < scores.size(); ++t) {
    weights[t] = std::exp(scores[t] - max);
    denom += weights[t];
  }
  for (double& a : weights) a /= denom;
  return weights;
}

// ---- ModelParams serialization ----

void ModelParams::save(std::ostream& out) const {
  out << "desc-model 1\n";
  out << "architecture " << architecture << "\n";
  out << "classes " << classes << "\n";
  out << "leaky_slope " << format_real(leaky_slope) << "\n";
  if (architecture == "DNN") {
    out << "input features " << input_dim << "\n";
    out << "names " << feature_names.size() << "\n";
    for (const auto& name : feature_names) out << name << "\n";
  } else {
    out << "input sequence " << embedding_dim << " " << max_seq_len << "\n";
  }
  out << "tensors " << tensors.size() << "\n";
  for (const auto& t : tensors) {
    out << "tensor " << t.name << " " << t.shape.size();
    for (std::size_t d : t.shape) out << " " << d;
    out << "\n";
    if (t.shape.size() == 2) {
      const std::size_t cols = t.shape[1];
      for (std::size_t r = 0; r < t.shape[0]; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          out << (c == 0 ? "" : " ") << format_real(t.values[r * cols + c]);
        }
        out << "\n";
      }
    } else {
      for (std::size_t i = 0; i < t.values.size(); ++i) {
        out << (i == 0 ? "" : " ") << format_real(t.values[i]);
      }
      out << "\n";
    }
  }
  out << "end\n";
}

ModelParams ModelParams::load(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "desc-model 1") {
    throw VersionMismatch("unsupported model file header: '" + header + "'");
  }

  ModelParams params;
  std::string key;
  in >> key >> params.architecture;
  if (key != "architecture") throw MalformedRow("model file: expected architecture");
  in >> key >> params.classes;
  if (key != "classes") throw MalformedRow("model file: expected classes");
  if (params.classes < 2) throw MalformedRow("model file: class count < 2");
  in >> key >> params.leaky_slope;
  if (key != "leaky_slope") throw MalformedRow("model file: expected leaky_slope");

  std::string input_kind;
  in >> key >> input_kind;
  if (key != "input") throw MalformedRow("model file: expected input spec");
  if (input_kind == "features") {
    in >> params.input_dim;
    std::size_t n_names = 0;
    in >> key >> n_names;
    if (key != "names") throw MalformedRow("model file: expected names");
    in.ignore();
    params.feature_names.resize(n_names);
    for (auto& name : params.feature_names) {
      if (!std::getline(in, name)) throw MalformedRow("model file: truncated names");
      if (!name.empty() && name.back() == '\r') name.pop_back();
    }
  } else if (input_kind == "sequence") {
    in >> params.embedding_dim >> params.max_seq_len;
  } else {
    throw MalformedRow("model file: unknown input kind '" + input_kind + "'");
  }

  std::size_t n_tensors = 0;
  in >> key >> n_tensors;
  if (key != "tensors") throw MalformedRow("model file: expected tensor count");
  params.tensors.reserve(n_tensors);
  for (std::size_t i = 0; i < n_tensors; ++i) {
    RawTensor t;
    std::size_t rank = 0;
    in >> key >> t.name >> rank;
    if (key != "tensor" || rank == 0 || rank > 2) {
      throw MalformedRow("model file: malformed tensor entry");
    }
    t.shape.resize(rank);
    std::size_t count = 1;
    for (auto& d : t.shape) {
      in >> d;
      count *= d;
    }
    t.values.resize(count);
    for (auto& v : t.values) {
      if (!(in >> v)) throw MalformedRow("model file: truncated tensor values");
    }
    params.tensors.push_back(std::move(t));
  }
  in >> key;
  if (key != "end") throw MalformedRow("model file: missing end marker");
  return params;
}

void ModelParams::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot create " + path.string());
  save(out);
}

ModelParams ModelParams::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open " + path.string());
  return load(in);
}

// ---- DnnModel ----

DnnModel::DnnModel(ModelConfig config, Rng& rng) : config_(std::move(config)) {
  std::size_t in_dim = config_.input_dim;
  std::vector<std::size_t> widths = config_.dnn_widths;
  widths.push_back(config_.classes);
  for (std::size_t width : widths) {
    weights_.push_back(xavier_matrix(width, in_dim, rng));
    biases_.push_back(Tensor::zeros({width}, true));
    in_dim = width;
  }
}

Tensor DnnModel::logits(std::span<const double> input, const Dropout& drop) const {
  if (input.size() != config_.input_dim) {
    throw DimensionMismatch("dense input has " + std::to_string(input.size()) +
                            " values, model expects " +
                            std::to_string(config_.input_dim));
  }
  Tensor x = const_vector(input);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    x = affine(weights_[l], biases_[l], x);
    if (l + 1 < weights_.size()) {
      x = autodiff::relu(x);
      x = drop.apply(x);
    }
  }
  return x;
}

Tensor DnnModel::loss_graph(const std::vector<double>& input, std::size_t label,
                            const Dropout& drop) const {
  return autodiff::cross_entropy_with_logits(logits(input, drop), label);
}

ConfidenceVector DnnModel::predict(std::span<const double> input) const {
  return probs_from_logits(logits(input));
}

std::vector<ConfidenceVector> DnnModel::predict_batch(
    std::span<const std::vector<double>> inputs) const {
  std::vector<ConfidenceVector> out;
  out.reserve(inputs.size());
  for (const auto& input : inputs) out.push_back(predict(input));
  return out;
}

std::vector<NamedTensor> DnnModel::parameters() const {
  std::vector<NamedTensor> out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.push_back({"layer" + std::to_string(l) + ".W", weights_[l]});
    out.push_back({"layer" + std::to_string(l) + ".b", biases_[l]});
  }
  return out;
}

ModelParams DnnModel::to_params() const {
  ModelParams params;
  params.architecture = "DNN";
  params.classes = config_.classes;
  params.leaky_slope = config_.leaky_slope;
  params.input_dim = config_.input_dim;
  for (const auto& named : parameters()) push_raw(params.tensors, named.name, named.tensor);
  return params;
}

DnnModel DnnModel::from_params(const ModelParams& params) {
  if (params.architecture != "DNN") {
    throw VersionMismatch("expected a DNN model file, found " + params.architecture);
  }
  DnnModel model;
  model.config_.classes = params.classes;
  model.config_.leaky_slope = params.leaky_slope;
  model.config_.input_dim = params.input_dim;
  model.config_.dnn_widths.clear();
  for (std::size_t l = 0;; ++l) {
    const std::string prefix = "layer" + std::to_string(l);
    bool found = false;
    for (const auto& t : params.tensors) {
      if (t.name == prefix + ".W") {
        found = true;
        break;
      }
    }
    if (!found) break;
    model.weights_.push_back(param_from_raw(find_tensor(params, prefix + ".W")));
    model.biases_.push_back(param_from_raw(find_tensor(params, prefix + ".b")));
    model.config_.dnn_widths.push_back(model.weights_.back().shape()[0]);
  }
  if (model.weights_.empty()) throw MalformedRow("DNN model file has no layers");
  model.config_.dnn_widths.pop_back();  // last width is the class count
  return model;
}

// ---- BilstmModel ----

BilstmModel::BilstmModel(ModelConfig config, Rng& rng) : config_(std::move(config)) {
  const std::size_t h = config_.hidden_dim;
  l1f_ = LstmCell::init(config_.embedding_dim, h, rng);
  l1b_ = LstmCell::init(config_.embedding_dim, h, rng);
  mid_w_ = xavier_matrix(config_.mid_dense_dim, 2 * h, rng);
  mid_b_ = Tensor::zeros({config_.mid_dense_dim}, true);
  l2f_ = LstmCell::init(config_.mid_dense_dim, h, rng);
  l2b_ = LstmCell::init(config_.mid_dense_dim, h, rng);
  head_w_ = xavier_matrix(config_.classes, 2 * h, rng);
  head_b_ = Tensor::zeros({config_.classes}, true);
}

Tensor BilstmModel::logits(std::span<const std::vector<double>> steps,
                           const Dropout& drop) const {
  check_sequence(steps, config_.embedding_dim);
  const std::size_t n = std::min<std::size_t>(steps.size(), config_.max_seq_len);

  std::vector<Tensor> inputs;
  inputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) inputs.push_back(const_vector(steps[t]));

  using namespace autodiff;
  const std::vector<Tensor> f1 = lstm_states(l1f_, inputs, false);
  const std::vector<Tensor> b1 = lstm_states(l1b_, inputs, true);

  std::vector<Tensor> mid;
  mid.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    Tensor h = concat(f1[t], b1[t]);
    Tensor m = leaky_relu(affine(mid_w_, mid_b_, h), config_.leaky_slope);
    mid.push_back(drop.apply(m));
  }

  const std::vector<Tensor> f2 = lstm_states(l2f_, mid, false);
  const std::vector<Tensor> b2 = lstm_states(l2b_, mid, true);
  // final states of both reads: forward ends at the last position, the
  // backward read ends at position 0
  Tensor final_state = drop.apply(concat(f2.back(), b2.front()));
  return affine(head_w_, head_b_, final_state);
}

Tensor BilstmModel::loss_graph(const std::vector<std::vector<double>>& steps,
                               std::size_t label, const Dropout& drop) const {
  return autodiff::cross_entropy_with_logits(logits(steps, drop), label);
}

ConfidenceVector BilstmModel::predict(
    std::span<const std::vector<double>> steps) const {
  return probs_from_logits(logits(steps));
}

std::vector<ConfidenceVector> BilstmModel::predict_batch(
    std::span<const std::vector<std::vector<double>>> inputs) const {
  std::vector<ConfidenceVector> out;
  out.reserve(inputs.size());
  for (const auto& steps : inputs) out.push_back(predict(steps));
  return out;
}

std::vector<NamedTensor> BilstmModel::parameters() const {
  std::vector<NamedTensor> out;
  l1f_.collect_parameters("l1f", out);
  l1b_.collect_parameters("l1b", out);
  out.push_back({"mid.W", mid_w_});
  out.push_back({"mid.b", mid_b_});
  l2f_.collect_parameters("l2f", out);
  l2b_.collect_parameters("l2b", out);
  out.push_back({"head.W", head_w_});
  out.push_back({"head.b", head_b_});
  return out;
}

ModelParams BilstmModel::to_params() const {
  ModelParams params;
  params.architecture = "BILSTM";
  params.classes = config_.classes;
  params.leaky_slope = config_.leaky_slope;
  params.embedding_dim = config_.embedding_dim;
  params.max_seq_len = config_.max_seq_len;
  for (const auto& named : parameters()) push_raw(params.tensors, named.name, named.tensor);
  return params;
}

BilstmModel BilstmModel::from_params(const ModelParams& params) {
  if (params.architecture != "BILSTM") {
    throw VersionMismatch("expected a BILSTM model file, found " +
                          params.architecture);
  }
  BilstmModel model;
  model.config_.classes = params.classes;
  model.config_.leaky_slope = params.leaky_slope;
  model.config_.embedding_dim = params.embedding_dim;
  model.config_.max_seq_len = params.max_seq_len;
  model.l1f_ = cell_from_params(params, "l1f");
  model.l1b_ = cell_from_params(params, "l1b");
  model.mid_w_ = param_from_raw(find_tensor(params, "mid.W"));
  model.mid_b_ = param_from_raw(find_tensor(params, "mid.b"));
  model.l2f_ = cell_from_params(params, "l2f");
  model.l2b_ = cell_from_params(params, "l2b");
  model.head_w_ = param_from_raw(find_tensor(params, "head.W"));
  model.head_b_ = param_from_raw(find_tensor(params, "head.b"));
  model.config_.hidden_dim = model.l1f_.hidden_dim;
  model.config_.mid_dense_dim = model.mid_w_.shape()[0];
  return model;
}

// ---- AttentionLstmModel ----

AttentionLstmModel::AttentionLstmModel(ModelConfig config, Rng& rng)
    : config_(std::move(config)) {
  const std::size_t h = config_.hidden_dim;
  fwd_ = LstmCell::init(config_.embedding_dim, h, rng);
  bwd_ = LstmCell::init(config_.embedding_dim, h, rng);
  attn_w_ = Tensor::parameter({2 * h}, xavier_uniform(2 * h, 1, 2 * h, rng));
  attn_b_ = Tensor::zeros({1}, true);
  head_w_ = xavier_matrix(config_.classes, 2 * h, rng);
  head_b_ = Tensor::zeros({config_.classes}, true);
}

Tensor AttentionLstmModel::logits_graph(std::span<const std::vector<double>> steps,
                                        const Dropout& drop,
                                        Tensor* attention_out) const {
  check_sequence(steps, config_.embedding_dim);
  const std::size_t n = std::min<std::size_t>(steps.size(), config_.max_seq_len);

  std::vector<Tensor> inputs;
  inputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) inputs.push_back(const_vector(steps[t]));

  using namespace autodiff;
  const std::vector<Tensor> f = lstm_states(fwd_, inputs, false);
  const std::vector<Tensor> b = lstm_states(bwd_, inputs, true);

  std::vector<Tensor> hidden;
  hidden.reserve(n);
  std::vector<Tensor> scores;
  scores.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    Tensor h = leaky_relu(concat(f[t], b[t]), config_.leaky_slope);
    scores.push_back(tanh_op(add(matmul(attn_w_, h), attn_b_)));
    hidden.push_back(std::move(h));
  }

  // attention over real timesteps only; padded slots never enter the softmax
  Tensor weights = softmax(concat_all(scores));
  if (attention_out != nullptr) *attention_out = weights;
  Tensor summary = matmul(weights, stack_rows(hidden));
  summary = drop.apply(summary);
  return affine(head_w_, head_b_, summary);
}

AttentionResult AttentionLstmModel::forward_with_attention(
    std::span<const std::vector<double>> steps, const Dropout& drop) const {
  Tensor weights;
  const Tensor logit = logits_graph(steps, drop, &weights);
  AttentionResult result;
  result.confidence = probs_from_logits(logit);
  result.attention.assign(config_.max_seq_len, 0.0);
  const auto values = weights.values();
  for (std::size_t t = 0; t < values.size(); ++t) result.attention[t] = values[t];
  return result;
}

Tensor AttentionLstmModel::loss_graph(const std::vector<std::vector<double>>& steps,
                                      std::size_t label, const Dropout& drop) const {
  return autodiff::cross_entropy_with_logits(logits_graph(steps, drop, nullptr),
                                             label);
}

ConfidenceVector AttentionLstmModel::predict(
    std::span<const std::vector<double>> steps) const {
  return probs_from_logits(logits_graph(steps, {}, nullptr));
}

std::vector<ConfidenceVector> AttentionLstmModel::predict_batch(
    std::span<const std::vector<std::vector<double>>> inputs) const {
  std::vector<ConfidenceVector> out;
  out.reserve(inputs.size());
  for (const auto& steps : inputs) out.push_back(predict(steps));
  return out;
}

std::vector<NamedTensor> AttentionLstmModel::parameters() const {
  std::vector<NamedTensor> out;
  fwd_.collect_parameters("f", out);
  bwd_.collect_parameters("b", out);
  out.push_back({"attn.w", attn_w_});
  out.push_back({"attn.b", attn_b_});
  out.push_back({"head.W", head_w_});
  out.push_back({"head.b", head_b_});
  return out;
}

ModelParams AttentionLstmModel::to_params() const {
  ModelParams params;
  params.architecture = "ATTLSTM";
  params.classes = config_.classes;
  params.leaky_slope = config_.leaky_slope;
  params.embedding_dim = config_.embedding_dim;
  params.max_seq_len = config_.max_seq_len;
  for (const auto& named : parameters()) push_raw(params.tensors, named.name, named.tensor);
  return params;
}

AttentionLstmModel AttentionLstmModel::from_params(const ModelParams& params) {
  if (params.architecture != "ATTLSTM") {
    throw VersionMismatch("expected an ATTLSTM model file, found " +
                          params.architecture);
  }
  AttentionLstmModel model;
  model.config_.classes = params.classes;
  model.config_.leaky_slope = params.leaky_slope;
  model.config_.embedding_dim = params.embedding_dim;
  model.config_.max_seq_len = params.max_seq_len;
  model.fwd_ = cell_from_params(params, "f");
  model.bwd_ = cell_from_params(params, "b");
  model.attn_w_ = param_from_raw(find_tensor(params, "attn.w"));
  model.attn_b_ = param_from_raw(find_tensor(params, "attn.b"));
  model.head_w_ = param_from_raw(find_tensor(params, "head.W"));
  model.head_b_ = param_from_raw(find_tensor(params, "head.b"));
  model.config_.hidden_dim = model.fwd_.hidden_dim;
  return model;
}

// ---- optimizer pieces shared by the training template ----

namespace detail {

double clip_gradients(std::vector<NamedTensor>& params, double clip_norm) {
  double norm_sq = 0.0;
  for (auto& p : params) {
    for (double g : p.tensor.grad()) norm_sq += g * g;
  }
  const double norm = std::sqrt(norm_sq);
  if (clip_norm > 0.0 && norm > clip_norm) {
    const double scale = clip_norm / norm;
    for (auto& p : params) {
      for (double& g : p.tensor.grad_mut()) g *= scale;
    }
  }
  return norm;
}

void adam_step(std::vector<NamedTensor>& params, std::vector<std::vector<double>>& m,
               std::vector<std::vector<double>>& v, std::size_t t,
               const TrainConfig& cfg) {
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = params[i].tensor.values_mut();
    const auto grads = params[i].tensor.grad();
    if (grads.empty()) continue;
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = grads[j];
      m[i][j] = cfg.beta1 * m[i][j] + (1.0 - cfg.beta1) * g;
      v[i][j] = cfg.beta2 * v[i][j] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[i][j] / bias1;
      const double v_hat = v[i][j] / bias2;
      values[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    }
  }
}

}  // namespace detail

}  // namespace desc::models
