#include "itrc/fusion/mlp.hpp"

#include "itrc/numerics/ops.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace itrc::fusion {

namespace {

num::Tensor zeros(std::size_t c) {
  return num::Tensor::parameter(num::Matrix::Zero(1, static_cast<Eigen::Index>(c)));
}

void check_labels(std::span<const int> y, std::size_t classes, const char* what) {
  for (int v : y)
    if (v < 0 || static_cast<std::size_t>(v) >= classes)
      throw std::invalid_argument(std::string("train_classifier: ") + what + " label " + std::to_string(v) +
                                  " out of range");
}

num::Matrix take_rows(const num::Matrix& x, std::span<const std::size_t> rows) {
  num::Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace

void MlpConfig::validate() const {
  auto fail = [](const std::string& what) { throw num::ParameterError("classifier config: " + what); };
  if (hidden1 == 0 || hidden2 == 0) fail("hidden widths must be >= 1");
  if (classes < 2) fail("classes must be >= 2");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (batch_size == 0) fail("batch size must be >= 1");
  if (epochs == 0) fail("epochs must be >= 1");
  if (patience == 0) fail("patience must be >= 1");
  if (!(lr > 0.0)) fail("lr must be positive");
}

std::vector<num::NamedParameter> MlpClassifier::parameters() const {
  return {{"fc1.w", w1}, {"fc1.b", b1}, {"fc2.w", w2}, {"fc2.b", b2}, {"fc3.w", w3}, {"fc3.b", b3}};
}

MlpClassifier MlpClassifier::clone() const {
  MlpClassifier c;
  c.config = config;
  c.input_dim = input_dim;
  c.w1 = num::Tensor::parameter(w1.value());
  c.b1 = num::Tensor::parameter(b1.value());
  c.w2 = num::Tensor::parameter(w2.value());
  c.b2 = num::Tensor::parameter(b2.value());
  c.w3 = num::Tensor::parameter(w3.value());
  c.b3 = num::Tensor::parameter(b3.value());
  return c;
}

MlpClassifier init_mlp(const MlpConfig& cfg, std::size_t input_dim, num::SeededRng& rng) {
  cfg.validate();
  if (input_dim == 0) throw num::ParameterError("classifier: input width must be >= 1");
  MlpClassifier m;
  m.config = cfg;
  m.input_dim = input_dim;
  const auto d = static_cast<Eigen::Index>(input_dim);
  const auto h1 = static_cast<Eigen::Index>(cfg.hidden1);
  const auto h2 = static_cast<Eigen::Index>(cfg.hidden2);
  m.w1 = num::Tensor::parameter(num::glorot_uniform(d, h1, rng));
  m.b1 = zeros(cfg.hidden1);
  m.w2 = num::Tensor::parameter(num::glorot_uniform(h1, h2, rng));
  m.b2 = zeros(cfg.hidden2);
  m.w3 = num::Tensor::parameter(num::glorot_uniform(h2, static_cast<Eigen::Index>(cfg.classes), rng));
  m.b3 = zeros(cfg.classes);
  return m;
}

num::Tensor mlp_logits(const MlpClassifier& model, const num::Tensor& x, bool training, num::SeededRng& rng) {
  if (static_cast<std::size_t>(x.cols()) != model.input_dim)
    throw num::DimensionError("classifier: input " + num::shape_string(x.value()) + " but model expects " +
                              std::to_string(model.input_dim) + " columns");
  const double rate = model.config.dropout;
  auto h = num::dropout(num::relu(num::linear(x, model.w1, model.b1)), rate, rng, training);
  h = num::dropout(num::relu(num::linear(h, model.w2, model.b2)), rate, rng, training);
  return num::linear(h, model.w3, model.b3);
}

Prediction predict(const MlpClassifier& model, const num::Matrix& x) {
  num::SeededRng unused(0);
  Prediction p;
  p.probs = num::softmax_rows(mlp_logits(model, num::Tensor::constant(x), false, unused).value());
  p.labels.resize(static_cast<std::size_t>(p.probs.rows()));
  for (Eigen::Index i = 0; i < p.probs.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < p.probs.cols(); ++c)
      if (p.probs(i, c) > p.probs(i, best)) best = c;
    p.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return p;
}

double evaluate_loss(const MlpClassifier& model, const num::Matrix& x, std::span<const int> y) {
  num::SeededRng unused(0);
  auto logits = mlp_logits(model, num::Tensor::constant(x), false, unused);
  return num::softmax_cross_entropy(logits, y).loss.item();
}

MlpTrainResult train_classifier(const num::Matrix& train_x, std::span<const int> train_y,
                                const num::Matrix& val_x, std::span<const int> val_y, const MlpConfig& cfg) {
  cfg.validate();
  if (train_x.rows() == 0) throw std::invalid_argument("train_classifier: empty training set");
  if (val_x.rows() == 0) throw std::invalid_argument("train_classifier: empty validation set");
  if (static_cast<std::size_t>(train_x.rows()) != train_y.size() ||
      static_cast<std::size_t>(val_x.rows()) != val_y.size())
    throw std::invalid_argument("train_classifier: feature and label counts disagree");
  if (train_x.cols() != val_x.cols())
    throw num::DimensionError("train_classifier: train " + num::shape_string(train_x) + " vs validation " +
                              num::shape_string(val_x));
  check_labels(train_y, cfg.classes, "training");
  check_labels(val_y, cfg.classes, "validation");

  num::SeededRng init_rng(num::SeededRng::derive(cfg.seed, 1));
  num::SeededRng order_rng(num::SeededRng::derive(cfg.seed, 2));
  num::SeededRng drop_rng(num::SeededRng::derive(cfg.seed, 3));

  MlpTrainResult out;
  MlpClassifier model = init_mlp(cfg, static_cast<std::size_t>(train_x.cols()), init_rng);
  auto params = model.parameters();
  auto adam = num::make_adam_state(params);
  std::vector<std::size_t> order(static_cast<std::size_t>(train_x.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<int> batch_y;
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    const double lr = cfg.lr * num::lr_decay_factor(epoch, cfg.epochs);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      batch_y.clear();
      for (auto r : rows) batch_y.push_back(train_y[r]);
      auto logits = mlp_logits(model, num::Tensor::constant(take_rows(train_x, rows)), true, drop_rng);
      auto ce = num::softmax_cross_entropy(logits, batch_y);
      total += ce.loss.item();
      ++batches;
      num::backward(ce.loss);
      num::adam_step(params, adam, lr);
    }
    out.train_loss.push_back(total / static_cast<double>(batches));
    const double v = evaluate_loss(model, val_x, val_y);
    out.val_loss.push_back(v);
    if (v < best) {
      best = v;
      stale = 0;
      out.best_epoch = epoch;
      out.model = model.clone();
    } else if (++stale >= cfg.patience) {
      out.stopped_early = epoch + 1 < cfg.epochs;
      break;
    }
  }
  if (!out.model.w1.defined()) out.model = model.clone();  // validation loss never finite
  return out;
}

}  // namespace itrc::fusion
