#include "itrc/gcn/gcn.hpp"

#include "itrc/numerics/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace itrc::gcn {

namespace {

std::vector<int> argmax_rows(const num::Matrix& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probs.cols(); ++c)
      if (probs(i, c) > probs(i, best)) best = c;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

num::Tensor zeros(std::size_t r, std::size_t c) {
  return num::Tensor::parameter(
      num::Matrix::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
}

}  // namespace

void GcnConfig::validate() const {
  auto fail = [](const std::string& what) { throw num::ParameterError("gcn config: " + what); };
  if (layers == 0) fail("layers must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must be in [0, 1]");
  if (!(lambda >= 0.0)) fail("lambda must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (!std::isfinite(leaky_slope)) fail("leaky slope must be finite");
  if (out_dim == 0) fail("out_dim must be >= 1");
  if (classes < 2) fail("classes must be >= 2");
  if (epochs == 0) fail("epochs must be >= 1");
  if (!(lr > 0.0)) fail("lr must be positive");
}

double layer_beta(double lambda, std::size_t l) {
  if (l == 0) throw num::ParameterError("layer_beta: layers are counted from 1");
  return std::log(lambda / static_cast<double>(l) + 1.0);
}

num::Tensor gcn2conv(const num::Tensor& h, const num::Tensor& h0,
                     const std::shared_ptr<const num::SparseMatrix>& p, const num::Tensor& w,
                     double alpha, double beta) {
  if (h.rows() != h0.rows() || h.cols() != h0.cols())
    throw num::DimensionError("gcn2conv: H " + num::shape_string(h.value()) + " vs H0 " +
                              num::shape_string(h0.value()));
  if (p->rows() != h.rows() || p->cols() != h.rows())
    throw num::DimensionError("gcn2conv: operator [" + std::to_string(p->rows()) + "x" +
                              std::to_string(p->cols()) + "] does not fit " +
                              num::shape_string(h.value()));
  if (w.rows() != h.cols() || w.cols() != h.cols())
    throw num::DimensionError("gcn2conv: weight " + num::shape_string(w.value()) +
                              " must be square over " + std::to_string(h.cols()) + " channels");

  auto support = std::make_shared<num::Matrix>((1.0 - alpha) * ((*p) * h.value()) + alpha * h0.value());
  num::Matrix y = (1.0 - beta) * (*support) + beta * ((*support) * w.value());
  return num::Tensor::from_op(std::move(y), {h, h0, w},
                              [p, support, alpha, beta](const num::detail::Node& n) {
    const auto& ph = n.parents[0];
    const auto& ph0 = n.parents[1];
    const auto& pw = n.parents[2];
    if (pw->requires_grad) pw->accumulate(beta * (support->transpose() * n.grad));
    if (!ph->requires_grad && !ph0->requires_grad) return;
    const num::Matrix ds = (1.0 - beta) * n.grad + beta * (n.grad * pw->value.transpose());
    if (ph->requires_grad) ph->accumulate((1.0 - alpha) * (p->transpose() * ds));
    if (ph0->requires_grad) ph0->accumulate(alpha * ds);
  });
}

std::size_t GcnModel::channels() const { return config.channels == 0 ? input_dim : config.channels; }

std::vector<num::NamedParameter> GcnModel::parameters() const {
  std::vector<num::NamedParameter> out;
  if (proj_w) {
    out.push_back({"proj.w", *proj_w});
    out.push_back({"proj.b", *proj_b});
  }
  for (std::size_t l = 0; l < layer_w.size(); ++l) out.push_back({"conv" + std::to_string(l + 1) + ".w", layer_w[l]});
  out.push_back({"fc1.w", fc1_w});
  out.push_back({"fc1.b", fc1_b});
  out.push_back({"fc2.w", fc2_w});
  out.push_back({"fc2.b", fc2_b});
  return out;
}

GcnModel init_model(const GcnConfig& cfg, std::size_t input_dim, num::SeededRng& rng) {
  cfg.validate();
  if (input_dim == 0) throw num::ParameterError("gcn: input width must be >= 1");
  GcnModel m;
  m.config = cfg;
  m.input_dim = input_dim;
  const auto ch = static_cast<Eigen::Index>(m.channels());
  if (cfg.channels != 0) {
    m.proj_w = num::Tensor::parameter(num::glorot_uniform(static_cast<Eigen::Index>(input_dim), ch, rng));
    m.proj_b = zeros(1, cfg.channels);
  }
  for (std::size_t l = 0; l < cfg.layers; ++l)
    m.layer_w.push_back(num::Tensor::parameter(num::glorot_uniform(ch, ch, rng)));
  const auto out = static_cast<Eigen::Index>(cfg.out_dim);
  m.fc1_w = num::Tensor::parameter(num::glorot_uniform(ch, out, rng));
  m.fc1_b = zeros(1, cfg.out_dim);
  m.fc2_w = num::Tensor::parameter(num::glorot_uniform(out, static_cast<Eigen::Index>(cfg.classes), rng));
  m.fc2_b = zeros(1, cfg.classes);
  return m;
}

ForwardResult model_forward(const GcnModel& model, const num::Tensor& f_in,
                            const std::shared_ptr<const num::SparseMatrix>& p, bool training,
                            num::SeededRng& rng) {
  const auto& cfg = model.config;
  if (static_cast<std::size_t>(f_in.cols()) != model.input_dim)
    throw num::DimensionError("model_forward: input " + num::shape_string(f_in.value()) + " but model expects " +
                              std::to_string(model.input_dim) + " columns");
  num::Tensor h0 = f_in;
  if (model.proj_w) h0 = num::leaky_relu(num::linear(f_in, *model.proj_w, *model.proj_b), cfg.leaky_slope);
  num::Tensor h = h0;
  for (std::size_t l = 0; l < model.layer_w.size(); ++l) {
    h = gcn2conv(h, h0, p, model.layer_w[l], cfg.alpha, layer_beta(cfg.lambda, l + 1));
    h = num::leaky_relu(h, cfg.leaky_slope);
    h = num::dropout(h, cfg.dropout, rng, training);
  }
  ForwardResult r;
  r.f_out = num::leaky_relu(num::linear(h, model.fc1_w, model.fc1_b), cfg.leaky_slope);
  r.logits = num::linear(num::dropout(r.f_out, cfg.dropout, rng, training), model.fc2_w, model.fc2_b);
  r.probs = num::softmax_rows(r.logits.value());
  return r;
}

GcnTrainResult train_gcn(const graph::LineGraph& lg, const GcnConfig& cfg) {
  cfg.validate();
  if (lg.train_count() == 0) throw std::invalid_argument("train_gcn: no train-masked nodes");
  for (int y : lg.labels)
    if (y < 0 || static_cast<std::size_t>(y) >= cfg.classes)
      throw std::invalid_argument("train_gcn: label " + std::to_string(y) + " outside the class range");

  num::SeededRng init_rng(num::SeededRng::derive(cfg.seed, 1));
  num::SeededRng drop_rng(num::SeededRng::derive(cfg.seed, 2));
  GcnTrainResult out{init_model(cfg, static_cast<std::size_t>(lg.features.cols()), init_rng), {}};
  const auto p = graph::normalized_adjacency(lg);
  const auto f_in = num::Tensor::constant(lg.features);
  auto params = out.model.parameters();
  auto adam = num::make_adam_state(params);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto fwd = model_forward(out.model, f_in, p, true, drop_rng);
    const auto ce = num::softmax_cross_entropy(fwd.logits, lg.labels, lg.train_mask);
    out.loss_history.push_back(ce.loss.item());
    num::backward(ce.loss);
    num::adam_step(params, adam, cfg.lr * num::lr_decay_factor(epoch, cfg.epochs));
  }
  return out;
}

GcnInference infer(const GcnModel& model, const graph::LineGraph& lg) {
  num::SeededRng unused(0);
  const auto fwd = model_forward(model, num::Tensor::constant(lg.features), graph::normalized_adjacency(lg),
                                 false, unused);
  return {fwd.f_out.value(), fwd.probs, argmax_rows(fwd.probs)};
}

num::Matrix gather_pairs(const num::Matrix& f_out, const std::vector<std::size_t>& pair_map) {
  num::Matrix out(static_cast<Eigen::Index>(pair_map.size()), f_out.cols());
  for (std::size_t n = 0; n < pair_map.size(); ++n) {
    if (pair_map[n] >= static_cast<std::size_t>(f_out.rows()))
      throw std::invalid_argument("extract_edge_embeddings: pair " + std::to_string(n) +
                                  " maps to missing node " + std::to_string(pair_map[n]));
    out.row(static_cast<Eigen::Index>(n)) = f_out.row(static_cast<Eigen::Index>(pair_map[n]));
  }
  return out;
}

num::Matrix extract_edge_embeddings(const GcnModel& model, const graph::LineGraph& lg) {
  return gather_pairs(infer(model, lg).f_out, lg.pair_map);
}

}  // namespace itrc::gcn
