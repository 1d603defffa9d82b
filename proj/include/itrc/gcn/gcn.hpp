#pragma once

#include "itrc/graph/line_graph.hpp"
#include "itrc/numerics/optim.hpp"
#include "itrc/numerics/rng.hpp"
#include "itrc/numerics/tensor.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace itrc::gcn {

struct GcnConfig {
  std::size_t layers = 64;      // u
  double alpha = 0.1;
  double lambda = 0.5;
  double dropout = 0.5;
  double leaky_slope = 0.01;
  std::size_t out_dim = 512;    // width of F_out
  std::size_t classes = 2;
  std::size_t channels = 0;     // 0: run the stack at the input width
  std::size_t epochs = 100;
  double lr = 0.005;
  std::uint64_t seed = 0;

  void validate() const;
};

/// beta_l = ln(lambda / l + 1), l counted from 1.
double layer_beta(double lambda, std::size_t l);

/// ((1 - alpha) P h + alpha h0) ((1 - beta) I + beta W), no activation.
num::Tensor gcn2conv(const num::Tensor& h, const num::Tensor& h0,
                     const std::shared_ptr<const num::SparseMatrix>& p, const num::Tensor& w,
                     double alpha, double beta);

struct GcnModel {
  GcnConfig config;
  std::size_t input_dim = 0;
  std::optional<num::Tensor> proj_w, proj_b;  // input projection when channels > 0
  std::vector<num::Tensor> layer_w;           // channel x channel
  num::Tensor fc1_w, fc1_b;                   // channel -> out_dim
  num::Tensor fc2_w, fc2_b;                   // out_dim -> classes

  std::size_t channels() const;
  std::vector<num::NamedParameter> parameters() const;
};

/// Glorot weights, zero biases, drawn from `rng` in parameter order.
GcnModel init_model(const GcnConfig& cfg, std::size_t input_dim, num::SeededRng& rng);

struct ForwardResult {
  num::Tensor f_out;   // L x out_dim, after the LeakyReLU following FC1
  num::Tensor logits;  // L x classes
  num::Matrix probs;   // softmax of logits
};

ForwardResult model_forward(const GcnModel& model, const num::Tensor& f_in,
                            const std::shared_ptr<const num::SparseMatrix>& p, bool training,
                            num::SeededRng& rng);

struct GcnTrainResult {
  GcnModel model;
  std::vector<double> loss_history;  // training-mode loss per epoch, before the update
};

/// Full-batch training on the train-masked nodes of a reduced line graph.
/// Returns the final-epoch model.
GcnTrainResult train_gcn(const graph::LineGraph& lg, const GcnConfig& cfg);

/// Eval-mode F_out and class predictions for every line-graph node.
struct GcnInference {
  num::Matrix f_out;
  num::Matrix probs;
  std::vector<int> predictions;
};

GcnInference infer(const GcnModel& model, const graph::LineGraph& lg);

/// Row n is the F_out row of pair n's line-graph node.
num::Matrix extract_edge_embeddings(const GcnModel& model, const graph::LineGraph& lg);
num::Matrix gather_pairs(const num::Matrix& f_out, const std::vector<std::size_t>& pair_map);

}  // namespace itrc::gcn
