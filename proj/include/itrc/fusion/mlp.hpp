#pragma once

#include "itrc/numerics/optim.hpp"
#include "itrc/numerics/rng.hpp"
#include "itrc/numerics/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace itrc::fusion {

struct MlpConfig {
  std::size_t hidden1 = 256;
  std::size_t hidden2 = 64;
  std::size_t classes = 2;
  double dropout = 0.5;
  std::size_t batch_size = 4;
  std::size_t epochs = 100;
  std::size_t patience = 10;  // epochs without validation improvement before stopping
  double lr = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// d -> hidden1 -> hidden2 -> classes, ReLU and dropout after the first two.
struct MlpClassifier {
  MlpConfig config;
  std::size_t input_dim = 0;
  num::Tensor w1, b1, w2, b2, w3, b3;

  std::vector<num::NamedParameter> parameters() const;
  /// Deep copy of the parameter values.
  MlpClassifier clone() const;
};

MlpClassifier init_mlp(const MlpConfig& cfg, std::size_t input_dim, num::SeededRng& rng);

num::Tensor mlp_logits(const MlpClassifier& model, const num::Tensor& x, bool training, num::SeededRng& rng);

struct Prediction {
  std::vector<int> labels;  // argmax, ties to the lower class
  num::Matrix probs;
};

Prediction predict(const MlpClassifier& model, const num::Matrix& x);

/// Eval-mode mean cross-entropy.
double evaluate_loss(const MlpClassifier& model, const num::Matrix& x, std::span<const int> y);

struct MlpTrainResult {
  MlpClassifier model;               // checkpoint with the lowest validation loss
  std::vector<double> train_loss;    // mean minibatch loss per epoch
  std::vector<double> val_loss;      // per epoch, after that epoch's updates
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

/// Adam over shuffled minibatches with linear learning-rate decay and early
/// stopping on validation loss.
MlpTrainResult train_classifier(const num::Matrix& train_x, std::span<const int> train_y,
                                const num::Matrix& val_x, std::span<const int> val_y, const MlpConfig& cfg);

}  // namespace itrc::fusion
