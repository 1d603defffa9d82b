#pragma once

#include "itrc/cluster/kmeans.hpp"
#include "itrc/dataset/split.hpp"
#include "itrc/dataset/store.hpp"
#include "itrc/experiment/metrics.hpp"
#include "itrc/fusion/fusion.hpp"
#include "itrc/fusion/mlp.hpp"
#include "itrc/gcn/gcn.hpp"
#include "itrc/graph/line_graph.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace itrc::exp {

/// A failure inside one pipeline stage.
class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

struct ExperimentConfig {
  std::vector<fusion::FusionSpec> models = fusion::all_models();
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  data::SplitRatios ratios;
  bool resplit = true;  // false: every trial reuses the split of `seed`
  std::size_t k = 100;
  std::size_t kmeans_max_iter = 100;
  graph::ReductionOptions reduction;
  gcn::GcnConfig gcn;
  fusion::MlpConfig mlp;

  void validate() const;
};

struct GraphStats {
  std::size_t text_nodes = 0;
  std::size_t image_nodes = 0;
  std::size_t line_nodes = 0;  // L
  std::size_t train_nodes = 0;
  std::size_t test_nodes = 0;  // nodes without a train or validation member
  graph::ReductionStats reduction;
};

struct TrialResult {
  std::string model;
  std::uint64_t seed = 0;
  MetricsReport metrics;                      // test pairs only
  std::optional<GraphStats> graph;            // models with edge vectors
  std::optional<MetricsReport> gcn_metrics;   // line-graph nodes outside the train mask
  std::vector<std::string> stages;            // stages executed for this seed
};

/// Sub-seeds of one trial.
struct TrialSeeds {
  std::uint64_t split, text_kmeans, image_kmeans, ties, gcn, classifier;
};
TrialSeeds trial_seeds(std::uint64_t trial_seed, std::uint64_t split_seed);

/// One seed, every configured model. Graph and GCN stages run once and are
/// shared; they are skipped when no model uses edge vectors.
std::vector<TrialResult> run_seed(const data::EmbeddingStore& store, const ExperimentConfig& cfg,
                                  std::uint64_t seed);

/// One model on one seed.
TrialResult run_trial(const data::EmbeddingStore& store, const ExperimentConfig& cfg, std::uint64_t seed);

/// Table-2 metric order: Sim P, R, F1, Com P, R, F1, macro-F1, accuracy.
constexpr std::size_t kNumMetrics = 8;
using MetricVector = std::array<double, kNumMetrics>;
MetricVector metric_vector(const MetricsReport& r);
extern const std::array<const char*, kNumMetrics> kMetricNames;

struct AggregateRow {
  std::string model;
  bool baseline = false;
  std::size_t trials = 0;
  MetricVector mean{};
  MetricVector variance{};  // sample variance; 0 for one trial
};

struct MatrixResult {
  std::vector<TrialResult> trials;  // seed-major, model order within a seed
  std::vector<AggregateRow> rows;   // configured model order
};

/// Aggregates trials into one row per model, in first-seen order.
std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& trials,
                                    const std::vector<fusion::FusionSpec>& models);

/// Trials use seeds cfg.seed + i for i < cfg.trials.
MatrixResult run_matrix(const data::EmbeddingStore& store, const ExperimentConfig& cfg);

}  // namespace itrc::exp
