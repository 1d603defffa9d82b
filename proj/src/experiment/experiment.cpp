#include "itrc/experiment/experiment.hpp"

#include "itrc/graph/itrc_graph.hpp"
#include "itrc/numerics/rng.hpp"

#include <algorithm>
#include <exception>
#include <utility>

namespace itrc::exp {

const std::array<const char*, kNumMetrics> kMetricNames = {"sim_p", "sim_r", "sim_f1", "com_p",
                                                            "com_r", "com_f1", "macro_f1", "accuracy"};

namespace {

template <typename F>
auto stage(std::vector<std::string>& log, const char* name, F&& body) -> decltype(body()) {
  log.emplace_back(name);
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

num::Matrix take_rows(const num::Matrix& x, const std::vector<std::size_t>& rows) {
  num::Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<int> take(const std::vector<int>& v, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

struct EdgeStage {
  GraphStats stats;
  std::optional<MetricsReport> gcn_metrics;
  num::Matrix embeddings;  // N x out_dim
};

EdgeStage edge_stage(const data::EmbeddingStore& store, const ExperimentConfig& cfg, const data::SplitAssignment& split,
                     const std::vector<int>& labels, const TrialSeeds& seeds, std::vector<std::string>& log) {
  EdgeStage out;
  auto [text_clusters, image_clusters] = stage(log, "cluster", [&] {
    cluster::KMeansOptions opts;
    opts.k = cfg.k;
    opts.max_iter = cfg.kmeans_max_iter;
    opts.seed = seeds.text_kmeans;
    auto t = cluster::kmeans_fit(store.text, opts, cluster::Modality::Text);
    opts.seed = seeds.image_kmeans;
    auto i = cluster::kmeans_fit(store.image, opts, cluster::Modality::Image);
    return std::pair{std::move(t), std::move(i)};
  });
  auto lg = stage(log, "graph", [&] {
    auto g = graph::build_itrc_graph(store, text_clusters, image_clusters);
    graph::label_edges(g, split, labels, seeds.ties);
    for (const auto& n : g.nodes) (n.modality == cluster::Modality::Text ? out.stats.text_nodes : out.stats.image_nodes)++;
    return graph::reduce_edges(graph::to_line_graph(g), cfg.reduction, &out.stats.reduction);
  });
  out.stats.line_nodes = lg.size();
  out.stats.train_nodes = lg.train_count();
  out.stats.test_nodes = lg.size() - out.stats.train_nodes;

  stage(log, "gcn", [&] {
    gcn::GcnConfig gc = cfg.gcn;
    gc.seed = seeds.gcn;
    const auto trained = gcn::train_gcn(lg, gc);
    const auto inf = gcn::infer(trained.model, lg);
    std::vector<int> p, g;
    for (std::size_t v = 0; v < lg.size(); ++v)
      if (!lg.train_mask[v]) {
        p.push_back(inf.predictions[v]);
        g.push_back(lg.labels[v]);
      }
    if (!p.empty()) out.gcn_metrics = compute_metrics(p, g);
    out.embeddings = gcn::gather_pairs(inf.f_out, lg.pair_map);
  });
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (models.empty()) throw std::invalid_argument("experiment: no models selected");
  if (trials == 0) throw std::invalid_argument("experiment: trials must be >= 1");
  for (const auto& m : models) m.validate();
  gcn.validate();
  mlp.validate();
  if (k == 0) throw std::invalid_argument("experiment: k must be >= 1");
}

TrialSeeds trial_seeds(std::uint64_t trial_seed, std::uint64_t split_seed) {
  using num::SeededRng;
  return {SeededRng::derive(split_seed, 1), SeededRng::derive(trial_seed, 2), SeededRng::derive(trial_seed, 3),
          SeededRng::derive(trial_seed, 4), SeededRng::derive(trial_seed, 5), SeededRng::derive(trial_seed, 6)};
}

std::vector<TrialResult> run_seed(const data::EmbeddingStore& store, const ExperimentConfig& cfg,
                                  std::uint64_t seed) {
  cfg.validate();
  std::vector<std::string> log;
  const TrialSeeds seeds = trial_seeds(seed, cfg.resplit ? seed : cfg.seed);
  const auto labels = store.label_indices();
  const auto split = stage(log, "split", [&] { return data::split(store.size(), cfg.ratios, seeds.split); });
  const auto train_idx = split.indices(data::SplitTag::Train);
  const auto val_idx = split.indices(data::SplitTag::Val);
  const auto test_idx = split.indices(data::SplitTag::Test);

  bool need_edge = false;
  for (const auto& m : cfg.models) need_edge = need_edge || m.use_edge;
  std::optional<EdgeStage> edge;
  if (need_edge) edge = edge_stage(store, cfg, split, labels, seeds, log);

  std::vector<TrialResult> results;
  for (const auto& spec : cfg.models) {
    std::vector<std::string> model_log = log;
    TrialResult r;
    r.model = spec.name();
    r.seed = seed;
    const auto fused = stage(model_log, "fuse", [&] {
      return fusion::fuse(spec, {&store.text, &store.image, edge ? &edge->embeddings : nullptr});
    });
    const auto model = stage(model_log, "classifier", [&] {
      fusion::MlpConfig mc = cfg.mlp;
      mc.seed = seeds.classifier;
      return fusion::train_classifier(take_rows(fused, train_idx), take(labels, train_idx), take_rows(fused, val_idx),
                                      take(labels, val_idx), mc)
          .model;
    });
    r.metrics = stage(model_log, "evaluate", [&] {
      const auto pred = fusion::predict(model, take_rows(fused, test_idx));
      return compute_metrics(pred.labels, take(labels, test_idx));
    });
    if (spec.use_edge) {
      r.graph = edge->stats;
      r.gcn_metrics = edge->gcn_metrics;
    }
    r.stages = std::move(model_log);
    results.push_back(std::move(r));
  }
  return results;
}

TrialResult run_trial(const data::EmbeddingStore& store, const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.models.size() != 1) throw std::invalid_argument("run_trial: exactly one model expected");
  return run_seed(store, cfg, seed).front();
}

MetricVector metric_vector(const MetricsReport& r) {
  return {r.per_class[0].precision, r.per_class[0].recall, r.per_class[0].f1, r.per_class[1].precision,
          r.per_class[1].recall,    r.per_class[1].f1,     r.macro_f1,        r.accuracy};
}

std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& trials,
                                    const std::vector<fusion::FusionSpec>& models) {
  std::vector<AggregateRow> rows;
  for (const auto& spec : models) {
    AggregateRow row;
    row.model = spec.name();
    row.baseline = spec.baseline();
    std::vector<MetricVector> values;
    for (const auto& t : trials)
      if (t.model == row.model) values.push_back(metric_vector(t.metrics));
    row.trials = values.size();
    if (values.empty()) continue;
    for (std::size_t k = 0; k < kNumMetrics; ++k) {
      // Summed in sorted order so the result does not depend on seed order.
      std::vector<double> column;
      for (const auto& v : values) column.push_back(v[k]);
      std::sort(column.begin(), column.end());
      double sum = 0.0;
      for (double v : column) sum += v;
      const double mean = sum / static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : column) ss += (v - mean) * (v - mean);
      row.mean[k] = mean;
      row.variance[k] = values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
    }
    rows.push_back(row);
  }
  return rows;
}

MatrixResult run_matrix(const data::EmbeddingStore& store, const ExperimentConfig& cfg) {
  cfg.validate();
  MatrixResult out;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    auto seed_results = run_seed(store, cfg, cfg.seed + i);
    for (auto& r : seed_results) out.trials.push_back(std::move(r));
  }
  out.rows = aggregate(out.trials, cfg.models);
  return out;
}

}  // namespace itrc::exp
