#include "config_format.hpp"

#include "itrc/cluster/kmeans.hpp"
#include "itrc/dataset/split.hpp"
#include "itrc/dataset/store.hpp"
#include "itrc/dataset/synth.hpp"
#include "itrc/experiment/experiment.hpp"
#include "itrc/experiment/report.hpp"
#include "itrc/fusion/fusion.hpp"
#include "itrc/fusion/mlp.hpp"
#include "itrc/gcn/gcn.hpp"
#include "itrc/graph/itrc_graph.hpp"
#include "itrc/graph/line_graph.hpp"
#include "itrc/io/artifacts.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>

using namespace itrc;

namespace {

// Runs `body`, tagging any escaping error with `stage`.
template <typename F>
auto tagged(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const exp::StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw exp::StageError(stage, e.what());
  }
}

graph::ReductionOrder parse_order(const std::string& s) {
  if (s == "remove-add") return graph::ReductionOrder::RemoveThenAdd;
  if (s == "add-remove") return graph::ReductionOrder::AddThenRemove;
  throw std::invalid_argument("unknown reduction order '" + s + "' (remove-add or add-remove)");
}

void print_metrics(const char* title, const exp::MetricsReport& m) {
  std::printf("%s: acc=%.3f macro_f1=%.3f sim_f1=%.3f com_f1=%.3f (n=%zu)\n", title, m.accuracy, m.macro_f1,
              m.per_class[0].f1, m.per_class[1].f1, m.total);
}

struct ReductionFlags {
  std::size_t j = 5;
  std::string order = "remove-add";
  bool no_remove = false;
  bool no_knn = false;

  void add(CLI::App* app) {
    app->add_option("--j", j, "nearest neighbours added per line-graph node")->capture_default_str();
    app->add_option("--order", order, "reduction order: remove-add or add-remove")->capture_default_str();
    app->add_flag("--no-remove", no_remove, "keep same-label train-train edges");
    app->add_flag("--no-knn", no_knn, "skip the nearest-neighbour edges");
  }
  graph::ReductionOptions options() const {
    graph::ReductionOptions o;
    o.j = j;
    o.order = parse_order(order);
    o.remove_same_label = !no_remove;
    o.connect_nearest = !no_knn;
    return o;
  }
};

void add_gcn_flags(CLI::App* app, gcn::GcnConfig& c, const std::string& prefix) {
  app->add_option("--" + prefix + "epochs", c.epochs, "GCN training epochs")->capture_default_str();
  app->add_option("--" + prefix + "lr", c.lr, "GCN learning rate")->capture_default_str();
  app->add_option("--layers", c.layers, "GCNII layers (u)")->capture_default_str();
  app->add_option("--channels", c.channels, "input projection width; 0 keeps the input width")->capture_default_str();
  app->add_option("--alpha", c.alpha, "initial-residual weight")->capture_default_str();
  app->add_option("--lambda", c.lambda, "identity-mapping strength")->capture_default_str();
  app->add_option("--" + prefix + "dropout", c.dropout, "GCN dropout rate")->capture_default_str();
  app->add_option("--leaky-slope", c.leaky_slope, "LeakyReLU slope")->capture_default_str();
  app->add_option("--out-dim", c.out_dim, "edge embedding width")->capture_default_str();
}

void add_mlp_flags(CLI::App* app, fusion::MlpConfig& c, const std::string& prefix) {
  app->add_option("--" + prefix + "epochs", c.epochs, "classifier epochs")->capture_default_str();
  app->add_option("--" + prefix + "lr", c.lr, "classifier learning rate")->capture_default_str();
  app->add_option("--" + prefix + "dropout", c.dropout, "classifier dropout rate")->capture_default_str();
  app->add_option("--batch-size", c.batch_size, "minibatch size")->capture_default_str();
  app->add_option("--patience", c.patience, "epochs without validation improvement before stopping")
      ->capture_default_str();
  app->add_option("--hidden1", c.hidden1, "first hidden width")->capture_default_str();
  app->add_option("--hidden2", c.hidden2, "second hidden width")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Image-text relationship classification over cluster line graphs"};
  app.require_subcommand(1);
  std::string current = "itrc";

  // ingest
  std::string ingest_dir;
  auto* ingest = app.add_subcommand("ingest", "validate an embedding store");
  ingest->add_option("--dir", ingest_dir, "store directory")->required();
  ingest->callback([&] {
    const auto s = tagged("ingest", [&] { return data::load_store(ingest_dir); });
    const auto labels = s.label_indices();
    const auto comp = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    std::printf("OK n=%zu dim=%zu similar=%zu complementary=%zu\n", s.size(), s.dim, s.size() - comp, comp);
  });

  // synth
  std::size_t synth_n = 1000, synth_dim = 512;
  double synth_sep = 4.0;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic two-class store");
  synth->add_option("--n", synth_n, "pairs")->capture_default_str();
  synth->add_option("--separation", synth_sep, "distance between class means")->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--dim", synth_dim, "embedding width")->capture_default_str();
  synth->add_option("--out", synth_out, "store directory")->required();
  synth->callback([&] {
    tagged("synth", [&] {
      std::filesystem::create_directories(synth_out);
      data::save_store(data::synth_generate(synth_n, synth_sep, synth_seed, synth_dim), synth_out);
    });
    std::printf("wrote %zu pairs to %s\n", synth_n, synth_out.c_str());
  });

  // cluster
  std::string cl_store, cl_out;
  cluster::KMeansOptions cl_opts;
  std::uint64_t cl_seed = 0;
  auto* clus = app.add_subcommand("cluster", "spherical k-means over text and image embeddings");
  clus->add_option("--store", cl_store)->required();
  clus->add_option("--k", cl_opts.k, "clusters per modality")->capture_default_str();
  clus->add_option("--max-iter", cl_opts.max_iter)->capture_default_str();
  clus->add_option("--seed", cl_seed)->capture_default_str();
  clus->add_option("--out", cl_out, "clusters.json")->required();
  clus->callback([&] {
    const auto store = tagged("ingest", [&] { return data::load_store(cl_store); });
    const auto seeds = exp::trial_seeds(cl_seed, cl_seed);
    io::ClusterArtifact a;
    a.seed = cl_seed;
    tagged("cluster", [&] {
      auto opts = cl_opts;
      opts.seed = seeds.text_kmeans;
      a.text = cluster::kmeans_fit(store.text, opts, cluster::Modality::Text);
      opts.seed = seeds.image_kmeans;
      a.image = cluster::kmeans_fit(store.image, opts, cluster::Modality::Image);
      io::save_json(io::clusters_to_json(a), cl_out);
    });
    std::printf("text: %zu iterations, objective %.6f; image: %zu iterations, objective %.6f\n", a.text.iterations,
                a.text.objective_history.back(), a.image.iterations, a.image.objective_history.back());
  });

  // build-graph
  std::string bg_store, bg_clusters, bg_split = "0.6,0.2,0.2", bg_out;
  std::uint64_t bg_seed = 0;
  ReductionFlags bg_red;
  auto* bg = app.add_subcommand("build-graph", "build, label and reduce the cluster line graph");
  bg->add_option("--store", bg_store)->required();
  bg->add_option("--clusters", bg_clusters)->required();
  bg->add_option("--split", bg_split, "train,val,test ratios")->capture_default_str();
  bg->add_option("--seed", bg_seed)->capture_default_str();
  bg_red.add(bg);
  bg->add_option("--out", bg_out, "graph.json")->required();
  bg->callback([&] {
    const auto store = tagged("ingest", [&] { return data::load_store(bg_store); });
    const auto seeds = exp::trial_seeds(bg_seed, bg_seed);
    io::GraphArtifact a;
    a.seed = bg_seed;
    tagged("graph", [&] {
      const auto clusters = io::clusters_from_json(io::load_json(bg_clusters));
      a.split = data::split(store.size(), data::parse_ratios(bg_split), seeds.split);
      auto g = graph::build_itrc_graph(store, clusters.text, clusters.image);
      graph::label_edges(g, a.split, store.label_indices(), seeds.ties);
      for (const auto& n : g.nodes) (n.modality == cluster::Modality::Text ? a.stats.text_nodes : a.stats.image_nodes)++;
      a.line_graph = graph::reduce_edges(graph::to_line_graph(g), bg_red.options(), &a.stats.reduction);
      a.stats.line_nodes = a.line_graph.size();
      a.stats.train_nodes = a.line_graph.train_count();
      a.stats.test_nodes = a.stats.line_nodes - a.stats.train_nodes;
      io::save_json(io::graph_to_json(a), bg_out);
    });
    const auto& s = a.stats;
    std::printf("nodes: text=%zu image=%zu line=%zu (train %zu, test %zu); edges %zu -> %zu (-%zu +%zu)\n",
                s.text_nodes, s.image_nodes, s.line_nodes, s.train_nodes, s.test_nodes, s.reduction.edges_before,
                s.reduction.edges_after, s.reduction.removed, s.reduction.added);
  });

  // train-gcn
  std::string tg_graph, tg_out, tg_metrics;
  gcn::GcnConfig tg_cfg;
  std::uint64_t tg_seed = 0;
  auto* tg = app.add_subcommand("train-gcn", "train the GCN and write per-pair edge embeddings");
  tg->add_option("--graph", tg_graph)->required();
  add_gcn_flags(tg, tg_cfg, "");
  tg->add_option("--seed", tg_seed)->capture_default_str();
  tg->add_option("--out", tg_out, "edges.f32le (N x out-dim float32)")->required();
  tg->add_option("--metrics", tg_metrics, "node metrics JSON; defaults to metrics.json beside --out");
  tg->callback([&] {
    const auto a = tagged("graph", [&] { return io::graph_from_json(io::load_json(tg_graph)); });
    const auto& lg = a.line_graph;
    tagged("gcn", [&] {
      auto cfg = tg_cfg;
      cfg.seed = exp::trial_seeds(tg_seed, tg_seed).gcn;
      const auto trained = gcn::train_gcn(lg, cfg);
      const auto inf = gcn::infer(trained.model, lg);
      io::save_f32_matrix(gcn::gather_pairs(inf.f_out, lg.pair_map), tg_out);
      std::vector<int> p, g;
      for (std::size_t v = 0; v < lg.size(); ++v)
        if (!lg.train_mask[v]) {
          p.push_back(inf.predictions[v]);
          g.push_back(lg.labels[v]);
        }
      io::Json m = {{"line_nodes", lg.size()}, {"evaluated_nodes", p.size()}, {"loss_history", trained.loss_history}};
      if (!p.empty()) {
        const auto r = exp::compute_metrics(p, g);
        m["metrics"] = io::metrics_to_json(r);
        print_metrics("line-graph test nodes", r);
      }
      const auto path = tg_metrics.empty()
                            ? (std::filesystem::path(tg_out).parent_path() / "metrics.json").string()
                            : tg_metrics;
      io::save_json(m, path);
    });
  });

  // train-clf
  std::string tc_store, tc_edges, tc_model = "T+E(C)", tc_split = "0.6,0.2,0.2", tc_out;
  fusion::MlpConfig tc_cfg;
  std::uint64_t tc_seed = 0;
  auto* tc = app.add_subcommand("train-clf", "fuse vectors and train the classifier");
  tc->add_option("--store", tc_store)->required();
  tc->add_option("--edges", tc_edges, "edges.f32le from train-gcn; required for models with E");
  tc->add_option("--model", tc_model, "fusion model name")->capture_default_str();
  tc->add_option("--split", tc_split, "train,val,test ratios")->capture_default_str();
  tc->add_option("--seed", tc_seed, "same seed as build-graph to reuse its split")->capture_default_str();
  add_mlp_flags(tc, tc_cfg, "");
  tc->add_option("--out", tc_out, "clf.json")->required();
  tc->callback([&] {
    const auto store = tagged("ingest", [&] { return data::load_store(tc_store); });
    const auto spec = tagged("fuse", [&] { return fusion::parse_model(tc_model); });
    const auto seeds = exp::trial_seeds(tc_seed, tc_seed);
    const auto split = tagged("split", [&] { return data::split(store.size(), data::parse_ratios(tc_split), seeds.split); });
    num::Matrix edges;
    if (spec.use_edge) {
      if (tc_edges.empty()) throw exp::StageError("fuse", "model " + spec.name() + " needs --edges");
      edges = tagged("fuse", [&] { return io::load_f32_matrix(tc_edges, store.size()); });
    }
    const auto fused = tagged("fuse", [&] {
      return fusion::fuse(spec, {&store.text, &store.image, spec.use_edge ? &edges : nullptr});
    });
    const auto labels = store.label_indices();
    auto rows = [&](data::SplitTag t) {
      const auto idx = split.indices(t);
      num::Matrix x(static_cast<Eigen::Index>(idx.size()), fused.cols());
      std::vector<int> y;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = fused.row(static_cast<Eigen::Index>(idx[i]));
        y.push_back(labels[idx[i]]);
      }
      return std::pair{x, y};
    };
    const auto [tx, ty] = rows(data::SplitTag::Train);
    const auto [vx, vy] = rows(data::SplitTag::Val);
    const auto [sx, sy] = rows(data::SplitTag::Test);
    tagged("classifier", [&] {
      auto cfg = tc_cfg;
      cfg.seed = seeds.classifier;
      const auto r = fusion::train_classifier(tx, ty, vx, vy, cfg);
      const auto metrics = exp::compute_metrics(fusion::predict(r.model, sx).labels, sy);
      auto j = io::classifier_to_json(r.model, spec.name());
      j["best_epoch"] = r.best_epoch;
      j["val_loss"] = r.val_loss;
      j["test_metrics"] = io::metrics_to_json(metrics);
      io::save_json(j, tc_out);
      std::printf("best epoch %zu of %zu\n", r.best_epoch + 1, r.val_loss.size());
      print_metrics(spec.name().c_str(), metrics);
    });
  });

  // experiment
  std::string ex_store, ex_models = "all", ex_report, ex_format = "csv", ex_split = "0.6,0.2,0.2", ex_trials_out;
  exp::ExperimentConfig ex_cfg;
  ReductionFlags ex_red;
  bool ex_no_resplit = false, ex_quiet = false;
  auto* ex = app.add_subcommand("experiment", "run the model matrix over seeded trials");
  ex->config_formatter(std::make_shared<cli::JsonOrIniConfig>());
  ex->set_config("--config", "", "key=value or JSON file mirroring these flags; flags win");
  ex->add_option("--store", ex_store)->required();
  ex->add_option("--models", ex_models, "all or a comma-separated list, e.g. T+E(C),T+I(C)")->capture_default_str();
  ex->add_option("--trials", ex_cfg.trials)->capture_default_str();
  ex->add_option("--seed", ex_cfg.seed, "base seed; trial i uses seed + i")->capture_default_str();
  ex->add_option("--report", ex_report, "report path")->required();
  ex->add_option("--format", ex_format, "csv or md")->capture_default_str();
  ex->add_option("--trials-out", ex_trials_out, "per-trial JSON (metrics, graph statistics, GCN node metrics)");
  ex->add_option("--split", ex_split, "train,val,test ratios")->capture_default_str();
  ex->add_flag("--no-resplit", ex_no_resplit, "reuse the base-seed split in every trial");
  ex->add_option("--k", ex_cfg.k, "clusters per modality")->capture_default_str();
  ex->add_option("--kmeans-max-iter", ex_cfg.kmeans_max_iter)->capture_default_str();
  ex_red.add(ex);
  add_gcn_flags(ex, ex_cfg.gcn, "gcn-");
  add_mlp_flags(ex, ex_cfg.mlp, "clf-");
  ex->add_flag("--quiet", ex_quiet, "no per-trial progress lines");
  ex->callback([&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto store = tagged("ingest", [&] { return data::load_store(ex_store); });
    const auto format = tagged("report", [&] { return exp::parse_format(ex_format); });
    tagged("config", [&] {
      ex_cfg.models = fusion::parse_model_list(ex_models);
      ex_cfg.ratios = data::parse_ratios(ex_split);
      ex_cfg.resplit = !ex_no_resplit;
      ex_cfg.reduction = ex_red.options();
      ex_cfg.validate();
    });
    exp::MatrixResult result;
    for (std::size_t i = 0; i < ex_cfg.trials; ++i) {
      auto seed_results = exp::run_seed(store, ex_cfg, ex_cfg.seed + i);
      for (auto& r : seed_results) {
        if (!ex_quiet) {
          const auto title = "seed " + std::to_string(r.seed) + " " + r.model;
          print_metrics(title.c_str(), r.metrics);
          std::fflush(stdout);
        }
        result.trials.push_back(std::move(r));
      }
    }
    result.rows = exp::aggregate(result.trials, ex_cfg.models);
    tagged("report", [&] {
      exp::emit_report(result.rows, format, ex_report);
      if (!ex_trials_out.empty()) {
        io::Json j = io::Json::array();
        for (const auto& t : result.trials) j.push_back(io::trial_to_json(t));
        io::save_json(j, ex_trials_out);
      }
    });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("wrote %s (%zu models x %zu trials, %.1f s)\n", ex_report.c_str(), result.rows.size(),
                ex_cfg.trials, secs);
  });

  for (auto* sub : app.get_subcommands({})) sub->preparse_callback([&, sub](std::size_t) { current = sub->get_name(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const exp::StageError& e) {
    std::fprintf(stderr, "itrc %s: %s\n", current.c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "itrc %s: [%s] %s\n", current.c_str(), current.c_str(), e.what());
    return 1;
  }
  return 0;
}
