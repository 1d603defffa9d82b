#pragma once

// Small graph builders plus brute-force oracles for line-graph construction
// and edge reduction.

#include "itrc/graph/line_graph.hpp"
#include "itrc/numerics/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace itrc::testing {

inline cluster::ClusterModel assignment_model(std::vector<std::size_t> assign, std::size_t k,
                                              std::size_t dim, cluster::Modality m) {
  cluster::ClusterModel model;
  model.k = k;
  model.modality = m;
  model.centroids = num::Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim));
  model.assignments = std::move(assign);
  return model;
}

inline data::EmbeddingStore random_store(std::size_t n, std::size_t dim, num::SeededRng& rng) {
  data::EmbeddingStore s;
  s.dim = dim;
  s.text.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  s.image.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < s.text.size(); ++i) {
    s.text.data()[i] = rng.uniform(-1, 1);
    s.image.data()[i] = rng.uniform(-1, 1);
  }
  s.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.records[i].pair_id = "p" + std::to_string(i);
    s.records[i].label = rng.below(2) ? data::Label::Complementary : data::Label::Similar;
  }
  return s;
}

struct RandomItrc {
  data::EmbeddingStore store;
  graph::ItrcGraph graph;
  data::SplitAssignment split;
};

/// Random pairs over small cluster counts, labeled with a random split.
inline RandomItrc random_itrc(std::size_t pairs, std::size_t kt, std::size_t ki, std::size_t dim,
                              num::SeededRng& rng) {
  RandomItrc r;
  r.store = random_store(pairs, dim, rng);
  std::vector<std::size_t> ta(pairs), ia(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    ta[i] = static_cast<std::size_t>(rng.below(kt));
    ia[i] = static_cast<std::size_t>(rng.below(ki));
  }
  r.graph = graph::build_itrc_graph(r.store, assignment_model(ta, kt, dim, cluster::Modality::Text),
                                    assignment_model(ia, ki, dim, cluster::Modality::Image));
  r.split = data::split(pairs, {}, rng.next_u64());
  graph::label_edges(r.graph, r.split, r.store.label_indices(), rng.next_u64());
  return r;
}

/// One ITRC edge whose members carry the given (tag, label) votes.
inline data::Label label_of(const std::vector<std::pair<data::SplitTag, int>>& members, std::uint64_t seed,
                            graph::LabelSource* source = nullptr, bool* train = nullptr) {
  graph::ItrcGraph g;
  g.nodes.resize(2);
  graph::ItrcEdge e;
  data::SplitAssignment split;
  std::vector<int> labels;
  for (std::size_t i = 0; i < members.size(); ++i) {
    e.members.push_back(i);
    split.tags.push_back(members[i].first);
    labels.push_back(members[i].second);
  }
  g.edges.push_back(e);
  g.pair_edge.assign(members.size(), 0);
  graph::label_edges(g, split, labels, seed);
  if (source) *source = g.edges[0].source;
  if (train) *train = g.edges[0].train;
  return *g.edges[0].label;
}

inline std::vector<graph::Edge> brute_line_edges(const graph::ItrcGraph& g) {
  std::vector<graph::Edge> out;
  for (std::size_t a = 0; a < g.edges.size(); ++a)
    for (std::size_t b = a + 1; b < g.edges.size(); ++b) {
      const auto& ea = g.edges[a];
      const auto& eb = g.edges[b];
      if (ea.text_node == eb.text_node || ea.image_node == eb.image_node) out.push_back({a, b});
    }
  return out;
}

inline std::vector<graph::Edge> brute_rule_a(const graph::LineGraph& lg, const std::vector<graph::Edge>& edges) {
  std::vector<graph::Edge> out;
  for (const auto& e : edges) {
    const bool both_train = lg.train_mask[e.first] == 1 && lg.train_mask[e.second] == 1;
    if (both_train && lg.labels[e.first] == lg.labels[e.second]) continue;
    out.push_back(e);
  }
  return out;
}

inline std::set<graph::Edge> brute_knn_edges(const num::Matrix& f, std::size_t j) {
  std::set<graph::Edge> out;
  const auto l = static_cast<std::size_t>(f.rows());
  for (std::size_t u = 0; u < l; ++u) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t v = 0; v < l; ++v) {
      if (v == u) continue;
      double d = 0.0;
      for (Eigen::Index c = 0; c < f.cols(); ++c) {
        const double diff = f(static_cast<Eigen::Index>(u), c) - f(static_cast<Eigen::Index>(v), c);
        d += diff * diff;
      }
      all.push_back({d, v});
    }
    std::sort(all.begin(), all.end());
    for (std::size_t k = 0; k < j; ++k) out.insert({std::min(u, all[k].second), std::max(u, all[k].second)});
  }
  return out;
}

}  // namespace itrc::testing
