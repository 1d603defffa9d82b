#include "itrc/graph/line_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace itrc::graph {

std::size_t LineGraph::train_count() const {
  return static_cast<std::size_t>(std::count(train_mask.begin(), train_mask.end(), std::uint8_t{1}));
}

namespace {

void sort_unique(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

Edge ordered(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

std::vector<Edge> remove_same_label(const LineGraph& lg, const std::vector<Edge>& edges) {
  std::vector<Edge> kept;
  kept.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    const bool drop = lg.train_mask[u] && lg.train_mask[v] && lg.labels[u] == lg.labels[v];
    if (!drop) kept.push_back({u, v});
  }
  return kept;
}

std::vector<Edge> add_nearest(const LineGraph& lg, std::vector<Edge> edges, std::size_t j) {
  if (j == 0) return edges;
  const auto knn = nearest_neighbors(lg.features, j);
  for (std::size_t u = 0; u < knn.size(); ++u)
    for (auto v : knn[u]) edges.push_back(ordered(u, v));
  sort_unique(edges);
  return edges;
}

}  // namespace

LineGraph to_line_graph(const ItrcGraph& graph) {
  LineGraph lg;
  const std::size_t l = graph.edges.size();
  const Eigen::Index width = l == 0 ? 0 : graph.edges.front().feature.size();
  lg.features.resize(static_cast<Eigen::Index>(l), width);
  lg.labels.reserve(l);
  lg.train_mask.reserve(l);
  std::vector<std::vector<std::size_t>> incident(graph.nodes.size());
  for (const auto& e : graph.edges) {
    if (!e.label) throw std::invalid_argument("to_line_graph: edge " + std::to_string(e.id) + " is unlabeled");
    lg.features.row(static_cast<Eigen::Index>(e.id)) = e.feature;
    lg.labels.push_back(static_cast<int>(*e.label));
    lg.train_mask.push_back(e.train ? 1 : 0);
    lg.endpoints.push_back({e.text_node, e.image_node});
    lg.sources.push_back(e.source);
    incident[e.text_node].push_back(e.id);
    incident[e.image_node].push_back(e.id);
  }
  for (const auto& list : incident)
    for (std::size_t a = 0; a < list.size(); ++a)
      for (std::size_t b = a + 1; b < list.size(); ++b) lg.edges.push_back(ordered(list[a], list[b]));
  sort_unique(lg.edges);
  lg.pair_map = graph.pair_edge;
  return lg;
}

std::vector<std::vector<std::size_t>> nearest_neighbors(const num::Matrix& features, std::size_t j) {
  const auto l = static_cast<std::size_t>(features.rows());
  if (j >= l)
    throw std::invalid_argument("nearest_neighbors: J=" + std::to_string(j) + " must be below L=" +
                                std::to_string(l));
  num::Matrix dist(features.rows(), features.rows());
  for (Eigen::Index a = 0; a < features.rows(); ++a) {
    dist(a, a) = 0.0;
    for (Eigen::Index b = a + 1; b < features.rows(); ++b) {
      const double d = (features.row(a) - features.row(b)).squaredNorm();
      dist(a, b) = d;
      dist(b, a) = d;
    }
  }
  std::vector<std::vector<std::size_t>> out(l);
  std::vector<std::size_t> order;
  for (std::size_t u = 0; u < l; ++u) {
    order.resize(l - 1);
    std::size_t k = 0;
    for (std::size_t v = 0; v < l; ++v)
      if (v != u) order[k++] = v;
    const auto row = static_cast<Eigen::Index>(u);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(j), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double da = dist(row, static_cast<Eigen::Index>(a));
                        const double db = dist(row, static_cast<Eigen::Index>(b));
                        return da < db || (da == db && a < b);
                      });
    out[u].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(j));
  }
  return out;
}

LineGraph reduce_edges(const LineGraph& lg, const ReductionOptions& opts, ReductionStats* stats) {
  if (opts.connect_nearest && opts.j >= lg.size())
    throw std::invalid_argument("reduce_edges: J=" + std::to_string(opts.j) + " must be below L=" +
                                std::to_string(lg.size()));
  LineGraph out = lg;
  std::vector<Edge> edges = lg.edges;
  std::size_t removed = 0, added = 0;
  auto apply_remove = [&] {
    if (!opts.remove_same_label) return;
    const std::size_t before = edges.size();
    edges = remove_same_label(lg, edges);
    removed += before - edges.size();
  };
  auto apply_add = [&] {
    if (!opts.connect_nearest) return;
    const std::size_t before = edges.size();
    edges = add_nearest(lg, std::move(edges), opts.j);
    added += edges.size() - before;
  };
  if (opts.order == ReductionOrder::RemoveThenAdd) {
    apply_remove();
    apply_add();
  } else {
    apply_add();
    apply_remove();
  }
  out.edges = std::move(edges);
  if (stats) *stats = {lg.edges.size(), removed, added, out.edges.size()};
  return out;
}

std::shared_ptr<const num::SparseMatrix> normalized_adjacency(const LineGraph& lg) {
  const auto l = static_cast<Eigen::Index>(lg.size());
  std::vector<double> degree(lg.size(), 1.0);
  for (const auto& [u, v] : lg.edges) {
    if (u == v) throw std::invalid_argument("normalized_adjacency: self pair in edge list");
    degree[u] += 1.0;
    degree[v] += 1.0;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(lg.size() + 2 * lg.edges.size());
  for (Eigen::Index i = 0; i < l; ++i)
    triplets.emplace_back(i, i, 1.0 / degree[static_cast<std::size_t>(i)]);
  for (const auto& [u, v] : lg.edges) {
    const double w = 1.0 / std::sqrt(degree[u] * degree[v]);
    triplets.emplace_back(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v), w);
    triplets.emplace_back(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u), w);
  }
  auto p = std::make_shared<num::SparseMatrix>(l, l);
  p->setFromTriplets(triplets.begin(), triplets.end());
  p->makeCompressed();
  return p;
}

}  // namespace itrc::graph
