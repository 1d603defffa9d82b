#pragma once

#include "itrc/graph/itrc_graph.hpp"
#include "itrc/numerics/tensor.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace itrc::graph {

using Edge = std::pair<std::size_t, std::size_t>;  // first < second

/// Line graph of an ITRC-Graph: node l is ITRC edge l; two nodes are adjacent
/// when their ITRC edges share an endpoint.
struct LineGraph {
  num::Matrix features;                 // L x feature width
  std::vector<int> labels;              // class index per node
  std::vector<std::uint8_t> train_mask;
  std::vector<Edge> edges;              // sorted, unique, no self pairs
  std::vector<std::size_t> pair_map;    // pair index -> node
  std::vector<Edge> endpoints;          // (text node, image node) in G'
  std::vector<LabelSource> sources;

  std::size_t size() const { return labels.size(); }
  std::size_t train_count() const;
};

/// Requires every ITRC edge to be labeled.
LineGraph to_line_graph(const ItrcGraph& graph);

enum class ReductionOrder { RemoveThenAdd, AddThenRemove };

struct ReductionOptions {
  std::size_t j = 5;
  bool remove_same_label = true;  // rule (a)
  bool connect_nearest = true;    // rule (b)
  ReductionOrder order = ReductionOrder::RemoveThenAdd;
};

struct ReductionStats {
  std::size_t edges_before = 0;
  std::size_t removed = 0;
  std::size_t added = 0;
  std::size_t edges_after = 0;
};

/// (a) drops edges whose endpoints are both train-masked with equal labels;
/// (b) adds, for every node, edges to its j nearest nodes by Euclidean
/// distance on feature rows (ties go to the lower index). Nodes and
/// pair_map are untouched. Throws when j >= L.
LineGraph reduce_edges(const LineGraph& lg, const ReductionOptions& opts, ReductionStats* stats = nullptr);

/// Sorted j nearest neighbours of every node, excluding itself.
std::vector<std::vector<std::size_t>> nearest_neighbors(const num::Matrix& features, std::size_t j);

/// D^-1/2 (A + I) D^-1/2 with D the degree of A + I.
std::shared_ptr<const num::SparseMatrix> normalized_adjacency(const LineGraph& lg);

}  // namespace itrc::graph
