#pragma once

#include "itrc/cluster/kmeans.hpp"
#include "itrc/dataset/split.hpp"
#include "itrc/dataset/store.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace itrc::graph {

/// A text or image cluster. mean is the arithmetic mean of the raw member
/// embeddings (not normalized).
struct ItrcNode {
  std::size_t id = 0;
  cluster::Modality modality = cluster::Modality::Text;
  std::size_t cluster = 0;
  Eigen::RowVectorXd mean;
  std::vector<std::size_t> members;  // pair indices
};

enum class LabelSource { TrainMajority, TieRandom, TestMajority };

std::string_view source_name(LabelSource s);

/// One (text cluster, image cluster) pair touched by at least one data pair.
struct ItrcEdge {
  std::size_t id = 0;
  std::size_t text_node = 0;
  std::size_t image_node = 0;
  Eigen::RowVectorXd feature;        // [text mean | image mean]
  std::vector<std::size_t> members;  // pair indices
  std::optional<data::Label> label;
  LabelSource source = LabelSource::TrainMajority;
  bool train = false;                // any member in train or val
};

struct ItrcGraph {
  std::vector<ItrcNode> nodes;  // text nodes first, then image nodes
  std::vector<ItrcEdge> edges;  // sorted by (text node, image node)
  std::vector<std::size_t> pair_edge;  // pair index -> edge id

  std::size_t num_pairs() const { return pair_edge.size(); }
};

/// Nodes from non-empty clusters, one deduplicated edge per cluster pair.
ItrcGraph build_itrc_graph(const data::EmbeddingStore& store, const cluster::ClusterModel& text_clusters,
                           const cluster::ClusterModel& image_clusters);

/// Majority-vote labels. Train and validation members vote when present;
/// otherwise the test members decide. Ties are broken uniformly at random
/// from a stream seeded with `seed`, consumed in edge order.
void label_edges(ItrcGraph& graph, const data::SplitAssignment& split, std::span<const int> labels,
                 std::uint64_t seed);

}  // namespace itrc::graph
