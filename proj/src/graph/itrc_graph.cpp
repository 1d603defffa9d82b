#include "itrc/graph/itrc_graph.hpp"

#include "itrc/numerics/rng.hpp"

#include <array>
#include <map>
#include <stdexcept>
#include <string>

namespace itrc::graph {

std::string_view source_name(LabelSource s) {
  switch (s) {
    case LabelSource::TrainMajority: return "train_majority";
    case LabelSource::TieRandom: return "tie_random";
    case LabelSource::TestMajority: return "test_majority";
  }
  return "?";
}

namespace {

void check_cover(const cluster::ClusterModel& m, std::size_t n, std::string_view what) {
  if (m.assignments.size() != n)
    throw std::invalid_argument(std::string(what) + " clusters cover " +
                                std::to_string(m.assignments.size()) + " items, store has " +
                                std::to_string(n));
  for (std::size_t i = 0; i < n; ++i)
    if (m.assignments[i] >= m.k)
      throw std::invalid_argument("pair " + std::to_string(i) + " references missing " +
                                  std::string(what) + " cluster " + std::to_string(m.assignments[i]));
}

}  // namespace

ItrcGraph build_itrc_graph(const data::EmbeddingStore& store, const cluster::ClusterModel& text_clusters,
                           const cluster::ClusterModel& image_clusters) {
  const std::size_t n = store.size();
  check_cover(text_clusters, n, "text");
  check_cover(image_clusters, n, "image");

  ItrcGraph g;
  // cluster index -> node id, per modality
  std::vector<std::size_t> text_node(text_clusters.k, SIZE_MAX), image_node(image_clusters.k, SIZE_MAX);
  auto add_nodes = [&](const cluster::ClusterModel& m, const num::Matrix& emb, cluster::Modality mod,
                       std::vector<std::size_t>& index) {
    std::vector<std::vector<std::size_t>> members(m.k);
    for (std::size_t i = 0; i < n; ++i) members[m.assignments[i]].push_back(i);
    for (std::size_t c = 0; c < m.k; ++c) {
      if (members[c].empty()) continue;
      ItrcNode node;
      node.id = g.nodes.size();
      node.modality = mod;
      node.cluster = c;
      node.mean = Eigen::RowVectorXd::Zero(emb.cols());
      for (auto i : members[c]) node.mean += emb.row(static_cast<Eigen::Index>(i));
      node.mean /= static_cast<double>(members[c].size());
      node.members = std::move(members[c]);
      index[c] = node.id;
      g.nodes.push_back(std::move(node));
    }
  };
  add_nodes(text_clusters, store.text, cluster::Modality::Text, text_node);
  add_nodes(image_clusters, store.image, cluster::Modality::Image, image_node);

  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i)
    groups[{text_node[text_clusters.assignments[i]], image_node[image_clusters.assignments[i]]}].push_back(i);

  g.pair_edge.assign(n, 0);
  for (auto& [ends, members] : groups) {
    ItrcEdge e;
    e.id = g.edges.size();
    e.text_node = ends.first;
    e.image_node = ends.second;
    const auto& t = g.nodes[ends.first].mean;
    const auto& im = g.nodes[ends.second].mean;
    e.feature.resize(t.size() + im.size());
    e.feature << t, im;
    for (auto i : members) g.pair_edge[i] = e.id;
    e.members = std::move(members);
    g.edges.push_back(std::move(e));
  }
  return g;
}

void label_edges(ItrcGraph& graph, const data::SplitAssignment& split, std::span<const int> labels,
                 std::uint64_t seed) {
  const std::size_t n = graph.num_pairs();
  if (split.tags.size() != n || labels.size() != n)
    throw std::invalid_argument("label_edges: split/labels cover " + std::to_string(split.tags.size()) +
                                "/" + std::to_string(labels.size()) + " pairs, graph has " +
                                std::to_string(n));
  num::SeededRng rng(seed);
  for (auto& e : graph.edges) {
    std::array<std::size_t, data::kNumClasses> train_votes{}, test_votes{};
    for (auto i : e.members) {
      const int y = labels[i];
      if (y < 0 || y >= data::kNumClasses)
        throw std::invalid_argument("label_edges: label " + std::to_string(y) + " out of range");
      if (split.tags[i] == data::SplitTag::Test) ++test_votes[static_cast<std::size_t>(y)];
      else ++train_votes[static_cast<std::size_t>(y)];
    }
    std::size_t train_total = 0;
    for (auto v : train_votes) train_total += v;
    e.train = train_total > 0;
    const auto& votes = e.train ? train_votes : test_votes;

    std::size_t best_count = 0;
    for (auto v : votes) best_count = std::max(best_count, v);
    std::vector<int> tied;
    for (int c = 0; c < data::kNumClasses; ++c)
      if (votes[static_cast<std::size_t>(c)] == best_count) tied.push_back(c);

    if (tied.size() == 1) {
      e.label = static_cast<data::Label>(tied[0]);
      e.source = e.train ? LabelSource::TrainMajority : LabelSource::TestMajority;
    } else {
      e.label = static_cast<data::Label>(tied[static_cast<std::size_t>(rng.below(tied.size()))]);
      e.source = LabelSource::TieRandom;
    }
  }
}

}  // namespace itrc::graph
