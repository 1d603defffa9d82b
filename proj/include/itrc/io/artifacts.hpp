#pragma once

#include "itrc/cluster/kmeans.hpp"
#include "itrc/dataset/split.hpp"
#include "itrc/experiment/experiment.hpp"
#include "itrc/fusion/mlp.hpp"
#include "itrc/graph/line_graph.hpp"

#include "json.hpp"

#include <string>
#include <utility>

namespace itrc::io {

using Json = nlohmann::json;

class ArtifactError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// {"rows", "cols", "f64": base64 of little-endian binary64, row-major}
Json matrix_to_json(const num::Matrix& m);
num::Matrix matrix_from_json(const Json& j);

Json metrics_to_json(const exp::MetricsReport& r);

struct ClusterArtifact {
  std::uint64_t seed = 0;
  cluster::ClusterModel text;
  cluster::ClusterModel image;
};
Json clusters_to_json(const ClusterArtifact& a);
ClusterArtifact clusters_from_json(const Json& j);

/// Reduced line graph plus the split that labeled it.
struct GraphArtifact {
  std::uint64_t seed = 0;
  data::SplitAssignment split;
  graph::LineGraph line_graph;
  exp::GraphStats stats;
};
Json graph_to_json(const GraphArtifact& a);
GraphArtifact graph_from_json(const Json& j);

Json classifier_to_json(const fusion::MlpClassifier& m, const std::string& model_name);
std::pair<fusion::MlpClassifier, std::string> classifier_from_json(const Json& j);

Json trial_to_json(const exp::TrialResult& t);

Json load_json(const std::string& path);
void save_json(const Json& j, const std::string& path);

/// N x width float32 matrix, width inferred from the file size.
void save_f32_matrix(const num::Matrix& m, const std::string& path);
num::Matrix load_f32_matrix(const std::string& path, std::size_t rows);

}  // namespace itrc::io
