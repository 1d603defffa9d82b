#include "itrc/io/artifacts.hpp"

#include "itrc/io/codec.hpp"

#include <span>

namespace itrc::io {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ArtifactError(std::string("artifact: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("artifact: field '") + key + "': " + e.what());
  }
}

void expect_format(const Json& j, const char* format) {
  if (field<std::string>(j, "format") != format)
    throw ArtifactError(std::string("artifact: expected format '") + format + "'");
}

const char* source_tag(graph::LabelSource s) { return source_name(s).data(); }

graph::LabelSource parse_source(const std::string& s) {
  for (auto v : {graph::LabelSource::TrainMajority, graph::LabelSource::TieRandom, graph::LabelSource::TestMajority})
    if (graph::source_name(v) == s) return v;
  throw ArtifactError("artifact: unknown label source '" + s + "'");
}

data::SplitTag parse_tag(const std::string& s) {
  for (auto v : {data::SplitTag::Train, data::SplitTag::Val, data::SplitTag::Test})
    if (data::tag_name(v) == s) return v;
  throw ArtifactError("artifact: unknown split tag '" + s + "'");
}

Json cluster_to_json(const cluster::ClusterModel& m) {
  return {{"k", m.k},
          {"modality", std::string(cluster::modality_name(m.modality))},
          {"iterations", m.iterations},
          {"converged", m.converged},
          {"objective_history", m.objective_history},
          {"assignments", m.assignments},
          {"centroids", matrix_to_json(m.centroids)}};
}

cluster::ClusterModel cluster_from_json(const Json& j, cluster::Modality expected) {
  cluster::ClusterModel m;
  m.k = field<std::size_t>(j, "k");
  m.modality = expected;
  if (field<std::string>(j, "modality") != cluster::modality_name(expected))
    throw ArtifactError("artifact: cluster modality mismatch");
  m.iterations = field<std::size_t>(j, "iterations");
  m.converged = field<bool>(j, "converged");
  m.objective_history = field<std::vector<double>>(j, "objective_history");
  m.assignments = field<std::vector<std::size_t>>(j, "assignments");
  m.centroids = matrix_from_json(j.at("centroids"));
  if (static_cast<std::size_t>(m.centroids.rows()) != m.k) throw ArtifactError("artifact: centroid count != k");
  for (auto a : m.assignments)
    if (a >= m.k) throw ArtifactError("artifact: cluster assignment out of range");
  return m;
}

}  // namespace

Json matrix_to_json(const num::Matrix& m) {
  const auto bytes = pack_f64le(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"f64", base64_encode(bytes)}};
}

num::Matrix matrix_from_json(const Json& j) {
  const auto rows = field<Eigen::Index>(j, "rows");
  const auto cols = field<Eigen::Index>(j, "cols");
  if (rows < 0 || cols < 0) throw ArtifactError("artifact: negative matrix shape");
  const auto values = unpack_f64le(base64_decode(field<std::string>(j, "f64")));
  if (values.size() != static_cast<std::size_t>(rows * cols))
    throw ArtifactError("artifact: matrix blob holds " + std::to_string(values.size()) + " values, expected " +
                        std::to_string(rows * cols));
  num::Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

Json metrics_to_json(const exp::MetricsReport& r) {
  Json j;
  const char* names[2] = {"Similar", "Complementary"};
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& m = r.per_class[c];
    j[names[c]] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  j["macro_f1"] = r.macro_f1;
  j["accuracy"] = r.accuracy;
  j["total"] = r.total;
  j["confusion"] = {{r.confusion[0][0], r.confusion[0][1]}, {r.confusion[1][0], r.confusion[1][1]}};
  return j;
}

Json clusters_to_json(const ClusterArtifact& a) {
  return {{"format", "itrc-clusters"}, {"version", 1}, {"seed", a.seed},
          {"text", cluster_to_json(a.text)}, {"image", cluster_to_json(a.image)}};
}

ClusterArtifact clusters_from_json(const Json& j) {
  expect_format(j, "itrc-clusters");
  ClusterArtifact a;
  a.seed = field<std::uint64_t>(j, "seed");
  a.text = cluster_from_json(j.at("text"), cluster::Modality::Text);
  a.image = cluster_from_json(j.at("image"), cluster::Modality::Image);
  if (a.text.assignments.size() != a.image.assignments.size())
    throw ArtifactError("artifact: text and image assignments cover different pair counts");
  return a;
}

Json graph_to_json(const GraphArtifact& a) {
  const auto& lg = a.line_graph;
  Json split = Json::array();
  for (auto t : a.split.tags) split.push_back(std::string(data::tag_name(t)));
  Json nodes = Json::array();
  for (std::size_t v = 0; v < lg.size(); ++v)
    nodes.push_back({{"id", v},
                     {"text_node", lg.endpoints[v].first},
                     {"image_node", lg.endpoints[v].second},
                     {"label", lg.labels[v]},
                     {"train", lg.train_mask[v] == 1},
                     {"source", source_tag(lg.sources[v])}});
  Json edges = Json::array();
  for (const auto& [u, v] : lg.edges) edges.push_back({u, v});
  const auto& s = a.stats;
  return {{"format", "itrc-graph"},
          {"version", 1},
          {"seed", a.seed},
          {"split_seed", a.split.seed},
          {"split", split},
          {"nodes", nodes},
          {"edges", edges},
          {"features", matrix_to_json(lg.features)},
          {"pair_map", lg.pair_map},
          {"stats",
           {{"text_nodes", s.text_nodes},
            {"image_nodes", s.image_nodes},
            {"line_nodes", s.line_nodes},
            {"train_nodes", s.train_nodes},
            {"test_nodes", s.test_nodes},
            {"edges_before", s.reduction.edges_before},
            {"removed", s.reduction.removed},
            {"added", s.reduction.added},
            {"edges_after", s.reduction.edges_after}}}};
}

GraphArtifact graph_from_json(const Json& j) {
  expect_format(j, "itrc-graph");
  GraphArtifact a;
  a.seed = field<std::uint64_t>(j, "seed");
  a.split.seed = field<std::uint64_t>(j, "split_seed");
  for (const auto& t : j.at("split")) a.split.tags.push_back(parse_tag(t.get<std::string>()));
  auto& lg = a.line_graph;
  for (const auto& n : j.at("nodes")) {
    lg.endpoints.push_back({field<std::size_t>(n, "text_node"), field<std::size_t>(n, "image_node")});
    lg.labels.push_back(field<int>(n, "label"));
    lg.train_mask.push_back(field<bool>(n, "train") ? 1 : 0);
    lg.sources.push_back(parse_source(field<std::string>(n, "source")));
  }
  for (const auto& e : j.at("edges")) {
    const auto u = e.at(0).get<std::size_t>(), v = e.at(1).get<std::size_t>();
    if (u >= v || v >= lg.size()) throw ArtifactError("artifact: bad line-graph edge");
    lg.edges.push_back({u, v});
  }
  lg.features = matrix_from_json(j.at("features"));
  if (static_cast<std::size_t>(lg.features.rows()) != lg.size())
    throw ArtifactError("artifact: feature rows disagree with node count");
  lg.pair_map = field<std::vector<std::size_t>>(j, "pair_map");
  for (auto v : lg.pair_map)
    if (v >= lg.size()) throw ArtifactError("artifact: pair_map points past the node list");
  if (lg.pair_map.size() != a.split.tags.size()) throw ArtifactError("artifact: pair_map and split disagree");
  const auto& s = j.at("stats");
  a.stats.text_nodes = field<std::size_t>(s, "text_nodes");
  a.stats.image_nodes = field<std::size_t>(s, "image_nodes");
  a.stats.line_nodes = field<std::size_t>(s, "line_nodes");
  a.stats.train_nodes = field<std::size_t>(s, "train_nodes");
  a.stats.test_nodes = field<std::size_t>(s, "test_nodes");
  a.stats.reduction = {field<std::size_t>(s, "edges_before"), field<std::size_t>(s, "removed"),
                       field<std::size_t>(s, "added"), field<std::size_t>(s, "edges_after")};
  return a;
}

Json classifier_to_json(const fusion::MlpClassifier& m, const std::string& model_name) {
  const auto& c = m.config;
  Json params = Json::object();
  for (const auto& p : m.parameters()) params[p.name] = matrix_to_json(p.tensor.value());
  return {{"format", "itrc-classifier"},
          {"version", 1},
          {"model", model_name},
          {"input_dim", m.input_dim},
          {"config",
           {{"hidden1", c.hidden1}, {"hidden2", c.hidden2}, {"classes", c.classes}, {"dropout", c.dropout},
            {"batch_size", c.batch_size}, {"epochs", c.epochs}, {"patience", c.patience}, {"lr", c.lr},
            {"seed", c.seed}}},
          {"parameters", params}};
}

std::pair<fusion::MlpClassifier, std::string> classifier_from_json(const Json& j) {
  expect_format(j, "itrc-classifier");
  const auto& c = j.at("config");
  fusion::MlpConfig cfg;
  cfg.hidden1 = field<std::size_t>(c, "hidden1");
  cfg.hidden2 = field<std::size_t>(c, "hidden2");
  cfg.classes = field<std::size_t>(c, "classes");
  cfg.dropout = field<double>(c, "dropout");
  cfg.batch_size = field<std::size_t>(c, "batch_size");
  cfg.epochs = field<std::size_t>(c, "epochs");
  cfg.patience = field<std::size_t>(c, "patience");
  cfg.lr = field<double>(c, "lr");
  cfg.seed = field<std::uint64_t>(c, "seed");
  num::SeededRng rng(0);
  auto m = fusion::init_mlp(cfg, field<std::size_t>(j, "input_dim"), rng);
  const auto& params = j.at("parameters");
  for (auto& p : m.parameters()) {
    if (!params.contains(p.name)) throw ArtifactError("artifact: missing parameter '" + p.name + "'");
    num::Matrix v = matrix_from_json(params.at(p.name));
    if (v.rows() != p.tensor.rows() || v.cols() != p.tensor.cols())
      throw ArtifactError("artifact: parameter '" + p.name + "' has shape " + num::shape_string(v));
    p.tensor.mutable_value() = std::move(v);
  }
  return {std::move(m), field<std::string>(j, "model")};
}

Json trial_to_json(const exp::TrialResult& t) {
  Json j = {{"model", t.model}, {"seed", t.seed}, {"metrics", metrics_to_json(t.metrics)}, {"stages", t.stages}};
  if (t.graph) {
    const auto& s = *t.graph;
    j["graph"] = {{"text_nodes", s.text_nodes},       {"image_nodes", s.image_nodes},
                  {"line_nodes", s.line_nodes},       {"train_nodes", s.train_nodes},
                  {"test_nodes", s.test_nodes},       {"edges_before", s.reduction.edges_before},
                  {"removed", s.reduction.removed},   {"added", s.reduction.added},
                  {"edges_after", s.reduction.edges_after}};
  }
  if (t.gcn_metrics) j["gcn_metrics"] = metrics_to_json(*t.gcn_metrics);
  return j;
}

Json load_json(const std::string& path) {
  const auto bytes = read_file(path);
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::exception& e) {
    throw ArtifactError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void save_json(const Json& j, const std::string& path) { write_text(path, j.dump(1) + "\n"); }

void save_f32_matrix(const num::Matrix& m, const std::string& path) {
  write_file(path, pack_f32le(std::span<const double>(m.data(), static_cast<std::size_t>(m.size()))));
}

num::Matrix load_f32_matrix(const std::string& path, std::size_t rows) {
  const auto bytes = read_file(path);
  if (rows == 0 || bytes.size() % (4 * rows) != 0)
    throw ArtifactError("'" + path + "' holds " + std::to_string(bytes.size()) + " bytes, not a multiple of 4x" +
                        std::to_string(rows));
  const auto values = unpack_f32le(bytes);
  num::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(values.size() / rows));
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

}  // namespace itrc::io
