#pragma once

#include "itrc/numerics/tensor.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace itrc::cluster {

enum class Modality { Text, Image };

std::string_view modality_name(Modality m);

struct KMeansOptions {
  std::size_t k = 100;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
};

/// Spherical k-means result. Centroids have unit L2 norm.
struct ClusterModel {
  std::size_t k = 0;
  Modality modality = Modality::Text;
  num::Matrix centroids;                  // k x dim
  std::vector<std::size_t> assignments;   // per item, in [0, k)
  std::vector<double> objective_history;  // after each Lloyd iteration
  std::size_t iterations = 0;
  bool converged = false;

  std::size_t dim() const { return static_cast<std::size_t>(centroids.cols()); }
  std::vector<std::size_t> cluster_sizes() const;
};

/// Row-wise L2 normalization. Throws std::invalid_argument on a zero row.
num::Matrix normalize_rows(const num::Matrix& x);

/// Lloyd's algorithm on L2-normalized rows with cosine similarity.
///
/// Seeding is k-means++ with weights 1 - cos (the squared chord distance on
/// the sphere, up to a factor 2). Each iteration assigns every row to the
/// centroid of maximum cosine (lowest index on ties), repairs empty clusters
/// by moving in the row farthest from its centroid, then resets centroids to
/// the renormalized member means. Stops once assignments stop changing.
ClusterModel kmeans_fit(const num::Matrix& x, const KMeansOptions& opts,
                        Modality modality = Modality::Text);

/// sum_i (1 - cos(x_i, centroid(assign_i))).
double objective(const num::Matrix& x, const ClusterModel& model);

}  // namespace itrc::cluster
