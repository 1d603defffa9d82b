#include "itrc/cluster/kmeans.hpp"

#include "itrc/numerics/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace itrc::cluster {

std::string_view modality_name(Modality m) { return m == Modality::Text ? "text" : "image"; }

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto a : assignments) ++sizes[a];
  return sizes;
}

num::Matrix normalize_rows(const num::Matrix& x) {
  num::Matrix out = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double norm = x.row(i).norm();
    if (!(norm > 0.0)) throw std::invalid_argument("row " + std::to_string(i) + " has zero norm");
    out.row(i) /= norm;
  }
  return out;
}

namespace {

num::Matrix seed_plus_plus(const num::Matrix& xn, std::size_t k, num::SeededRng& rng) {
  const auto n = static_cast<std::size_t>(xn.rows());
  num::Matrix centroids(static_cast<Eigen::Index>(k), xn.cols());
  std::vector<std::uint8_t> chosen(n, 0);

  std::size_t first = static_cast<std::size_t>(rng.below(n));
  centroids.row(0) = xn.row(static_cast<Eigen::Index>(first));
  chosen[first] = 1;
  Eigen::VectorXd dist = (1.0 - (xn * xn.row(static_cast<Eigen::Index>(first)).transpose()).array())
                             .max(0.0)
                             .matrix();

  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i)
      if (chosen[i]) dist(static_cast<Eigen::Index>(i)) = 0.0;
    const double total = dist.sum();
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = dist(static_cast<Eigen::Index>(i));
        if (d <= 0.0) continue;
        acc += d;
        pick = i;
        if (acc > target) break;
      }
    } else {
      // Every remaining row coincides with a centroid; take any unused one.
      std::vector<std::size_t> unused;
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) unused.push_back(i);
      pick = unused[static_cast<std::size_t>(rng.below(unused.size()))];
    }
    chosen[pick] = 1;
    centroids.row(static_cast<Eigen::Index>(j)) = xn.row(static_cast<Eigen::Index>(pick));
    const Eigen::VectorXd d_new =
        (1.0 - (xn * xn.row(static_cast<Eigen::Index>(pick)).transpose()).array()).max(0.0).matrix();
    dist = dist.cwiseMin(d_new);
  }
  return centroids;
}

double objective_normalized(const num::Matrix& xn, const num::Matrix& centroids,
                            const std::vector<std::size_t>& assign) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < xn.rows(); ++i)
    total += std::max(0.0, 1.0 - xn.row(i).dot(centroids.row(
                               static_cast<Eigen::Index>(assign[static_cast<std::size_t>(i)]))));
  return total;
}

}  // namespace

ClusterModel kmeans_fit(const num::Matrix& x, const KMeansOptions& opts, Modality modality) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (opts.k == 0) throw std::invalid_argument("kmeans_fit: K must be positive");
  if (opts.k > n)
    throw std::invalid_argument("kmeans_fit: K=" + std::to_string(opts.k) + " exceeds N=" +
                                std::to_string(n));
  if (opts.max_iter == 0) throw std::invalid_argument("kmeans_fit: max_iter must be positive");

  const num::Matrix xn = normalize_rows(x);
  num::SeededRng rng(opts.seed);

  ClusterModel model;
  model.k = opts.k;
  model.modality = modality;
  model.centroids = seed_plus_plus(xn, opts.k, rng);
  model.assignments.assign(n, std::numeric_limits<std::size_t>::max());

  std::vector<std::size_t> sizes(opts.k);
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    const num::Matrix sims = xn * model.centroids.transpose();
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      sims.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
      const auto b = static_cast<std::size_t>(best);
      if (model.assignments[i] != b) {
        model.assignments[i] = b;
        changed = true;
      }
    }

    std::fill(sizes.begin(), sizes.end(), 0);
    for (auto a : model.assignments) ++sizes[a];
    for (std::size_t j = 0; j < opts.k; ++j) {
      if (sizes[j] != 0) continue;
      std::size_t far = n;
      double far_sim = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = model.assignments[i];
        if (sizes[a] < 2) continue;
        const double s = xn.row(static_cast<Eigen::Index>(i)).dot(model.centroids.row(static_cast<Eigen::Index>(a)));
        if (s < far_sim) {
          far_sim = s;
          far = i;
        }
      }
      --sizes[model.assignments[far]];
      model.assignments[far] = j;
      sizes[j] = 1;
      model.centroids.row(static_cast<Eigen::Index>(j)) = xn.row(static_cast<Eigen::Index>(far));
      changed = true;
    }

    num::Matrix sum = num::Matrix::Zero(model.centroids.rows(), model.centroids.cols());
    for (std::size_t i = 0; i < n; ++i)
      sum.row(static_cast<Eigen::Index>(model.assignments[i])) += xn.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < opts.k; ++j) {
      const double norm = sum.row(static_cast<Eigen::Index>(j)).norm();
      // A member mean at the origin has no direction; keep the old centroid.
      if (norm > 1e-12) model.centroids.row(static_cast<Eigen::Index>(j)) = sum.row(static_cast<Eigen::Index>(j)) / norm;
    }

    model.objective_history.push_back(objective_normalized(xn, model.centroids, model.assignments));
    model.iterations = iter + 1;
    if (!changed) {
      model.converged = true;
      break;
    }
  }
  return model;
}

double objective(const num::Matrix& x, const ClusterModel& model) {
  if (static_cast<std::size_t>(x.cols()) != model.dim())
    throw std::invalid_argument("objective: data width does not match centroids");
  if (static_cast<std::size_t>(x.rows()) != model.assignments.size())
    throw std::invalid_argument("objective: row count does not match assignments");
  return objective_normalized(normalize_rows(x), model.centroids, model.assignments);
}

}  // namespace itrc::cluster
