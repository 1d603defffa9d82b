#include "doctest.h"

#include "itrc/cluster/kmeans.hpp"
#include "itrc/numerics/rng.hpp"
#include "support/gradcheck.hpp"
#include "support/kmeans_oracle.hpp"

#include <map>
#include <set>

using namespace itrc;
using namespace itrc::cluster;
using itrc::testing::random_matrix;

namespace {

num::Matrix four_points() {
  num::Matrix x(4, 2);
  x << 1.0, 0.0, 0.98, 0.2, 0.0, 1.0, 0.2, 0.98;
  return normalize_rows(x);
}

num::Matrix blobs(std::size_t per_blob, std::size_t blobs, std::size_t dim, num::SeededRng& rng) {
  num::Matrix centers = random_matrix(static_cast<Eigen::Index>(blobs), static_cast<Eigen::Index>(dim), rng);
  num::Matrix x(static_cast<Eigen::Index>(per_blob * blobs), static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < blobs; ++b)
    for (std::size_t i = 0; i < per_blob; ++i)
      x.row(static_cast<Eigen::Index>(b * per_blob + i)) =
          centers.row(static_cast<Eigen::Index>(b)) +
          0.01 * random_matrix(1, static_cast<Eigen::Index>(dim), rng);
  return x;
}

}  // namespace

TEST_CASE("K=1 puts everything in cluster 0 with the normalized mean") {
  num::SeededRng rng(1);
  num::Matrix x = random_matrix(20, 6, rng, 0.1, 1.0);
  auto m = kmeans_fit(x, {.k = 1, .seed = 3, .max_iter = 100});
  for (auto a : m.assignments) CHECK(a == 0);
  Eigen::RowVectorXd mean = normalize_rows(x).colwise().sum();
  mean /= mean.norm();
  CHECK((m.centroids.row(0) - mean).norm() < 1e-12);
  CHECK(m.converged);
}

TEST_CASE("N=K distinct vectors fit perfectly") {
  num::SeededRng rng(2);
  num::Matrix x = random_matrix(9, 5, rng);
  auto m = kmeans_fit(x, {.k = 9, .seed = 4});
  std::set<std::size_t> used(m.assignments.begin(), m.assignments.end());
  CHECK(used.size() == 9);
  CHECK(std::abs(objective(x, m)) < 1e-12);
}

TEST_CASE("four-point example matches the brute-force optimal 2-partition") {
  const num::Matrix x = four_points();
  const auto best = itrc::testing::brute_force_two_means(x);
  CHECK(best.side == std::vector<int>{0, 0, 1, 1});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto m = kmeans_fit(x, {.k = 2, .seed = seed});
    CHECK(m.assignments[0] == m.assignments[1]);
    CHECK(m.assignments[2] == m.assignments[3]);
    CHECK(m.assignments[0] != m.assignments[2]);
    CHECK(objective(x, m) == doctest::Approx(best.cost).epsilon(1e-12));
  }
}

TEST_CASE("objective is non-increasing per iteration; centroids unit; no empty clusters") {
  num::SeededRng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 5 + rng.below(120);
    const auto dim = 2 + rng.below(12);
    const auto k = 1 + rng.below(std::min<std::uint64_t>(n, 15));
    num::Matrix x = random_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim), rng);
    auto m = kmeans_fit(x, {.k = k, .seed = rng.next_u64(), .max_iter = 100});
    REQUIRE(!m.objective_history.empty());
    for (std::size_t i = 1; i < m.objective_history.size(); ++i)
      CHECK(m.objective_history[i] <= m.objective_history[i - 1] + 1e-10);
    for (Eigen::Index j = 0; j < m.centroids.rows(); ++j)
      CHECK(std::abs(m.centroids.row(j).norm() - 1.0) < 1e-12);
    for (auto s : m.cluster_sizes()) CHECK(s > 0);
    CHECK(objective(x, m) >= 0.0);
  }
}

TEST_CASE("duplicate rows with K above the distinct count still leave no empty cluster") {
  num::Matrix x(6, 2);
  x << 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1;
  auto m = kmeans_fit(x, {.k = 4, .seed = 9});
  for (auto s : m.cluster_sizes()) CHECK(s > 0);
}

TEST_CASE("fixed seed gives identical assignments and centroids") {
  num::SeededRng rng(5);
  num::Matrix x = random_matrix(200, 16, rng);
  auto a = kmeans_fit(x, {.k = 12, .seed = 42});
  auto b = kmeans_fit(x, {.k = 12, .seed = 42});
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids == b.centroids);
  CHECK(a.objective_history == b.objective_history);
}

TEST_CASE("permuting well-separated rows gives the same partition up to relabeling") {
  num::SeededRng rng(13);
  num::Matrix x = blobs(15, 5, 8, rng);
  const auto n = static_cast<std::size_t>(x.rows());
  const auto perm = rng.permutation(n);
  num::Matrix xp(x.rows(), x.cols());
  for (std::size_t i = 0; i < n; ++i) xp.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));

  auto a = kmeans_fit(x, {.k = 5, .seed = 1});
  auto b = kmeans_fit(xp, {.k = 5, .seed = 1});
  std::vector<std::size_t> back(n);
  for (std::size_t i = 0; i < n; ++i) back[perm[i]] = b.assignments[i];

  std::map<std::size_t, std::size_t> relabel;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = relabel.emplace(a.assignments[i], back[i]);
    CHECK(it->second == back[i]);
  }
  std::set<std::size_t> images;
  for (auto& [from, to] : relabel) images.insert(to);
  CHECK(images.size() == relabel.size());
}

TEST_CASE("errors: K > N, zero-norm row") {
  num::Matrix x = num::Matrix::Ones(3, 2);
  CHECK_THROWS_AS(kmeans_fit(x, {.k = 4}), std::invalid_argument);
  x.row(1).setZero();
  CHECK_THROWS_AS(kmeans_fit(x, {.k = 2}), std::invalid_argument);
}
