#include "itrc/dataset/synth.hpp"

#include "itrc/numerics/rng.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace itrc::data {

namespace {

Eigen::RowVectorXd random_unit(std::size_t dim, num::SeededRng& rng) {
  Eigen::RowVectorXd v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = rng.normal();
  return v / v.norm();
}

}  // namespace

EmbeddingStore synth_generate(std::size_t n, double separation, std::uint64_t seed, std::size_t dim) {
  if (n < 4) throw std::invalid_argument("synth_generate: n must be at least 4");
  if (!(separation >= 0.0)) throw std::invalid_argument("synth_generate: separation must be >= 0");
  if (dim == 0) throw std::invalid_argument("synth_generate: dim must be positive");

  num::SeededRng rng(seed);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2 == 0 ? Label::Similar : Label::Complementary;
  rng.shuffle(std::span<Label>(labels));

  EmbeddingStore store;
  store.dim = dim;
  store.text.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  store.image.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  const double sd = 1.0 / std::sqrt(static_cast<double>(dim));

  for (num::Matrix* m : {&store.text, &store.image}) {
    const Eigen::RowVectorXd center = random_unit(dim, rng);
    const Eigen::RowVectorXd axis = random_unit(dim, rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double sign = labels[i] == Label::Similar ? -1.0 : 1.0;
      const Eigen::RowVectorXd mean = center + sign * 0.5 * separation * axis;
      for (std::size_t j = 0; j < dim; ++j) {
        const double v = mean(static_cast<Eigen::Index>(j)) + sd * rng.normal();
        (*m)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            static_cast<double>(static_cast<float>(v));
      }
    }
  }

  store.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "synth-%06zu", i);
    store.records[i].pair_id = id;
    store.records[i].label = labels[i];
  }
  return store;
}

}  // namespace itrc::data
