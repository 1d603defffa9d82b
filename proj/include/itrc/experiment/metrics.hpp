#pragma once

#include "itrc/dataset/split.hpp"

#include <array>
#include <span>

namespace itrc::exp {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

/// Two-class report; class 0 is Similar, class 1 Complementary.
struct MetricsReport {
  std::array<ClassMetrics, 2> per_class{};
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t total = 0;
  std::array<std::array<std::size_t, 2>, 2> confusion{};  // [gold][pred]
};

/// Zero denominators give 0. Throws std::invalid_argument on empty or
/// unequal inputs and labels outside {0, 1}.
MetricsReport compute_metrics(std::span<const int> preds, std::span<const int> golds);

/// Metrics restricted to pairs tagged `tag`.
MetricsReport split_metrics(std::span<const int> preds, std::span<const int> golds,
                            const data::SplitAssignment& split, data::SplitTag tag = data::SplitTag::Test);

}  // namespace itrc::exp
