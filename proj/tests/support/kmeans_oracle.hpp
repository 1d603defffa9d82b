#pragma once

// Exhaustive 2-partition search for spherical k-means with K=2.

#include "itrc/numerics/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace itrc::testing {

struct BestPartition {
  std::vector<int> side;  // 0/1 per row, row 0 always on side 0
  double cost = std::numeric_limits<double>::infinity();
};

/// Rows must already be unit length.
inline BestPartition brute_force_two_means(const num::Matrix& unit_rows) {
  const auto n = static_cast<int>(unit_rows.rows());
  BestPartition best;
  for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> side(static_cast<std::size_t>(n), 0);
    for (int i = 1; i < n; ++i) side[static_cast<std::size_t>(i)] = (mask >> (i - 1)) & 1u;
    double cost = 0.0;
    bool ok = true;
    for (int s = 0; s < 2 && ok; ++s) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(unit_rows.cols());
      int members = 0;
      for (int i = 0; i < n; ++i)
        if (side[static_cast<std::size_t>(i)] == s) {
          sum += unit_rows.row(i);
          ++members;
        }
      if (members == 0) {
        ok = false;
        break;
      }
      const Eigen::RowVectorXd c = sum / sum.norm();
      for (int i = 0; i < n; ++i)
        if (side[static_cast<std::size_t>(i)] == s) cost += 1.0 - unit_rows.row(i).dot(c);
    }
    if (ok && cost < best.cost) {
      best.cost = cost;
      best.side = side;
    }
  }
  return best;
}

}  // namespace itrc::testing
