#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace itrc::data {

enum class SplitTag : std::uint8_t { Train, Val, Test };

std::string_view tag_name(SplitTag t);

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

/// Parses "0.6,0.2,0.2".
SplitRatios parse_ratios(std::string_view text);

struct SplitAssignment {
  std::vector<SplitTag> tags;
  std::uint64_t seed = 0;

  std::vector<std::size_t> indices(SplitTag t) const;
  std::size_t count(SplitTag t) const;
};

/// Seeded shuffle, then contiguous partition: floor(train*N) train rows,
/// floor(val*N) validation, the remainder test. Ratios must sum to 1.
SplitAssignment split(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace itrc::data
