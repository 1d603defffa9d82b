#include "itrc/dataset/split.hpp"

#include "itrc/numerics/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace itrc::data {

std::string_view tag_name(SplitTag t) {
  switch (t) {
    case SplitTag::Train: return "train";
    case SplitTag::Val: return "val";
    case SplitTag::Test: return "test";
  }
  return "?";
}

SplitRatios parse_ratios(std::string_view text) {
  std::array<double, 3> v{};
  std::size_t k = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string part(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (k >= 3) throw std::invalid_argument("split ratios: expected three values");
    try {
      std::size_t used = 0;
      v[k++] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw std::invalid_argument("split ratios: cannot parse '" + part + "'");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (k != 3) throw std::invalid_argument("split ratios: expected three values");
  return {v[0], v[1], v[2]};
}

std::vector<std::size_t> SplitAssignment::indices(SplitTag t) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tags.size(); ++i)
    if (tags[i] == t) out.push_back(i);
  return out;
}

std::size_t SplitAssignment::count(SplitTag t) const {
  std::size_t c = 0;
  for (auto tag : tags) c += tag == t;
  return c;
}

SplitAssignment split(std::size_t n, const SplitRatios& r, std::uint64_t seed) {
  if (r.train < 0 || r.val < 0 || r.test < 0)
    throw std::invalid_argument("split ratios must be non-negative");
  if (std::abs(r.train + r.val + r.test - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios sum to " + std::to_string(r.train + r.val + r.test) +
                                ", expected 1");
  const auto n_train = static_cast<std::size_t>(std::floor(r.train * static_cast<double>(n) + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(r.val * static_cast<double>(n) + 1e-9));

  num::SeededRng rng(seed);
  const auto order = rng.permutation(n);
  SplitAssignment out;
  out.seed = seed;
  out.tags.assign(n, SplitTag::Test);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < n_train) out.tags[order[k]] = SplitTag::Train;
    else if (k < n_train + n_val) out.tags[order[k]] = SplitTag::Val;
  }
  return out;
}

}  // namespace itrc::data
