#pragma once

#include "itrc/dataset/store.hpp"

#include <cstdint>

namespace itrc::data {

/// Two label populations with Gaussian text/image embeddings. Per modality
/// the class means are c +- (separation / 2) * u for random unit c, u, and
/// noise has per-coordinate sd 1/sqrt(dim). Values are rounded to binary32 so
/// the store round-trips bitwise. Labels are balanced within one.
EmbeddingStore synth_generate(std::size_t n, double separation, std::uint64_t seed,
                              std::size_t dim = 512);

}  // namespace itrc::data
