#pragma once

#include "itrc/numerics/tensor.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace itrc::fusion {

enum class FusionMethod { Average, Concatenation, AverageConcat };

struct FusionSpec {
  bool use_text = false;
  bool use_image = false;
  bool use_edge = false;
  FusionMethod method = FusionMethod::Concatenation;

  /// Throws std::invalid_argument for fewer than two inputs, or AverageConcat
  /// without all three.
  void validate() const;
  std::size_t selected() const;
  /// Fused width for per-vector width d.
  std::size_t width(std::size_t d) const;
  /// Table name, e.g. "T+I+E(A+C)".
  std::string name() const;
  bool baseline() const { return !use_edge; }
};

/// Parses a model name such as "T+E(C)". Throws std::invalid_argument.
FusionSpec parse_model(std::string_view name);

/// The nine comparison models, baselines first.
const std::vector<FusionSpec>& all_models();

/// Parses "all" or a comma-separated list of model names.
std::vector<FusionSpec> parse_model_list(std::string_view list);

struct FusionInputs {
  const num::Matrix* text = nullptr;
  const num::Matrix* image = nullptr;
  const num::Matrix* edge = nullptr;
};

/// Row-wise fusion. Average is the mean of the selected vectors;
/// Concatenation stacks them in T, I, E order; AverageConcat is
/// [mean(T, I) | E]. Selected inputs must share row count and width.
num::Matrix fuse(const FusionSpec& spec, const FusionInputs& in);

}  // namespace itrc::fusion
