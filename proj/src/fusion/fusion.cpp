#include "itrc/fusion/fusion.hpp"

#include <stdexcept>

namespace itrc::fusion {

void FusionSpec::validate() const {
  if (selected() < 2) throw std::invalid_argument("fusion: at least two vectors must be selected");
  if (method == FusionMethod::AverageConcat && selected() != 3)
    throw std::invalid_argument("fusion: average+concatenation needs text, image and edge");
}

std::size_t FusionSpec::selected() const {
  return static_cast<std::size_t>(use_text) + static_cast<std::size_t>(use_image) +
         static_cast<std::size_t>(use_edge);
}

std::size_t FusionSpec::width(std::size_t d) const {
  validate();
  switch (method) {
    case FusionMethod::Average: return d;
    case FusionMethod::Concatenation: return d * selected();
    case FusionMethod::AverageConcat: return 2 * d;
  }
  return 0;
}

std::string FusionSpec::name() const {
  std::string s;
  auto part = [&](bool on, const char* tag) {
    if (!on) return;
    if (!s.empty()) s += '+';
    s += tag;
  };
  part(use_text, "T");
  part(use_image, "I");
  part(use_edge, "E");
  switch (method) {
    case FusionMethod::Average: return s + "(A)";
    case FusionMethod::Concatenation: return s + "(C)";
    case FusionMethod::AverageConcat: return s + "(A+C)";
  }
  return s;
}

FusionSpec parse_model(std::string_view name) {
  const auto open = name.find('(');
  if (open == std::string_view::npos || name.back() != ')')
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
  const auto vectors = name.substr(0, open);
  const auto method = name.substr(open + 1, name.size() - open - 2);
  FusionSpec spec;
  if (method == "A") spec.method = FusionMethod::Average;
  else if (method == "C") spec.method = FusionMethod::Concatenation;
  else if (method == "A+C") spec.method = FusionMethod::AverageConcat;
  else throw std::invalid_argument("unknown fusion method in model '" + std::string(name) + "'");

  std::size_t pos = 0;
  while (pos <= vectors.size()) {
    const auto next = vectors.find('+', pos);
    const auto tok = vectors.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    bool* flag = tok == "T" ? &spec.use_text : tok == "I" ? &spec.use_image : tok == "E" ? &spec.use_edge : nullptr;
    if (!flag || *flag) throw std::invalid_argument("bad vector list in model '" + std::string(name) + "'");
    *flag = true;
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  spec.validate();
  if (spec.name() != name) throw std::invalid_argument("model '" + std::string(name) + "' must be written as '" + spec.name() + "'");
  return spec;
}

const std::vector<FusionSpec>& all_models() {
  static const std::vector<FusionSpec> models = [] {
    std::vector<FusionSpec> out;
    for (const char* n : {"T+I(A)", "T+I(C)", "T+E(A)", "T+E(C)", "I+E(A)", "I+E(C)", "T+I+E(A)", "T+I+E(C)",
                          "T+I+E(A+C)"})
      out.push_back(parse_model(n));
    return out;
  }();
  return models;
}

std::vector<FusionSpec> parse_model_list(std::string_view list) {
  if (list == "all") return all_models();
  std::vector<FusionSpec> out;
  std::size_t pos = 0;
  while (pos < list.size()) {
    auto next = list.find(',', pos);
    if (next == std::string_view::npos) next = list.size();
    out.push_back(parse_model(list.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty model list");
  return out;
}

num::Matrix fuse(const FusionSpec& spec, const FusionInputs& in) {
  spec.validate();
  std::vector<const num::Matrix*> parts;
  auto take = [&](bool on, const num::Matrix* m, const char* what) {
    if (!on) return;
    if (!m) throw std::invalid_argument(std::string("fuse: ") + what + " vectors selected but not supplied");
    parts.push_back(m);
  };
  take(spec.use_text, in.text, "text");
  take(spec.use_image, in.image, "image");
  take(spec.use_edge, in.edge, "edge");
  const num::Matrix& first = *parts.front();
  for (const auto* m : parts)
    if (m->rows() != first.rows() || m->cols() != first.cols())
      throw num::DimensionError("fuse: input " + num::shape_string(*m) + " vs " + num::shape_string(first));

  const Eigen::Index d = first.cols();
  num::Matrix out(first.rows(), static_cast<Eigen::Index>(spec.width(static_cast<std::size_t>(d))));
  switch (spec.method) {
    case FusionMethod::Average: {
      out.setZero();
      for (const auto* m : parts) out += *m;
      out /= static_cast<double>(parts.size());
      break;
    }
    case FusionMethod::Concatenation:
      for (std::size_t k = 0; k < parts.size(); ++k) out.middleCols(static_cast<Eigen::Index>(k) * d, d) = *parts[k];
      break;
    case FusionMethod::AverageConcat:
      out.leftCols(d) = (*parts[0] + *parts[1]) / 2.0;
      out.rightCols(d) = *parts[2];
      break;
  }
  return out;
}

}  // namespace itrc::fusion
