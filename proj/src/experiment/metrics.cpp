#include "itrc/experiment/metrics.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace itrc::exp {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport compute_metrics(std::span<const int> preds, std::span<const int> golds) {
  if (preds.empty()) throw std::invalid_argument("compute_metrics: no predictions");
  if (preds.size() != golds.size())
    throw std::invalid_argument("compute_metrics: " + std::to_string(preds.size()) + " predictions for " +
                                std::to_string(golds.size()) + " labels");
  MetricsReport r;
  r.total = preds.size();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || preds[i] > 1 || golds[i] < 0 || golds[i] > 1)
      throw std::invalid_argument("compute_metrics: label outside {0, 1} at " + std::to_string(i));
    ++r.confusion[static_cast<std::size_t>(golds[i])][static_cast<std::size_t>(preds[i])];
  }
  std::size_t correct = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t tp = r.confusion[c][c];
    const std::size_t predicted = r.confusion[0][c] + r.confusion[1][c];
    const std::size_t gold = r.confusion[c][0] + r.confusion[c][1];
    auto& m = r.per_class[c];
    m.support = gold;
    m.precision = ratio(tp, predicted);
    m.recall = ratio(tp, gold);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    correct += tp;
  }
  r.macro_f1 = (r.per_class[0].f1 + r.per_class[1].f1) / 2.0;
  r.accuracy = ratio(correct, r.total);
  return r;
}

MetricsReport split_metrics(std::span<const int> preds, std::span<const int> golds,
                            const data::SplitAssignment& split, data::SplitTag tag) {
  if (preds.size() != split.tags.size() || golds.size() != split.tags.size())
    throw std::invalid_argument("split_metrics: inputs do not cover the split");
  std::vector<int> p, g;
  for (std::size_t i = 0; i < split.tags.size(); ++i)
    if (split.tags[i] == tag) {
      p.push_back(preds[i]);
      g.push_back(golds[i]);
    }
  return compute_metrics(p, g);
}

}  // namespace itrc::exp
