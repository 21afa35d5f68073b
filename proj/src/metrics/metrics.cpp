#include "afdmil/metrics/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "afdmil/numerics/errors.hpp"

namespace afdmil {

MetricsReport classify_metrics(std::span<const double> probs, std::span<const int> labels,
                               double threshold) {
  if (probs.empty()) {
    throw ConfigError("classify_metrics: no predictions");
  }
  if (probs.size() != labels.size()) {
    throw DimensionError("classify_metrics: " + std::to_string(probs.size()) + " probs vs " +
                         std::to_string(labels.size()) + " labels");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("classify_metrics: threshold must lie in (0, 1)");
  }
  MetricsReport r;
  r.threshold = threshold;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= threshold;
    const bool actual = labels[i] == 1;
    if (predicted && actual) {
      ++r.tp;
    } else if (predicted) {
      ++r.fp;
    } else if (actual) {
      ++r.fn;
    } else {
      ++r.tn;
    }
  }
  r.acc = static_cast<double>(r.tp + r.tn) / static_cast<double>(r.total());
  r.recall_degenerate = r.tp + r.fn == 0;
  r.recall = r.recall_degenerate ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.precision_degenerate = r.tp + r.fp == 0;
  r.precision =
      r.precision_degenerate ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (!r.recall_degenerate && r.tn + r.fp > 0) {
    r.auc = auc(probs, labels);
  }
  return r;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("auc: " + std::to_string(scores.size()) + " scores vs " +
                         std::to_string(labels.size()) + " labels");
  }
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    (labels[i] == 1 ? pos : neg).push_back(scores[i]);
  }
  if (pos.empty() || neg.empty()) {
    throw ConfigError("auc: undefined without both positive and negative labels");
  }
  // Sort negatives once; each positive counts the negatives strictly below it
  // plus half of those equal to it. Counts are integers, so the result is the
  // exact pairwise statistic.
  std::sort(neg.begin(), neg.end());
  double twice_wins = 0.0;
  for (double p : pos) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    twice_wins += 2.0 * static_cast<double>(lo - neg.begin()) + static_cast<double>(hi - lo);
  }
  return twice_wins / (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double selection_precision(std::span<const Index> selected, std::span<const int> latent,
                           int witness_label) {
  if (selected.empty()) {
    throw ConfigError("selection_precision: empty selection");
  }
  std::size_t hits = 0;
  for (Index i : selected) {
    if (i < 0 || static_cast<std::size_t>(i) >= latent.size()) {
      throw DimensionError("selection_precision: index " + std::to_string(i) + " outside bag of " +
                           std::to_string(latent.size()));
    }
    hits += latent[static_cast<std::size_t>(i)] == witness_label ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(selected.size());
}

std::optional<double> distill_precision_at_k(std::span<const BagSelection> bags, int witness_label) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& b : bags) {
    if (b.label != 1 || !b.latent || b.selected.empty()) {
      continue;
    }
    sum += selection_precision(b.selected, *b.latent, witness_label);
    ++count;
  }
  if (count == 0) {
    return std::nullopt;
  }
  return sum / static_cast<double>(count);
}

}  // namespace afdmil
