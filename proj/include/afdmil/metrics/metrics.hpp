#ifndef AFDMIL_METRICS_METRICS_HPP
#define AFDMIL_METRICS_METRICS_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "afdmil/numerics/types.hpp"

namespace afdmil {

inline constexpr double kDefaultThreshold = 0.5;

struct MetricsReport {
  double acc = 0.0;
  std::optional<double> auc;  // absent when only one label is present
  double recall = 0.0;
  double precision = 0.0;
  bool recall_degenerate = false;     // tp + fn == 0
  bool precision_degenerate = false;  // tp + fp == 0
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double threshold = kDefaultThreshold;
  std::optional<double> distill_precision_ch1;
  std::optional<double> distill_precision_ch2;

  std::size_t total() const { return tp + fp + tn + fn; }
};

/// Confusion counts and rates with prediction = prob ≥ threshold. Zero
/// denominators report 0 and set the matching degenerate flag. AUC is filled
/// when both labels occur.
MetricsReport classify_metrics(std::span<const double> probs, std::span<const int> labels,
                               double threshold = kDefaultThreshold);

/// Mann-Whitney statistic: the fraction of (positive, negative) pairs ranked
/// correctly, ties counting one half.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Fraction of `selected` whose latent label equals `witness_label`.
double selection_precision(std::span<const Index> selected, std::span<const int> latent,
                           int witness_label = 1);

struct BagSelection {
  std::vector<Index> selected;
  std::optional<std::vector<int>> latent;
  int label = 0;
};

/// Mean of selection_precision over bags with label 1. Returns nullopt when
/// no positive bag carries latent labels.
std::optional<double> distill_precision_at_k(std::span<const BagSelection> bags,
                                             int witness_label = 1);

}  // namespace afdmil

#endif  // AFDMIL_METRICS_METRICS_HPP
