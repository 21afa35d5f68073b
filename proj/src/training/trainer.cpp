#include "afdmil/training/trainer.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "afdmil/data/synth.hpp"
#include "afdmil/model/forward.hpp"
#include "afdmil/numerics/errors.hpp"
#include "afdmil/numerics/rng.hpp"

namespace afdmil {

namespace {

bool can_split(const Dataset& ds, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    return false;
  }
  for (int label : {0, 1}) {
    const auto count = static_cast<double>(ds.count_label(label));
    const auto take = std::llround(fraction * count);
    if (take < 1 || take >= static_cast<long long>(count)) {
      return false;
    }
  }
  return true;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : ""; }

}  // namespace

void TrainConfig::validate() const {
  adam.validate();
  forward.validate();
  if (epochs < 1) {
    throw ConfigError("train: epochs must be >= 1, got " + std::to_string(epochs));
  }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("train: validation fraction must lie in [0, 1)");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("train: threshold must lie in (0, 1)");
  }
}

MetricsReport evaluate(const AfdModel& model, const Dataset& dataset, const ForwardOptions& options,
                       double threshold) {
  std::vector<double> probs;
  std::vector<int> labels;
  std::vector<BagSelection> ch1, ch2;
  for (const Bag& bag : dataset.bags) {
    const ForwardTrace trace = forward_bag(model, bag, options);
    probs.push_back(trace.final_prob);
    labels.push_back(bag.label);
    if (bag.latent) {
      std::vector<Index> positive(trace.channel1_indices.begin(),
                                  trace.channel1_indices.begin() +
                                      static_cast<std::ptrdiff_t>(trace.channel1_positive));
      ch1.push_back({std::move(positive), bag.latent, bag.label});
      ch2.push_back({trace.channel2_indices, bag.latent, bag.label});
    }
  }
  MetricsReport report = classify_metrics(probs, labels, threshold);
  report.distill_precision_ch1 = distill_precision_at_k(ch1);
  report.distill_precision_ch2 = distill_precision_at_k(ch2);
  return report;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.bags.empty()) {
    throw ConfigError("train: dataset has no bags");
  }
  const Rng root(config.seed);

  Dataset fit = dataset;
  std::optional<Dataset> validation;
  if (can_split(dataset, config.validation_fraction)) {
    auto [a, b] = split(dataset, config.validation_fraction, root.stream("validation").seed());
    fit = std::move(a);
    validation = std::move(b);
  } else if (config.validation_fraction > 0.0) {
    spdlog::warn("train: {} bags too few for a stratified {} validation split; training on all",
                 dataset.bags.size(), config.validation_fraction);
  }

  ModelDims dims = config.dims;
  dims.n = dataset.dim;
  Rng init = root.stream("init");
  TrainResult result{AfdModel(dims, init), {}, 0, fit.bags.size(),
                     validation ? validation->bags.size() : 0};
  AfdModel& model = result.model;
  for (const Bag& bag : fit.bags) {
    validate_bag(bag, dims.n);
  }

  AdamState adam;
  std::vector<std::vector<Matrix>> snapshots;
  std::vector<std::size_t> order(fit.bags.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle = root.stream("shuffle", static_cast<std::uint64_t>(epoch));
    shuffle.shuffle(std::span<std::size_t>(order));

    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t idx : order) {
      const Bag& bag = fit.bags[idx];
      ForwardTrace trace;
      try {
        trace = accumulate_gradients(model, bag.features, bag.label, config.forward);
      } catch (const NumericError& e) {
        throw NumericError(fmt::format("train: diverged in epoch {} on bag '{}': {}", epoch,
                                       bag.id, e.what()));
      }
      if (!std::isfinite(trace.total_loss)) {
        throw NumericError(fmt::format("train: total loss not finite in epoch {}", epoch));
      }
      rec.loss1 += trace.loss1;
      rec.loss2 += trace.loss2;
      rec.loss3 += trace.loss3;
      rec.total += trace.total_loss;
      try {
        adam_step(model.params(), adam, config.adam);
      } catch (const NumericError& e) {
        throw NumericError(fmt::format("train: epoch {}: {}", epoch, e.what()));
      }
    }
    const auto n = static_cast<double>(fit.bags.size());
    rec.loss1 /= n;
    rec.loss2 /= n;
    rec.loss3 /= n;
    rec.total /= n;
    if (validation) {
      rec.validation = evaluate(model, *validation, config.forward, config.threshold);
    }
    spdlog::debug("epoch {}: total {:.5f} val auc {}", epoch, rec.total,
                  rec.validation ? fmt_opt(rec.validation->auc) : "-");
    result.history.push_back(std::move(rec));
    snapshots.push_back(model.params().values());
  }

  result.selected_epoch = select_checkpoint(result.history);
  model.params().set_values(snapshots[result.selected_epoch]);
  return result;
}

std::size_t select_checkpoint(const std::vector<EpochRecord>& history) {
  if (history.empty()) {
    throw ConfigError("select_checkpoint: empty history");
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& v = history[i].validation;
    if (!v || !v->auc) {
      continue;
    }
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = *history[*best].validation;
    if (*v->auc > *b.auc || (*v->auc == *b.auc && v->recall > b.recall)) {
      best = i;
    }
  }
  if (!best) {
    spdlog::warn("select_checkpoint: no validation AUC recorded; using the final epoch");
    return history.size() - 1;
  }
  return *best;
}

std::string format_history(const std::vector<EpochRecord>& history, std::size_t selected_epoch) {
  std::string out = std::string(kHistoryHeader) + "\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const EpochRecord& r = history[i];
    std::string acc, auc_text, recall, precision;
    if (r.validation) {
      acc = fmt::format("{}", r.validation->acc);
      auc_text = fmt_opt(r.validation->auc);
      recall = fmt::format("{}", r.validation->recall);
      precision = fmt::format("{}", r.validation->precision);
    }
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.epoch, r.loss1, r.loss2, r.loss3,
                       r.total, acc, auc_text, recall, precision, i == selected_epoch ? 1 : 0);
  }
  return out;
}

}  // namespace afdmil
