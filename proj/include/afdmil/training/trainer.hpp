#ifndef AFDMIL_TRAINING_TRAINER_HPP
#define AFDMIL_TRAINING_TRAINER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afdmil/data/bag.hpp"
#include "afdmil/metrics/metrics.hpp"
#include "afdmil/model/afd_model.hpp"
#include "afdmil/model/config.hpp"
#include "afdmil/training/adam.hpp"

namespace afdmil {

struct TrainConfig {
  AdamConfig adam;
  int epochs = 50;
  std::uint64_t seed = 0;
  ForwardOptions forward;
  ModelDims dims;  // dims.n is taken from the dataset
  double validation_fraction = 0.2;
  double threshold = kDefaultThreshold;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double loss1 = 0.0;
  double loss2 = 0.0;
  double loss3 = 0.0;
  double total = 0.0;
  std::optional<MetricsReport> validation;
};

struct TrainResult {
  AfdModel model;  // parameters of the selected epoch
  std::vector<EpochRecord> history;
  std::size_t selected_epoch = 0;
  std::size_t train_bags = 0;
  std::size_t validation_bags = 0;
};

/// Batch size one, bag order reshuffled every epoch from the seed's
/// "shuffle" stream. A stratified validation split (seed stream
/// "validation") drives checkpoint selection; it is skipped when the split
/// would leave a label out of either part. Throws NumericError naming the
/// epoch when the loss diverges.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

/// Epoch with the highest validation AUC; ties go to higher recall, then the
/// earlier epoch. Falls back to the final epoch, with a warning, when no
/// epoch has a validation AUC.
std::size_t select_checkpoint(const std::vector<EpochRecord>& history);

/// Bag-level metrics of `model` on `dataset`, including distillation
/// precision per channel when latent labels are present.
MetricsReport evaluate(const AfdModel& model, const Dataset& dataset, const ForwardOptions& options,
                       double threshold = kDefaultThreshold);

inline constexpr const char* kHistoryHeader =
    "epoch,loss1,loss2,loss3,total,val_acc,val_auc,val_recall,val_precision,selected";

std::string format_history(const std::vector<EpochRecord>& history, std::size_t selected_epoch);

}  // namespace afdmil

#endif  // AFDMIL_TRAINING_TRAINER_HPP
