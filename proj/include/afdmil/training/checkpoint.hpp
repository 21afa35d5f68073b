#ifndef AFDMIL_TRAINING_CHECKPOINT_HPP
#define AFDMIL_TRAINING_CHECKPOINT_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "afdmil/metrics/metrics.hpp"
#include "afdmil/model/afd_model.hpp"
#include "afdmil/training/trainer.hpp"

namespace afdmil {

inline constexpr const char* kCheckpointMagic = "AFDCKPT";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  AfdModel model;
  TrainConfig config;
  std::size_t epoch = 0;
  std::optional<MetricsReport> validation;
  std::string rng;
};

/// Layout: a text manifest terminated by a line "end", then each tensor's
/// values as little-endian float64 in manifest order.
///
///   AFDCKPT
///   version 1
///   n|h1|h2|d <count>
///   rng <algorithm id>
///   epoch <index>
///   config.<key> <value>      (repeated)
///   metric.<key> <value>      (repeated, optional)
///   tensor <name> <rows> <cols>  (repeated)
///   end
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);

/// Throws FormatError (naming the offending tensor where there is one) on a
/// corrupt or truncated file, and DimensionError when `expected_n` is given
/// and differs from the stored feature width.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<Index> expected_n = std::nullopt);

}  // namespace afdmil

#endif  // AFDMIL_TRAINING_CHECKPOINT_HPP
