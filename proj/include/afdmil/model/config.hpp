#ifndef AFDMIL_MODEL_CONFIG_HPP
#define AFDMIL_MODEL_CONFIG_HPP

#include <string>
#include <string_view>

#include "afdmil/numerics/types.hpp"

namespace afdmil {

enum class DistillMode { MaxPositive, MaxPositiveNegative };

enum class FusionBackend { Gated, Mean };

struct DistillConfig {
  int k = 8;
  DistillMode mode = DistillMode::MaxPositive;

  // k ≥ 1, and even under MaxPositiveNegative.
  void validate() const;
};

struct ModelDims {
  Index n = 32;    // feature width
  Index h1 = 256;  // hidden width of the instance and final classifiers
  Index h2 = 128;  // hidden width of the attention scorer
  Index d = 128;   // gate width of the fusion module

  void validate() const;
  bool operator==(const ModelDims&) const = default;
};

// Which parts of the network take part in a forward pass. The four
// ablation rows are: distillation off (plain gated attention over the whole
// bag); instance channel only; both channels; both channels + global loss.
struct ForwardOptions {
  DistillConfig distill;
  FusionBackend fusion = FusionBackend::Gated;
  bool feature_distillation = true;
  bool attention_channel = true;
  bool global_loss = true;

  void validate() const { distill.validate(); }
};

enum class AblationRow { Plain, InstanceDistill, DualDistill, Full };

ForwardOptions ablation_options(AblationRow row, DistillConfig distill,
                                FusionBackend fusion = FusionBackend::Gated);
std::string_view to_string(AblationRow row);

std::string_view to_string(DistillMode mode);
std::string_view to_string(FusionBackend backend);
DistillMode parse_distill_mode(std::string_view text);
FusionBackend parse_fusion_backend(std::string_view text);

}  // namespace afdmil

#endif  // AFDMIL_MODEL_CONFIG_HPP
