#include "afdmil/model/config.hpp"

#include <string>

#include "afdmil/numerics/errors.hpp"

namespace afdmil {

void DistillConfig::validate() const {
  if (k < 1) {
    throw ConfigError("distill: k must be >= 1, got " + std::to_string(k));
  }
  if (mode == DistillMode::MaxPositiveNegative && k % 2 != 0) {
    throw ConfigError("distill: max-pn needs an even k (k/2 per half), got " + std::to_string(k));
  }
}

void ModelDims::validate() const {
  if (n < 1 || h1 < 1 || h2 < 1 || d < 1) {
    throw ConfigError("model dims must be positive: n=" + std::to_string(n) +
                      " h1=" + std::to_string(h1) + " h2=" + std::to_string(h2) +
                      " d=" + std::to_string(d));
  }
}

ForwardOptions ablation_options(AblationRow row, DistillConfig distill, FusionBackend fusion) {
  ForwardOptions o;
  o.distill = distill;
  o.fusion = fusion;
  o.feature_distillation = row != AblationRow::Plain;
  o.attention_channel = row == AblationRow::DualDistill || row == AblationRow::Full;
  o.global_loss = row == AblationRow::Full;
  return o;
}

std::string_view to_string(AblationRow row) {
  switch (row) {
    case AblationRow::Plain:
      return "plain";
    case AblationRow::InstanceDistill:
      return "fd";
    case AblationRow::DualDistill:
      return "fd+attention";
    case AblationRow::Full:
      return "fd+attention+global";
  }
  return "?";
}

std::string_view to_string(DistillMode mode) {
  return mode == DistillMode::MaxPositive ? "max-p" : "max-pn";
}

std::string_view to_string(FusionBackend backend) {
  return backend == FusionBackend::Gated ? "gated" : "mean";
}

DistillMode parse_distill_mode(std::string_view text) {
  if (text == "max-p") {
    return DistillMode::MaxPositive;
  }
  if (text == "max-pn") {
    return DistillMode::MaxPositiveNegative;
  }
  throw ConfigError("unknown distill mode '" + std::string(text) + "' (expected max-p|max-pn)");
}

FusionBackend parse_fusion_backend(std::string_view text) {
  if (text == "gated") {
    return FusionBackend::Gated;
  }
  if (text == "mean") {
    return FusionBackend::Mean;
  }
  throw ConfigError("unknown fusion backend '" + std::string(text) + "' (expected gated|mean)");
}

}  // namespace afdmil
