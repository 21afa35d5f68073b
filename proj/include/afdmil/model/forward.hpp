#ifndef AFDMIL_MODEL_FORWARD_HPP
#define AFDMIL_MODEL_FORWARD_HPP

#include <optional>
#include <vector>

#include "afdmil/data/bag.hpp"
#include "afdmil/model/afd_model.hpp"
#include "afdmil/model/config.hpp"
#include "afdmil/numerics/tape.hpp"

namespace afdmil {

// Full record of one bag's forward pass.
struct ForwardTrace {
  std::vector<double> instance_probs;     // empty when distillation is off
  std::vector<double> attention_weights;  // empty when the attention channel is off
  // Channel 1 lists the positive half first; under max-p every entry is positive.
  std::vector<Index> channel1_indices;
  std::size_t channel1_positive = 0;
  std::vector<Index> channel2_indices;
  std::vector<double> fusion_weights;  // over the fused rows, in fusion order
  double attention_branch_prob = 0.0;
  double final_prob = 0.0;
  double loss1 = 0.0;
  double loss2 = 0.0;
  double loss3 = 0.0;
  double global_coefficient = 1.0;  // exp(−|loss3|) when the global loss is on
  double total_loss = 0.0;
  int prediction = 0;
};

// Non-differentiable choices of one step: the hard top-k selections and the
// detached global-loss coefficient. Re-using them pins the function seen by
// a finite-difference check to the one whose gradient backward() computes.
struct StepConstants {
  std::vector<Index> channel1;
  std::size_t channel1_positive = 0;
  std::vector<Index> channel2;
  double global_coefficient = 1.0;
};

StepConstants step_constants(const ForwardTrace& trace);

struct DistilledInstances {
  std::vector<Index> indices;  // positive half first
  std::size_t positive = 0;
  Matrix features;
  double loss1 = 0.0;
};

struct AttentionResult {
  std::vector<double> weights;
  RowVector pooled;
  double branch_prob = 0.0;
  double loss2 = 0.0;
};

struct DistilledByAttention {
  std::vector<Index> indices;
  Matrix features;
};

struct FusionResult {
  double final_prob = 0.0;
  RowVector fused;
  std::vector<double> weights;
};

/// Per-instance positive probability from the instance classifier.
std::vector<double> instance_forward(const AfdModel& model, const Matrix& features);

/// Instance-channel selection and its loss. Under max-p: the min(k, K) most
/// positive instances, loss1 the mean BCE over them. Under max-pn: min(k/2, K)
/// most positive then min(k/2, K) most negative (each drawn from the whole
/// bag), loss1 over the positive half only.
DistilledInstances distill_instances(std::span<const double> instance_probs,
                                     const Matrix& features, const DistillConfig& config,
                                     int label);

AttentionResult attention_forward(const AfdModel& model, const Matrix& features, int label);

DistilledByAttention distill_by_attention(std::span<const double> attention_weights,
                                          const Matrix& features, int k);

FusionResult fuse_and_classify(const AfdModel& model, const Matrix& distilled,
                               FusionBackend backend = FusionBackend::Gated);

/// (loss1 + loss2)·exp(−|loss3|) + loss3.
double global_loss(double loss1, double loss2, double loss3);

ForwardTrace forward_bag(const AfdModel& model, const Matrix& features, int label,
                         const ForwardOptions& options);
ForwardTrace forward_bag(const AfdModel& model, const Bag& bag, const ForwardOptions& options);

/// Records the whole forward pass on `tape`. Parameter values come from
/// `params`; gradients flow into the matching slots of `grad_sinks` when it
/// is non-null. With `frozen`, selections and the global coefficient are
/// taken from it instead of being recomputed. Returns the total-loss variable.
Tape::Var record_forward(Tape& tape, const ParamStore& params, ParamStore* grad_sinks,
                         const ModelDims& dims,
                         const Matrix& features, int label, const ForwardOptions& options,
                         const StepConstants* frozen, ForwardTrace& trace);

/// Forward + backward for one bag. Gradients are accumulated into the
/// model's parameter store.
ForwardTrace accumulate_gradients(AfdModel& model, const Matrix& features, int label,
                                  const ForwardOptions& options);

}  // namespace afdmil

#endif  // AFDMIL_MODEL_FORWARD_HPP
