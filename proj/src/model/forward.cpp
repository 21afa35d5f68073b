#include "afdmil/model/forward.hpp"

#include <cmath>
#include <string>

#include "afdmil/model/selection.hpp"
#include "afdmil/numerics/errors.hpp"
#include "afdmil/numerics/kernels.hpp"

namespace afdmil {

namespace {

using Var = Tape::Var;

// Binds parameter names to tape leaves for one recording.
class Net {
 public:
  Net(Tape& tape, const ParamStore& params, ParamStore* sinks)
      : tape_(tape), params_(params), sinks_(sinks) {}

  Tape& tape() { return tape_; }

  Var operator[](const char* name) {
    const Matrix& value = params_.at(name).value;
    return tape_.param(value, sinks_ != nullptr ? &sinks_->at(name).grad : nullptr);
  }

  // K×n → K×1 instance probabilities.
  Var instance_probs(Var rows) {
    Var h = tape_.relu(tape_.affine(rows, (*this)[pname::kInsW1], (*this)[pname::kInsB1]));
    return tape_.sigmoid(tape_.affine(h, (*this)[pname::kInsW2], (*this)[pname::kInsB2]));
  }

  // K×n → K×1 attention weights summing to one.
  Var attention(Var rows) {
    Var h = tape_.tanh(tape_.affine(rows, (*this)[pname::kAttW1], (*this)[pname::kAttB1]));
    return tape_.softmax(tape_.matmul(h, (*this)[pname::kAttW2]));
  }

  Var branch_prob(Var pooled) {
    return tape_.sigmoid(tape_.affine(pooled, (*this)[pname::kBranchW], (*this)[pname::kBranchB]));
  }

  // m×n → 1×n; `weights` receives the m pooling weights.
  Var fuse(Var rows, FusionBackend backend, std::vector<double>& weights) {
    const Index m = tape_.value(rows).rows();
    if (m == 0) {
      throw StateError("fusion: no distilled features");
    }
    if (backend == FusionBackend::Mean) {
      weights.assign(static_cast<std::size_t>(m), 1.0 / static_cast<double>(m));
      return tape_.mean_rows(rows);
    }
    Var gate_v = tape_.tanh(tape_.affine(rows, (*this)[pname::kFuseV], (*this)[pname::kFuseVb]));
    Var gate_u = tape_.sigmoid(tape_.affine(rows, (*this)[pname::kFuseU], (*this)[pname::kFuseUb]));
    Var scores = tape_.matmul(tape_.hadamard(gate_v, gate_u), (*this)[pname::kFuseW]);
    Var alpha = tape_.softmax(scores);
    const Matrix& a = tape_.value(alpha);
    weights.assign(a.data(), a.data() + a.size());
    return tape_.weighted_sum(alpha, rows);
  }

  Var final_prob(Var fused) {
    Var h = tape_.relu(tape_.affine(fused, (*this)[pname::kFinalW1], (*this)[pname::kFinalB1]));
    return tape_.sigmoid(tape_.affine(h, (*this)[pname::kFinalW2], (*this)[pname::kFinalB2]));
  }

 private:
  Tape& tape_;
  const ParamStore& params_;
  ParamStore* sinks_;
};

void check_features(const Matrix& features, Index dim) {
  if (features.rows() == 0) {
    throw EmptyBagError("bag has no instances");
  }
  if (features.cols() != dim) {
    throw DimensionError("bag features " + shape_str(features) + " do not match model width n=" +
                         std::to_string(dim));
  }
}

void check_label(int label) {
  if (label != 0 && label != 1) {
    throw ConfigError("bag label must be 0 or 1, got " + std::to_string(label));
  }
}

std::vector<double> column(const Matrix& m) { return {m.data(), m.data() + m.size()}; }

struct Selection {
  std::vector<Index> indices;
  std::size_t positive = 0;
};

Selection select_instances(std::span<const double> probs, const DistillConfig& config) {
  config.validate();
  Selection s;
  if (config.mode == DistillMode::MaxPositive) {
    s.indices = top_k_indices(probs, static_cast<std::size_t>(config.k));
    s.positive = s.indices.size();
    return s;
  }
  const auto half = static_cast<std::size_t>(config.k / 2);
  s.indices = top_k_indices(probs, half);
  s.positive = s.indices.size();
  const std::vector<Index> negative = bottom_k_indices(probs, half);
  s.indices.insert(s.indices.end(), negative.begin(), negative.end());
  return s;
}

Matrix gather(const Matrix& features, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), features.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Index>(r)) = features.row(rows[r]);
  }
  return out;
}

}  // namespace

StepConstants step_constants(const ForwardTrace& trace) {
  return StepConstants{trace.channel1_indices, trace.channel1_positive, trace.channel2_indices,
                       trace.global_coefficient};
}

std::vector<double> instance_forward(const AfdModel& model, const Matrix& features) {
  check_features(features, model.dims().n);
  Tape tape;
  Net net(tape, model.params(), nullptr);
  return column(tape.value(net.instance_probs(tape.constant(features))));
}

DistilledInstances distill_instances(std::span<const double> instance_probs,
                                     const Matrix& features, const DistillConfig& config,
                                     int label) {
  check_label(label);
  if (instance_probs.empty()) {
    throw EmptyBagError("distill_instances: no instance probabilities");
  }
  if (static_cast<Index>(instance_probs.size()) != features.rows()) {
    throw DimensionError("distill_instances: " + std::to_string(instance_probs.size()) +
                         " probabilities for " + std::to_string(features.rows()) + " instances");
  }
  Selection sel = select_instances(instance_probs, config);
  DistilledInstances out;
  double loss = 0.0;
  for (std::size_t i = 0; i < sel.positive; ++i) {
    loss += bce(instance_probs[static_cast<std::size_t>(sel.indices[i])], label);
  }
  out.loss1 = loss / static_cast<double>(sel.positive);
  out.features = gather(features, sel.indices);
  out.indices = std::move(sel.indices);
  out.positive = sel.positive;
  return out;
}

AttentionResult attention_forward(const AfdModel& model, const Matrix& features, int label) {
  check_features(features, model.dims().n);
  check_label(label);
  Tape tape;
  Net net(tape, model.params(), nullptr);
  Var rows = tape.constant(features);
  Var alpha = net.attention(rows);
  Var pooled = tape.weighted_sum(alpha, rows);
  Var prob = net.branch_prob(pooled);
  AttentionResult out;
  out.weights = column(tape.value(alpha));
  out.pooled = tape.value(pooled);
  out.branch_prob = tape.scalar(prob);
  out.loss2 = tape.scalar(tape.bce(prob, label));
  return out;
}

DistilledByAttention distill_by_attention(std::span<const double> attention_weights,
                                          const Matrix& features, int k) {
  if (attention_weights.empty()) {
    throw EmptyBagError("distill_by_attention: no attention weights");
  }
  if (k < 1) {
    throw ConfigError("distill_by_attention: k must be >= 1");
  }
  if (static_cast<Index>(attention_weights.size()) != features.rows()) {
    throw DimensionError("distill_by_attention: " + std::to_string(attention_weights.size()) +
                         " weights for " + std::to_string(features.rows()) + " instances");
  }
  DistilledByAttention out;
  out.indices = top_k_indices(attention_weights, static_cast<std::size_t>(k));
  out.features = gather(features, out.indices);
  return out;
}

FusionResult fuse_and_classify(const AfdModel& model, const Matrix& distilled,
                               FusionBackend backend) {
  if (distilled.rows() == 0) {
    throw StateError("fuse_and_classify: no distilled features");
  }
  if (distilled.cols() != model.dims().n) {
    throw DimensionError("fuse_and_classify: features " + shape_str(distilled) +
                         " vs model width " + std::to_string(model.dims().n));
  }
  Tape tape;
  Net net(tape, model.params(), nullptr);
  FusionResult out;
  Var fused = net.fuse(tape.constant(distilled), backend, out.weights);
  out.fused = tape.value(fused);
  out.final_prob = tape.scalar(net.final_prob(fused));
  return out;
}

double global_loss(double loss1, double loss2, double loss3) {
  return (loss1 + loss2) * std::exp(-std::abs(loss3)) + loss3;
}

Var record_forward(Tape& tape, const ParamStore& params, ParamStore* grad_sinks,
                   const ModelDims& dims, const Matrix& features, int label,
                   const ForwardOptions& options, const StepConstants* frozen,
                   ForwardTrace& trace) {
  options.validate();
  check_features(features, dims.n);
  check_label(label);
  trace = ForwardTrace{};
  Net net(tape, params, grad_sinks);
  Var rows = tape.constant(features);
  Var fusion_rows = rows;
  Var distill_loss{};
  bool has_distill_loss = false;

  if (options.feature_distillation) {
    Var probs = net.instance_probs(rows);
    trace.instance_probs = column(tape.value(probs));
    Selection sel;
    if (frozen != nullptr) {
      sel.indices = frozen->channel1;
      sel.positive = frozen->channel1_positive;
    } else {
      sel = select_instances(trace.instance_probs, options.distill);
    }
    const std::span<const Index> positive(sel.indices.data(), sel.positive);
    Var loss1 = tape.bce(tape.gather_rows(probs, positive), label);
    trace.loss1 = tape.scalar(loss1);
    trace.channel1_indices = sel.indices;
    trace.channel1_positive = sel.positive;
    distill_loss = loss1;
    has_distill_loss = true;

    std::vector<Index> fused_indices = sel.indices;
    if (options.attention_channel) {
      Var alpha = net.attention(rows);
      trace.attention_weights = column(tape.value(alpha));
      Var branch = net.branch_prob(tape.weighted_sum(alpha, rows));
      trace.attention_branch_prob = tape.scalar(branch);
      Var loss2 = tape.bce(branch, label);
      trace.loss2 = tape.scalar(loss2);
      distill_loss = tape.add(distill_loss, loss2);
      trace.channel2_indices =
          frozen != nullptr
              ? frozen->channel2
              : top_k_indices(trace.attention_weights, static_cast<std::size_t>(options.distill.k));
      fused_indices.insert(fused_indices.end(), trace.channel2_indices.begin(),
                           trace.channel2_indices.end());
    }
    fusion_rows = tape.gather_rows(rows, fused_indices);
  }

  Var fused = net.fuse(fusion_rows, options.fusion, trace.fusion_weights);
  Var final_prob = net.final_prob(fused);
  trace.final_prob = tape.scalar(final_prob);
  trace.prediction = trace.final_prob >= 0.5 ? 1 : 0;
  Var loss3 = tape.bce(final_prob, label);
  trace.loss3 = tape.scalar(loss3);

  Var total = loss3;
  if (has_distill_loss) {
    if (options.global_loss) {
      // Detached coefficient: no gradient through exp(−|loss3|).
      trace.global_coefficient =
          frozen != nullptr ? frozen->global_coefficient : std::exp(-std::abs(trace.loss3));
      total = tape.add(tape.scale(distill_loss, trace.global_coefficient), loss3);
    } else {
      total = tape.add(distill_loss, loss3);
    }
  }
  trace.total_loss = tape.scalar(total);
  return total;
}

ForwardTrace forward_bag(const AfdModel& model, const Matrix& features, int label,
                         const ForwardOptions& options) {
  Tape tape;
  ForwardTrace trace;
  record_forward(tape, model.params(), nullptr, model.dims(), features, label, options, nullptr,
                 trace);
  return trace;
}

ForwardTrace forward_bag(const AfdModel& model, const Bag& bag, const ForwardOptions& options) {
  return forward_bag(model, bag.features, bag.label, options);
}

ForwardTrace accumulate_gradients(AfdModel& model, const Matrix& features, int label,
                                  const ForwardOptions& options) {
  Tape tape;
  ForwardTrace trace;
  Var total = record_forward(tape, model.params(), &model.params(), model.dims(), features, label,
                             options, nullptr, trace);
  tape.backward(total);
  return trace;
}

}  // namespace afdmil
