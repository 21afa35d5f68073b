#include "afdmil/model/model_grad_check.hpp"

#include "afdmil/model/forward.hpp"
#include "afdmil/numerics/rng.hpp"

namespace afdmil {

GradCheckResult check_model_gradients(AfdModel& model, const Matrix& features, int label,
                                      const ForwardOptions& options, double eps) {
  const ForwardTrace base = forward_bag(model, features, label, options);
  const StepConstants frozen = step_constants(base);
  const ModelDims dims = model.dims();
  const Objective objective = [&](Tape& tape, ParamStore& params) {
    ForwardTrace trace;
    return record_forward(tape, params, &params, dims, features, label, options, &frozen, trace);
  };
  return grad_check(objective, model.params(), eps);
}

GradCheckResult check_random_case(const GradCheckCase& c, double eps) {
  const Rng root(c.seed);
  Rng init = root.stream("init");
  AfdModel model(c.dims, init);
  Rng data = root.stream("data");
  for (Param& p : model.params().params()) {
    if (p.value.rows() == 1) {
      for (Index i = 0; i < p.value.size(); ++i) {
        p.value.data()[i] = data.normal(0.0, 0.3);
      }
    }
  }
  Matrix features(c.bag_size, c.dims.n);
  for (Index i = 0; i < features.size(); ++i) {
    features.data()[i] = data.normal();
  }
  ForwardOptions options;
  options.distill = DistillConfig{c.k, c.mode};
  return check_model_gradients(model, features, static_cast<int>(c.seed % 2), options, eps);
}

}  // namespace afdmil
