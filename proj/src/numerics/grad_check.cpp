#include "afdmil/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "afdmil/numerics/errors.hpp"

namespace afdmil {

namespace {

double evaluate(const Objective& objective, ParamStore& params) {
  Tape tape;
  return tape.scalar(objective(tape, params));
}

}  // namespace

GradCheckResult grad_check(const Objective& objective, ParamStore& params, double eps) {
  if (!(eps > 0.0)) {
    throw ConfigError("grad_check: eps must be positive");
  }
  params.zero_grad();
  double base = 0.0;
  {
    Tape tape;
    const Tape::Var loss = objective(tape, params);
    base = tape.scalar(loss);
    tape.backward(loss);
  }
  if (evaluate(objective, params) != base) {
    throw StateError("grad_check: objective is not deterministic");
  }

  GradCheckResult result;
  for (Param& p : params.params()) {
    for (Index i = 0; i < p.value.size(); ++i) {
      double& theta = p.value.data()[i];
      const double saved = theta;
      theta = saved + eps;
      const double up = evaluate(objective, params);
      theta = saved - eps;
      const double down = evaluate(objective, params);
      theta = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p.grad.data()[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic - numeric) / denom;
      ++result.checked;
      if (rel > result.max_rel_error || result.worst_index < 0) {
        result.max_rel_error = rel;
        result.worst_param = p.name;
        result.worst_index = i;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace afdmil
