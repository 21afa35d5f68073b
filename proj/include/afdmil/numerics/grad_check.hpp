#ifndef AFDMIL_NUMERICS_GRAD_CHECK_HPP
#define AFDMIL_NUMERICS_GRAD_CHECK_HPP

#include <cstddef>
#include <functional>
#include <string>

#include "afdmil/numerics/param_store.hpp"
#include "afdmil/numerics/tape.hpp"

namespace afdmil {

// Records the objective on `tape`, reading parameters from `params`, and
// returns the scalar loss variable.
using Objective = std::function<Tape::Var(Tape& tape, ParamStore& params)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Compares reverse-mode gradients of `objective` with central differences
/// (f(θ+eps) − f(θ−eps)) / 2eps on every scalar parameter. Relative error is
/// |a − b| / max(|a|, |b|, 1e-8). Parameter values are restored afterwards;
/// gradients are left holding the analytic result.
///
/// Throws StateError when two evaluations at the same point disagree.
GradCheckResult grad_check(const Objective& objective, ParamStore& params, double eps = 1e-5);

}  // namespace afdmil

#endif  // AFDMIL_NUMERICS_GRAD_CHECK_HPP
