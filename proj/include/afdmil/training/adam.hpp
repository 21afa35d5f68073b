#ifndef AFDMIL_TRAINING_ADAM_HPP
#define AFDMIL_TRAINING_ADAM_HPP

#include <cstdint>
#include <vector>

#include "afdmil/numerics/param_store.hpp"

namespace afdmil {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-5;  // decoupled, applied as w -= lr·wd·w

  void validate() const;
};

// Moment estimates for one ParamStore, in the store's parameter order.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

/// One bias-corrected Adam update with decoupled weight decay, then zeroes
/// every gradient. Throws NumericError naming the parameter if a gradient is
/// not finite; no parameter is modified in that case.
void adam_step(ParamStore& params, AdamState& state, const AdamConfig& config);

}  // namespace afdmil

#endif  // AFDMIL_TRAINING_ADAM_HPP
