#ifndef AFDMIL_MODEL_MODEL_GRAD_CHECK_HPP
#define AFDMIL_MODEL_MODEL_GRAD_CHECK_HPP

#include <cstdint>

#include "afdmil/model/afd_model.hpp"
#include "afdmil/model/config.hpp"
#include "afdmil/numerics/grad_check.hpp"

namespace afdmil {

/// Finite-difference check of the total loss of one bag. Selections and the
/// global-loss coefficient are frozen at the unperturbed point, so the
/// finite differences see the same piecewise-smooth function that
/// backward() differentiates.
GradCheckResult check_model_gradients(AfdModel& model, const Matrix& features, int label,
                                      const ForwardOptions& options, double eps = 1e-5);

struct GradCheckCase {
  ModelDims dims{8, 8, 8, 8};
  Index bag_size = 12;
  int k = 4;
  DistillMode mode = DistillMode::MaxPositive;
  std::uint64_t seed = 0;
};

/// Random model (Glorot weights, small random biases) and a random Gaussian
/// bag, both drawn from `seed`; label alternates with the seed's parity.
GradCheckResult check_random_case(const GradCheckCase& c, double eps = 1e-5);

}  // namespace afdmil

#endif  // AFDMIL_MODEL_MODEL_GRAD_CHECK_HPP
