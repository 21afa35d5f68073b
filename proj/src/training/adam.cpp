#include "afdmil/training/adam.hpp"

#include <cmath>
#include <string>

#include "afdmil/numerics/errors.hpp"

namespace afdmil {

void AdamConfig::validate() const {
  if (!(lr > 0.0)) {
    throw ConfigError("adam: learning rate must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam: betas must lie in [0, 1)");
  }
  if (!(eps > 0.0) || !(weight_decay >= 0.0)) {
    throw ConfigError("adam: eps must be positive and weight decay non-negative");
  }
}

void adam_step(ParamStore& params, AdamState& state, const AdamConfig& config) {
  auto& ps = params.params();
  for (const Param& p : ps) {
    if (!p.grad.allFinite()) {
      throw NumericError("adam: non-finite gradient in parameter '" + p.name + "'");
    }
  }
  if (state.m.size() != ps.size()) {
    state.m.clear();
    state.v.clear();
    for (const Param& p : ps) {
      state.m.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      state.v.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
    state.step = 0;
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Param& p = ps[i];
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    m = config.beta1 * m + (1.0 - config.beta1) * p.grad;
    v = config.beta2 * v + (1.0 - config.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= config.lr * config.weight_decay * p.value.array();
    p.value.array() -= config.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config.eps);
    p.grad.setZero();
  }
}

}  // namespace afdmil
