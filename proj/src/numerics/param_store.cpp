#include "afdmil/numerics/param_store.hpp"

#include <algorithm>
#include <utility>

#include "afdmil/numerics/errors.hpp"

namespace afdmil {

Param& ParamStore::add(std::string name, Matrix value) {
  if (contains(name)) {
    throw ConfigError("duplicate parameter name: " + name);
  }
  Matrix grad = Matrix::Zero(value.rows(), value.cols());
  params_.push_back(Param{std::move(name), std::move(value), std::move(grad)});
  return params_.back();
}

Param& ParamStore::at(std::string_view name) {
  return const_cast<Param&>(std::as_const(*this).at(name));
}

const Param& ParamStore::at(std::string_view name) const {
  auto it = std::find_if(params_.begin(), params_.end(),
                         [&](const Param& p) { return p.name == name; });
  if (it == params_.end()) {
    throw ConfigError("unknown parameter: " + std::string(name));
  }
  return *it;
}

bool ParamStore::contains(std::string_view name) const {
  return std::any_of(params_.begin(), params_.end(),
                     [&](const Param& p) { return p.name == name; });
}

std::size_t ParamStore::scalar_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) {
    total += static_cast<std::size_t>(p.value.size());
  }
  return total;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) {
    p.grad.setZero();
  }
}

std::vector<Matrix> ParamStore::values() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const auto& p : params_) {
    out.push_back(p.value);
  }
  return out;
}

void ParamStore::set_values(const std::vector<Matrix>& values) {
  if (values.size() != params_.size()) {
    throw DimensionError("set_values: expected " + std::to_string(params_.size()) +
                         " tensors, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].rows() != params_[i].value.rows() || values[i].cols() != params_[i].value.cols()) {
      throw DimensionError("set_values: " + params_[i].name + " expects " +
                           shape_str(params_[i].value) + ", got " + shape_str(values[i]));
    }
    params_[i].value = values[i];
  }
}

}  // namespace afdmil
