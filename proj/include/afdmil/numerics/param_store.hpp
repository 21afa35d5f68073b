#ifndef AFDMIL_NUMERICS_PARAM_STORE_HPP
#define AFDMIL_NUMERICS_PARAM_STORE_HPP

#include <string>
#include <string_view>
#include <vector>

#include "afdmil/numerics/types.hpp"

namespace afdmil {

struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
};

// Named tensors in insertion order, each paired with a gradient accumulator
// of the same shape. Insertion order is the serialization order.
class ParamStore {
 public:
  Param& add(std::string name, Matrix value);

  Param& at(std::string_view name);
  const Param& at(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

  // Snapshot/restore of values only.
  std::vector<Matrix> values() const;
  void set_values(const std::vector<Matrix>& values);

 private:
  std::vector<Param> params_;
};

}  // namespace afdmil

#endif  // AFDMIL_NUMERICS_PARAM_STORE_HPP
