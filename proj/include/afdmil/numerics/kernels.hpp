#ifndef AFDMIL_NUMERICS_KERNELS_HPP
#define AFDMIL_NUMERICS_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "afdmil/numerics/errors.hpp"
#include "afdmil/numerics/types.hpp"

namespace afdmil {

inline constexpr double kProbClamp = 1e-7;

/// Dense layer: input · weight + bias, with the 1×m bias broadcast over rows.
template <typename In, typename W, typename B>
MatrixT<typename In::Scalar> affine(const Eigen::MatrixBase<In>& input,
                                    const Eigen::MatrixBase<W>& weight,
                                    const Eigen::MatrixBase<B>& bias) {
  if (input.cols() != weight.rows() || bias.rows() != 1 || bias.cols() != weight.cols()) {
    throw DimensionError("affine: input " + shape_str(input) + ", weight " + shape_str(weight) +
                         ", bias " + shape_str(bias));
  }
  MatrixT<typename In::Scalar> out = input * weight;
  out.rowwise() += bias.row(0);
  return out;
}

template <std::floating_point Scalar>
Scalar sigmoid(Scalar z) {
  // Split on sign so exp never overflows.
  if (z >= Scalar(0)) {
    return Scalar(1) / (Scalar(1) + std::exp(-z));
  }
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return m.unaryExpr([](Scalar z) { return sigmoid(z); });
}

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseMax(typename Derived::Scalar(0));
}

/// Max-subtracted softmax over every entry of `scores`, returned with the
/// same shape.
template <typename Derived>
MatrixT<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& scores) {
  if (scores.size() == 0) {
    throw EmptyBagError("softmax: empty input");
  }
  using Scalar = typename Derived::Scalar;
  MatrixT<Scalar> e = (scores.array() - scores.maxCoeff()).exp().matrix();
  e /= e.sum();
  return e;
}

inline std::vector<double> softmax(std::span<const double> scores) {
  const Eigen::Map<const RowVector> row(scores.data(), static_cast<Index>(scores.size()));
  if (row.size() == 0) {
    throw EmptyBagError("softmax: empty input");
  }
  const Matrix out = softmax(row);
  return {out.data(), out.data() + out.size()};
}

template <std::floating_point Scalar>
Scalar clamp_prob(Scalar p) {
  return std::clamp(p, Scalar(kProbClamp), Scalar(1) - Scalar(kProbClamp));
}

/// Binary cross-entropy as a non-negative negative log-likelihood.
template <std::floating_point Scalar>
Scalar bce(Scalar p, int label) {
  const Scalar q = clamp_prob(p);
  return label == 1 ? -std::log(q) : -std::log(Scalar(1) - q);
}

}  // namespace afdmil

#endif  // AFDMIL_NUMERICS_KERNELS_HPP
