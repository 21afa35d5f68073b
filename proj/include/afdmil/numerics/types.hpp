#ifndef AFDMIL_NUMERICS_TYPES_HPP
#define AFDMIL_NUMERICS_TYPES_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <string>

namespace afdmil {

// Row-major so that one row is one instance feature vector and the raw
// buffer matches the on-disk layout.
template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVectorT = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixT<double>;
using RowVector = RowVectorT<double>;
using Vector = VectorT<double>;
using Index = Eigen::Index;

inline std::string shape_str(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename Derived>
std::string shape_str(const Eigen::EigenBase<Derived>& m) {
  return shape_str(m.rows(), m.cols());
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace afdmil

#endif  // AFDMIL_NUMERICS_TYPES_HPP
