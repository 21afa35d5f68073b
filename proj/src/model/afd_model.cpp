#include "afdmil/model/afd_model.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

namespace afdmil {

namespace {

struct Shape {
  const char* name;
  Index rows;
  Index cols;
  bool weight;
};

std::vector<Shape> layout(const ModelDims& d) {
  return {
      {pname::kInsW1, d.n, d.h1, true},   {pname::kInsB1, 1, d.h1, false},
      {pname::kInsW2, d.h1, 1, true},     {pname::kInsB2, 1, 1, false},
      {pname::kAttW1, d.n, d.h2, true},   {pname::kAttB1, 1, d.h2, false},
      {pname::kAttW2, d.h2, 1, true},     {pname::kBranchW, d.n, 1, true},
      {pname::kBranchB, 1, 1, false},     {pname::kFuseV, d.n, d.d, true},
      {pname::kFuseVb, 1, d.d, false},    {pname::kFuseU, d.n, d.d, true},
      {pname::kFuseUb, 1, d.d, false},    {pname::kFuseW, d.d, 1, true},
      {pname::kFinalW1, d.n, d.h1, true}, {pname::kFinalB1, 1, d.h1, false},
      {pname::kFinalW2, d.h1, 1, true},   {pname::kFinalB2, 1, 1, false},
  };
}

}  // namespace

AfdModel::AfdModel(ModelDims dims, Rng& init) : dims_(dims) {
  dims_.validate();
  for (const Shape& s : layout(dims_)) {
    Matrix m = Matrix::Zero(s.rows, s.cols);
    if (s.weight) {
      const double limit = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
      for (Index i = 0; i < m.size(); ++i) {
        m.data()[i] = init.uniform(-limit, limit);
      }
    }
    params_.add(s.name, std::move(m));
  }
  spdlog::debug("afd model n={} h1={} h2={} d={}: {} parameters", dims_.n, dims_.h1, dims_.h2,
                dims_.d, params_.scalar_count());
}

AfdModel::AfdModel(ModelDims dims) : dims_(dims) {
  dims_.validate();
  for (const Shape& s : layout(dims_)) {
    params_.add(s.name, Matrix::Zero(s.rows, s.cols));
  }
}

}  // namespace afdmil
