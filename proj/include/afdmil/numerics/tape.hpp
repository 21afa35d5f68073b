#ifndef AFDMIL_NUMERICS_TAPE_HPP
#define AFDMIL_NUMERICS_TAPE_HPP

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "afdmil/numerics/param_store.hpp"
#include "afdmil/numerics/types.hpp"

namespace afdmil {

// Reverse-mode gradient recorder. Every op evaluates eagerly and appends a
// node; node ids are a topological order, so backward() is a single reverse
// sweep. Parameter leaves flush their gradient into the owning ParamStore
// slot (added, not assigned) once the sweep completes.
class Tape {
 public:
  struct Var {
    std::size_t id = static_cast<std::size_t>(-1);
  };

  Var constant(Matrix value);
  // `grad_sink` may be null for inference-only graphs.
  Var param(const Matrix& value, Matrix* grad_sink);
  Var param(Param& p) { return param(p.value, &p.grad); }

  const Matrix& value(Var v) const;
  const Matrix& grad(Var v) const;
  double scalar(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  Var affine(Var input, Var weight, Var bias);
  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var hadamard(Var a, Var b);
  Var scale(Var a, double factor);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);
  Var exp(Var a);
  // Softmax across all entries of `a`, same shape out.
  Var softmax(Var a);
  // weightsᵀ · rows for a K×1 weight column and K×n rows → 1×n.
  Var weighted_sum(Var weights, Var rows);
  Var gather_rows(Var a, std::span<const Index> rows);
  Var concat_rows(std::span<const Var> parts);
  Var mean_rows(Var a);
  Var sum(Var a);
  // Mean binary cross-entropy of every entry of `probs` against `label`.
  Var bce(Var probs, int label);

  void backward(Var loss);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Matrix* sink = nullptr;
    bool live = false;  // some parameter lies upstream
    std::function<void(std::vector<Node>&, const Node&)> pull;
  };

  Var push(Matrix value, std::initializer_list<std::size_t> parents,
           std::function<void(std::vector<Node>&, const Node&)> pull);
  const Node& node(Var v) const;

  std::vector<Node> nodes_;
  bool swept_ = false;
};

}  // namespace afdmil

#endif  // AFDMIL_NUMERICS_TAPE_HPP
