#include "afdmil/numerics/tape.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include "afdmil/numerics/errors.hpp"
#include "afdmil/numerics/kernels.hpp"

namespace afdmil {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
  }
}

}  // namespace

Tape::Var Tape::push(Matrix value, std::initializer_list<std::size_t> parents,
                     std::function<void(std::vector<Node>&, const Node&)> pull) {
  if (swept_) {
    throw StateError("tape: cannot record after backward()");
  }
  if (!value.allFinite()) {
    throw NumericError("tape: non-finite value produced at node " + std::to_string(nodes_.size()));
  }
  bool live = false;
  for (std::size_t p : parents) {
    live = live || nodes_[p].live;
  }
  nodes_.push_back(Node{std::move(value), Matrix(), nullptr, live, live ? std::move(pull) : nullptr});
  return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) {
    throw StateError("tape: variable " + std::to_string(v.id) + " was never recorded");
  }
  return nodes_[v.id];
}

const Matrix& Tape::value(Var v) const { return node(v).value; }

const Matrix& Tape::grad(Var v) const {
  const Node& n = node(v);
  if (!swept_) {
    throw StateError("tape: gradient requested before backward()");
  }
  return n.grad;
}

double Tape::scalar(Var v) const {
  const Matrix& m = value(v);
  if (m.size() != 1) {
    throw DimensionError("tape: expected scalar, got " + shape_str(m));
  }
  return m(0, 0);
}

Tape::Var Tape::constant(Matrix value) { return push(std::move(value), {}, nullptr); }

Tape::Var Tape::param(const Matrix& value, Matrix* grad_sink) {
  Var v = push(value, {}, nullptr);
  nodes_[v.id].sink = grad_sink;
  nodes_[v.id].live = grad_sink != nullptr;
  return v;
}

Tape::Var Tape::affine(Var input, Var weight, Var bias) {
  Matrix out = afdmil::affine(value(input), value(weight), value(bias));
  const std::size_t i = input.id, w = weight.id, b = bias.id;
  return push(std::move(out), {i, w, b}, [i, w, b](std::vector<Node>& ns, const Node& self) {
    if (ns[i].live) ns[i].grad.noalias() += self.grad * ns[w].value.transpose();
    if (ns[w].live) ns[w].grad.noalias() += ns[i].value.transpose() * self.grad;
    if (ns[b].live) ns[b].grad += self.grad.colwise().sum();
  });
}

Tape::Var Tape::matmul(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul: " + shape_str(av) + " · " + shape_str(bv));
  }
  const std::size_t ia = a.id, ib = b.id;
  return push(av * bv, {ia, ib}, [ia, ib](std::vector<Node>& ns, const Node& self) {
    if (ns[ia].live) ns[ia].grad.noalias() += self.grad * ns[ib].value.transpose();
    if (ns[ib].live) ns[ib].grad.noalias() += ns[ia].value.transpose() * self.grad;
  });
}

Tape::Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  const std::size_t ia = a.id, ib = b.id;
  return push(value(a) + value(b), {ia, ib}, [ia, ib](std::vector<Node>& ns, const Node& self) {
    if (ns[ia].live) ns[ia].grad += self.grad;
    if (ns[ib].live) ns[ib].grad += self.grad;
  });
}

Tape::Var Tape::hadamard(Var a, Var b) {
  require_same_shape(value(a), value(b), "hadamard");
  const std::size_t ia = a.id, ib = b.id;
  return push(value(a).cwiseProduct(value(b)), {ia, ib}, [ia, ib](std::vector<Node>& ns, const Node& self) {
    if (ns[ia].live) ns[ia].grad += self.grad.cwiseProduct(ns[ib].value);
    if (ns[ib].live) ns[ib].grad += self.grad.cwiseProduct(ns[ia].value);
  });
}

Tape::Var Tape::scale(Var a, double factor) {
  const std::size_t ia = a.id;
  return push(value(a) * factor, {ia}, [ia, factor](std::vector<Node>& ns, const Node& self) {
    ns[ia].grad += factor * self.grad;
  });
}

Tape::Var Tape::tanh(Var a) {
  const std::size_t ia = a.id;
  return push(value(a).array().tanh().matrix(), {ia}, [ia](std::vector<Node>& ns, const Node& self) {
    ns[ia].grad.array() += self.grad.array() * (1.0 - self.value.array().square());
  });
}

Tape::Var Tape::sigmoid(Var a) {
  const std::size_t ia = a.id;
  return push(afdmil::sigmoid(value(a)), {ia}, [ia](std::vector<Node>& ns, const Node& self) {
    ns[ia].grad.array() += self.grad.array() * self.value.array() * (1.0 - self.value.array());
  });
}

Tape::Var Tape::relu(Var a) {
  const std::size_t ia = a.id;
  return push(afdmil::relu(value(a)), {ia}, [ia](std::vector<Node>& ns, const Node& self) {
    ns[ia].grad.array() += (ns[ia].value.array() > 0.0).select(self.grad.array(), 0.0);
  });
}

Tape::Var Tape::exp(Var a) {
  const std::size_t ia = a.id;
  return push(value(a).array().exp().matrix(), {ia}, [ia](std::vector<Node>& ns, const Node& self) {
    ns[ia].grad.array() += self.grad.array() * self.value.array();
  });
}

Tape::Var Tape::softmax(Var a) {
  const std::size_t ia = a.id;
  return push(afdmil::softmax(value(a)), {ia}, [ia](std::vector<Node>& ns, const Node& self) {
    // dL/dz = s ⊙ (g − ⟨g, s⟩)
    const double dot = self.grad.cwiseProduct(self.value).sum();
    ns[ia].grad.array() += self.value.array() * (self.grad.array() - dot);
  });
}

Tape::Var Tape::weighted_sum(Var weights, Var rows) {
  const Matrix& w = value(weights);
  const Matrix& x = value(rows);
  if (w.cols() != 1 || w.rows() != x.rows()) {
    throw DimensionError("weighted_sum: weights " + shape_str(w) + ", rows " + shape_str(x));
  }
  const std::size_t iw = weights.id, ix = rows.id;
  return push(w.transpose() * x, {iw, ix}, [iw, ix](std::vector<Node>& ns, const Node& self) {
    if (ns[iw].live) ns[iw].grad.noalias() += ns[ix].value * self.grad.transpose();
    if (ns[ix].live) ns[ix].grad.noalias() += ns[iw].value * self.grad;
  });
}

Tape::Var Tape::gather_rows(Var a, std::span<const Index> rows) {
  const Matrix& src = value(a);
  Matrix out(static_cast<Index>(rows.size()), src.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= src.rows()) {
      throw DimensionError("gather_rows: row " + std::to_string(rows[r]) + " out of " +
                           shape_str(src));
    }
    out.row(static_cast<Index>(r)) = src.row(rows[r]);
  }
  const std::size_t ia = a.id;
  std::vector<Index> idx(rows.begin(), rows.end());
  return push(std::move(out), {ia}, [ia, idx = std::move(idx)](std::vector<Node>& ns, const Node& self) {
    for (std::size_t r = 0; r < idx.size(); ++r) {
      ns[ia].grad.row(idx[r]) += self.grad.row(static_cast<Index>(r));
    }
  });
}

Tape::Var Tape::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) {
    throw DimensionError("concat_rows: no inputs");
  }
  const Index cols = value(parts.front()).cols();
  Index total = 0;
  for (Var p : parts) {
    if (value(p).cols() != cols) {
      throw DimensionError("concat_rows: column mismatch " + shape_str(value(parts.front())) +
                           " vs " + shape_str(value(p)));
    }
    total += value(p).rows();
  }
  Matrix out(total, cols);
  Index offset = 0;
  std::vector<std::size_t> ids;
  bool live = false;
  for (Var p : parts) {
    live = live || node(p).live;
    out.middleRows(offset, value(p).rows()) = value(p);
    offset += value(p).rows();
    ids.push_back(p.id);
  }
  auto pull = [ids = std::move(ids)](std::vector<Node>& ns, const Node& self) {
    Index off = 0;
    for (std::size_t id : ids) {
      const Index r = ns[id].value.rows();
      if (ns[id].live) ns[id].grad += self.grad.middleRows(off, r);
      off += r;
    }
  };
  Var v = push(std::move(out), {}, nullptr);
  nodes_[v.id].live = live;
  if (live) {
    nodes_[v.id].pull = std::move(pull);
  }
  return v;
}

Tape::Var Tape::mean_rows(Var a) {
  const Matrix& src = value(a);
  if (src.rows() == 0) {
    throw EmptyBagError("mean_rows: no rows");
  }
  const std::size_t ia = a.id;
  return push(src.colwise().mean(), {ia}, [ia](std::vector<Node>& ns, const Node& self) {
    const double inv = 1.0 / static_cast<double>(ns[ia].value.rows());
    ns[ia].grad.rowwise() += inv * self.grad.row(0);
  });
}

Tape::Var Tape::sum(Var a) {
  const std::size_t ia = a.id;
  Matrix out(1, 1);
  out(0, 0) = value(a).sum();
  return push(std::move(out), {ia}, [ia](std::vector<Node>& ns, const Node& self) {
    ns[ia].grad.array() += self.grad(0, 0);
  });
}

Tape::Var Tape::bce(Var probs, int label) {
  const Matrix& p = value(probs);
  if (p.size() == 0) {
    throw EmptyBagError("bce: no probabilities");
  }
  double total = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    total += afdmil::bce(p.data()[i], label);
  }
  Matrix out(1, 1);
  out(0, 0) = total / static_cast<double>(p.size());
  const std::size_t ip = probs.id;
  return push(std::move(out), {ip}, [ip, label](std::vector<Node>& ns, const Node& self) {
    const Matrix& pv = ns[ip].value;
    const double g = self.grad(0, 0) / static_cast<double>(pv.size());
    for (Index i = 0; i < pv.size(); ++i) {
      const double q = pv.data()[i];
      // The clamp is flat outside [eps, 1 − eps].
      if (q < kProbClamp || q > 1.0 - kProbClamp) {
        continue;
      }
      const double d = label == 1 ? -1.0 / q : 1.0 / (1.0 - q);
      ns[ip].grad.data()[i] += g * d;
    }
  });
}

void Tape::backward(Var loss) {
  if (nodes_.empty()) {
    throw StateError("backward: nothing has been recorded");
  }
  if (swept_) {
    throw StateError("backward: already called on this tape");
  }
  const Node& root = node(loss);
  if (root.value.size() != 1) {
    throw DimensionError("backward: loss must be scalar, got " + shape_str(root.value));
  }
  for (std::size_t i = 0; i <= loss.id; ++i) {
    if (!nodes_[i].live) {
      continue;
    }
    nodes_[i].grad = Matrix::Zero(nodes_[i].value.rows(), nodes_[i].value.cols());
  }
  swept_ = true;
  if (!root.live) {
    return;
  }
  nodes_[loss.id].grad(0, 0) = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.live && n.pull) {
      n.pull(nodes_, n);
    }
  }
  for (std::size_t i = 0; i <= loss.id; ++i) {
    if (nodes_[i].sink != nullptr) {
      *nodes_[i].sink += nodes_[i].grad;
    }
  }
}

}  // namespace afdmil
