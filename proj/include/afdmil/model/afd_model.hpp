#ifndef AFDMIL_MODEL_AFD_MODEL_HPP
#define AFDMIL_MODEL_AFD_MODEL_HPP

#include "afdmil/model/config.hpp"
#include "afdmil/numerics/param_store.hpp"
#include "afdmil/numerics/rng.hpp"

namespace afdmil {

// Parameter names. Weights are stored input-major (in × out) so a layer is
// affine(rows, w, b).
namespace pname {
inline constexpr const char* kInsW1 = "mlp1.w1";
inline constexpr const char* kInsB1 = "mlp1.b1";
inline constexpr const char* kInsW2 = "mlp1.w2";
inline constexpr const char* kInsB2 = "mlp1.b2";
inline constexpr const char* kAttW1 = "mlp2.w1";
inline constexpr const char* kAttB1 = "mlp2.b1";
inline constexpr const char* kAttW2 = "mlp2.w2";
inline constexpr const char* kBranchW = "mlp3.w";
inline constexpr const char* kBranchB = "mlp3.b";
inline constexpr const char* kFuseV = "fusion.V";
inline constexpr const char* kFuseVb = "fusion.bV";
inline constexpr const char* kFuseU = "fusion.U";
inline constexpr const char* kFuseUb = "fusion.bU";
inline constexpr const char* kFuseW = "fusion.w";
inline constexpr const char* kFinalW1 = "mlp4.w1";
inline constexpr const char* kFinalB1 = "mlp4.b1";
inline constexpr const char* kFinalW2 = "mlp4.w2";
inline constexpr const char* kFinalB2 = "mlp4.b2";
}  // namespace pname

/// All trainable parameters of the dual-channel network.
///
/// - instance classifier:  n → h1 (relu) → 1 (sigmoid)
/// - attention scorer:     n → h2 (tanh) → 1, softmax over the bag
/// - attention branch:     n → 1 (sigmoid) on the attention-pooled feature
/// - gated fusion:         V, U: n → d; w: d → 1
/// - final classifier:     n → h1 (relu) → 1 (sigmoid)
///
/// The scorer and the fusion projection carry no output bias: softmax is
/// invariant to it, so it could never receive a gradient.
class AfdModel {
 public:
  // Glorot-uniform weights, zero biases.
  AfdModel(ModelDims dims, Rng& init);
  // Every parameter zero.
  explicit AfdModel(ModelDims dims);

  const ModelDims& dims() const { return dims_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  const Matrix& at(const char* name) const { return params_.at(name).value; }

 private:
  ModelDims dims_;
  ParamStore params_;
};

}  // namespace afdmil

#endif  // AFDMIL_MODEL_AFD_MODEL_HPP
