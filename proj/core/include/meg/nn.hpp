#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "meg/registry.hpp"
#include "meg/rng.hpp"
#include "meg/tensor.hpp"

namespace meg {

enum class Activation { identity, relu, sigmoid, tanh };

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Layers are parameter views over a ParamRegistry: construction registers
/// (and fan-in initializes) the named tensors, forward is pure given
/// (input, params) and fills an explicit cache, backward consumes the cache
/// and accumulates parameter gradients. Calling backward with a cache that
/// was never filled by forward throws std::logic_error.

struct DenseCache {
  Tensor x;
  Tensor pre;
  Tensor y;
  bool valid = false;
};

/// y = act(W x + b), W is [out x in].
class DenseLayer {
 public:
  DenseLayer() = default;
  /// Registers `prefix + ".weights"` / `".bias"`. Weights are uniform in
  /// +-1/sqrt(in_dim) when an Rng is given, zero otherwise; bias starts zero.
  DenseLayer(ParamRegistry& reg, const std::string& prefix, std::size_t out_dim,
             std::size_t in_dim, Activation act, Rng* init);

  Tensor forward(const Tensor& x, DenseCache* cache = nullptr) const;
  /// Accumulates dW, db; returns dL/dx.
  Tensor backward(const DenseCache& cache, const Tensor& upstream);

  std::size_t in_dim() const { return W_->shape[1]; }
  std::size_t out_dim() const { return W_->shape[0]; }
  Activation activation() const { return act_; }

 private:
  Tensor* W_ = nullptr;
  Tensor* b_ = nullptr;
  Tensor* dW_ = nullptr;
  Tensor* db_ = nullptr;
  Activation act_ = Activation::identity;
};

struct Conv1dCache {
  Tensor x;
  bool valid = false;
};

/// 1-D cross-correlation with "same" zero padding: x [in_ch x L] ->
/// y [out_ch x L]. Kernel width must be odd so the padding is symmetric.
class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(ParamRegistry& reg, const std::string& prefix, std::size_t out_ch,
              std::size_t in_ch, std::size_t width, Rng* init);

  Tensor forward(const Tensor& x, Conv1dCache* cache = nullptr) const;
  /// Accumulates kernel/bias grads; returns dL/dx.
  Tensor backward(const Conv1dCache& cache, const Tensor& upstream);

  std::size_t out_channels() const { return kernels_->shape[0]; }
  std::size_t in_channels() const { return kernels_->shape[1]; }
  std::size_t width() const { return kernels_->shape[2]; }

 private:
  Tensor* kernels_ = nullptr;
  Tensor* bias_ = nullptr;
  Tensor* dkernels_ = nullptr;
  Tensor* dbias_ = nullptr;
};

struct GruCache {
  Tensor h_prev, a, z, r, hbar;
  bool valid = false;
};

/// Gated recurrent update with six H x H matrices and no gate biases:
///   z = sigmoid(Wz a + Uz h),  r = sigmoid(Wr a + Ur h)
///   hbar = tanh(W a + U (r . h)),  h' = (1 - z) . h + z . hbar
class GruCell {
 public:
  GruCell() = default;
  GruCell(ParamRegistry& reg, const std::string& prefix, std::size_t hidden, Rng* init);

  Tensor forward(const Tensor& h_prev, const Tensor& a, GruCache* cache = nullptr) const;
  /// Returns {dL/da, dL/dh_prev}; accumulates the six matrix grads.
  std::pair<Tensor, Tensor> backward(const GruCache& cache, const Tensor& dh);

  std::size_t hidden() const { return Wz_->shape[0]; }

 private:
  Tensor *Wz_ = nullptr, *Uz_ = nullptr, *Wr_ = nullptr, *Ur_ = nullptr, *W_ = nullptr,
         *U_ = nullptr;
  Tensor *dWz_ = nullptr, *dUz_ = nullptr, *dWr_ = nullptr, *dUr_ = nullptr, *dW_ = nullptr,
         *dU_ = nullptr;
};

struct LstmCache {
  Tensor x, h_prev, c_prev, i, f, o, g, c, tanh_c;
  bool valid = false;
};

/// LSTM update with eight H x H matrices and no gate biases. Used by the
/// sequential summary baseline.
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(ParamRegistry& reg, const std::string& prefix, std::size_t hidden, Rng* init);

  /// Returns {h, c}.
  std::pair<Tensor, Tensor> forward(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
                                    LstmCache* cache = nullptr) const;
  /// Returns {dx, dh_prev, dc_prev}.
  std::tuple<Tensor, Tensor, Tensor> backward(const LstmCache& cache, const Tensor& dh,
                                              const Tensor& dc);

  std::size_t hidden() const { return Wi_->shape[0]; }

 private:
  Tensor *Wi_ = nullptr, *Ui_ = nullptr, *Wf_ = nullptr, *Uf_ = nullptr, *Wo_ = nullptr,
         *Uo_ = nullptr, *Wg_ = nullptr, *Ug_ = nullptr;
  Tensor *dWi_ = nullptr, *dUi_ = nullptr, *dWf_ = nullptr, *dUf_ = nullptr, *dWo_ = nullptr,
         *dUo_ = nullptr, *dWg_ = nullptr, *dUg_ = nullptr;
};

/// y[out] = W[out x in] * x[in]
Tensor matvec(const Tensor& W, const Tensor& x);
/// acc[in] += W^T u
void matvec_transpose_acc(const Tensor& W, const Tensor& u, Tensor& acc);
/// dW[out x in] += u x^T
void outer_acc(Tensor& dW, const Tensor& u, const Tensor& x);

}  // namespace meg
