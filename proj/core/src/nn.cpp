#include "meg/nn.hpp"

#include <stdexcept>
#include <tuple>

namespace meg {

namespace {

double fan_in_uniform(Rng* init, std::size_t fan_in) {
  if (!init) return 0.0;
  double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
  return init->uniform(-s, s);
}

void init_tensor(Tensor& t, Rng* init, std::size_t fan_in) {
  for (double& v : t.data) v = fan_in_uniform(init, fan_in);
}

void apply_activation(Activation act, const Tensor& pre, Tensor& y) {
  switch (act) {
    case Activation::identity:
      y = pre;
      break;
    case Activation::relu:
      y = pre;
      for (double& v : y.data) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::sigmoid:
      y = pre;
      for (double& v : y.data) v = sigmoid(v);
      break;
    case Activation::tanh:
      y = pre;
      for (double& v : y.data) v = std::tanh(v);
      break;
  }
}

// dact = upstream . act'(pre), using y where the derivative is cheapest.
Tensor activation_backward(Activation act, const Tensor& pre, const Tensor& y,
                           const Tensor& upstream) {
  Tensor d = upstream;
  switch (act) {
    case Activation::identity:
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < d.numel(); ++i) d.data[i] = pre.data[i] > 0.0 ? d.data[i] : 0.0;
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < d.numel(); ++i) d.data[i] *= y.data[i] * (1.0 - y.data[i]);
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < d.numel(); ++i) d.data[i] *= 1.0 - y.data[i] * y.data[i];
      break;
  }
  return d;
}

void require_cache(bool valid, const char* who) {
  if (!valid) throw std::logic_error(std::string(who) + ": backward called without a forward pass");
}

}  // namespace

Tensor matvec(const Tensor& W, const Tensor& x) {
  if (W.rank() != 2 || x.rank() != 1 || W.shape[1] != x.shape[0]) {
    throw std::invalid_argument("matvec: incompatible shapes " + shape_to_string(W.shape) + " * " +
                                shape_to_string(x.shape));
  }
  const std::size_t out = W.shape[0], in = W.shape[1];
  Tensor y({out});
  for (std::size_t i = 0; i < out; ++i) {
    double acc = 0.0;
    const double* row = &W.data[i * in];
    for (std::size_t j = 0; j < in; ++j) acc += row[j] * x.data[j];
    y.data[i] = acc;
  }
  return y;
}

void matvec_transpose_acc(const Tensor& W, const Tensor& u, Tensor& acc) {
  const std::size_t out = W.shape[0], in = W.shape[1];
  if (u.numel() != out || acc.numel() != in) {
    throw std::invalid_argument("matvec_transpose_acc: incompatible shapes");
  }
  for (std::size_t i = 0; i < out; ++i) {
    const double ui = u.data[i];
    const double* row = &W.data[i * in];
    for (std::size_t j = 0; j < in; ++j) acc.data[j] += row[j] * ui;
  }
}

void outer_acc(Tensor& dW, const Tensor& u, const Tensor& x) {
  const std::size_t out = dW.shape[0], in = dW.shape[1];
  if (u.numel() != out || x.numel() != in) {
    throw std::invalid_argument("outer_acc: incompatible shapes");
  }
  for (std::size_t i = 0; i < out; ++i) {
    const double ui = u.data[i];
    double* row = &dW.data[i * in];
    for (std::size_t j = 0; j < in; ++j) row[j] += ui * x.data[j];
  }
}

// ---------------------------------------------------------------------------
// DenseLayer

DenseLayer::DenseLayer(ParamRegistry& reg, const std::string& prefix, std::size_t out_dim,
                       std::size_t in_dim, Activation act, Rng* init)
    : act_(act) {
  Tensor& W = reg.create(prefix + ".weights", {out_dim, in_dim});
  init_tensor(W, init, in_dim);
  reg.create(prefix + ".bias", {out_dim});
  W_ = &reg.param(prefix + ".weights");
  b_ = &reg.param(prefix + ".bias");
  dW_ = &reg.grad(prefix + ".weights");
  db_ = &reg.grad(prefix + ".bias");
}

Tensor DenseLayer::forward(const Tensor& x, DenseCache* cache) const {
  Tensor pre = matvec(*W_, x);
  add_inplace(pre, *b_);
  Tensor y;
  apply_activation(act_, pre, y);
  if (cache) {
    cache->x = x;
    cache->pre = std::move(pre);
    cache->y = y;
    cache->valid = true;
  }
  return y;
}

Tensor DenseLayer::backward(const DenseCache& cache, const Tensor& upstream) {
  require_cache(cache.valid, "DenseLayer");
  require_shape(upstream, {out_dim()}, "DenseLayer::backward upstream");
  Tensor dpre = activation_backward(act_, cache.pre, cache.y, upstream);
  outer_acc(*dW_, dpre, cache.x);
  add_inplace(*db_, dpre);
  Tensor dx({in_dim()});
  matvec_transpose_acc(*W_, dpre, dx);
  return dx;
}

// ---------------------------------------------------------------------------
// Conv1dLayer

Conv1dLayer::Conv1dLayer(ParamRegistry& reg, const std::string& prefix, std::size_t out_ch,
                         std::size_t in_ch, std::size_t width, Rng* init) {
  if (width % 2 == 0) {
    throw std::invalid_argument("Conv1dLayer: kernel width must be odd, got " +
                                std::to_string(width));
  }
  Tensor& K = reg.create(prefix + ".kernels", {out_ch, in_ch, width});
  init_tensor(K, init, in_ch * width);
  reg.create(prefix + ".bias", {out_ch});
  kernels_ = &reg.param(prefix + ".kernels");
  bias_ = &reg.param(prefix + ".bias");
  dkernels_ = &reg.grad(prefix + ".kernels");
  dbias_ = &reg.grad(prefix + ".bias");
}

Tensor Conv1dLayer::forward(const Tensor& x, Conv1dCache* cache) const {
  const std::size_t out_ch = out_channels(), in_ch = in_channels(), w = width();
  if (x.rank() != 2 || x.shape[0] != in_ch) {
    throw std::invalid_argument("Conv1dLayer: expected input [" + std::to_string(in_ch) +
                                " x L], got " + shape_to_string(x.shape));
  }
  const std::size_t len = x.shape[1];
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(w / 2);
  Tensor y({out_ch, len});
  for (std::size_t o = 0; o < out_ch; ++o) {
    for (std::size_t t = 0; t < len; ++t) {
      double acc = bias_->data[o];
      for (std::size_t c = 0; c < in_ch; ++c) {
        for (std::size_t j = 0; j < w; ++j) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) + static_cast<std::ptrdiff_t>(j) - half;
          if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
          acc += (*kernels_)(o, c, j) * x(c, static_cast<std::size_t>(src));
        }
      }
      y(o, t) = acc;
    }
  }
  if (cache) {
    cache->x = x;
    cache->valid = true;
  }
  return y;
}

Tensor Conv1dLayer::backward(const Conv1dCache& cache, const Tensor& upstream) {
  require_cache(cache.valid, "Conv1dLayer");
  const std::size_t out_ch = out_channels(), in_ch = in_channels(), w = width();
  const std::size_t len = cache.x.shape[1];
  require_shape(upstream, {out_ch, len}, "Conv1dLayer::backward upstream");
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(w / 2);
  Tensor dx({in_ch, len});
  for (std::size_t o = 0; o < out_ch; ++o) {
    for (std::size_t t = 0; t < len; ++t) {
      const double u = upstream(o, t);
      dbias_->data[o] += u;
      for (std::size_t c = 0; c < in_ch; ++c) {
        for (std::size_t j = 0; j < w; ++j) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) + static_cast<std::ptrdiff_t>(j) - half;
          if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
          (*dkernels_)(o, c, j) += u * cache.x(c, static_cast<std::size_t>(src));
          dx(c, static_cast<std::size_t>(src)) += u * (*kernels_)(o, c, j);
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// GruCell

GruCell::GruCell(ParamRegistry& reg, const std::string& prefix, std::size_t hidden, Rng* init) {
  const char* names[6] = {".Wz", ".Uz", ".Wr", ".Ur", ".W", ".U"};
  Tensor** params[6] = {&Wz_, &Uz_, &Wr_, &Ur_, &W_, &U_};
  Tensor** grads[6] = {&dWz_, &dUz_, &dWr_, &dUr_, &dW_, &dU_};
  for (int i = 0; i < 6; ++i) {
    std::string name = prefix + names[i];
    Tensor& t = reg.create(name, {hidden, hidden});
    init_tensor(t, init, hidden);
    *params[i] = &reg.param(name);
    *grads[i] = &reg.grad(name);
  }
}

Tensor GruCell::forward(const Tensor& h_prev, const Tensor& a, GruCache* cache) const {
  const std::size_t H = hidden();
  require_shape(h_prev, {H}, "GruCell h_prev");
  require_shape(a, {H}, "GruCell a");

  Tensor z = matvec(*Wz_, a);
  {
    Tensor tmp = matvec(*Uz_, h_prev);
    add_inplace(z, tmp);
  }
  for (double& v : z.data) v = sigmoid(v);

  Tensor r = matvec(*Wr_, a);
  {
    Tensor tmp = matvec(*Ur_, h_prev);
    add_inplace(r, tmp);
  }
  for (double& v : r.data) v = sigmoid(v);

  Tensor rh({H});
  for (std::size_t i = 0; i < H; ++i) rh.data[i] = r.data[i] * h_prev.data[i];
  Tensor hbar = matvec(*W_, a);
  {
    Tensor tmp = matvec(*U_, rh);
    add_inplace(hbar, tmp);
  }
  for (double& v : hbar.data) v = std::tanh(v);

  Tensor h({H});
  for (std::size_t i = 0; i < H; ++i) {
    h.data[i] = (1.0 - z.data[i]) * h_prev.data[i] + z.data[i] * hbar.data[i];
  }
  if (cache) {
    cache->h_prev = h_prev;
    cache->a = a;
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->hbar = std::move(hbar);
    cache->valid = true;
  }
  return h;
}

std::pair<Tensor, Tensor> GruCell::backward(const GruCache& cache, const Tensor& dh) {
  require_cache(cache.valid, "GruCell");
  const std::size_t H = hidden();
  require_shape(dh, {H}, "GruCell::backward dh");
  const Tensor &h_prev = cache.h_prev, &a = cache.a, &z = cache.z, &r = cache.r,
               &hbar = cache.hbar;

  Tensor dz({H}), dhbar({H}), dh_prev({H});
  for (std::size_t i = 0; i < H; ++i) {
    dz.data[i] = dh.data[i] * (hbar.data[i] - h_prev.data[i]);
    dhbar.data[i] = dh.data[i] * z.data[i];
    dh_prev.data[i] = dh.data[i] * (1.0 - z.data[i]);
  }

  // hbar = tanh(W a + U (r . h_prev))
  Tensor dc({H});
  for (std::size_t i = 0; i < H; ++i) dc.data[i] = dhbar.data[i] * (1.0 - hbar.data[i] * hbar.data[i]);
  Tensor rh({H});
  for (std::size_t i = 0; i < H; ++i) rh.data[i] = r.data[i] * h_prev.data[i];
  outer_acc(*dW_, dc, a);
  outer_acc(*dU_, dc, rh);
  Tensor da({H});
  matvec_transpose_acc(*W_, dc, da);
  Tensor drh({H});
  matvec_transpose_acc(*U_, dc, drh);
  Tensor dr({H});
  for (std::size_t i = 0; i < H; ++i) {
    dr.data[i] = drh.data[i] * h_prev.data[i];
    dh_prev.data[i] += drh.data[i] * r.data[i];
  }

  // z = sigmoid(Wz a + Uz h_prev)
  Tensor dsz({H});
  for (std::size_t i = 0; i < H; ++i) dsz.data[i] = dz.data[i] * z.data[i] * (1.0 - z.data[i]);
  outer_acc(*dWz_, dsz, a);
  outer_acc(*dUz_, dsz, h_prev);
  matvec_transpose_acc(*Wz_, dsz, da);
  matvec_transpose_acc(*Uz_, dsz, dh_prev);

  // r = sigmoid(Wr a + Ur h_prev)
  Tensor dsr({H});
  for (std::size_t i = 0; i < H; ++i) dsr.data[i] = dr.data[i] * r.data[i] * (1.0 - r.data[i]);
  outer_acc(*dWr_, dsr, a);
  outer_acc(*dUr_, dsr, h_prev);
  matvec_transpose_acc(*Wr_, dsr, da);
  matvec_transpose_acc(*Ur_, dsr, dh_prev);

  return {std::move(da), std::move(dh_prev)};
}

// ---------------------------------------------------------------------------
// LstmCell

LstmCell::LstmCell(ParamRegistry& reg, const std::string& prefix, std::size_t hidden, Rng* init) {
  const char* names[8] = {".Wi", ".Ui", ".Wf", ".Uf", ".Wo", ".Uo", ".Wg", ".Ug"};
  Tensor** params[8] = {&Wi_, &Ui_, &Wf_, &Uf_, &Wo_, &Uo_, &Wg_, &Ug_};
  Tensor** grads[8] = {&dWi_, &dUi_, &dWf_, &dUf_, &dWo_, &dUo_, &dWg_, &dUg_};
  for (int i = 0; i < 8; ++i) {
    std::string name = prefix + names[i];
    Tensor& t = reg.create(name, {hidden, hidden});
    init_tensor(t, init, hidden);
    *params[i] = &reg.param(name);
    *grads[i] = &reg.grad(name);
  }
}

std::pair<Tensor, Tensor> LstmCell::forward(const Tensor& x, const Tensor& h_prev,
                                            const Tensor& c_prev, LstmCache* cache) const {
  const std::size_t H = hidden();
  require_shape(x, {H}, "LstmCell x");
  require_shape(h_prev, {H}, "LstmCell h_prev");
  require_shape(c_prev, {H}, "LstmCell c_prev");

  auto gate = [&](const Tensor& Wm, const Tensor& Um, bool tanh_act) {
    Tensor s = matvec(Wm, x);
    Tensor tmp = matvec(Um, h_prev);
    add_inplace(s, tmp);
    for (double& v : s.data) v = tanh_act ? std::tanh(v) : sigmoid(v);
    return s;
  };
  Tensor i = gate(*Wi_, *Ui_, false);
  Tensor f = gate(*Wf_, *Uf_, false);
  Tensor o = gate(*Wo_, *Uo_, false);
  Tensor g = gate(*Wg_, *Ug_, true);

  Tensor c({H}), h({H}), tanh_c({H});
  for (std::size_t k = 0; k < H; ++k) {
    c.data[k] = f.data[k] * c_prev.data[k] + i.data[k] * g.data[k];
    tanh_c.data[k] = std::tanh(c.data[k]);
    h.data[k] = o.data[k] * tanh_c.data[k];
  }
  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->c_prev = c_prev;
    cache->i = std::move(i);
    cache->f = std::move(f);
    cache->o = std::move(o);
    cache->g = std::move(g);
    cache->c = c;
    cache->tanh_c = std::move(tanh_c);
    cache->valid = true;
  }
  return {std::move(h), std::move(c)};
}

std::tuple<Tensor, Tensor, Tensor> LstmCell::backward(const LstmCache& cache, const Tensor& dh,
                                                      const Tensor& dc_in) {
  require_cache(cache.valid, "LstmCell");
  const std::size_t H = hidden();
  Tensor dc({H}), do_({H});
  for (std::size_t k = 0; k < H; ++k) {
    do_.data[k] = dh.data[k] * cache.tanh_c.data[k];
    dc.data[k] = dc_in.data[k] +
                 dh.data[k] * cache.o.data[k] * (1.0 - cache.tanh_c.data[k] * cache.tanh_c.data[k]);
  }
  Tensor di({H}), df({H}), dg({H}), dc_prev({H});
  for (std::size_t k = 0; k < H; ++k) {
    df.data[k] = dc.data[k] * cache.c_prev.data[k];
    dc_prev.data[k] = dc.data[k] * cache.f.data[k];
    di.data[k] = dc.data[k] * cache.g.data[k];
    dg.data[k] = dc.data[k] * cache.i.data[k];
  }

  Tensor dx({H}), dh_prev({H});
  auto gate_backward = [&](const Tensor& gate_val, const Tensor& dgate, Tensor& dWm, Tensor& dUm,
                           const Tensor& Wm, const Tensor& Um, bool tanh_act) {
    Tensor ds({H});
    for (std::size_t k = 0; k < H; ++k) {
      const double gv = gate_val.data[k];
      const double deriv = tanh_act ? (1.0 - gv * gv) : gv * (1.0 - gv);
      ds.data[k] = dgate.data[k] * deriv;
    }
    outer_acc(dWm, ds, cache.x);
    outer_acc(dUm, ds, cache.h_prev);
    matvec_transpose_acc(Wm, ds, dx);
    matvec_transpose_acc(Um, ds, dh_prev);
  };
  gate_backward(cache.i, di, *dWi_, *dUi_, *Wi_, *Ui_, false);
  gate_backward(cache.f, df, *dWf_, *dUf_, *Wf_, *Uf_, false);
  gate_backward(cache.o, do_, *dWo_, *dUo_, *Wo_, *Uo_, false);
  gate_backward(cache.g, dg, *dWg_, *dUg_, *Wg_, *Ug_, true);

  return {std::move(dx), std::move(dh_prev), std::move(dc_prev)};
}

}  // namespace meg
