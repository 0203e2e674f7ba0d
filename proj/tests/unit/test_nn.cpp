#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "meg/gradcheck.hpp"
#include "meg/nn.hpp"
#include "test_util.hpp"

using namespace meg;
using meg::testutil::fd_input_grad;
using meg::testutil::random_tensor;

namespace {

DenseLayer make_dense(ParamRegistry& reg, std::size_t out, std::size_t in, Activation act,
                      const std::vector<double>& W, const std::vector<double>& b) {
  DenseLayer layer(reg, "dense", out, in, act, nullptr);
  reg.param("dense.weights").data = W;
  reg.param("dense.bias").data = b;
  return layer;
}

}  // namespace

TEST_CASE("dense forward: identity matrix and activation") {
  ParamRegistry reg;
  auto layer = make_dense(reg, 2, 2, Activation::identity, {1, 0, 0, 1}, {0, 0});
  Tensor y = layer.forward(Tensor::vector({1, 2}));
  CHECK(y.data == std::vector<double>{1, 2});
}

TEST_CASE("dense forward: relu clamps negatives") {
  ParamRegistry reg;
  auto layer = make_dense(reg, 1, 1, Activation::relu, {1}, {0});
  Tensor y = layer.forward(Tensor::vector({-3}));
  CHECK(y.data[0] == 0.0);
}

TEST_CASE("dense forward: sigmoid hand value") {
  // sigmoid(2*0.5 + 2*(-0.5) + 1) = 1/(1+e^-1)
  ParamRegistry reg;
  auto layer = make_dense(reg, 1, 2, Activation::sigmoid, {2, 2}, {1});
  Tensor y = layer.forward(Tensor::vector({0.5, -0.5}));
  CHECK(y.data[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("dense forward: shape mismatch is a configuration error") {
  ParamRegistry reg;
  auto layer = make_dense(reg, 1, 2, Activation::identity, {1, 1}, {0});
  CHECK_THROWS_AS(layer.forward(Tensor::vector({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("dense backward: linear map transposes, relu kills dead units") {
  ParamRegistry reg;
  auto layer = make_dense(reg, 1, 1, Activation::identity, {3}, {0});
  DenseCache cache;
  layer.forward(Tensor::vector({2}), &cache);
  Tensor dx = layer.backward(cache, Tensor::vector({1}));
  CHECK(dx.data[0] == 3.0);

  ParamRegistry reg2;
  DenseLayer relu_layer(reg2, "dense", 1, 1, Activation::relu, nullptr);
  reg2.param("dense.weights").data = {1.0};
  DenseCache c2;
  relu_layer.forward(Tensor::vector({-5}), &c2);  // pre-activation negative
  Tensor dx2 = relu_layer.backward(c2, Tensor::vector({1}));
  CHECK(dx2.data[0] == 0.0);
  CHECK(reg2.grad("dense.weights").data[0] == 0.0);
}

TEST_CASE("dense backward without forward is a usage error") {
  ParamRegistry reg;
  auto layer = make_dense(reg, 1, 1, Activation::identity, {1}, {0});
  DenseCache cache;
  CHECK_THROWS_AS(layer.backward(cache, Tensor::vector({1})), std::logic_error);
}

TEST_CASE("dense gradients match finite differences on random shapes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed * 31 + 1);
    const std::size_t in = 1 + rng.index(6), out = 1 + rng.index(5);
    const Activation act = static_cast<Activation>(rng.index(4));

    ParamRegistry reg;
    DenseLayer layer(reg, "dense", out, in, act, &rng);
    for (double& v : reg.param("dense.bias").data) v = rng.uniform(-0.5, 0.5);
    Tensor x = random_tensor({in}, rng);
    Tensor weight = random_tensor({out}, rng);  // fixed projection to a scalar loss

    auto loss = [&]() {
      Tensor y = layer.forward(x);
      double s = 0.0;
      for (std::size_t i = 0; i < out; ++i) s += weight.data[i] * y.data[i];
      return s;
    };

    DenseCache cache;
    layer.forward(x, &cache);
    Tensor dx = layer.backward(cache, weight);

    auto report = grad_check(loss, reg);
    CHECK_MESSAGE(report.passed(1e-4), "seed ", seed, " param rel err ", report.max_rel_err);

    Tensor dx_fd = fd_input_grad(loss, x);
    for (std::size_t i = 0; i < in; ++i) {
      CHECK(gradcheck_rel_err(dx.data[i], dx_fd.data[i]) <= 1e-4);
    }
  }
}

TEST_CASE("conv1d forward: identity kernel, hand case, zero case") {
  ParamRegistry reg;
  Conv1dLayer conv(reg, "conv", 1, 1, 3, nullptr);

  SUBCASE("identity kernel reproduces the input") {
    reg.param("conv.kernels").data = {0, 1, 0};
    Tensor y = conv.forward(Tensor({1, 3}, {1, 2, 3}));
    CHECK(y.data == std::vector<double>{1, 2, 3});
  }
  SUBCASE("box kernel with zero padding") {
    reg.param("conv.kernels").data = {1, 1, 1};
    Tensor y = conv.forward(Tensor({1, 3}, {1, 1, 1}));
    CHECK(y.data == std::vector<double>{2, 3, 2});
  }
  SUBCASE("all-zero kernels and bias give zero output") {
    Tensor y = conv.forward(Tensor({1, 3}, {4, 5, 6}));
    CHECK(y.data == std::vector<double>{0, 0, 0});
  }
}

TEST_CASE("conv1d rejects even kernel width") {
  ParamRegistry reg;
  CHECK_THROWS_AS(Conv1dLayer(reg, "conv", 1, 1, 4, nullptr), std::invalid_argument);
}

TEST_CASE("conv1d backward: identity kernel passes upstream through") {
  ParamRegistry reg;
  Conv1dLayer conv(reg, "conv", 1, 1, 3, nullptr);
  reg.param("conv.kernels").data = {0, 1, 0};
  Conv1dCache cache;
  conv.forward(Tensor({1, 4}, {1, 2, 3, 4}), &cache);
  Tensor dx = conv.backward(cache, Tensor({1, 4}, {5, 6, 7, 8}));
  CHECK(dx.data == std::vector<double>{5, 6, 7, 8});

  SUBCASE("zero upstream leaves zero grads") {
    reg.zero_grads();
    conv.backward(cache, Tensor({1, 4}));
    for (double v : reg.grad("conv.kernels").data) CHECK(v == 0.0);
    for (double v : reg.grad("conv.bias").data) CHECK(v == 0.0);
  }
}

TEST_CASE("conv1d gradients match finite differences on random shapes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed * 17 + 3);
    const std::size_t in_ch = 1 + rng.index(3), out_ch = 1 + rng.index(3);
    const std::size_t width = 1 + 2 * rng.index(3);  // odd
    const std::size_t len = 1 + rng.index(6);

    ParamRegistry reg;
    Conv1dLayer conv(reg, "conv", out_ch, in_ch, width, &rng);
    for (double& v : reg.param("conv.bias").data) v = rng.uniform(-0.5, 0.5);
    Tensor x = random_tensor({in_ch, len}, rng);
    Tensor weight = random_tensor({out_ch, len}, rng);

    auto loss = [&]() {
      Tensor y = conv.forward(x);
      double s = 0.0;
      for (std::size_t i = 0; i < y.numel(); ++i) s += weight.data[i] * y.data[i];
      return s;
    };

    Conv1dCache cache;
    conv.forward(x, &cache);
    Tensor dx = conv.backward(cache, weight);

    auto report = grad_check(loss, reg);
    CHECK_MESSAGE(report.passed(1e-4), "seed ", seed, " rel err ", report.max_rel_err);

    Tensor dx_fd = fd_input_grad(loss, x);
    for (std::size_t i = 0; i < dx.numel(); ++i) {
      CHECK(gradcheck_rel_err(dx.data[i], dx_fd.data[i]) <= 1e-4);
    }
  }
}

TEST_CASE("gru cell: zero weights halve the hidden state") {
  ParamRegistry reg;
  GruCell cell(reg, "gru", 3, nullptr);
  Tensor h = Tensor::vector({2, -4, 6});
  Tensor a = Tensor::vector({1, 1, 1});
  Tensor out = cell.forward(h, a);
  // z = r = sigmoid(0) = 0.5, hbar = tanh(0) = 0, h' = 0.5 h
  CHECK(out.data[0] == doctest::Approx(1.0));
  CHECK(out.data[1] == doctest::Approx(-2.0));
  CHECK(out.data[2] == doctest::Approx(3.0));
}

TEST_CASE("gru cell: identity candidate weights give 0.5 tanh(a)") {
  ParamRegistry reg;
  GruCell cell(reg, "gru", 2, nullptr);
  Tensor& W = reg.param("gru.W");
  W(0, 0) = 1.0;
  W(1, 1) = 1.0;
  Tensor h({2});  // zero
  Tensor a = Tensor::vector({0.3, -1.2});
  Tensor out = cell.forward(h, a);
  CHECK(out.data[0] == doctest::Approx(0.5 * std::tanh(0.3)).epsilon(1e-12));
  CHECK(out.data[1] == doctest::Approx(0.5 * std::tanh(-1.2)).epsilon(1e-12));
}

TEST_CASE("gru cell gradients match finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed * 13 + 5);
    const std::size_t H = 1 + rng.index(5);

    ParamRegistry reg;
    GruCell cell(reg, "gru", H, &rng);
    Tensor h = random_tensor({H}, rng);
    Tensor a = random_tensor({H}, rng);
    Tensor weight = random_tensor({H}, rng);

    auto loss = [&]() {
      Tensor y = cell.forward(h, a);
      double s = 0.0;
      for (std::size_t i = 0; i < H; ++i) s += weight.data[i] * y.data[i];
      return s;
    };

    GruCache cache;
    cell.forward(h, a, &cache);
    auto [da, dh] = cell.backward(cache, weight);

    auto report = grad_check(loss, reg);
    CHECK_MESSAGE(report.passed(1e-4), "seed ", seed, " rel err ", report.max_rel_err);

    Tensor da_fd = fd_input_grad(loss, a);
    Tensor dh_fd = fd_input_grad(loss, h);
    for (std::size_t i = 0; i < H; ++i) {
      CHECK(gradcheck_rel_err(da.data[i], da_fd.data[i]) <= 1e-4);
      CHECK(gradcheck_rel_err(dh.data[i], dh_fd.data[i]) <= 1e-4);
    }
  }
}

TEST_CASE("lstm cell gradients match finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed * 7 + 11);
    const std::size_t H = 1 + rng.index(4);

    ParamRegistry reg;
    LstmCell cell(reg, "lstm", H, &rng);
    Tensor x = random_tensor({H}, rng);
    Tensor h = random_tensor({H}, rng);
    Tensor c = random_tensor({H}, rng);
    Tensor weight = random_tensor({H}, rng);

    auto loss = [&]() {
      auto [hn, cn] = cell.forward(x, h, c);
      double s = 0.0;
      for (std::size_t i = 0; i < H; ++i) s += weight.data[i] * hn.data[i];
      return s;
    };

    LstmCache cache;
    cell.forward(x, h, c, &cache);
    auto [dx, dh, dc] = cell.backward(cache, weight, Tensor({H}));

    auto report = grad_check(loss, reg);
    CHECK_MESSAGE(report.passed(1e-4), "seed ", seed, " rel err ", report.max_rel_err);

    Tensor dx_fd = fd_input_grad(loss, x);
    Tensor dh_fd = fd_input_grad(loss, h);
    Tensor dc_fd = fd_input_grad(loss, c);
    for (std::size_t i = 0; i < H; ++i) {
      CHECK(gradcheck_rel_err(dx.data[i], dx_fd.data[i]) <= 1e-4);
      CHECK(gradcheck_rel_err(dh.data[i], dh_fd.data[i]) <= 1e-4);
      CHECK(gradcheck_rel_err(dc.data[i], dc_fd.data[i]) <= 1e-4);
    }
  }
}

TEST_CASE("activation outputs stay in their analytic ranges") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(std::tanh(0.0) == 0.0);

  Rng rng(99);
  ParamRegistry reg;
  DenseLayer sig(reg, "sig", 4, 4, Activation::sigmoid, &rng);
  DenseLayer tnh(reg, "tanh", 4, 4, Activation::tanh, &rng);
  DenseLayer rl(reg, "relu", 4, 4, Activation::relu, &rng);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor x = random_tensor({4}, rng, 10.0);
    for (double v : sig.forward(x).data) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    for (double v : tnh.forward(x).data) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
    for (double v : rl.forward(x).data) CHECK(v >= 0.0);
  }
}

TEST_CASE("forward passes are bit-identical across repeated calls") {
  Rng rng(123);
  ParamRegistry reg;
  DenseLayer dense(reg, "dense", 3, 5, Activation::tanh, &rng);
  Conv1dLayer conv(reg, "conv", 2, 2, 3, &rng);
  GruCell gru(reg, "gru", 4, &rng);

  Tensor x = random_tensor({5}, rng);
  Tensor xc = random_tensor({2, 6}, rng);
  Tensor h = random_tensor({4}, rng);
  Tensor a = random_tensor({4}, rng);

  CHECK(dense.forward(x).data == dense.forward(x).data);
  CHECK(conv.forward(xc).data == conv.forward(xc).data);
  CHECK(gru.forward(h, a).data == gru.forward(h, a).data);
}

TEST_CASE("primitive outputs are finite on finite inputs") {
  Rng rng(321);
  for (int trial = 0; trial < 20; ++trial) {
    ParamRegistry reg;
    DenseLayer dense(reg, "dense", 4, 4, static_cast<Activation>(trial % 4), &rng);
    Tensor x = random_tensor({4}, rng, 100.0);
    CHECK(dense.forward(x).all_finite());
  }
}
