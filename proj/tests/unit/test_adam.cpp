#include <doctest.h>

#include <cmath>

#include "meg/registry.hpp"
#include "meg/rng.hpp"

using namespace meg;

TEST_CASE("adam first step with unit gradient moves by ~lr") {
  ParamRegistry reg;
  Tensor& theta = reg.create("theta", {1});
  theta.data[0] = 2.0;
  reg.grad("theta").data[0] = 1.0;

  AdamConfig cfg;  // lr=0.001
  reg.adam_step(cfg);
  // m_hat = v_hat = 1 exactly at t=1, so the step is lr/(1+eps).
  CHECK(std::abs((2.0 - theta.data[0]) - 0.001) < 1e-9);
  CHECK(reg.step_count() == 1);
  CHECK(reg.grad("theta").data[0] == 0.0);  // accumulator cleared

  SUBCASE("second identical step has the same magnitude") {
    reg.grad("theta").data[0] = 1.0;
    const double before = theta.data[0];
    reg.adam_step(cfg);
    CHECK(std::abs((before - theta.data[0]) - 0.001) < 1e-9);
    CHECK(reg.step_count() == 2);
  }
}

TEST_CASE("adam with zero gradients is the identity on parameters") {
  Rng rng(7);
  ParamRegistry reg;
  Tensor& a = reg.create("a", {4, 3});
  Tensor& b = reg.create("b", {5});
  for (double& v : a.data) v = rng.uniform(-2, 2);
  for (double& v : b.data) v = rng.uniform(-2, 2);
  const auto snapshot = reg.snapshot_values();

  AdamConfig cfg;
  for (int i = 0; i < 3; ++i) reg.adam_step(cfg);

  CHECK(reg.param("a").data == snapshot.at("a").data);
  CHECK(reg.param("b").data == snapshot.at("b").data);
}

TEST_CASE("adam on an empty registry is a no-op") {
  ParamRegistry reg;
  reg.adam_step(AdamConfig{});
  CHECK(reg.step_count() == 0);
}

TEST_CASE("adam config defaults and validation") {
  AdamConfig cfg;
  CHECK(cfg.learning_rate == 0.001);
  CHECK(cfg.beta1 == 0.9);
  CHECK(cfg.beta2 == 0.999);
  CHECK(cfg.epsilon == 1e-8);

  cfg.beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("registry rejects duplicates and unknown names") {
  ParamRegistry reg;
  reg.create("w", {2});
  CHECK_THROWS_AS(reg.create("w", {2}), std::invalid_argument);
  CHECK_THROWS_AS(reg.param("nope"), std::invalid_argument);
  CHECK(reg.grad("w").shape == reg.param("w").shape);
}
