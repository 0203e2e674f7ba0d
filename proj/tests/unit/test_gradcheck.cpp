#include <doctest.h>

#include "meg/gradcheck.hpp"

using namespace meg;

TEST_CASE("grad_check passes a quadratic with its exact gradient") {
  ParamRegistry reg;
  Tensor& theta = reg.create("theta", {1});
  theta.data[0] = 3.0;
  auto loss = [&]() { return theta.data[0] * theta.data[0]; };
  reg.grad("theta").data[0] = 6.0;  // analytic d(theta^2)/dtheta at 3

  auto report = grad_check(loss, reg, 1e-5);
  CHECK(report.deterministic);
  CHECK(report.coords_checked == 1);
  CHECK(report.max_rel_err < 1e-8);
  CHECK(report.passed(1e-4));
}

TEST_CASE("grad_check fails a deliberately corrupted gradient") {
  ParamRegistry reg;
  Tensor& theta = reg.create("theta", {1});
  theta.data[0] = 3.0;
  auto loss = [&]() { return theta.data[0] * theta.data[0]; };
  reg.grad("theta").data[0] = 6.0 * 1.10;  // +10%

  auto report = grad_check(loss, reg, 1e-5);
  CHECK_FALSE(report.passed(1e-4));
  CHECK(report.worst.name == "theta");
}

TEST_CASE("grad_check flags a non-deterministic closure") {
  ParamRegistry reg;
  Tensor& theta = reg.create("theta", {1});
  theta.data[0] = 1.0;
  int calls = 0;
  auto loss = [&]() { return theta.data[0] + 0.001 * static_cast<double>(calls++); };

  auto report = grad_check(loss, reg, 1e-5);
  CHECK_FALSE(report.deterministic);
  CHECK_FALSE(report.passed(1e-4));
}

TEST_CASE("grad_check subsamples large tensors deterministically") {
  ParamRegistry reg;
  Tensor& big = reg.create("big", {300});
  for (std::size_t i = 0; i < 300; ++i) big.data[i] = 0.01 * static_cast<double>(i);
  auto loss = [&]() {
    double s = 0.0;
    for (double v : big.data) s += v * v;
    return s;
  };
  Tensor& g = reg.grad("big");
  for (std::size_t i = 0; i < 300; ++i) g.data[i] = 0.02 * static_cast<double>(i);

  auto r1 = grad_check(loss, reg, 1e-5, 200);
  CHECK(r1.coords_checked == 200);
  CHECK(r1.passed(1e-4));
  auto r2 = grad_check(loss, reg, 1e-5, 200);
  CHECK(r2.coords_checked == r1.coords_checked);
  CHECK(r2.max_rel_err == r1.max_rel_err);  // same seeded subset
}
