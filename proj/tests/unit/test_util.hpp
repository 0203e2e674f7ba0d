#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "meg/rng.hpp"
#include "meg/tensor.hpp"

namespace meg::testutil {

/// Fresh scratch directory under the test binary's working directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::path("test_tmp") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-scale, scale);
  return t;
}

/// Central-difference gradient of a scalar function with respect to one
/// tensor, used as the independent oracle for input gradients.
inline Tensor fd_input_grad(const std::function<double()>& f, Tensor& x, double h = 1e-5) {
  Tensor g(x.shape);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double saved = x.data[i];
    x.data[i] = saved + h;
    const double fp = f();
    x.data[i] = saved - h;
    const double fm = f();
    x.data[i] = saved;
    g.data[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace meg::testutil
