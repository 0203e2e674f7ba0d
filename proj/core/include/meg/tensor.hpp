#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace meg {

/// Dense row-major tensor of 64-bit floats. Rank is dynamic (1..3 in
/// practice); product(shape) always equals data.size().
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s);
  Tensor(std::vector<std::size_t> s, std::vector<double> values);

  static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }
  static Tensor vector(std::vector<double> values);

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const;

  double& operator()(std::size_t i) { return data[i]; }
  double operator()(std::size_t i) const { return data[i]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * shape[1] + j) * shape[2] + k];
  }

  void fill(double v);
  void zero() { fill(0.0); }
  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  bool all_finite() const;
};

/// y += x, shapes must match.
void add_inplace(Tensor& y, const Tensor& x);
/// y += alpha * x, shapes must match.
void axpy_inplace(Tensor& y, double alpha, const Tensor& x);

std::string shape_to_string(const std::vector<std::size_t>& shape);

/// Throws std::invalid_argument naming `what` when shapes differ.
void require_shape(const Tensor& t, const std::vector<std::size_t>& shape, const char* what);

}  // namespace meg
