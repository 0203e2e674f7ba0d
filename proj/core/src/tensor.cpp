#include "meg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace meg {

namespace {
std::size_t product(const std::vector<std::size_t>& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)), data(product(shape), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> values)
    : shape(std::move(s)), data(std::move(values)) {
  if (product(shape) != data.size()) {
    throw std::invalid_argument("Tensor: shape " + shape_to_string(shape) + " does not match " +
                                std::to_string(data.size()) + " values");
  }
}

Tensor Tensor::vector(std::vector<double> values) {
  std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

std::size_t Tensor::dim(std::size_t i) const {
  if (i >= shape.size()) throw std::invalid_argument("Tensor::dim: axis out of range");
  return shape[i];
}

void Tensor::fill(double v) { std::fill(data.begin(), data.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

void add_inplace(Tensor& y, const Tensor& x) {
  require_shape(x, y.shape, "add_inplace");
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += x.data[i];
}

void axpy_inplace(Tensor& y, double alpha, const Tensor& x) {
  require_shape(x, y.shape, "axpy_inplace");
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += alpha * x.data[i];
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

void require_shape(const Tensor& t, const std::vector<std::size_t>& shape, const char* what) {
  if (t.shape != shape) {
    throw std::invalid_argument(std::string(what) + ": expected shape " + shape_to_string(shape) +
                                ", got " + shape_to_string(t.shape));
  }
}

}  // namespace meg
