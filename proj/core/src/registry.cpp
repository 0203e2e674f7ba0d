#include "meg/registry.hpp"

#include <cmath>
#include <stdexcept>

namespace meg {

void AdamConfig::validate() const {
  if (learning_rate < 0.0) throw std::invalid_argument("AdamConfig: learning_rate must be >= 0");
  if (beta1 <= 0.0 || beta1 >= 1.0) throw std::invalid_argument("AdamConfig: beta1 must be in (0,1)");
  if (beta2 <= 0.0 || beta2 >= 1.0) throw std::invalid_argument("AdamConfig: beta2 must be in (0,1)");
  if (epsilon <= 0.0) throw std::invalid_argument("AdamConfig: epsilon must be > 0");
}

Tensor& ParamRegistry::create(const std::string& name, std::vector<std::size_t> shape) {
  if (slots_.count(name)) {
    throw std::invalid_argument("ParamRegistry: duplicate parameter '" + name + "'");
  }
  Slot slot;
  slot.value = Tensor(shape);
  slot.grad = Tensor(shape);
  slot.m = Tensor(shape);
  slot.v = Tensor(std::move(shape));
  auto [it, ok] = slots_.emplace(name, std::move(slot));
  (void)ok;
  return it->second.value;
}

Tensor& ParamRegistry::param(const std::string& name) {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw std::invalid_argument("ParamRegistry: unknown parameter '" + name + "'");
  return it->second.value;
}

const Tensor& ParamRegistry::param(const std::string& name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw std::invalid_argument("ParamRegistry: unknown parameter '" + name + "'");
  return it->second.value;
}

Tensor& ParamRegistry::grad(const std::string& name) {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw std::invalid_argument("ParamRegistry: unknown parameter '" + name + "'");
  return it->second.grad;
}

const Tensor& ParamRegistry::grad(const std::string& name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw std::invalid_argument("ParamRegistry: unknown parameter '" + name + "'");
  return it->second.grad;
}

std::vector<std::string> ParamRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(slots_.size());
  for (const auto& [name, slot] : slots_) out.push_back(name);
  return out;
}

std::size_t ParamRegistry::total_params() const {
  std::size_t n = 0;
  for (const auto& [name, slot] : slots_) n += slot.value.numel();
  return n;
}

void ParamRegistry::zero_grads() {
  for (auto& [name, slot] : slots_) slot.grad.zero();
}

void ParamRegistry::adam_step(const AdamConfig& cfg) {
  cfg.validate();
  if (slots_.empty()) return;
  ++step_;
  const double t = static_cast<double>(step_);
  const double corr1 = 1.0 - std::pow(cfg.beta1, t);
  const double corr2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& [name, slot] : slots_) {
    for (std::size_t i = 0; i < slot.value.numel(); ++i) {
      const double g = slot.grad.data[i];
      slot.m.data[i] = cfg.beta1 * slot.m.data[i] + (1.0 - cfg.beta1) * g;
      slot.v.data[i] = cfg.beta2 * slot.v.data[i] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = slot.m.data[i] / corr1;
      const double v_hat = slot.v.data[i] / corr2;
      slot.value.data[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
    slot.grad.zero();
  }
}

std::map<std::string, Tensor> ParamRegistry::snapshot_values() const {
  std::map<std::string, Tensor> out;
  for (const auto& [name, slot] : slots_) out.emplace(name, slot.value);
  return out;
}

void ParamRegistry::restore_values(const std::map<std::string, Tensor>& values) {
  for (const auto& [name, value] : values) {
    Tensor& dst = param(name);
    require_shape(value, dst.shape, "ParamRegistry::restore_values");
    dst = value;
  }
}

}  // namespace meg
