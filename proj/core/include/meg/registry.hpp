#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "meg/tensor.hpp"

namespace meg {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Named parameter store with per-entry gradient accumulators and Adam
/// moment state. Entry references stay valid for the registry's lifetime
/// (map nodes are stable), so layers bind raw pointers once at build time.
///
/// Single-writer: one training thread owns gradient accumulation and
/// updates; concurrent readers of parameter values are fine between steps.
class ParamRegistry {
 public:
  /// Creates a zero-initialized parameter. Throws on duplicate name.
  Tensor& create(const std::string& name, std::vector<std::size_t> shape);

  Tensor& param(const std::string& name);
  const Tensor& param(const std::string& name) const;
  Tensor& grad(const std::string& name);
  const Tensor& grad(const std::string& name) const;
  bool contains(const std::string& name) const { return slots_.count(name) != 0; }

  std::vector<std::string> names() const;
  std::size_t size() const { return slots_.size(); }
  std::size_t total_params() const;

  void zero_grads();

  /// Standard Adam with bias correction; zeroes gradient accumulators and
  /// increments the shared step counter. No-op on an empty registry.
  void adam_step(const AdamConfig& cfg);

  std::int64_t step_count() const { return step_; }

  /// Full value snapshot / restore, used for best-checkpoint selection.
  std::map<std::string, Tensor> snapshot_values() const;
  void restore_values(const std::map<std::string, Tensor>& values);

 private:
  struct Slot {
    Tensor value;
    Tensor grad;
    Tensor m;
    Tensor v;
  };
  std::map<std::string, Slot> slots_;
  std::int64_t step_ = 0;
};

}  // namespace meg
