#pragma once

#include <cstdint>
#include <vector>

#include "meg/model.hpp"
#include "meg/package.hpp"
#include "meg/retrieval.hpp"

namespace meg {

struct TrainConfig {
  std::size_t batch_size = 32;
  double learning_rate = 0.001;
  std::size_t epochs = 30;
  std::size_t k_train = 5;  // evidences retrieved per query during training
  std::uint64_t seed = 0;
  std::size_t val_check_interval = 50;  // batches between validation passes
  /// Retrieval against the immutable index is recomputed per epoch by
  /// default (the deployment path); caching changes nothing but speed.
  bool cache_retrievals = false;

  void validate() const;
};

/// Binary cross-entropy with p clamped to [1e-12, 1 - 1e-12].
double bce_loss(double p, int y);
/// dL/dp under the same clamp.
double bce_loss_grad(double p, int y);

struct TrainHistoryRow {
  std::size_t batch = 0;
  double train_loss = 0.0;
  bool has_val = false;
  double val_auc = 0.0;
};

struct TrainResult {
  std::vector<TrainHistoryRow> history;
  double best_val_auc = 0.0;
  std::size_t best_batch = 0;
  std::size_t batches_run = 0;
};

/// Supervised training: per example retrieve k_train evidences, forward,
/// BCE against the label, backward; one Adam step per batch. Every
/// val_check_interval batches (and once more at the end) validation AUC is
/// measured and the best parameter snapshot kept; the model is left holding
/// that snapshot. Fully deterministic for a fixed seed.
TrainResult train(MegModel& model, const Dataset& dataset, const ReferenceIndex& index,
                  const TrainConfig& cfg);

}  // namespace meg
