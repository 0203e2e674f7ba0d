#include "meg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "meg/metrics.hpp"
#include "meg/rng.hpp"

namespace meg {

void TrainConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (k_train == 0) throw std::invalid_argument("TrainConfig: k_train must be >= 1");
  if (epochs == 0) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (val_check_interval == 0) {
    throw std::invalid_argument("TrainConfig: val_check_interval must be >= 1");
  }
  if (learning_rate < 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
}

namespace {
constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) {
  return std::min(std::max(p, kProbClamp), 1.0 - kProbClamp);
}
}  // namespace

double bce_loss(double p, int y) {
  const double pc = clamp_prob(p);
  return y != 0 ? -std::log(pc) : -std::log(1.0 - pc);
}

double bce_loss_grad(double p, int y) {
  const double pc = clamp_prob(p);
  return y != 0 ? -1.0 / pc : 1.0 / (1.0 - pc);
}

TrainResult train(MegModel& model, const Dataset& dataset, const ReferenceIndex& index,
                  const TrainConfig& cfg) {
  cfg.validate();
  const auto train_split = dataset.split(Split::train);
  const auto val_split = dataset.split(Split::val);
  if (train_split.empty()) throw std::runtime_error("train: train split is empty");
  if (val_split.empty()) throw std::runtime_error("train: val split is empty");

  Rng rng(cfg.seed);
  AdamConfig adam;
  adam.learning_rate = cfg.learning_rate;

  // Validation evidence is fixed for the whole run (the index is immutable).
  std::vector<EvidenceSet> val_sets;
  std::vector<int> val_labels;
  val_sets.reserve(val_split.size());
  for (const Package* q : val_split) {
    val_sets.push_back(make_evidence_set(*q, index.retrieve(*q, cfg.k_train), dataset));
    val_labels.push_back(q->label == Label::tampered ? 1 : 0);
  }
  ForwardCache scratch;
  auto validation_auc = [&]() {
    std::vector<std::pair<double, int>> scored;
    scored.reserve(val_sets.size());
    for (std::size_t i = 0; i < val_sets.size(); ++i) {
      scored.emplace_back(model.forward(val_sets[i], scratch), val_labels[i]);
    }
    return auc(scored);
  };

  std::vector<EvidenceSet> train_cache(cfg.cache_retrievals ? train_split.size() : 0);
  auto evidence_for = [&](std::size_t i) -> EvidenceSet {
    if (cfg.cache_retrievals) {
      if (train_cache[i].query == nullptr) {
        train_cache[i] =
            make_evidence_set(*train_split[i], index.retrieve(*train_split[i], cfg.k_train), dataset);
      }
      return train_cache[i];
    }
    return make_evidence_set(*train_split[i], index.retrieve(*train_split[i], cfg.k_train), dataset);
  };

  TrainResult result;
  double best_auc = -std::numeric_limits<double>::infinity();
  std::map<std::string, Tensor> best_values;
  std::size_t best_batch = 0;

  auto check_validation = [&](std::size_t batch_idx, double batch_loss) {
    const double v = validation_auc();
    result.history.push_back({batch_idx, batch_loss, true, v});
    if (v > best_auc) {
      best_auc = v;
      best_values = model.params().snapshot_values();
      best_batch = batch_idx;
    }
  };

  std::vector<std::size_t> order(train_split.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::size_t batch_idx = 0;
  double last_batch_loss = 0.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, order.size());
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      double loss_sum = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const Package* q = train_split[order[i]];
        const int y = q->label == Label::tampered ? 1 : 0;
        EvidenceSet es = evidence_for(order[i]);
        const double p = model.forward(es, scratch);
        loss_sum += bce_loss(p, y);
        model.backward(scratch, bce_loss_grad(p, y) * inv_batch);
      }
      model.params().adam_step(adam);
      ++batch_idx;
      last_batch_loss = loss_sum * inv_batch;
      if (batch_idx % cfg.val_check_interval == 0) {
        check_validation(batch_idx, last_batch_loss);
      } else {
        result.history.push_back({batch_idx, last_batch_loss, false, 0.0});
      }
    }
  }
  // Final state competes for selection as well.
  if (result.history.empty() || !result.history.back().has_val) {
    check_validation(batch_idx, last_batch_loss);
  }

  model.params().restore_values(best_values);
  result.best_val_auc = best_auc;
  result.best_batch = best_batch;
  result.batches_run = batch_idx;
  return result;
}

}  // namespace meg
