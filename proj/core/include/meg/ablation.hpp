#pragma once

#include <optional>
#include <string>

#include "meg/eval.hpp"
#include "meg/trainer.hpp"

namespace meg {

/// relative_drop = (before - after) / (before - 0.5), defined for
/// before > 0.5 (drop measured against the headroom above chance);
/// drop_vs_error = (before - after) / (1 - before), drop measured against
/// the before-error. Undefined values are NaN.
struct AblationReport {
  std::string variant;
  double auc_before = 0.0;
  double auc_after = 0.0;
  double relative_drop = 0.0;
  double drop_vs_error = 0.0;
};

double relative_drop(double auc_before, double auc_after);
double drop_vs_error(double auc_before, double auc_after);

/// Order-invariance protocol: evaluate a trained model on a split with the
/// retrieval order as returned, then with every evidence list reversed.
AblationReport ablate_order(const MegModel& trained, const Dataset& dataset,
                            const ReferenceIndex& index, Split split, std::size_t k);

struct ScaleAblationReport : AblationReport {
  std::size_t k_train = 0;
  std::size_t k_test = 0;
};

/// Scalability protocol: train the configured variant with k_train
/// evidences, then evaluate with k_train (before) and k_test (after).
ScaleAblationReport ablate_scale(const Dataset& dataset, const ReferenceIndex& index,
                                 const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                                 std::size_t k_train = 2, std::size_t k_test = 5,
                                 Split eval_split = Split::test);

struct RetrievalQuality {
  /// Mean correct retrievals over correctly classified queries (TP+TN).
  std::optional<double> avg_correct_classified;
  /// Mean over misclassified queries (FP+FN); absent when there are none.
  std::optional<double> avg_correct_misclassified;
};

RetrievalQuality retrieval_quality_split(
    const std::vector<RetrievalResult>& results,
    const std::map<std::string, std::set<std::string>>& relevance,
    const std::vector<int>& predictions, const std::vector<int>& labels);

}  // namespace meg
