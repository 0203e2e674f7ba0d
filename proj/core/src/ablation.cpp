#include "meg/ablation.hpp"

#include <limits>
#include <stdexcept>

namespace meg {

double relative_drop(double auc_before, double auc_after) {
  if (auc_before <= 0.5) return std::numeric_limits<double>::quiet_NaN();
  return (auc_before - auc_after) / (auc_before - 0.5);
}

double drop_vs_error(double auc_before, double auc_after) {
  if (auc_before >= 1.0) return std::numeric_limits<double>::quiet_NaN();
  return (auc_before - auc_after) / (1.0 - auc_before);
}

AblationReport ablate_order(const MegModel& trained, const Dataset& dataset,
                            const ReferenceIndex& index, Split split, std::size_t k) {
  AblationReport report;
  report.variant = to_string(trained.config().variant);
  report.auc_before = evaluate_model(trained, dataset, index, split, k, false).metrics.auc;
  report.auc_after = evaluate_model(trained, dataset, index, split, k, true).metrics.auc;
  report.relative_drop = relative_drop(report.auc_before, report.auc_after);
  report.drop_vs_error = drop_vs_error(report.auc_before, report.auc_after);
  return report;
}

ScaleAblationReport ablate_scale(const Dataset& dataset, const ReferenceIndex& index,
                                 const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                                 std::size_t k_train, std::size_t k_test, Split eval_split) {
  ScaleAblationReport report;
  report.variant = to_string(model_cfg.variant);
  report.k_train = k_train;
  report.k_test = k_test;

  MegModel model(model_cfg, dataset.schema(), train_cfg.seed);
  TrainConfig cfg = train_cfg;
  cfg.k_train = k_train;
  train(model, dataset, index, cfg);

  report.auc_before = evaluate_model(model, dataset, index, eval_split, k_train).metrics.auc;
  report.auc_after = evaluate_model(model, dataset, index, eval_split, k_test).metrics.auc;
  report.relative_drop = relative_drop(report.auc_before, report.auc_after);
  report.drop_vs_error = drop_vs_error(report.auc_before, report.auc_after);
  return report;
}

RetrievalQuality retrieval_quality_split(
    const std::vector<RetrievalResult>& results,
    const std::map<std::string, std::set<std::string>>& relevance,
    const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (results.size() != predictions.size() || results.size() != labels.size()) {
    throw std::invalid_argument("retrieval_quality_split: input size mismatch");
  }
  double sum_correct = 0.0, sum_mis = 0.0;
  std::size_t n_correct = 0, n_mis = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto it = relevance.find(results[i].query_id);
    if (it == relevance.end()) {
      throw std::invalid_argument("retrieval_quality_split: no relevance for query '" +
                                  results[i].query_id + "'");
    }
    const auto count = static_cast<double>(count_correct_retrievals(results[i], it->second));
    if (predictions[i] == labels[i]) {
      sum_correct += count;
      ++n_correct;
    } else {
      sum_mis += count;
      ++n_mis;
    }
  }
  RetrievalQuality out;
  if (n_correct > 0) out.avg_correct_classified = sum_correct / static_cast<double>(n_correct);
  if (n_mis > 0) out.avg_correct_misclassified = sum_mis / static_cast<double>(n_mis);
  return out;
}

}  // namespace meg
