#include "meg/metrics.hpp"

#include <stdexcept>

namespace meg {

double auc(const std::vector<std::pair<double, int>>& scored) {
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& [score, label] : scored) (label != 0 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auc: need at least one positive and one negative example");
  }
  double wins = 0.0;
  for (const auto& [sp, lp] : scored) {
    if (lp == 0) continue;
    for (const auto& [sn, ln] : scored) {
      if (ln != 0) continue;
      if (sp > sn) wins += 1.0;
      else if (sp == sn) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

F1Pair f1_scores(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("f1_scores: prediction/label count mismatch");
  }
  auto f1_for = [&](int positive) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const bool pred_pos = predictions[i] == positive;
      const bool is_pos = labels[i] == positive;
      if (pred_pos && is_pos) ++tp;
      else if (pred_pos && !is_pos) ++fp;
      else if (!pred_pos && is_pos) ++fn;
    }
    const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp + fn);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
  };
  return {f1_for(0), f1_for(1)};
}

MetricsReport compute_metrics(const std::vector<std::pair<double, int>>& scored,
                              double threshold) {
  MetricsReport report;
  report.n_examples = scored.size();
  std::vector<int> predictions, labels;
  predictions.reserve(scored.size());
  labels.reserve(scored.size());
  for (const auto& [score, label] : scored) {
    const int pred = score >= threshold ? 1 : 0;
    predictions.push_back(pred);
    labels.push_back(label);
    if (pred == 1 && label == 1) ++report.tp;
    else if (pred == 1 && label == 0) ++report.fp;
    else if (pred == 0 && label == 0) ++report.tn;
    else ++report.fn;
  }
  if (!scored.empty()) {
    report.accuracy = static_cast<double>(report.tp + report.tn) / static_cast<double>(scored.size());
  }
  const F1Pair f1 = f1_scores(predictions, labels);
  report.f1_clean = f1.f1_clean;
  report.f1_tampered = f1.f1_tampered;
  report.auc = auc(scored);
  return report;
}

}  // namespace meg
