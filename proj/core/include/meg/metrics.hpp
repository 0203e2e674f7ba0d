#pragma once

#include <cstddef>
#include <vector>

namespace meg {

/// Confusion-matrix bookkeeping treats "tampered" (label 1) as positive.
struct MetricsReport {
  double accuracy = 0.0;
  double auc = 0.0;
  double f1_clean = 0.0;
  double f1_tampered = 0.0;
  std::size_t n_examples = 0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Exact Mann-Whitney rank statistic: P(score_pos > score_neg) + 0.5 P(tie)
/// over all positive x negative pairs. Throws std::invalid_argument unless
/// both classes are present.
double auc(const std::vector<std::pair<double, int>>& scored);

struct F1Pair {
  double f1_clean = 0.0;
  double f1_tampered = 0.0;
};

/// Per-class F1 with the convention F1 = 0 when precision + recall = 0.
F1Pair f1_scores(const std::vector<int>& predictions, const std::vector<int>& labels);

/// Thresholds scores at `threshold` and assembles the full report.
MetricsReport compute_metrics(const std::vector<std::pair<double, int>>& scored,
                              double threshold = 0.5);

}  // namespace meg
