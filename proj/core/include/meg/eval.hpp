#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "meg/metrics.hpp"
#include "meg/model.hpp"
#include "meg/package.hpp"
#include "meg/retrieval.hpp"

namespace meg {

struct EvalOutput {
  MetricsReport metrics;
  std::vector<std::pair<double, int>> scored;  // (probability, label)
  std::vector<int> predictions;
  std::vector<int> labels;
  std::vector<std::string> query_ids;
  std::vector<RetrievalResult> retrievals;
};

/// Scores every package of a split against its top-k retrieved evidence.
/// reverse_order feeds the evidence list back-to-front, which must not
/// change gnn outputs and generally changes sequential ones.
EvalOutput evaluate_model(const MegModel& model, const Dataset& dataset,
                          const ReferenceIndex& index, Split split, std::size_t k,
                          bool reverse_order = false);

/// Ground-truth retrieval relevance for a split: query id -> ids of
/// same-entity reference packages.
std::map<std::string, std::set<std::string>> relevance_map(const Dataset& dataset, Split split);

}  // namespace meg
