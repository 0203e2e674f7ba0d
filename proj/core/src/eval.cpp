#include "meg/eval.hpp"

#include <stdexcept>

namespace meg {

EvalOutput evaluate_model(const MegModel& model, const Dataset& dataset,
                          const ReferenceIndex& index, Split split, std::size_t k,
                          bool reverse_order) {
  const auto queries = dataset.split(split);
  if (queries.empty()) {
    throw std::runtime_error("evaluate: split '" + to_string(split) + "' is empty");
  }
  EvalOutput out;
  ForwardCache scratch;
  for (const Package* q : queries) {
    RetrievalResult res = index.retrieve(*q, k);
    EvidenceSet es = make_evidence_set(*q, res, dataset, reverse_order);
    const double p = model.forward(es, scratch);
    const int label = q->label == Label::tampered ? 1 : 0;
    out.scored.emplace_back(p, label);
    out.predictions.push_back(p >= 0.5 ? 1 : 0);
    out.labels.push_back(label);
    out.query_ids.push_back(q->id);
    out.retrievals.push_back(std::move(res));
  }
  out.metrics = compute_metrics(out.scored);
  return out;
}

std::map<std::string, std::set<std::string>> relevance_map(const Dataset& dataset, Split split) {
  std::map<std::string, std::set<std::string>> out;
  for (const Package* q : dataset.split(split)) {
    auto ids = dataset.reference_ids_for_entity(q->entity_id);
    out.emplace(q->id, std::set<std::string>(ids.begin(), ids.end()));
  }
  return out;
}

}  // namespace meg
