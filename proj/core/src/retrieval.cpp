#include "meg/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meg {

namespace {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> normalized(const std::vector<double>& v) {
  const double n = l2_norm(v);
  if (n == 0.0) throw std::invalid_argument("cannot l2-normalize a zero vector");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

}  // namespace

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
  const double na = l2_norm(a), nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot / (na * nb);
}

ReferenceIndex::ReferenceIndex(const Dataset& dataset) {
  for (const Package& p : dataset.packages()) {
    if (p.split != Split::reference) continue;
    const std::size_t idx = ids_.size();
    ids_.push_back(p.id);
    entity_ids_.push_back(p.entity_id);
    for (const auto& [name, vec] : p.modalities) {
      auto& block = blocks_[name];
      if (block.dim == 0) block.dim = vec.size();
      std::vector<double> row = normalized(vec);
      block.rows.insert(block.rows.end(), row.begin(), row.end());
      block.owner.push_back(idx);
    }
  }
}

RetrievalResult ReferenceIndex::retrieve(const Package& query, std::size_t k) const {
  if (ids_.empty()) throw std::runtime_error("retrieve: reference index is empty");
  if (k == 0 || k > ids_.size()) {
    throw std::invalid_argument("retrieve: k=" + std::to_string(k) + " out of range [1, " +
                                std::to_string(ids_.size()) + "]");
  }

  std::vector<double> combined(ids_.size(), 0.0);
  std::vector<std::map<std::string, double>> breakdown(ids_.size());
  bool any_overlap = false;
  for (const auto& [name, qvec] : query.modalities) {
    auto it = blocks_.find(name);
    if (it == blocks_.end()) continue;
    any_overlap = true;
    const ModalityBlock& block = it->second;
    const std::vector<double> q = normalized(qvec);
    for (std::size_t r = 0; r < block.owner.size(); ++r) {
      const double* row = &block.rows[r * block.dim];
      double dot = 0.0;
      for (std::size_t j = 0; j < block.dim; ++j) dot += row[j] * q[j];
      combined[block.owner[r]] += dot;
      breakdown[block.owner[r]][name] = dot;
    }
  }
  if (!any_overlap) {
    throw std::runtime_error("retrieve: query '" + query.id +
                             "' shares no modality with the reference index");
  }

  std::vector<std::size_t> order(ids_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (combined[a] != combined[b]) return combined[a] > combined[b];
    return ids_[a] < ids_[b];
  });

  RetrievalResult result;
  result.query_id = query.id;
  result.ranked.reserve(k);
  result.per_modality.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t idx = order[i];
    result.ranked.emplace_back(ids_[idx], combined[idx]);
    result.per_modality.push_back(std::move(breakdown[idx]));
  }
  return result;
}

std::string ReferenceIndex::nearest_entity_by_modality(const std::string& modality,
                                                       const std::vector<double>& vec) const {
  auto it = blocks_.find(modality);
  if (it == blocks_.end()) throw std::invalid_argument("unknown modality '" + modality + "'");
  const ModalityBlock& block = it->second;
  const std::vector<double> q = normalized(vec);
  double best = -2.0;
  std::size_t best_owner = 0;
  for (std::size_t r = 0; r < block.owner.size(); ++r) {
    const double* row = &block.rows[r * block.dim];
    double dot = 0.0;
    for (std::size_t j = 0; j < block.dim; ++j) dot += row[j] * q[j];
    if (dot > best || (dot == best && ids_[block.owner[r]] < ids_[best_owner])) {
      best = dot;
      best_owner = block.owner[r];
    }
  }
  return entity_ids_[best_owner];
}

MapResult mean_average_precision(const std::vector<RetrievalResult>& results,
                                 const std::map<std::string, std::set<std::string>>& relevance) {
  MapResult out;
  double ap_sum = 0.0;
  for (const RetrievalResult& res : results) {
    auto it = relevance.find(res.query_id);
    if (it == relevance.end() || it->second.empty()) {
      ++out.queries_excluded;
      continue;
    }
    const std::set<std::string>& relevant = it->second;
    std::size_t hits = 0;
    double precision_sum = 0.0;
    for (std::size_t rank = 0; rank < res.ranked.size(); ++rank) {
      if (relevant.count(res.ranked[rank].first)) {
        ++hits;
        precision_sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
      }
    }
    ap_sum += hits == 0 ? 0.0 : precision_sum / static_cast<double>(hits);
    ++out.queries_scored;
  }
  if (out.queries_scored > 0) out.map = ap_sum / static_cast<double>(out.queries_scored);
  return out;
}

std::size_t count_correct_retrievals(const RetrievalResult& result,
                                     const std::set<std::string>& relevant) {
  std::size_t n = 0;
  for (const auto& [id, score] : result.ranked) {
    if (relevant.count(id)) ++n;
  }
  return n;
}

}  // namespace meg
