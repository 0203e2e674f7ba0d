#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "meg/package.hpp"

namespace meg {

struct RetrievalResult {
  std::string query_id;
  /// (package_id, combined score), scores non-increasing, ties broken by
  /// ascending package id.
  std::vector<std::pair<std::string, double>> ranked;
  /// Per-candidate modality -> cosine breakdown, parallel to `ranked`.
  std::vector<std::map<std::string, double>> per_modality;
};

/// Immutable brute-force retrieval index over the reference split: one
/// l2-normalized matrix per modality plus a parallel id list. Retrieval is a
/// pure read and safe to run concurrently across queries.
class ReferenceIndex {
 public:
  explicit ReferenceIndex(const Dataset& dataset);

  /// Combined score = sum over modalities present in both query and
  /// candidate of their cosine similarity; top-k by score with deterministic
  /// id tie-break. Requires 1 <= k <= size() and at least one query modality
  /// known to the index.
  RetrievalResult retrieve(const Package& query, std::size_t k) const;

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Entity of the reference package nearest to `vec` under the given
  /// modality alone. Used by evaluation baselines.
  std::string nearest_entity_by_modality(const std::string& modality,
                                         const std::vector<double>& vec) const;

 private:
  struct ModalityBlock {
    std::size_t dim = 0;
    std::vector<double> rows;        // row-major, l2-normalized
    std::vector<std::size_t> owner;  // row -> index into ids_
  };
  std::vector<std::string> ids_;
  std::vector<std::string> entity_ids_;
  std::map<std::string, ModalityBlock> blocks_;
};

struct MapResult {
  double map = 0.0;
  std::size_t queries_scored = 0;
  std::size_t queries_excluded = 0;  // queries with no relevant reference package
};

/// AP per query = mean over the ranks of relevant items inside the top-k of
/// (relevant-at-or-above-rank / rank); 0 when no relevant item is retrieved.
/// Queries whose relevance set is empty are excluded and counted.
MapResult mean_average_precision(const std::vector<RetrievalResult>& results,
                                 const std::map<std::string, std::set<std::string>>& relevance);

/// |top-k ids  ∩  relevant|
std::size_t count_correct_retrievals(const RetrievalResult& result,
                                     const std::set<std::string>& relevant);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace meg
