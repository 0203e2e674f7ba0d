#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "meg/rng.hpp"

namespace meg {

/// Knobs for the embedding-space benchmark generator. Entities are unit
/// centroids per modality; packages are centroid + gaussian(cluster_spread)
/// noise, l2-normalized. Train/val/test entity sets are pairwise disjoint;
/// every entity also contributes clean reference packages.
struct GenerationConfig {
  std::size_t num_entities = 40;
  std::size_t packages_per_entity = 20;
  std::map<std::string, std::size_t> modality_dims = {
      {"image", 64}, {"text", 64}, {"location", 16}};
  double cluster_spread = 0.1;
  double manipulation_rate = 0.5;
  std::uint64_t seed = 7;
  double train_fraction = 0.7;
  double val_fraction = 0.1;
  double test_fraction = 0.2;
  /// Fraction of each entity's packages placed in the reference split.
  double reference_fraction = 0.15;
  /// Modalities a manipulation may replace. A tampered package swaps one of
  /// these (chosen uniformly) for the nearest other entity's vector; with
  /// coherent_pair, all of them are swapped to the same target entity.
  std::vector<std::string> manipulable_modalities = {"text", "location"};
  bool coherent_pair = false;

  void validate() const;
};

/// Per-entity modality centroids, drawn once per entity.
class EntityCentroids {
 public:
  EntityCentroids(const GenerationConfig& config, Rng& rng);

  const std::vector<std::string>& entity_ids() const { return entity_ids_; }
  const std::map<std::string, std::vector<double>>& centroids(std::size_t entity) const {
    return centroids_[entity];
  }

  /// Nearest other entity by combined (summed over modalities) centroid
  /// cosine; ties break toward the ascending entity id.
  std::string nearest_entity(const std::string& entity_id) const;

 private:
  std::vector<std::string> entity_ids_;
  std::vector<std::map<std::string, std::vector<double>>> centroids_;
};

struct GenerationSummary {
  std::filesystem::path manifest_path;
  std::filesystem::path audit_path;
  std::size_t n_reference = 0;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;
  std::size_t n_tampered = 0;
};

/// Writes manifest.jsonl (package-store format) and audit.jsonl (one record
/// per manipulated modality: id, manipulated_modality, source_entity,
/// target_entity, plus the full clean counterfactual modalities for oracle
/// tests). Byte-identical output for a given config.
GenerationSummary generate(const GenerationConfig& config, const std::filesystem::path& out_dir);

}  // namespace meg
