#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace meg {

enum class Split { reference, train, val, test };
enum class Label { clean, tampered };

Split split_from_string(const std::string& s);
std::string to_string(Split s);
Label label_from_string(const std::string& s);
std::string to_string(Label l);

/// One multimedia record: per-modality feature vectors plus bookkeeping.
/// entity_id is the ground-truth cluster, used only for generation and
/// evaluation, never by the model.
struct Package {
  std::string id;
  Split split = Split::reference;
  Label label = Label::clean;
  std::string entity_id;
  std::map<std::string, std::vector<double>> modalities;

  bool has_modality(const std::string& name) const { return modalities.count(name) != 0; }
};

/// Modality name -> feature dimension, as declared by the manifest's schema
/// header line. Iteration order (sorted names) is the canonical modality
/// order used everywhere downstream.
struct DatasetSchema {
  std::map<std::string, std::size_t> modality_dims;

  std::vector<std::string> modality_names() const;
};

/// In-memory dataset keyed by package id, loaded from a JSON-Lines manifest:
/// line 1 is {"schema": {...}}, every further line one package object.
/// Ingest validates dimensions, rejects duplicate ids and zero-norm vectors,
/// and reports the offending line number on error.
class Dataset {
 public:
  static Dataset load(const std::filesystem::path& manifest_path);

  const DatasetSchema& schema() const { return schema_; }
  const std::vector<Package>& packages() const { return packages_; }
  std::vector<const Package*> split(Split s) const;
  const Package* find(const std::string& id) const;
  std::size_t size() const { return packages_.size(); }

  /// Ground-truth relevance for retrieval metrics: reference packages that
  /// share the query's entity.
  std::vector<std::string> reference_ids_for_entity(const std::string& entity_id) const;

 private:
  DatasetSchema schema_;
  std::vector<Package> packages_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace meg
