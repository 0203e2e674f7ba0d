#include "meg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace meg {

using nlohmann::json;

namespace {

std::string entity_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "e%04zu", i);
  return buf;
}

std::string package_name(const std::string& entity, std::size_t j) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_p%03zu", j);
  return entity + buf;
}

void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  if (s == 0.0) throw std::runtime_error("generator produced a zero vector");
  for (double& x : v) x /= s;
}

std::vector<double> draw_unit_vector(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.gaussian();
  normalize(v);
  return v;
}

std::vector<double> draw_around(const std::vector<double>& centroid, double spread, Rng& rng) {
  std::vector<double> v(centroid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = centroid[i] + spread * rng.gaussian();
  normalize(v);
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void GenerationConfig::validate() const {
  if (num_entities < 2) throw std::invalid_argument("generator: need at least 2 entities");
  if (packages_per_entity < 3) {
    throw std::invalid_argument("generator: need at least 3 packages per entity");
  }
  if (modality_dims.empty()) throw std::invalid_argument("generator: no modalities configured");
  for (const auto& [name, dim] : modality_dims) {
    if (dim == 0) throw std::invalid_argument("generator: modality '" + name + "' has dimension 0");
  }
  if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
    throw std::invalid_argument("generator: split fractions must sum to 1");
  }
  if (train_fraction <= 0.0 || val_fraction <= 0.0 || test_fraction <= 0.0) {
    throw std::invalid_argument("generator: split fractions must be positive");
  }
  if (manipulation_rate < 0.0 || manipulation_rate > 1.0) {
    throw std::invalid_argument("generator: manipulation_rate must lie in [0, 1]");
  }
  if (cluster_spread < 0.0) throw std::invalid_argument("generator: cluster_spread must be >= 0");
  if (reference_fraction <= 0.0 || reference_fraction >= 1.0) {
    throw std::invalid_argument("generator: reference_fraction must lie in (0, 1)");
  }
  if (manipulation_rate > 0.0 && manipulable_modalities.empty()) {
    throw std::invalid_argument("generator: manipulation_rate > 0 with no manipulable modalities");
  }
  for (const std::string& m : manipulable_modalities) {
    if (!modality_dims.count(m)) {
      throw std::invalid_argument("generator: manipulable modality '" + m + "' not in modality_dims");
    }
  }
}

EntityCentroids::EntityCentroids(const GenerationConfig& config, Rng& rng) {
  entity_ids_.reserve(config.num_entities);
  centroids_.reserve(config.num_entities);
  for (std::size_t e = 0; e < config.num_entities; ++e) {
    entity_ids_.push_back(entity_name(e));
    std::map<std::string, std::vector<double>> c;
    for (const auto& [name, dim] : config.modality_dims) {
      c.emplace(name, draw_unit_vector(dim, rng));
    }
    centroids_.push_back(std::move(c));
  }
}

std::string EntityCentroids::nearest_entity(const std::string& entity_id) const {
  auto it = std::find(entity_ids_.begin(), entity_ids_.end(), entity_id);
  if (it == entity_ids_.end()) throw std::invalid_argument("unknown entity '" + entity_id + "'");
  const std::size_t self = static_cast<std::size_t>(it - entity_ids_.begin());
  if (entity_ids_.size() < 2) throw std::invalid_argument("nearest_entity: need >= 2 entities");

  double best = 0.0;
  std::size_t best_idx = entity_ids_.size();
  for (std::size_t j = 0; j < entity_ids_.size(); ++j) {
    if (j == self) continue;
    double score = 0.0;
    for (const auto& [name, c] : centroids_[self]) score += dot(c, centroids_[j].at(name));
    if (best_idx == entity_ids_.size() || score > best ||
        (score == best && entity_ids_[j] < entity_ids_[best_idx])) {
      best = score;
      best_idx = j;
    }
  }
  return entity_ids_[best_idx];
}

GenerationSummary generate(const GenerationConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);

  Rng rng(config.seed);
  EntityCentroids entities(config, rng);
  const std::size_t E = config.num_entities;

  // Disjoint entity split assignment.
  std::vector<std::size_t> order(E);
  for (std::size_t i = 0; i < E; ++i) order[i] = i;
  rng.shuffle(order);
  std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.val_fraction * static_cast<double>(E))));
  std::size_t n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.test_fraction * static_cast<double>(E))));
  if (n_val + n_test >= E) throw std::invalid_argument("generator: too few entities for the split fractions");
  std::vector<Split> entity_split(E);
  for (std::size_t i = 0; i < E; ++i) {
    if (i < n_val) entity_split[order[i]] = Split::val;
    else if (i < n_val + n_test) entity_split[order[i]] = Split::test;
    else entity_split[order[i]] = Split::train;
  }

  const std::size_t ppe = config.packages_per_entity;
  std::size_t n_ref_per_entity = static_cast<std::size_t>(std::llround(config.reference_fraction * static_cast<double>(ppe)));
  n_ref_per_entity = std::clamp<std::size_t>(n_ref_per_entity, 1, ppe - 1);

  GenerationSummary summary;
  summary.manifest_path = out_dir / "manifest.jsonl";
  summary.audit_path = out_dir / "audit.jsonl";

  std::ofstream manifest(summary.manifest_path, std::ios::trunc);
  std::ofstream audit(summary.audit_path, std::ios::trunc);
  if (!manifest || !audit) throw std::runtime_error("generator: cannot write to " + out_dir.string());

  {
    json schema_line;
    for (const auto& [name, dim] : config.modality_dims) schema_line["schema"][name] = dim;
    manifest << schema_line.dump() << "\n";
  }

  for (std::size_t e = 0; e < E; ++e) {
    const std::string& entity = entities.entity_ids()[e];
    const auto& centroid = entities.centroids(e);
    for (std::size_t p = 0; p < ppe; ++p) {
      // Clean draw first so the counterfactual is well-defined.
      std::map<std::string, std::vector<double>> mods;
      for (const auto& [name, c] : centroid) {
        mods.emplace(name, draw_around(c, config.cluster_spread, rng));
      }

      const bool is_reference = p < n_ref_per_entity;
      const Split split = is_reference ? Split::reference : entity_split[e];
      const std::string id = package_name(entity, p);

      bool tampered = false;
      std::vector<std::string> manipulated;
      std::string target_entity;
      if (!is_reference && config.manipulation_rate > 0.0 && rng.bernoulli(config.manipulation_rate)) {
        tampered = true;
        target_entity = entities.nearest_entity(entity);
        const std::size_t target_idx = static_cast<std::size_t>(
            std::find(entities.entity_ids().begin(), entities.entity_ids().end(), target_entity) -
            entities.entity_ids().begin());
        if (config.coherent_pair) {
          manipulated = config.manipulable_modalities;
          std::sort(manipulated.begin(), manipulated.end());
        } else {
          manipulated.push_back(
              config.manipulable_modalities[rng.index(config.manipulable_modalities.size())]);
        }
        json counterfactual;
        for (const auto& [name, vec] : mods) counterfactual[name] = vec;
        for (const std::string& m : manipulated) {
          std::vector<double> swapped =
              draw_around(entities.centroids(target_idx).at(m), config.cluster_spread, rng);
          mods[m] = std::move(swapped);
          json record;
          record["id"] = id;
          record["manipulated_modality"] = m;
          record["source_entity"] = entity;
          record["target_entity"] = target_entity;
          record["counterfactual_modalities"] = counterfactual;
          audit << record.dump() << "\n";
        }
        ++summary.n_tampered;
      }

      json line;
      line["id"] = id;
      line["split"] = to_string(split);
      line["label"] = tampered ? "tampered" : "clean";
      line["entity_id"] = entity;
      for (const auto& [name, vec] : mods) line["modalities"][name] = vec;
      manifest << line.dump() << "\n";

      switch (split) {
        case Split::reference: ++summary.n_reference; break;
        case Split::train: ++summary.n_train; break;
        case Split::val: ++summary.n_val; break;
        case Split::test: ++summary.n_test; break;
      }
    }
  }
  if (!manifest || !audit) throw std::runtime_error("generator: write failed in " + out_dir.string());
  return summary;
}

}  // namespace meg
