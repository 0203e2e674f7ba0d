#include "meg/config_io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace meg {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config: " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: " + path.string() + ": expected an object");
  return j;
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::filesystem::path& path) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw std::runtime_error("config: " + path.string() + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

ModelConfig load_model_config(const std::filesystem::path& path) {
  const json j = load_json(path);
  reject_unknown(j,
                 {"hidden", "node_dim", "conv_width", "timesteps", "epsilon", "cross_modal",
                  "variant", "detector_hidden"},
                 path);
  ModelConfig cfg;
  cfg.hidden = j.value("hidden", cfg.hidden);
  cfg.node_dim = j.value("node_dim", cfg.node_dim);
  cfg.conv_width = j.value("conv_width", cfg.conv_width);
  cfg.timesteps = j.value("timesteps", cfg.timesteps);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.cross_modal = j.value("cross_modal", cfg.cross_modal);
  cfg.detector_hidden = j.value("detector_hidden", cfg.detector_hidden);
  if (j.contains("variant")) cfg.variant = variant_from_string(j["variant"].get<std::string>());
  cfg.validate();
  return cfg;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  const json j = load_json(path);
  reject_unknown(j,
                 {"batch_size", "learning_rate", "epochs", "k_train", "seed",
                  "val_check_interval", "cache_retrievals"},
                 path);
  TrainConfig cfg;
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.k_train = j.value("k_train", cfg.k_train);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.val_check_interval = j.value("val_check_interval", cfg.val_check_interval);
  cfg.cache_retrievals = j.value("cache_retrievals", cfg.cache_retrievals);
  cfg.validate();
  return cfg;
}

GenerationConfig load_generation_config(const std::filesystem::path& path) {
  const json j = load_json(path);
  reject_unknown(j,
                 {"num_entities", "packages_per_entity", "modality_dims", "cluster_spread",
                  "manipulation_rate", "seed", "split_fractions", "reference_fraction",
                  "manipulable_modalities", "coherent_pair"},
                 path);
  GenerationConfig cfg;
  cfg.num_entities = j.value("num_entities", cfg.num_entities);
  cfg.packages_per_entity = j.value("packages_per_entity", cfg.packages_per_entity);
  if (j.contains("modality_dims")) {
    cfg.modality_dims.clear();
    for (const auto& [name, dim] : j["modality_dims"].items()) {
      cfg.modality_dims[name] = dim.get<std::size_t>();
    }
  }
  cfg.cluster_spread = j.value("cluster_spread", cfg.cluster_spread);
  cfg.manipulation_rate = j.value("manipulation_rate", cfg.manipulation_rate);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("split_fractions")) {
    const json& f = j["split_fractions"];
    reject_unknown(f, {"train", "val", "test"}, path);
    cfg.train_fraction = f.value("train", cfg.train_fraction);
    cfg.val_fraction = f.value("val", cfg.val_fraction);
    cfg.test_fraction = f.value("test", cfg.test_fraction);
  }
  cfg.reference_fraction = j.value("reference_fraction", cfg.reference_fraction);
  if (j.contains("manipulable_modalities")) {
    cfg.manipulable_modalities = j["manipulable_modalities"].get<std::vector<std::string>>();
  }
  cfg.coherent_pair = j.value("coherent_pair", cfg.coherent_pair);
  cfg.validate();
  return cfg;
}

}  // namespace meg
